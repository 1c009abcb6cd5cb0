#include "cli/dataset.hpp"

#include "mono3d/error.hpp"

namespace mono3d::cli {

std::vector<std::string> read_split_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kIo, "split file not found: " + path.string());
  }
  return load_split(read_text_file(path));
}

std::vector<std::string> unresolved_frames(const KittiPaths& paths,
                                           const std::vector<std::string>& ids,
                                           bool need_image, bool need_calib) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    const bool ok = std::filesystem::is_regular_file(paths.label(id)) &&
                    (!need_image || std::filesystem::is_regular_file(paths.image(id))) &&
                    (!need_calib || std::filesystem::is_regular_file(paths.calib(id)));
    if (!ok) missing.push_back(id);
  }
  return missing;
}

FramePool make_pool(const KittiPaths& paths, const std::vector<std::string>& ids) {
  FramePool pool;
  pool.ids = ids;
  pool.dims.reserve(ids.size());
  for (const auto& id : ids) pool.dims.push_back(read_png_dims(paths.image(id)));
  pool.load = [paths](const std::string& id) { return load_frame(paths, id); };
  return pool;
}

}  // namespace mono3d::cli
