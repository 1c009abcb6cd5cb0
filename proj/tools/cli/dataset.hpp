#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mono3d/augment.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d::cli {

std::vector<std::string> read_split_file(const std::filesystem::path& path);

// Frame ids whose image or label file is absent under `paths`.
std::vector<std::string> unresolved_frames(const KittiPaths& paths,
                                           const std::vector<std::string>& ids,
                                           bool need_image, bool need_calib);

// Partner pool over `ids`; dims come from PNG headers, frames load lazily.
FramePool make_pool(const KittiPaths& paths, const std::vector<std::string>& ids);

}  // namespace mono3d::cli
