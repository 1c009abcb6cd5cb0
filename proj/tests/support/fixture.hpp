#pragma once

// Synthetic KITTI-layout datasets written to a scratch directory.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mono3d/image.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d::fixture {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("mono3d_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::string frame_name(int i) {
  std::string s = std::to_string(i);
  return std::string(6 - s.size(), '0') + s;
}

inline Calibration test_calib() {
  Calibration c;
  c.p2 = {700, 0, 160, 0, 0, 700, 60, 0, 0, 0, 1, 0};
  return c;
}

// Object whose 2D box is the projection-free footprint of a car at lateral
// offset `x` and depth `z`, kept inside a 320x120 image.
inline Object3D synthetic_object(ClassId cls, double x, double z) {
  Object3D o;
  o.cls = std::move(cls);
  o.dims = {1.5, 1.6, 3.9};
  o.location = {x, 1.6, z};
  o.rotation_y = 0.1 * x;
  o.alpha = o.rotation_y;
  const double u = 160 + 700 * x / z;
  const double half = 700 * 0.9 / z;
  o.bbox = {std::max(0.0, u - half), 40, std::min(319.0, u + half), 40 + 700 * 1.5 / z};
  return o;
}

// `n` frames of 320x120 noise with up to four objects each, cycling through
// the evaluation classes, plus split file "all.txt".
inline void write_dataset(const fs::path& root, int n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  const std::vector<ClassId> classes = {ClassId::car(), ClassId::pedestrian(), ClassId::cyclist()};
  KittiPaths paths{root};
  std::string split;
  for (int i = 0; i < n; ++i) {
    FrameSample f;
    f.frame_id = frame_name(i);
    std::vector<std::uint8_t> pixels(320 * 120 * 3);
    for (auto& p : pixels) p = static_cast<std::uint8_t>(px(rng));
    f.image = ImageBuffer(320, 120, std::move(pixels));
    f.calib = test_calib();
    for (int k = 0; k < 1 + i % 4; ++k)
      f.objects.push_back(synthetic_object(classes[(i + k) % 3], -2 + 1.5 * k, 12 + 3 * k + i % 5));
    write_frame(paths, f);
    split += f.frame_id + "\n";
  }
  write_text_file(root / "all.txt", split);
}

// Label set with a score column on every object.
inline void write_detections(const fs::path& label_dir, const fs::path& det_dir, double score) {
  fs::create_directories(det_dir);
  for (const auto& entry : fs::directory_iterator(label_dir)) {
    auto objs = parse_label_file(read_text_file(entry.path()));
    for (auto& o : objs) o.score = score;
    write_text_file(det_dir / entry.path().filename(), serialize_label_file(objs));
  }
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Concatenation of every regular file under `dir` (relative path + bytes),
// in sorted path order. Manifests are skipped since they hold wall time.
inline std::string tree_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string().find("manifest") == std::string::npos)
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += fs::relative(f, dir).string() + "\n" + slurp(f);
  return out;
}

}  // namespace mono3d::fixture
