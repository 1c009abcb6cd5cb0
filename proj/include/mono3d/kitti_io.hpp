#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mono3d/image.hpp"

namespace mono3d {

enum class ObjectClass { kCar, kPedestrian, kCyclist, kDontCare, kOther };

// KITTI object type. Unknown type strings (Van, Truck, Tram, ...) are kept
// verbatim as kOther so that serialization reproduces them.
class ClassId {
 public:
  ClassId() = default;
  explicit ClassId(ObjectClass kind);

  static ClassId from_name(std::string_view name);
  static ClassId car() { return ClassId(ObjectClass::kCar); }
  static ClassId pedestrian() { return ClassId(ObjectClass::kPedestrian); }
  static ClassId cyclist() { return ClassId(ObjectClass::kCyclist); }
  static ClassId dont_care() { return ClassId(ObjectClass::kDontCare); }

  ObjectClass kind() const { return kind_; }
  const std::string& name() const { return name_; }

  bool is_evaluation_class() const {
    return kind_ == ObjectClass::kCar || kind_ == ObjectClass::kPedestrian ||
           kind_ == ObjectClass::kCyclist;
  }

  friend bool operator==(const ClassId& a, const ClassId& b) {
    return a.kind_ == b.kind_ && a.name_ == b.name_;
  }
  friend auto operator<=>(const ClassId& a, const ClassId& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.name_ <=> b.name_;
  }

 private:
  ObjectClass kind_ = ObjectClass::kOther;
  std::string name_;
};

// The evaluation classes C, in reporting order.
const std::vector<ClassId>& evaluation_classes();

struct Box2D {
  double left = 0;
  double top = 0;
  double right = 0;
  double bottom = 0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const {
    return width() > 0 && height() > 0 ? width() * height() : 0.0;
  }
  friend bool operator==(const Box2D&, const Box2D&) = default;
};

struct Dimensions {
  double height = 0;
  double width = 0;
  double length = 0;
  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// One KITTI label record. Ground truth has 15 fields, detections carry a
// 16th (score). DontCare rows use -1/-10/-1000 sentinels, which are kept.
struct Object3D {
  ClassId cls;
  double truncated = 0;
  int occluded = 0;
  double alpha = 0;
  Box2D bbox;
  Dimensions dims;
  Vec3 location;  // bottom-face center, camera frame
  double rotation_y = 0;
  std::optional<double> score;

  friend bool operator==(const Object3D&, const Object3D&) = default;
};

Object3D parse_label_line(std::string_view line, int line_number = 1);
std::vector<Object3D> parse_label_file(std::string_view text);
std::string serialize_object(const Object3D& obj);
std::string serialize_label_file(const std::vector<Object3D>& objects);

// Shortest fixed-point rendering with at least two decimals that parses back
// to `value` within 1e-9; KITTI-precision values print exactly as the devkit.
std::string format_kitti_number(double value);

struct Calibration {
  std::array<double, 12> p2{};  // row-major 3x4

  double at(int row, int col) const { return p2[row * 4 + col]; }
  friend bool operator==(const Calibration&, const Calibration&) = default;
};

Calibration parse_calib(std::string_view text);
std::string serialize_calib(const Calibration& calib);

std::vector<std::string> load_split(std::string_view text);

struct FrameSample {
  std::string frame_id;
  ImageBuffer image;
  std::vector<Object3D> objects;
  Calibration calib;
  // Source frame of each object; empty means every object is native to
  // frame_id. Filled by pairing augmentations.
  std::vector<std::string> object_sources;

  const std::string& source_of(std::size_t i) const {
    return object_sources.empty() ? frame_id : object_sources[i];
  }
};

// Clamp every bbox into [0, W] x [0, H].
void clamp_boxes(std::vector<Object3D>& objects, ImageDims dims);

// KITTI directory layout below `root`: image_2/<id>.png, label_2/<id>.txt,
// calib/<id>.txt.
struct KittiPaths {
  std::filesystem::path root;

  std::filesystem::path image(std::string_view id) const;
  std::filesystem::path label(std::string_view id) const;
  std::filesystem::path calib(std::string_view id) const;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Loads image, labels and calibration; boxes are clamped to the image.
FrameSample load_frame(const KittiPaths& paths, const std::string& frame_id);
void write_frame(const KittiPaths& paths, const FrameSample& frame);

}  // namespace mono3d
