#include "mono3d/kitti_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "mono3d/error.hpp"

namespace mono3d {

namespace {

constexpr std::array<std::string_view, 16> kFieldNames = {
    "type",    "truncated", "occluded", "alpha",      "bbox_left",
    "bbox_top", "bbox_right", "bbox_bottom", "height", "width",
    "length",  "location_x", "location_y", "location_z", "rotation_y",
    "score"};

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

double parse_number(std::string_view token, std::string_view field,
                    int line_number) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kParse,
                fmt::format("line {}: field '{}' is not a number: '{}'",
                            line_number, field, token));
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ClassId::ClassId(ObjectClass kind) : kind_(kind) {
  switch (kind) {
    case ObjectClass::kCar: name_ = "Car"; break;
    case ObjectClass::kPedestrian: name_ = "Pedestrian"; break;
    case ObjectClass::kCyclist: name_ = "Cyclist"; break;
    case ObjectClass::kDontCare: name_ = "DontCare"; break;
    case ObjectClass::kOther: name_ = "Other"; break;
  }
}

ClassId ClassId::from_name(std::string_view name) {
  if (name == "Car") return car();
  if (name == "Pedestrian") return pedestrian();
  if (name == "Cyclist") return cyclist();
  if (name == "DontCare") return dont_care();
  ClassId other;
  other.kind_ = ObjectClass::kOther;
  other.name_ = std::string(name);
  return other;
}

const std::vector<ClassId>& evaluation_classes() {
  static const std::vector<ClassId> classes = {
      ClassId::car(), ClassId::pedestrian(), ClassId::cyclist()};
  return classes;
}

Object3D parse_label_line(std::string_view line, int line_number) {
  const auto fields = split_whitespace(line);
  if (fields.size() != 15 && fields.size() != 16) {
    throw Error(ErrorCode::kFieldCount,
                fmt::format("line {}: FieldCount({}): expected 15 or 16 fields",
                            line_number, fields.size()));
  }
  double v[16] = {};
  for (std::size_t i = 1; i < fields.size(); ++i) {
    v[i] = parse_number(fields[i], kFieldNames[i], line_number);
  }
  if (v[2] != std::floor(v[2])) {
    throw Error(ErrorCode::kParse,
                fmt::format("line {}: field 'occluded' is not an integer: '{}'",
                            line_number, fields[2]));
  }

  Object3D obj;
  obj.cls = ClassId::from_name(fields[0]);
  obj.truncated = v[1];
  obj.occluded = static_cast<int>(v[2]);
  obj.alpha = v[3];
  obj.bbox = {v[4], v[5], v[6], v[7]};
  obj.dims = {v[8], v[9], v[10]};
  obj.location = {v[11], v[12], v[13]};
  obj.rotation_y = v[14];
  if (fields.size() == 16) obj.score = v[15];
  return obj;
}

std::vector<Object3D> parse_label_file(std::string_view text) {
  std::vector<Object3D> objects;
  int line_number = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_number;
    if (is_blank(line)) continue;
    objects.push_back(parse_label_line(line, line_number));
  }
  return objects;
}

std::string format_kitti_number(double value) {
  for (int precision = 2; precision <= 17; ++precision) {
    std::string text = fmt::format("{:.{}f}", value, precision);
    double back = 0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    if (back == value) {
      if (text == "-0.00") text = "0.00";
      return text;
    }
  }
  return fmt::format("{}", value);
}

std::string serialize_object(const Object3D& obj) {
  std::string out = obj.cls.name();
  auto put = [&out](double value) {
    out += ' ';
    out += format_kitti_number(value);
  };
  put(obj.truncated);
  out += fmt::format(" {}", obj.occluded);
  put(obj.alpha);
  put(obj.bbox.left);
  put(obj.bbox.top);
  put(obj.bbox.right);
  put(obj.bbox.bottom);
  put(obj.dims.height);
  put(obj.dims.width);
  put(obj.dims.length);
  put(obj.location.x);
  put(obj.location.y);
  put(obj.location.z);
  put(obj.rotation_y);
  if (obj.score) put(*obj.score);
  return out;
}

std::string serialize_label_file(const std::vector<Object3D>& objects) {
  std::string out;
  for (const auto& obj : objects) {
    out += serialize_object(obj);
    out += '\n';
  }
  return out;
}

Calibration parse_calib(std::string_view text) {
  int line_number = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_number;
    line = trim(line);
    if (!line.starts_with("P2:")) continue;
    const auto tokens = split_whitespace(line.substr(3));
    if (tokens.size() != 12) {
      throw Error(ErrorCode::kFieldCount,
                  fmt::format("calib line {}: P2 has {} values, expected 12",
                              line_number, tokens.size()));
    }
    Calibration calib;
    for (std::size_t i = 0; i < 12; ++i) {
      calib.p2[i] = parse_number(tokens[i], fmt::format("P2[{}]", i), line_number);
    }
    if (calib.at(0, 0) == 0.0 || calib.at(1, 1) == 0.0) {
      throw Error(ErrorCode::kParse, "calib: P2 has a zero focal length");
    }
    return calib;
  }
  throw Error(ErrorCode::kMissingP2, "calib: no 'P2:' line");
}

std::string serialize_calib(const Calibration& calib) {
  std::string out = "P2:";
  for (double v : calib.p2) out += fmt::format(" {}", v);
  out += '\n';
  return out;
}

std::vector<std::string> load_split(std::string_view text) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  int line_number = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_number;
    line = trim(line);
    if (line.empty()) continue;
    std::string id(line);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicate,
                  fmt::format("split line {}: Duplicate frame id '{}'",
                              line_number, id));
    }
    ids.push_back(std::move(id));
  }
  return ids;
}

void clamp_boxes(std::vector<Object3D>& objects, ImageDims dims) {
  const double w = dims.width;
  const double h = dims.height;
  for (auto& obj : objects) {
    auto& b = obj.bbox;
    b.left = std::clamp(b.left, 0.0, w);
    b.right = std::clamp(b.right, 0.0, w);
    b.top = std::clamp(b.top, 0.0, h);
    b.bottom = std::clamp(b.bottom, 0.0, h);
    if (b.right < b.left) b.right = b.left;
    if (b.bottom < b.top) b.bottom = b.top;
  }
}

std::filesystem::path KittiPaths::image(std::string_view id) const {
  return root / "image_2" / (std::string(id) + ".png");
}
std::filesystem::path KittiPaths::label(std::string_view id) const {
  return root / "label_2" / (std::string(id) + ".txt");
}
std::filesystem::path KittiPaths::calib(std::string_view id) const {
  return root / "calib" / (std::string(id) + ".txt");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

FrameSample load_frame(const KittiPaths& paths, const std::string& frame_id) {
  FrameSample frame;
  frame.frame_id = frame_id;
  frame.image = read_png(paths.image(frame_id));
  const auto label_path = paths.label(frame_id);
  try {
    frame.objects = parse_label_file(read_text_file(label_path));
    frame.calib = parse_calib(read_text_file(paths.calib(frame_id)));
  } catch (const Error& e) {
    throw Error(e.code(), frame_id + ": " + e.what());
  }
  clamp_boxes(frame.objects, frame.image.dims());
  return frame;
}

void write_frame(const KittiPaths& paths, const FrameSample& frame) {
  std::filesystem::create_directories(paths.image(frame.frame_id).parent_path());
  std::filesystem::create_directories(paths.label(frame.frame_id).parent_path());
  std::filesystem::create_directories(paths.calib(frame.frame_id).parent_path());
  write_png(paths.image(frame.frame_id), frame.image);
  write_text_file(paths.label(frame.frame_id), serialize_label_file(frame.objects));
  write_text_file(paths.calib(frame.frame_id), serialize_calib(frame.calib));
}

}  // namespace mono3d
