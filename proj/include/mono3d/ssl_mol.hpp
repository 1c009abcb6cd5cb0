#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mono3d/image.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

// Integer pixel rectangle, half-open: [left, right) x [top, bottom).
struct PixelRect {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  int width() const { return right - left; }
  int height() const { return bottom - top; }
  long long area() const {
    return static_cast<long long>(width()) * height();
  }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct RandomWindow {
  PixelRect rect;
  std::string frame_id;
  int index = 0;
};

// Per-class area proportions followed by the background remainder.
struct SoftLabel {
  std::vector<double> proportions;

  double background() const { return proportions.back(); }
  double sum() const;
};

struct MOLConfig {
  int n_windows = 16;
  // Window width and height are drawn as fractions of the image dims.
  double min_frac = 0.1;
  double max_frac = 0.9;
  bool require_foreground = false;
  int max_retries = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

// Windows of `frame_id`. Each window i is a pure function of
// (seed, frame_id, i). With require_foreground, a window is redrawn (up to
// max_retries times) while it covers no object of `classes`; the last draw
// is accepted regardless.
std::vector<RandomWindow> sample_windows(
    ImageDims dims, const MOLConfig& cfg, const std::string& frame_id,
    std::span<const Object3D> objects = {},
    const std::vector<ClassId>& classes = evaluation_classes());

// Area of the union of `boxes` clipped to `clip`.
double union_area(std::span<const Box2D> boxes, const Box2D& clip);

// Component c is the area of the union of class-c boxes inside the window
// divided by the window area; background takes the remainder. Objects of
// other types (DontCare, Van, ...) are ignored. When boxes of different
// classes overlap so that the class components exceed 1, they are rescaled
// to sum to 1 and background is 0.
SoftLabel soft_label(const PixelRect& window, std::span<const Object3D> objects,
                     const std::vector<ClassId>& classes = evaluation_classes());

struct MolRecord {
  std::string frame_id;
  int index = 0;
  PixelRect window;
  SoftLabel label;
};

// {"frame": ..., "window": [l, t, r, b], "label": [c1, ..., ck, bg]}
std::string mol_record_to_jsonl(const MolRecord& record);

struct MolFrame {
  std::string frame_id;
  ImageDims dims;
  std::vector<Object3D> objects;
};

using MolFrameLoader = std::function<MolFrame(const std::string& frame_id)>;

struct FrameError {
  std::string frame_id;
  std::string message;
};

struct MolDataset {
  std::vector<MolRecord> records;  // sorted by frame id, then window index
  std::vector<FrameError> errors;  // frames that failed to load
};

// Per-frame load failures are collected in `errors` and generation moves on.
MolDataset generate_mol_dataset(std::span<const std::string> frame_ids,
                                const MolFrameLoader& load,
                                const MOLConfig& cfg,
                                const std::vector<ClassId>& classes =
                                    evaluation_classes(),
                                int jobs = 1);

}  // namespace mono3d
