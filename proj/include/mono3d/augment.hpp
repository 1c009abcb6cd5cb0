#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mono3d/image.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

// Binary H x W mask.
class Mask {
 public:
  Mask() = default;
  explicit Mask(ImageDims dims)
      : dims_(dims),
        bits_(static_cast<std::size_t>(dims.width) * dims.height, 0) {}

  ImageDims dims() const { return dims_; }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y) { bits_[index(x, y)] = 1; }
  std::size_t count() const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * dims_.width + x;
  }

  ImageDims dims_;
  std::vector<std::uint8_t> bits_;
};

// Union of the evaluation-class bboxes. A pixel is set when its center
// (x + 0.5, y + 0.5) lies inside [left, right) x [top, bottom).
Mask boxes_mask(std::span<const Object3D> objects, ImageDims dims);

// Pixels under b's box mask become round((a + b) / 2) (half away from zero),
// all others keep a. Labels are a's followed by b's; calib is a's.
FrameSample box_mixup(const FrameSample& a, const FrameSample& b);

// Pixels under b's box mask are copied from b, all others keep a.
FrameSample box_cut_paste(const FrameSample& a, const FrameSample& b);

enum class AugmentKind { kBoxMixup, kBoxCutPaste, kCutout };
enum class CutoutFill { kZero, kChannelMean };
enum class PartnerPolicy { kUniformSameDims };

std::string_view augment_kind_name(AugmentKind kind);  // boxmixup, cutpaste, cutout
AugmentKind parse_augment_kind(std::string_view name);
std::vector<AugmentKind> parse_pipeline(std::string_view comma_separated);

struct AugmentConfig {
  std::vector<AugmentKind> pipeline;
  int cutout_holes = 4;
  double cutout_frac = 0.1;  // hole side, per image dimension
  CutoutFill fill = CutoutFill::kZero;
  std::uint64_t seed = 0;
  PartnerPolicy partner_policy = PartnerPolicy::kUniformSameDims;

  // Throws Error(kInvalidConfig); an empty pipeline is checked by compose().
  void validate() const;
};

// Hole rectangles for `frame_id`, each keyed by (seed, frame_id, hole index).
struct HoleRect {
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;
};
std::vector<HoleRect> cutout_holes(ImageDims dims, const AugmentConfig& cfg,
                                   const std::string& frame_id,
                                   std::uint64_t stream = 0);

// Erases cfg.cutout_holes rectangles of cutout_frac x each dimension.
// Labels are unchanged.
FrameSample cutout(const FrameSample& a, const AugmentConfig& cfg);

// Partner candidates for pairing augmentations. `dims[i]` belongs to
// `ids[i]`; `load` materializes a frame on demand.
struct FramePool {
  std::vector<std::string> ids;
  std::vector<ImageDims> dims;
  std::function<FrameSample(const std::string&)> load;
};

struct AugmentResult {
  FrameSample sample;
  std::vector<std::string> partners;  // in pipeline order
};

// Applies cfg.pipeline left to right. For step i of a pairing augmentation
// the partner is drawn uniformly among pool frames with a's dimensions
// (excluding a itself), keyed by (seed, a.frame_id, i).
AugmentResult compose(const FrameSample& a, const AugmentConfig& cfg,
                      const FramePool& pool);

}  // namespace mono3d
