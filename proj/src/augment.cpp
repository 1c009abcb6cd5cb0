#include "mono3d/augment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "mono3d/error.hpp"
#include "mono3d/keyed_rng.hpp"

namespace mono3d {

namespace {

// Stream tags keep the partner draw and the hole draws of one step apart.
constexpr std::uint64_t kPartnerStream = 0x7061727472ULL;

void require_same_dims(const FrameSample& a, const FrameSample& b) {
  if (a.image.dims() != b.image.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("DimensionMismatch: {} is {}x{}, {} is {}x{}",
                            a.frame_id, a.image.width(), a.image.height(),
                            b.frame_id, b.image.width(), b.image.height()));
  }
}

FrameSample union_labels(const FrameSample& a, const FrameSample& b) {
  FrameSample out;
  out.frame_id = a.frame_id;
  out.calib = a.calib;
  out.objects = a.objects;
  out.objects.insert(out.objects.end(), b.objects.begin(), b.objects.end());
  out.object_sources.reserve(out.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    out.object_sources.push_back(a.source_of(i));
  }
  for (std::size_t i = 0; i < b.objects.size(); ++i) {
    out.object_sources.push_back(b.source_of(i));
  }
  return out;
}

// Pixel columns [first, last) whose centers fall in [lo, hi).
std::pair<int, int> covered_range(double lo, double hi, int limit) {
  const int first = std::clamp(static_cast<int>(std::ceil(lo - 0.5)), 0, limit);
  const int last = std::clamp(static_cast<int>(std::ceil(hi - 0.5)), 0, limit);
  return {first, std::max(first, last)};
}

template <typename Blend>
FrameSample blend_under_mask(const FrameSample& a, const FrameSample& b,
                             Blend blend) {
  require_same_dims(a, b);
  FrameSample out = union_labels(a, b);
  out.image = a.image;
  const Mask mask = boxes_mask(b.objects, b.image.dims());
  for (int y = 0; y < out.image.height(); ++y) {
    for (int x = 0; x < out.image.width(); ++x) {
      if (!mask.at(x, y)) continue;
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        out.image.at(x, y, c) = blend(a.image.at(x, y, c), b.image.at(x, y, c));
      }
    }
  }
  return out;
}

FrameSample cutout_step(const FrameSample& a, const AugmentConfig& cfg,
                        std::uint64_t stream) {
  FrameSample out = a;
  std::array<std::uint8_t, 3> fill{0, 0, 0};
  if (cfg.fill == CutoutFill::kChannelMean && !a.image.empty()) {
    std::array<std::uint64_t, 3> sums{0, 0, 0};
    const auto px = a.image.data();
    for (std::size_t i = 0; i < px.size(); ++i) sums[i % 3] += px[i];
    const std::uint64_t n = px.size() / 3;
    for (int c = 0; c < 3; ++c) {
      fill[c] = static_cast<std::uint8_t>((2 * sums[c] + n) / (2 * n));
    }
  }
  for (const auto& hole : cutout_holes(a.image.dims(), cfg, a.frame_id, stream)) {
    for (int y = hole.top; y < hole.top + hole.height; ++y) {
      for (int x = hole.left; x < hole.left + hole.width; ++x) {
        for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = fill[c];
      }
    }
  }
  return out;
}

}  // namespace

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

Mask boxes_mask(std::span<const Object3D> objects, ImageDims dims) {
  Mask mask(dims);
  for (const auto& obj : objects) {
    if (!obj.cls.is_evaluation_class()) continue;
    const auto [x0, x1] = covered_range(obj.bbox.left, obj.bbox.right, dims.width);
    const auto [y0, y1] = covered_range(obj.bbox.top, obj.bbox.bottom, dims.height);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) mask.set(x, y);
    }
  }
  return mask;
}

FrameSample box_mixup(const FrameSample& a, const FrameSample& b) {
  return blend_under_mask(a, b, [](std::uint8_t xa, std::uint8_t xb) {
    // 0.5 * xa + 0.5 * xb, rounded half away from zero.
    return static_cast<std::uint8_t>((unsigned{xa} + unsigned{xb} + 1) / 2);
  });
}

FrameSample box_cut_paste(const FrameSample& a, const FrameSample& b) {
  return blend_under_mask(a, b, [](std::uint8_t, std::uint8_t xb) { return xb; });
}

std::string_view augment_kind_name(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kBoxMixup: return "boxmixup";
    case AugmentKind::kBoxCutPaste: return "cutpaste";
    case AugmentKind::kCutout: return "cutout";
  }
  return "?";
}

AugmentKind parse_augment_kind(std::string_view name) {
  if (name == "boxmixup" || name == "mixup") return AugmentKind::kBoxMixup;
  if (name == "cutpaste" || name == "boxcutpaste") return AugmentKind::kBoxCutPaste;
  if (name == "cutout") return AugmentKind::kCutout;
  throw Error(ErrorCode::kInvalidConfig,
              fmt::format("unknown augmentation '{}'", name));
}

std::vector<AugmentKind> parse_pipeline(std::string_view text) {
  std::vector<AugmentKind> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(start, end - start);
    if (!token.empty()) out.push_back(parse_augment_kind(token));
    start = end + 1;
  }
  return out;
}

void AugmentConfig::validate() const {
  if (cutout_holes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "cutout_holes must be >= 1");
  }
  if (!(cutout_frac > 0 && cutout_frac < 1)) {
    throw Error(ErrorCode::kInvalidConfig, "cutout_frac must be in (0, 1)");
  }
}

std::vector<HoleRect> cutout_holes(ImageDims dims, const AugmentConfig& cfg,
                                   const std::string& frame_id,
                                   std::uint64_t stream) {
  cfg.validate();
  std::vector<HoleRect> holes;
  if (dims.width <= 0 || dims.height <= 0) return holes;
  const int hw = std::clamp(
      static_cast<int>(std::lround(cfg.cutout_frac * dims.width)), 1, dims.width);
  const int hh = std::clamp(
      static_cast<int>(std::lround(cfg.cutout_frac * dims.height)), 1, dims.height);
  for (int i = 0; i < cfg.cutout_holes; ++i) {
    KeyedRng rng(cfg.seed, frame_id, static_cast<std::uint64_t>(i), stream);
    const int left = static_cast<int>(rng.uniform_int(0, dims.width - hw));
    const int top = static_cast<int>(rng.uniform_int(0, dims.height - hh));
    holes.push_back({left, top, hw, hh});
  }
  return holes;
}

FrameSample cutout(const FrameSample& a, const AugmentConfig& cfg) {
  return cutout_step(a, cfg, 0);
}

AugmentResult compose(const FrameSample& a, const AugmentConfig& cfg,
                      const FramePool& pool) {
  if (cfg.pipeline.empty()) {
    throw Error(ErrorCode::kEmptyPipeline, "EmptyPipeline: no augmentations");
  }
  cfg.validate();

  AugmentResult result;
  result.sample = a;
  for (std::size_t step = 0; step < cfg.pipeline.size(); ++step) {
    const AugmentKind kind = cfg.pipeline[step];
    if (kind == AugmentKind::kCutout) {
      result.sample = cutout_step(result.sample, cfg, step);
      continue;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.ids.size(); ++i) {
      if (pool.ids[i] != a.frame_id && pool.dims[i] == a.image.dims()) {
        candidates.push_back(i);
      }
    }
    if (candidates.empty()) {
      throw Error(ErrorCode::kEmptyPool,
                  fmt::format("EmptyPool: no partner frame with dims {}x{} for {}",
                              a.image.width(), a.image.height(), a.frame_id));
    }
    KeyedRng rng(cfg.seed, a.frame_id, step, kPartnerStream);
    const auto pick = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1));
    const FrameSample partner = pool.load(pool.ids[candidates[pick]]);
    result.partners.push_back(partner.frame_id);
    result.sample = kind == AugmentKind::kBoxMixup
                        ? box_mixup(result.sample, partner)
                        : box_cut_paste(result.sample, partner);
  }
  return result;
}

}  // namespace mono3d
