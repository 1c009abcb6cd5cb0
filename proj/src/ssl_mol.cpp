#include "mono3d/ssl_mol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "mono3d/error.hpp"
#include "mono3d/keyed_rng.hpp"
#include "mono3d/parallel.hpp"

namespace mono3d {

namespace {

int draw_side(KeyedRng& rng, int full, double min_frac, double max_frac) {
  const double frac = min_frac + (max_frac - min_frac) * rng.uniform();
  const int side = static_cast<int>(std::lround(frac * full));
  return std::clamp(side, 1, full);
}

PixelRect draw_window(ImageDims dims, const MOLConfig& cfg,
                      const std::string& frame_id, int index, int attempt) {
  KeyedRng rng(cfg.seed, frame_id, static_cast<std::uint64_t>(index),
               static_cast<std::uint64_t>(attempt));
  const int w = draw_side(rng, dims.width, cfg.min_frac, cfg.max_frac);
  const int h = draw_side(rng, dims.height, cfg.min_frac, cfg.max_frac);
  const int left = static_cast<int>(rng.uniform_int(0, dims.width - w));
  const int top = static_cast<int>(rng.uniform_int(0, dims.height - h));
  return {left, top, left + w, top + h};
}

Box2D to_box(const PixelRect& r) {
  return {static_cast<double>(r.left), static_cast<double>(r.top),
          static_cast<double>(r.right), static_cast<double>(r.bottom)};
}

}  // namespace

double SoftLabel::sum() const {
  return std::accumulate(proportions.begin(), proportions.end(), 0.0);
}

void MOLConfig::validate() const {
  if (n_windows < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_windows must be >= 1");
  }
  if (!(min_frac > 0 && min_frac <= max_frac && max_frac <= 1)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("scale range ({}, {}) must satisfy 0 < min <= max <= 1",
                            min_frac, max_frac));
  }
  if (max_retries < 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_retries must be >= 0");
  }
}

std::vector<RandomWindow> sample_windows(ImageDims dims, const MOLConfig& cfg,
                                         const std::string& frame_id,
                                         std::span<const Object3D> objects,
                                         const std::vector<ClassId>& classes) {
  cfg.validate();
  if (dims.width <= 0 || dims.height <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "image dims must be positive");
  }
  std::vector<RandomWindow> windows;
  windows.reserve(static_cast<std::size_t>(cfg.n_windows));
  for (int i = 0; i < cfg.n_windows; ++i) {
    PixelRect rect = draw_window(dims, cfg, frame_id, i, 0);
    if (cfg.require_foreground) {
      for (int attempt = 1; attempt <= cfg.max_retries &&
                            soft_label(rect, objects, classes).background() >= 1.0;
           ++attempt) {
        rect = draw_window(dims, cfg, frame_id, i, attempt);
      }
    }
    windows.push_back({rect, frame_id, i});
  }
  return windows;
}

double union_area(std::span<const Box2D> boxes, const Box2D& clip) {
  std::vector<Box2D> clipped;
  for (const auto& b : boxes) {
    Box2D c{std::max(b.left, clip.left), std::max(b.top, clip.top),
            std::min(b.right, clip.right), std::min(b.bottom, clip.bottom)};
    if (c.right > c.left && c.bottom > c.top) clipped.push_back(c);
  }
  if (clipped.empty()) return 0.0;

  // Sweep over x slabs; within each slab merge the covering y intervals.
  std::vector<double> xs;
  for (const auto& b : clipped) {
    xs.push_back(b.left);
    xs.push_back(b.right);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    spans.clear();
    for (const auto& b : clipped) {
      if (b.left <= x0 && b.right >= x1) spans.emplace_back(b.top, b.bottom);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double lo = spans[0].first;
    double hi = spans[0].second;
    for (std::size_t k = 1; k < spans.size(); ++k) {
      if (spans[k].first > hi) {
        covered += hi - lo;
        lo = spans[k].first;
        hi = spans[k].second;
      } else {
        hi = std::max(hi, spans[k].second);
      }
    }
    covered += hi - lo;
    total += covered * (x1 - x0);
  }
  return total;
}

SoftLabel soft_label(const PixelRect& window, std::span<const Object3D> objects,
                     const std::vector<ClassId>& classes) {
  const double window_area = static_cast<double>(window.area());
  if (!(window_area > 0)) {
    throw Error(ErrorCode::kInvalidConfig, "window has no area");
  }
  const Box2D clip = to_box(window);

  SoftLabel label;
  label.proportions.assign(classes.size() + 1, 0.0);
  double class_sum = 0.0;
  std::vector<Box2D> boxes;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!classes[c].is_evaluation_class()) continue;
    boxes.clear();
    for (const auto& obj : objects) {
      if (obj.cls == classes[c]) boxes.push_back(obj.bbox);
    }
    const double frac =
        std::clamp(union_area(boxes, clip) / window_area, 0.0, 1.0);
    label.proportions[c] = frac;
    class_sum += frac;
  }
  if (class_sum > 1.0) {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      label.proportions[c] /= class_sum;
    }
    label.proportions.back() = 0.0;
  } else {
    label.proportions.back() = 1.0 - class_sum;
  }
  return label;
}

std::string mol_record_to_jsonl(const MolRecord& record) {
  nlohmann::ordered_json j;
  j["frame"] = record.frame_id;
  j["window"] = {record.window.left, record.window.top, record.window.right,
                 record.window.bottom};
  j["label"] = record.label.proportions;
  return j.dump();
}

MolDataset generate_mol_dataset(std::span<const std::string> frame_ids,
                                const MolFrameLoader& load,
                                const MOLConfig& cfg,
                                const std::vector<ClassId>& classes, int jobs) {
  cfg.validate();
  std::vector<std::string> ids(frame_ids.begin(), frame_ids.end());
  std::sort(ids.begin(), ids.end());

  std::vector<std::vector<MolRecord>> per_frame(ids.size());
  std::vector<std::string> failures(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t f) {
    try {
      const MolFrame frame = load(ids[f]);
      for (const auto& w : sample_windows(frame.dims, cfg, ids[f],
                                          frame.objects, classes)) {
        per_frame[f].push_back(
            {ids[f], w.index, w.rect, soft_label(w.rect, frame.objects, classes)});
      }
    } catch (const std::exception& e) {
      failures[f] = e.what();
      if (failures[f].empty()) failures[f] = "unknown error";
    }
  });

  MolDataset out;
  for (std::size_t f = 0; f < ids.size(); ++f) {
    if (!failures[f].empty()) {
      out.errors.push_back({ids[f], failures[f]});
      continue;
    }
    for (auto& r : per_frame[f]) out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace mono3d
