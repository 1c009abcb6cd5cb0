#include "mono3d/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mono3d/error.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/parallel.hpp"

namespace mono3d {

namespace {

struct DifficultyLimits {
  double min_height;
  int max_occlusion;
  double max_truncation;
};

constexpr DifficultyLimits kLimits[3] = {
    {40, 0, 0.15}, {25, 1, 0.30}, {25, 2, 0.50}};

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace

std::string_view iou_kind_name(IouKind kind) {
  switch (kind) {
    case IouKind::k2D: return "2d";
    case IouKind::kBev: return "bev";
    case IouKind::k3D: return "3d";
  }
  return "?";
}

std::string_view interpolation_name(Interpolation interp) {
  return interp == Interpolation::kR11 ? "R11" : "R40";
}

std::string_view difficulty_name(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kModerate: return "moderate";
    case Difficulty::kHard: return "hard";
    case Difficulty::kAll: return "all";
  }
  return "?";
}

void EvalConfig::validate() const {
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("iou_threshold {} outside (0, 1]", iou_threshold));
  }
  if (classes.empty()) {
    throw Error(ErrorCode::kEmptyClassList, "no evaluation classes configured");
  }
  if (iou_kinds.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no IoU kinds configured");
  }
}

bool passes_difficulty(const Object3D& gt, Difficulty difficulty) {
  if (difficulty == Difficulty::kAll) return true;
  const auto& lim = kLimits[static_cast<int>(difficulty)];
  return gt.occluded <= lim.max_occlusion &&
         gt.truncated <= lim.max_truncation &&
         gt.bbox.height() > lim.min_height;
}

double iou(IouKind kind, const Object3D& a, const Object3D& b) {
  switch (kind) {
    case IouKind::k2D: return iou_2d(a.bbox, b.bbox);
    case IouKind::kBev: return iou_bev(a, b);
    case IouKind::k3D: return iou_3d(a, b);
  }
  return 0.0;
}

std::vector<Match> match_detections(std::span<const Object3D> gt,
                                    std::span<const Object3D> det,
                                    IouKind kind, const EvalConfig& cfg,
                                    const ClassId& cls) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < det.size(); ++i) {
    if (!det[i].score) {
      throw Error(ErrorCode::kMissingScore,
                  fmt::format("detection {} ({}) has no score", i,
                              det[i].cls.name()));
    }
    if (det[i].cls == cls) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *det[a].score > *det[b].score;
  });

  std::vector<std::size_t> valid_gt;
  std::vector<std::size_t> ignored_gt;
  std::vector<std::size_t> dont_care;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].cls == cls) {
      (passes_difficulty(gt[i], cfg.difficulty) ? valid_gt : ignored_gt)
          .push_back(i);
    } else if (gt[i].cls.kind() == ObjectClass::kDontCare) {
      dont_care.push_back(i);
    }
  }

  std::vector<bool> consumed(valid_gt.size(), false);
  std::vector<Match> out;
  out.reserve(order.size());
  for (std::size_t d : order) {
    double best = -1.0;
    std::size_t best_gt = valid_gt.size();
    for (std::size_t g = 0; g < valid_gt.size(); ++g) {
      if (consumed[g]) continue;
      const double overlap = iou(kind, gt[valid_gt[g]], det[d]);
      if (overlap > best) {
        best = overlap;
        best_gt = g;
      }
    }
    if (best_gt < valid_gt.size() && best > cfg.iou_threshold) {
      consumed[best_gt] = true;
      out.push_back({d, true});
      continue;
    }
    const bool on_ignored = std::any_of(
        ignored_gt.begin(), ignored_gt.end(), [&](std::size_t g) {
          return iou(kind, gt[g], det[d]) > cfg.iou_threshold;
        });
    const bool on_dont_care = std::any_of(
        dont_care.begin(), dont_care.end(), [&](std::size_t g) {
          return iou_2d(gt[g].bbox, det[d].bbox) > cfg.iou_threshold;
        });
    if (on_ignored || on_dont_care) continue;
    out.push_back({d, false});
  }
  return out;
}

APResult average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt,
                           Interpolation interpolation, ClassId cls) {
  APResult result;
  result.cls = std::move(cls);
  result.n_gt = n_gt;
  result.n_det = ranked_tp.size();
  if (n_gt == 0) {
    result.no_ground_truth = true;
    return result;
  }

  struct Counts {
    std::size_t tp;
    std::size_t seen;
  };
  std::vector<Counts> counts;
  counts.reserve(ranked_tp.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked_tp.size(); ++k) {
    if (ranked_tp[k]) ++tp;
    counts.push_back({tp, k + 1});
    result.pr_points.push_back({static_cast<double>(tp) / n_gt,
                                static_cast<double>(tp) / (k + 1)});
  }

  // Recall thresholds r_i = i / denom, compared in integers: tp/n_gt >= i/denom.
  const std::size_t denom = interpolation == Interpolation::kR40 ? 40 : 10;
  const std::size_t first = interpolation == Interpolation::kR40 ? 1 : 0;
  const std::size_t n_samples = denom - first + 1;

  // Suffix maximum of precision over the ranked list.
  std::vector<double> best_from(counts.size() + 1, 0.0);
  for (std::size_t k = counts.size(); k-- > 0;) {
    best_from[k] = std::max(best_from[k + 1], result.pr_points[k].precision);
  }

  double sum = 0.0;
  std::size_t k = 0;
  for (std::size_t i = first; i <= denom; ++i) {
    // Recall is nondecreasing along the ranking, so the first point reaching
    // r_i only moves forward.
    while (k < counts.size() && counts[k].tp * denom < i * n_gt) ++k;
    sum += best_from[k];
  }
  result.ap = sum / static_cast<double>(n_samples);
  return result;
}

static_assert(std::numeric_limits<long double>::digits >= 64,
              "exact mean identities need an extended long double");

double mean_average_precision(std::span<const APResult> aps) {
  if (aps.empty()) {
    throw Error(ErrorCode::kEmptyClassList, "mAP over an empty class list");
  }
  // Extended-precision accumulation with a single final rounding: equal APs
  // yield exactly that AP.
  long double sum = 0.0L;
  for (const auto& r : aps) sum += r.ap;
  return static_cast<double>(sum / static_cast<long double>(aps.size()));
}

ClassValues class_frequencies(std::span<const std::vector<Object3D>> gt_frames,
                              const std::vector<ClassId>& classes) {
  std::map<ClassId, std::size_t> counts;
  for (const auto& c : classes) counts[c] = 0;
  std::size_t total = 0;
  for (const auto& frame : gt_frames) {
    for (const auto& obj : frame) {
      if (!obj.cls.is_evaluation_class()) continue;
      auto it = counts.find(obj.cls);
      if (it == counts.end()) continue;
      ++it->second;
      ++total;
    }
  }
  if (total == 0) {
    throw Error(ErrorCode::kEmptyGroundTruth,
                "EmptyGroundTruth: no objects of the evaluation classes");
  }
  ClassValues freq;
  for (const auto& [cls, n] : counts) {
    freq[cls] = static_cast<double>(n) / static_cast<double>(total);
  }
  return freq;
}

ClassWeights icfw_weights(const ClassValues& freq) {
  if (freq.empty()) {
    throw Error(ErrorCode::kEmptyClassList, "no class frequencies");
  }
  double inv_sum = 0.0;
  for (const auto& [cls, f] : freq) {
    if (!(f > 0) || !std::isfinite(f)) {
      throw Error(ErrorCode::kZeroFrequency,
                  fmt::format("ZeroFrequency({}): frequency {} is not positive",
                              cls.name(), f));
    }
    inv_sum += 1.0 / f;
  }
  ClassWeights out;
  out.freq = freq;
  for (const auto& [cls, f] : freq) out.weight[cls] = (1.0 / f) / inv_sum;
  return out;
}

double icfw_map(const ClassValues& aps, const ClassWeights& weights) {
  const bool same_keys =
      aps.size() == weights.weight.size() &&
      std::equal(aps.begin(), aps.end(), weights.weight.begin(),
                 [](const auto& a, const auto& b) { return a.first == b.first; });
  if (!same_keys) {
    throw Error(ErrorCode::kKeyMismatch,
                "AP classes and weight classes differ");
  }
  // Normalizing by the stored weight sum (1 up to rounding) in extended
  // precision makes equal APs come back bit-exact.
  long double sum = 0.0L;
  long double weight_sum = 0.0L;
  for (const auto& [cls, ap] : aps) {
    const long double w = weights.weight.at(cls);
    sum += w * ap;
    weight_sum += w;
  }
  return static_cast<double>(sum / weight_sum);
}

LabelSet load_label_dir(const std::filesystem::path& dir, int jobs) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<std::vector<Object3D>> parsed(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    try {
      parsed[i] = parse_label_file(read_text_file(files[i]));
    } catch (const Error& e) {
      throw Error(e.code(), files[i].string() + ": " + e.what());
    }
  });
  LabelSet out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    out.emplace(files[i].stem().string(), std::move(parsed[i]));
  }
  return out;
}

EvalReport evaluate(const LabelSet& gt, const LabelSet& det,
                    const EvalConfig& cfg, int jobs) {
  cfg.validate();

  std::vector<std::string> missing_det;
  std::vector<std::string> unknown_det;
  for (const auto& [id, objs] : gt) {
    if (!det.contains(id)) missing_det.push_back(id);
  }
  for (const auto& [id, objs] : det) {
    if (!gt.contains(id)) unknown_det.push_back(id);
  }
  if (!missing_det.empty() || !unknown_det.empty()) {
    std::string msg = "frame id sets differ";
    if (!missing_det.empty()) {
      msg += "; missing detections for: " + join_ids(missing_det);
    }
    if (!unknown_det.empty()) {
      msg += "; detections without ground truth: " + join_ids(unknown_det);
    }
    throw Error(ErrorCode::kFrameMismatch, msg);
  }

  std::vector<const std::vector<Object3D>*> gt_frames;
  std::vector<const std::vector<Object3D>*> det_frames;
  std::vector<std::vector<Object3D>> gt_lists;
  for (const auto& [id, objs] : gt) {
    gt_frames.push_back(&objs);
    det_frames.push_back(&det.at(id));
    gt_lists.push_back(objs);
  }
  const std::size_t n_frames = gt_frames.size();

  EvalReport report;
  report.config = cfg;
  report.frames = n_frames;
  for (const auto& cls : cfg.classes) {
    report.gt_counts[cls] = 0;
    report.det_counts[cls] = 0;
  }
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (const auto& o : *gt_frames[f]) {
      if (auto it = report.gt_counts.find(o.cls); it != report.gt_counts.end()) ++it->second;
    }
    for (const auto& o : *det_frames[f]) {
      if (auto it = report.det_counts.find(o.cls); it != report.det_counts.end()) ++it->second;
    }
  }

  try {
    report.freq = class_frequencies(gt_lists, cfg.classes);
    report.weights = icfw_weights(report.freq);
  } catch (const Error& e) {
    report.warnings.push_back(fmt::format("ICFW mAP unavailable: {}", e.what()));
  }

  const std::size_t n_classes = cfg.classes.size();
  for (IouKind kind : cfg.iou_kinds) {
    // matches[f * n_classes + c]
    std::vector<std::vector<Match>> matches(n_frames * n_classes);
    parallel_for(n_frames * n_classes, jobs, [&](std::size_t job) {
      const std::size_t f = job / n_classes;
      const std::size_t c = job % n_classes;
      matches[job] = match_detections(*gt_frames[f], *det_frames[f], kind, cfg,
                                      cfg.classes[c]);
    });

    KindReport kr;
    kr.kind = kind;
    for (std::size_t c = 0; c < n_classes; ++c) {
      struct Ranked {
        double score;
        std::size_t frame;
        std::size_t rank;
        bool tp;
      };
      std::vector<Ranked> ranked;
      std::size_t n_gt = 0;
      for (std::size_t f = 0; f < n_frames; ++f) {
        const auto& m = matches[f * n_classes + c];
        for (std::size_t r = 0; r < m.size(); ++r) {
          ranked.push_back({*(*det_frames[f])[m[r].det_index].score, f, r,
                            m[r].is_tp});
        }
        for (const auto& o : *gt_frames[f]) {
          if (o.cls == cfg.classes[c] && passes_difficulty(o, cfg.difficulty)) ++n_gt;
        }
      }
      // Canonical order: score descending, then frame id, then in-frame rank.
      std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.rank < b.rank;
      });
      std::vector<bool> ranked_tp;
      ranked_tp.reserve(ranked.size());
      for (const auto& r : ranked) ranked_tp.push_back(r.tp);
      APResult ap = average_precision(ranked_tp, n_gt, cfg.interpolation,
                                      cfg.classes[c]);
      if (ap.no_ground_truth) {
        report.warnings.push_back(
            fmt::format("{} [{}]: no ground truth, AP set to 0",
                        cfg.classes[c].name(), iou_kind_name(kind)));
      }
      kr.per_class.push_back(std::move(ap));
    }
    kr.map = mean_average_precision(kr.per_class);
    if (report.weights) {
      ClassValues aps;
      for (const auto& r : kr.per_class) aps[r.cls] = r.ap;
      kr.icfw_map = icfw_map(aps, *report.weights);
    }
    report.kinds.push_back(std::move(kr));
  }
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  using nlohmann::json;
  json out;
  out["schema_version"] = kReportSchemaVersion;
  out["config"] = {
      {"iou_threshold", report.config.iou_threshold},
      {"interpolation", interpolation_name(report.config.interpolation)},
      {"difficulty", difficulty_name(report.config.difficulty)},
  };
  json classes = json::array();
  for (const auto& c : report.config.classes) classes.push_back(c.name());
  out["config"]["classes"] = classes;
  out["frames"] = report.frames;

  json per_class_ap = json::object();
  json map = json::object();
  json icfw = json::object();
  json n_gt = json::object();
  for (const auto& kr : report.kinds) {
    const std::string key(iou_kind_name(kr.kind));
    json aps = json::object();
    for (const auto& r : kr.per_class) aps[r.cls.name()] = r.ap;
    per_class_ap[key] = aps;
    map[key] = kr.map;
    icfw[key] = kr.icfw_map ? json(*kr.icfw_map) : json(nullptr);
  }
  out["per_class_ap"] = per_class_ap;
  out["map"] = map;
  out["icfw_map"] = icfw;

  json freq = json::object();
  for (const auto& [cls, f] : report.freq) freq[cls.name()] = f;
  out["freq"] = freq;
  json weights = json::object();
  if (report.weights) {
    for (const auto& [cls, w] : report.weights->weight) weights[cls.name()] = w;
  }
  out["weights"] = report.weights ? weights : json(nullptr);

  json gt_counts = json::object();
  json det_counts = json::object();
  for (const auto& [cls, n] : report.gt_counts) gt_counts[cls.name()] = n;
  for (const auto& [cls, n] : report.det_counts) det_counts[cls.name()] = n;
  out["counts"] = {{"gt", gt_counts}, {"det", det_counts}};
  out["warnings"] = report.warnings;
  return out;
}

std::string report_to_table(const EvalReport& report) {
  auto pct = [](double v) { return fmt::format("{:.2f}", 100.0 * v); };
  auto col = [](std::string_view kind) {
    if (kind == "2d") return std::string("2D");
    if (kind == "bev") return std::string("BEV");
    return std::string("3D");
  };

  std::vector<std::string> header = {
      fmt::format("IoU={:g}", report.config.iou_threshold)};
  std::vector<std::string> values = {
      fmt::format("{} ({})", interpolation_name(report.config.interpolation),
                  difficulty_name(report.config.difficulty))};
  for (const auto& kr : report.kinds) {
    header.push_back("mAP_" + col(iou_kind_name(kr.kind)));
    values.push_back(pct(kr.map));
  }
  for (const auto& kr : report.kinds) {
    header.push_back("ICFW mAP_" + col(iou_kind_name(kr.kind)));
    values.push_back(kr.icfw_map ? pct(*kr.icfw_map) : std::string("n/a"));
  }

  std::string out;
  auto row = [&out](const std::vector<std::string>& cells) {
    out += '|';
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += fmt::format(" {:<{}} |", cells[i], i == 0 ? 16 : 14);
    }
    out += '\n';
  };
  row(header);
  row(values);
  out += '\n';

  std::vector<std::string> cls_header = {"AP per class"};
  for (const auto& c : report.config.classes) cls_header.push_back(c.name());
  row(cls_header);
  for (const auto& kr : report.kinds) {
    std::vector<std::string> cells = {"AP_" + col(iou_kind_name(kr.kind))};
    for (const auto& r : kr.per_class) cells.push_back(pct(r.ap));
    row(cells);
  }
  std::vector<std::string> f_row = {"Frequency f_c"};
  std::vector<std::string> w_row = {"Inverted w_c"};
  for (const auto& c : report.config.classes) {
    auto f = report.freq.find(c);
    f_row.push_back(f != report.freq.end() ? fmt::format("{:.4f}", f->second) : "n/a");
    w_row.push_back(report.weights ? fmt::format("{:.4f}", report.weights->weight.at(c))
                                   : std::string("n/a"));
  }
  row(f_row);
  row(w_row);
  return out;
}

}  // namespace mono3d
