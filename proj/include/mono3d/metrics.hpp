#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

enum class IouKind { k2D, kBev, k3D };
enum class Interpolation { kR11, kR40 };
enum class Difficulty { kEasy, kModerate, kHard, kAll };

std::string_view iou_kind_name(IouKind kind);  // "2d", "bev", "3d"
std::string_view interpolation_name(Interpolation interp);  // "R11", "R40"
std::string_view difficulty_name(Difficulty difficulty);

struct EvalConfig {
  std::vector<IouKind> iou_kinds = {IouKind::k2D, IouKind::kBev, IouKind::k3D};
  double iou_threshold = 0.5;
  Interpolation interpolation = Interpolation::kR40;
  std::vector<ClassId> classes = evaluation_classes();
  Difficulty difficulty = Difficulty::kAll;

  // Throws Error(kInvalidConfig).
  void validate() const;
};

// Ground-truth eligibility under a difficulty regime (KITTI devkit limits:
// min box height 40/25/25 px, max occlusion 0/1/2, max truncation
// 0.15/0.30/0.50). kAll admits everything.
bool passes_difficulty(const Object3D& gt, Difficulty difficulty);

double iou(IouKind kind, const Object3D& a, const Object3D& b);

struct Match {
  std::size_t det_index = 0;
  bool is_tp = false;

  friend bool operator==(const Match&, const Match&) = default;
};

// Greedy matching of one frame's detections of `cls`, highest score first
// (ties keep input order). A detection is a TP when its best-IoU unconsumed
// GT of `cls` has IoU > threshold; that GT is then consumed. Otherwise it is
// dropped if it overlaps (IoU > threshold) a GT excluded by the difficulty
// filter, or a DontCare region by 2D IoU; else it is a FP.
std::vector<Match> match_detections(std::span<const Object3D> gt,
                                    std::span<const Object3D> det,
                                    IouKind kind, const EvalConfig& cfg,
                                    const ClassId& cls);

struct PrPoint {
  double recall = 0;
  double precision = 0;
};

struct APResult {
  ClassId cls;
  double ap = 0;  // in [0, 1]
  std::vector<PrPoint> pr_points;
  std::size_t n_gt = 0;
  std::size_t n_det = 0;
  bool no_ground_truth = false;  // AP defined as 0
};

// `ranked_tp` holds the TP flags of all detections in descending score order.
APResult average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt,
                           Interpolation interpolation, ClassId cls = {});

// Unweighted mean of the per-class APs. Throws on an empty list.
double mean_average_precision(std::span<const APResult> aps);

using ClassValues = std::map<ClassId, double>;

// f_c = count_c / count over evaluation classes; DontCare and other types
// are excluded from numerator and denominator.
ClassValues class_frequencies(
    std::span<const std::vector<Object3D>> gt_frames,
    const std::vector<ClassId>& classes = evaluation_classes());

struct ClassWeights {
  ClassValues freq;
  ClassValues weight;
};

// w_c = (1/f_c) / sum_k (1/f_k).
ClassWeights icfw_weights(const ClassValues& freq);

// sum_c w_c * AP_c.
double icfw_map(const ClassValues& aps, const ClassWeights& weights);

// frame id -> objects
using LabelSet = std::map<std::string, std::vector<Object3D>>;

// Reads every *.txt in `dir`; frame id is the file stem.
LabelSet load_label_dir(const std::filesystem::path& dir, int jobs = 1);

struct KindReport {
  IouKind kind = IouKind::k3D;
  std::vector<APResult> per_class;
  double map = 0;
  std::optional<double> icfw_map;
};

struct EvalReport {
  EvalConfig config;
  std::vector<KindReport> kinds;
  ClassValues freq;
  std::optional<ClassWeights> weights;
  std::map<ClassId, std::size_t> gt_counts;
  std::map<ClassId, std::size_t> det_counts;
  std::size_t frames = 0;
  std::vector<std::string> warnings;
};

// Frame-id sets must match exactly (Error kFrameMismatch lists the
// offenders). Output is identical for every `jobs` value.
EvalReport evaluate(const LabelSet& gt, const LabelSet& det,
                    const EvalConfig& cfg, int jobs = 1);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const EvalReport& report);
// Plain-text table: one row of mAP / ICFW mAP columns per metric family,
// then per-class AP, f_c and w_c. Values in percent, two decimals.
std::string report_to_table(const EvalReport& report);

}  // namespace mono3d
