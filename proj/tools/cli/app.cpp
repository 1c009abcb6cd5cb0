#include "cli/app.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "json.hpp"
#include "mono3d/error.hpp"

namespace mono3d::cli {

namespace {

int default_jobs() {
  if (const char* env = std::getenv("MONO3D_JOBS")) {
    try {
      const int jobs = std::stoi(env);
      if (jobs >= 1) return jobs;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<IouKind> parse_kinds(const std::string& text) {
  if (text == "all") return {IouKind::k2D, IouKind::kBev, IouKind::k3D};
  std::vector<IouKind> kinds;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(start, end - start);
    if (token == "2d") kinds.push_back(IouKind::k2D);
    else if (token == "bev") kinds.push_back(IouKind::kBev);
    else if (token == "3d") kinds.push_back(IouKind::k3D);
    else if (!token.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "unknown IoU kind '" + token + "'");
    }
    start = end + 1;
  }
  return kinds;
}

// Cutout flags shared by `augment` and `mol --pipeline`.
struct CutoutFlags {
  int holes = 4;
  double frac = 0.1;
  std::string fill = "zero";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--holes", holes, "Cutout hole count")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cutout-frac", frac, "Cutout hole side per image dimension")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--fill", fill, "Cutout fill")
        ->check(CLI::IsMember({"zero", "mean"}))->capture_default_str();
  }

  AugmentConfig to_config(const std::string& pipeline, std::uint64_t seed) const {
    AugmentConfig cfg;
    cfg.pipeline = parse_pipeline(pipeline);
    cfg.cutout_holes = holes;
    cfg.cutout_frac = frac;
    cfg.fill = fill == "mean" ? CutoutFill::kChannelMean : CutoutFill::kZero;
    cfg.seed = seed;
    return cfg;
  }
};

int replay(const std::filesystem::path& manifest_path, std::ostream& out,
           std::ostream& err) {
  const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
  const auto args = manifest.at("args").get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") {
    throw Error(ErrorCode::kInvalidConfig, "manifest records a replay run");
  }
  fmt::print(err, "replaying: mono3d {}\n", fmt::join(args, " "));
  return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Monocular 3D detection tooling: KITTI evaluation with ICFW mAP, "
               "multi-object-labeling pretext targets, box-level augmentation"};
  app.name("mono3d");
  app.require_subcommand(1);
  app.set_version_flag("--version", MONO3D_VERSION);

  RunContext ctx;
  ctx.args = args;
  ctx.jobs = default_jobs();
  app.add_option("-j,--jobs", ctx.jobs, "Worker threads (default: $MONO3D_JOBS or 1)")
      ->check(CLI::PositiveNumber);

  // evaluate
  EvaluateOptions eval_opts;
  std::string kinds = "all";
  std::string interp = "r40";
  std::string difficulty = "all";
  auto* evaluate = app.add_subcommand("evaluate", "Compute AP / mAP / ICFW mAP");
  evaluate->add_option("--gt", eval_opts.gt_dir, "Ground-truth label directory")->required();
  evaluate->add_option("--det", eval_opts.det_dir, "Detection label directory")->required();
  evaluate->add_option("--out", eval_opts.out_dir, "Output directory")->required();
  evaluate->add_option("--iou", eval_opts.config.iou_threshold, "IoU threshold")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  evaluate->add_option("--kind", kinds, "2d, bev, 3d, comma list, or all")
      ->capture_default_str();
  evaluate->add_option("--interp", interp, "Recall sampling")
      ->check(CLI::IsMember({"r11", "r40"}))->capture_default_str();
  evaluate->add_option("--difficulty", difficulty, "Ground-truth regime")
      ->check(CLI::IsMember({"all", "easy", "moderate", "hard"}))->capture_default_str();

  // mol
  MolOptions mol_opts;
  std::vector<double> scale_range = {0.1, 0.9};
  std::string mol_pipeline;
  CutoutFlags mol_cutout;
  auto* mol = app.add_subcommand("mol", "Generate multi-object-labeling windows (JSONL)");
  mol->add_option("--root", mol_opts.root, "KITTI root (image_2/, label_2/, calib/)")->required();
  mol->add_option("--split", mol_opts.split, "Split file, one frame id per line")->required();
  mol->add_option("--out", mol_opts.out, "Output JSONL file")->required();
  mol->add_option("--windows", mol_opts.config.n_windows, "Windows per frame")
      ->check(CLI::PositiveNumber)->capture_default_str();
  mol->add_option("--seed", mol_opts.config.seed, "Random seed")->capture_default_str();
  mol->add_option("--scale-range", scale_range, "Min and max window side fraction")
      ->expected(2)->delimiter(',');
  mol->add_flag("--require-foreground", mol_opts.config.require_foreground,
                "Redraw windows that cover no object");
  mol->add_option("--max-retries", mol_opts.config.max_retries, "Redraw limit")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  mol->add_option("--pipeline", mol_pipeline,
                  "Augment each frame first (boxmixup, cutpaste, cutout; comma list)");
  mol_cutout.add_to(mol);

  // augment
  AugmentOptions aug_opts;
  std::string aug_pipeline;
  CutoutFlags aug_cutout;
  std::uint64_t aug_seed = 0;
  std::string pool_split;
  auto* augment = app.add_subcommand("augment", "Write an augmented KITTI-layout dataset");
  augment->add_option("--root", aug_opts.root, "KITTI root")->required();
  augment->add_option("--split", aug_opts.split, "Frames to augment")->required();
  augment->add_option("--pool-split", pool_split, "Partner frames (default: --split)");
  augment->add_option("--pipeline", aug_pipeline, "boxmixup, cutpaste, cutout; comma list")
      ->required();
  augment->add_option("--out", aug_opts.out_dir, "Output directory")->required();
  augment->add_option("--seed", aug_seed, "Random seed")->capture_default_str();
  aug_cutout.add_to(augment);

  // stats
  StatsOptions stats_opts;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Class frequencies and ICFW weights");
  stats->add_option("--root", stats_opts.root, "KITTI root")->required();
  stats->add_option("--split", stats_opts.split, "Split file")->required();
  stats->add_option("--out", stats_out, "Optional output directory for stats.json");

  // render
  RenderCommandOptions render_opts;
  std::string det_file;
  auto* render = app.add_subcommand("render", "Draw projected cuboids and a BEV panel");
  render->add_option("--root", render_opts.root, "KITTI root")->required();
  render->add_option("--frame", render_opts.frame, "Frame id")->required();
  render->add_option("--det", det_file, "Detection label file to overlay");
  render->add_option("--out", render_opts.out, "Output PNG")->required();

  // replay
  std::filesystem::path manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")->required();

  std::vector<std::string> argv_storage = {"mono3d"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*evaluate) {
      eval_opts.config.iou_kinds = parse_kinds(kinds);
      eval_opts.config.interpolation =
          interp == "r11" ? Interpolation::kR11 : Interpolation::kR40;
      eval_opts.config.difficulty =
          difficulty == "easy"       ? Difficulty::kEasy
          : difficulty == "moderate" ? Difficulty::kModerate
          : difficulty == "hard"     ? Difficulty::kHard
                                     : Difficulty::kAll;
      return cmd_evaluate(eval_opts, ctx, out, err);
    }
    if (*mol) {
      mol_opts.config.min_frac = scale_range[0];
      mol_opts.config.max_frac = scale_range[1];
      if (!mol_pipeline.empty()) {
        mol_opts.augment = mol_cutout.to_config(mol_pipeline, mol_opts.config.seed);
      }
      return cmd_mol(mol_opts, ctx, out, err);
    }
    if (*augment) {
      aug_opts.config = aug_cutout.to_config(aug_pipeline, aug_seed);
      if (!pool_split.empty()) aug_opts.pool_split = pool_split;
      return cmd_augment(aug_opts, ctx, out, err);
    }
    if (*stats) {
      if (!stats_out.empty()) stats_opts.out_dir = stats_out;
      return cmd_stats(stats_opts, ctx, out, err);
    }
    if (*render) {
      if (!det_file.empty()) render_opts.det_file = det_file;
      return cmd_render(render_opts, ctx, out, err);
    }
    if (*replay_cmd) return replay(manifest_path, out, err);
  } catch (const Error& e) {
    fmt::print(err, "error [{}]: {}\n", error_code_name(e.code()), e.what());
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(err, "error: malformed JSON: {}\n", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace mono3d::cli
