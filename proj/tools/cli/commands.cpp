#include "cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <ostream>

#include "cli/app.hpp"
#include "cli/dataset.hpp"
#include "json.hpp"
#include "mono3d/error.hpp"
#include "mono3d/parallel.hpp"
#include "mono3d/render.hpp"

namespace mono3d::cli {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

ordered_json pipeline_json(const std::vector<AugmentKind>& pipeline) {
  ordered_json out = ordered_json::array();
  for (auto k : pipeline) out.push_back(augment_kind_name(k));
  return out;
}

ordered_json augment_config_json(const AugmentConfig& cfg) {
  return {{"pipeline", pipeline_json(cfg.pipeline)},
          {"cutout_holes", cfg.cutout_holes},
          {"cutout_frac", cfg.cutout_frac},
          {"fill", cfg.fill == CutoutFill::kZero ? "zero" : "mean"},
          {"partner_policy", "uniform_same_dims"},
          {"seed", cfg.seed}};
}

// Written next to every command's outputs. Everything except wall time and
// job count is a function of the inputs, and `args` replays the run.
void write_manifest(const std::filesystem::path& path, std::string_view command,
                    const RunContext& ctx, ordered_json config,
                    std::optional<std::uint64_t> seed, ordered_json inputs,
                    ordered_json outputs, Clock::time_point started) {
  ordered_json m;
  m["tool"] = "mono3d";
  m["version"] = MONO3D_VERSION;
  m["command"] = command;
  m["args"] = ctx.args;
  m["config"] = std::move(config);
  m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  m["inputs"] = std::move(inputs);
  m["outputs"] = std::move(outputs);
  m["jobs"] = ctx.jobs;
  m["wall_time_s"] =
      std::chrono::duration<double>(Clock::now() - started).count();
  write_text_file(path, m.dump(2) + "\n");
}

void report_unresolved(std::ostream& err, const std::vector<std::string>& missing) {
  fmt::print(err, "error: {} frame(s) could not be resolved:\n", missing.size());
  for (const auto& id : missing) fmt::print(err, "  {}\n", id);
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opts, const RunContext& ctx,
                 std::ostream& out, std::ostream& err) {
  const auto started = Clock::now();
  opts.config.validate();
  for (const auto& dir : {opts.gt_dir, opts.det_dir}) {
    if (!std::filesystem::is_directory(dir)) {
      fmt::print(err, "error: not a directory: {}\n", dir.string());
      return kExitBadInput;
    }
  }
  const LabelSet gt = load_label_dir(opts.gt_dir, ctx.jobs);
  const LabelSet det = load_label_dir(opts.det_dir, ctx.jobs);
  const EvalReport report = evaluate(gt, det, opts.config, ctx.jobs);

  std::filesystem::create_directories(opts.out_dir);
  const auto json_path = opts.out_dir / "report.json";
  const auto table_path = opts.out_dir / "table.txt";
  write_text_file(json_path, report_to_json(report).dump(2) + "\n");
  const std::string table = report_to_table(report);
  write_text_file(table_path, table);
  out << table;
  for (const auto& w : report.warnings) fmt::print(err, "warning: {}\n", w);

  ordered_json kinds = ordered_json::array();
  for (auto k : opts.config.iou_kinds) kinds.push_back(iou_kind_name(k));
  write_manifest(opts.out_dir / "manifest.json", "evaluate", ctx,
                 {{"iou_threshold", opts.config.iou_threshold},
                  {"kinds", kinds},
                  {"interpolation", interpolation_name(opts.config.interpolation)},
                  {"difficulty", difficulty_name(opts.config.difficulty)}},
                 std::nullopt,
                 {{"gt_dir", opts.gt_dir.string()}, {"det_dir", opts.det_dir.string()}},
                 {{"report", json_path.string()}, {"table", table_path.string()}},
                 started);
  return kExitOk;
}

int cmd_mol(const MolOptions& opts, const RunContext& ctx, std::ostream& out,
            std::ostream& err) {
  const auto started = Clock::now();
  opts.config.validate();
  if (opts.augment) opts.augment->validate();
  const KittiPaths paths{opts.root};
  const auto ids = read_split_file(opts.split);
  const bool need_full_frames = opts.augment.has_value();
  const auto missing = unresolved_frames(paths, ids, true, need_full_frames);
  if (!missing.empty()) {
    report_unresolved(err, missing);
    return kExitBadInput;
  }

  std::optional<FramePool> pool;
  if (opts.augment) pool = make_pool(paths, ids);

  MolFrameLoader loader = [&](const std::string& id) {
    MolFrame frame;
    frame.frame_id = id;
    if (opts.augment) {
      const auto result = compose(load_frame(paths, id), *opts.augment, *pool);
      frame.dims = result.sample.image.dims();
      frame.objects = result.sample.objects;
    } else {
      frame.dims = read_png_dims(paths.image(id));
      frame.objects = parse_label_file(read_text_file(paths.label(id)));
      clamp_boxes(frame.objects, frame.dims);
    }
    return frame;
  };
  const MolDataset data =
      generate_mol_dataset(ids, loader, opts.config, evaluation_classes(), ctx.jobs);

  if (opts.out.has_parent_path()) {
    std::filesystem::create_directories(opts.out.parent_path());
  }
  std::string text;
  for (const auto& r : data.records) {
    text += mol_record_to_jsonl(r);
    text += '\n';
  }
  write_text_file(opts.out, text);
  fmt::print(out, "wrote {} records for {} frames to {}\n", data.records.size(),
             ids.size() - data.errors.size(), opts.out.string());
  for (const auto& e : data.errors) {
    fmt::print(err, "error: frame {}: {}\n", e.frame_id, e.message);
  }

  ordered_json classes = ordered_json::array();
  for (const auto& c : evaluation_classes()) classes.push_back(c.name());
  ordered_json config = {{"n_windows", opts.config.n_windows},
                         {"scale_range", {opts.config.min_frac, opts.config.max_frac}},
                         {"require_foreground", opts.config.require_foreground},
                         {"max_retries", opts.config.max_retries},
                         {"classes", classes}};
  if (opts.augment) config["augment"] = augment_config_json(*opts.augment);
  write_manifest(opts.out.string() + ".manifest.json", "mol", ctx, config,
                 opts.config.seed,
                 {{"root", opts.root.string()}, {"split", opts.split.string()}},
                 {{"records", opts.out.string()}}, started);
  return data.errors.empty() ? kExitOk : kExitBadInput;
}

int cmd_augment(const AugmentOptions& opts, const RunContext& ctx,
                std::ostream& out, std::ostream& err) {
  const auto started = Clock::now();
  if (opts.config.pipeline.empty()) {
    throw Error(ErrorCode::kEmptyPipeline, "EmptyPipeline: --pipeline is empty");
  }
  opts.config.validate();
  const KittiPaths in{opts.root};
  const KittiPaths dst{opts.out_dir};
  const auto ids = read_split_file(opts.split);
  const auto pool_ids = opts.pool_split ? read_split_file(*opts.pool_split) : ids;

  auto missing = unresolved_frames(in, ids, true, true);
  for (const auto& id : unresolved_frames(in, pool_ids, true, true)) {
    if (std::find(missing.begin(), missing.end(), id) == missing.end()) {
      missing.push_back(id);
    }
  }
  if (!missing.empty()) {
    report_unresolved(err, missing);
    return kExitBadInput;
  }

  const FramePool pool = make_pool(in, pool_ids);
  const auto provenance_dir = opts.out_dir / "provenance";
  for (const auto& dir : {dst.image("x").parent_path(), dst.label("x").parent_path(),
                          dst.calib("x").parent_path(), provenance_dir}) {
    std::filesystem::create_directories(dir);
  }

  parallel_for(ids.size(), ctx.jobs, [&](std::size_t i) {
    const AugmentResult result = compose(load_frame(in, ids[i]), opts.config, pool);
    write_frame(dst, result.sample);

    ordered_json prov;
    prov["output_frame"] = result.sample.frame_id;
    ordered_json sources = ordered_json::array({ids[i]});
    for (const auto& p : result.partners) sources.push_back(p);
    prov["sources"] = sources;
    prov["pipeline"] = pipeline_json(opts.config.pipeline);
    prov["seed"] = opts.config.seed;
    ordered_json object_sources = ordered_json::array();
    for (std::size_t k = 0; k < result.sample.objects.size(); ++k) {
      object_sources.push_back(result.sample.source_of(k));
    }
    prov["object_sources"] = object_sources;
    write_text_file(provenance_dir / (ids[i] + ".json"), prov.dump(2) + "\n");
  });
  fmt::print(out, "augmented {} frames into {}\n", ids.size(), opts.out_dir.string());

  ordered_json inputs = {{"root", opts.root.string()}, {"split", opts.split.string()}};
  if (opts.pool_split) inputs["pool_split"] = opts.pool_split->string();
  write_manifest(opts.out_dir / "manifest.json", "augment", ctx,
                 augment_config_json(opts.config), opts.config.seed, inputs,
                 {{"out_dir", opts.out_dir.string()}}, started);
  return kExitOk;
}

int cmd_stats(const StatsOptions& opts, const RunContext& ctx, std::ostream& out,
              std::ostream& err) {
  const auto started = Clock::now();
  const KittiPaths paths{opts.root};
  const auto ids = read_split_file(opts.split);
  const auto missing = unresolved_frames(paths, ids, false, false);
  if (!missing.empty()) {
    report_unresolved(err, missing);
    return kExitBadInput;
  }
  std::vector<std::vector<Object3D>> frames(ids.size());
  parallel_for(ids.size(), ctx.jobs, [&](std::size_t i) {
    frames[i] = parse_label_file(read_text_file(paths.label(ids[i])));
  });

  std::map<ClassId, std::size_t> counts;
  for (const auto& c : evaluation_classes()) counts[c] = 0;
  for (const auto& f : frames) {
    for (const auto& o : f) {
      if (auto it = counts.find(o.cls); it != counts.end()) ++it->second;
    }
  }
  const ClassValues freq = class_frequencies(frames);

  ordered_json result;
  result["frames"] = ids.size();
  fmt::print(out, "{:<12} {:>8} {:>10} {:>10}\n", "class", "count", "f_c", "w_c");
  std::optional<ClassWeights> weights;
  try {
    weights = icfw_weights(freq);
  } catch (const Error& e) {
    fmt::print(err, "warning: {}\n", e.what());
  }
  for (const auto& c : evaluation_classes()) {
    const double f = freq.at(c);
    const std::string w =
        weights ? fmt::format("{:.4f}", weights->weight.at(c)) : std::string("n/a");
    fmt::print(out, "{:<12} {:>8} {:>10.4f} {:>10}\n", c.name(), counts[c], f, w);
    result["counts"][c.name()] = counts[c];
    result["freq"][c.name()] = f;
    result["weights"][c.name()] =
        weights ? ordered_json(weights->weight.at(c)) : ordered_json(nullptr);
  }

  if (opts.out_dir) {
    std::filesystem::create_directories(*opts.out_dir);
    const auto stats_path = *opts.out_dir / "stats.json";
    write_text_file(stats_path, result.dump(2) + "\n");
    write_manifest(*opts.out_dir / "manifest.json", "stats", ctx, ordered_json::object(),
                   std::nullopt,
                   {{"root", opts.root.string()}, {"split", opts.split.string()}},
                   {{"stats", stats_path.string()}}, started);
  }
  return kExitOk;
}

int cmd_render(const RenderCommandOptions& opts, const RunContext& ctx,
               std::ostream& out, std::ostream& err) {
  const auto started = Clock::now();
  const KittiPaths paths{opts.root};
  const auto missing = unresolved_frames(paths, {opts.frame}, true, true);
  if (!missing.empty()) {
    report_unresolved(err, missing);
    return kExitBadInput;
  }
  const FrameSample frame = load_frame(paths, opts.frame);
  std::vector<Object3D> dets;
  if (opts.det_file) dets = parse_label_file(read_text_file(*opts.det_file));

  const RenderResult result =
      render_overlay(frame.image, frame.calib, frame.objects, dets);
  for (const auto& w : result.warnings) fmt::print(err, "warning: {}\n", w);
  if (opts.out.has_parent_path()) {
    std::filesystem::create_directories(opts.out.parent_path());
  }
  write_png(opts.out, result.image);
  fmt::print(out, "drew {} wireframe(s) into {}\n", result.wireframes,
             opts.out.string());

  ordered_json inputs = {{"root", opts.root.string()}, {"frame", opts.frame}};
  if (opts.det_file) inputs["det_file"] = opts.det_file->string();
  write_manifest(opts.out.string() + ".manifest.json", "render", ctx,
                 ordered_json::object(), std::nullopt, inputs,
                 {{"image", opts.out.string()}}, started);
  return kExitOk;
}

}  // namespace mono3d::cli
