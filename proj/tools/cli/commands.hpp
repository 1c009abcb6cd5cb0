#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mono3d/augment.hpp"
#include "mono3d/metrics.hpp"
#include "mono3d/ssl_mol.hpp"

namespace mono3d::cli {

// Shared by every command: the exact argument vector (for the run manifest)
// and the worker count.
struct RunContext {
  std::vector<std::string> args;
  int jobs = 1;
};

struct EvaluateOptions {
  std::filesystem::path gt_dir;
  std::filesystem::path det_dir;
  std::filesystem::path out_dir;
  EvalConfig config;
};

struct MolOptions {
  std::filesystem::path root;
  std::filesystem::path split;
  std::filesystem::path out;  // JSONL file
  MOLConfig config;
  // Optional augmentation applied before windows are sampled.
  std::optional<AugmentConfig> augment;
};

struct AugmentOptions {
  std::filesystem::path root;
  std::filesystem::path split;
  std::optional<std::filesystem::path> pool_split;
  std::filesystem::path out_dir;
  AugmentConfig config;
};

struct StatsOptions {
  std::filesystem::path root;
  std::filesystem::path split;
  std::optional<std::filesystem::path> out_dir;
};

struct RenderCommandOptions {
  std::filesystem::path root;
  std::string frame;
  std::optional<std::filesystem::path> det_file;
  std::filesystem::path out;
};

int cmd_evaluate(const EvaluateOptions& opts, const RunContext& ctx,
                 std::ostream& out, std::ostream& err);
int cmd_mol(const MolOptions& opts, const RunContext& ctx, std::ostream& out,
            std::ostream& err);
int cmd_augment(const AugmentOptions& opts, const RunContext& ctx,
                std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& opts, const RunContext& ctx,
              std::ostream& out, std::ostream& err);
int cmd_render(const RenderCommandOptions& opts, const RunContext& ctx,
               std::ostream& out, std::ostream& err);

}  // namespace mono3d::cli
