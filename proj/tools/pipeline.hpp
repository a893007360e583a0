#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvcp/diagnostics.hpp"
#include "mvcp/sym_ncp.hpp"
#include "mvcp/tsne.hpp"

namespace mvcp::cli {

inline constexpr const char* kVersion = MVCP_VERSION_STRING;

/// Everything a pipeline run depends on. The JSON form is
///
///   {"paths": {"embeddings", "metadata", "out_dir"},
///    "phases": [...], "seed": s,
///    "fit": {"rank", "iters", "restarts", "tol"},
///    "diagnostics": {"ranks": [...], "mask_fraction", "trials"},
///    "tsne": {"perplexity", "learning_rate", "iterations"}}
///
/// Missing keys keep their defaults; unknown keys are rejected.
struct PipelineConfig {
  std::string embeddings;
  std::string metadata;
  std::string out_dir = "out";
  std::vector<std::string> phases{"A", "B", "C"};
  std::uint64_t seed = 0;

  int rank = 4;
  int iters = 2000;
  int restarts = 5;
  double tol = 1e-8;

  std::vector<int> ranks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double mask_fraction = 0.10;
  int trials = 3;

  double perplexity = 5.0;
  double learning_rate = 200.0;
  int tsne_iters = 1000;

  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);

  /// FNV-1a 64 of the compact JSON form without paths.out_dir, as 16 hex
  /// digits.
  std::string hash() const;

  // Per-stage seeds derived from the root seed.
  std::uint64_t fit_seed() const { return seed; }
  std::uint64_t diagnose_seed() const { return seed + 1; }
  std::uint64_t holdout_seed() const { return seed + 2; }
  std::uint64_t project_seed() const { return seed + 3; }

  FitConfig fit_config(std::uint64_t stage_seed) const;
  HoldoutConfig holdout_config() const;
  TsneConfig tsne_config() const;
};

/// Parses "1-10", "1,2,5" or a mix such as "1-3,6".
std::vector<int> parse_rank_list(const std::string& text);

/// Config is invalid; raised before any computation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// File names inside out_dir.
struct OutputPaths {
  std::string tensor, manifest, model, report_json, report_csv, holdout, tsne_csv, tsne_svg;
  std::vector<std::string> report_svgs;
  static OutputPaths in(const std::string& out_dir);
};

/// {"config_hash", "seed", "root_seed", "version"} embedded in every output.
nlohmann::json provenance(const PipelineConfig& cfg, std::uint64_t stage_seed);

// Subcommands. Each validates the config first (ValidationError), then wraps
// any failure in a StageError naming the stage. Progress goes to `log`.
void cmd_build_tensor(const PipelineConfig& cfg, std::ostream& log);
void cmd_fit(const PipelineConfig& cfg, std::ostream& log);
void cmd_diagnose(const PipelineConfig& cfg, std::ostream& log);
void cmd_holdout(const PipelineConfig& cfg, std::ostream& log);
void cmd_project(const PipelineConfig& cfg, std::ostream& log);
/// build-tensor, fit, diagnose, holdout, project in order; stops at the
/// first failing stage.
void cmd_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace mvcp::cli
