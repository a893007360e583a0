#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mvcp/error.hpp"
#include "pipeline.hpp"

namespace {

// Flags mirror config keys; set flags override the config file.
struct Overrides {
  std::string config;
  std::optional<std::string> embeddings, metadata, out_dir, ranks, phases;
  std::optional<std::uint64_t> seed;
  std::optional<int> rank, restarts, iters, trials, tsne_iters;
  std::optional<double> tol, mask_frac, perplexity, learning_rate;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON config file");
    app.add_option("--embeddings", embeddings, "embeddings CSV (paths.embeddings)");
    app.add_option("--metadata", metadata, "metadata CSV (paths.metadata)");
    app.add_option("--out-dir", out_dir, "output directory (paths.out_dir)");
    app.add_option("--phases", phases, "comma-separated phase labels (phases)");
    app.add_option("--seed", seed, "root seed (seed)");
    app.add_option("--rank", rank, "model rank (fit.rank)");
    app.add_option("--iters", iters, "ALS iterations (fit.iters)");
    app.add_option("--restarts", restarts, "random restarts (fit.restarts)");
    app.add_option("--tol", tol, "relative SSE stopping tolerance (fit.tol)");
    app.add_option("--ranks", ranks, "ranks to diagnose, e.g. 1-10 (diagnostics.ranks)");
    app.add_option("--mask-frac", mask_frac, "held-out fraction (diagnostics.mask_fraction)");
    app.add_option("--trials", trials, "holdout trials (diagnostics.trials)");
    app.add_option("--perplexity", perplexity, "t-SNE perplexity (tsne.perplexity)");
    app.add_option("--learning-rate", learning_rate, "t-SNE learning rate (tsne.learning_rate)");
    app.add_option("--tsne-iters", tsne_iters, "t-SNE iterations (tsne.iterations)");
  }

  mvcp::cli::PipelineConfig resolve() const {
    using mvcp::cli::PipelineConfig;
    PipelineConfig c = config.empty() ? PipelineConfig{} : PipelineConfig::load(config);
    if (embeddings) c.embeddings = *embeddings;
    if (metadata) c.metadata = *metadata;
    if (out_dir) c.out_dir = *out_dir;
    if (phases) {
      c.phases.clear();
      std::string label;
      std::istringstream ss(*phases);
      while (std::getline(ss, label, ',')) c.phases.push_back(label);
    }
    if (seed) c.seed = *seed;
    if (rank) c.rank = *rank;
    if (iters) c.iters = *iters;
    if (restarts) c.restarts = *restarts;
    if (tol) c.tol = *tol;
    if (ranks) c.ranks = mvcp::cli::parse_rank_list(*ranks);
    if (mask_frac) c.mask_fraction = *mask_frac;
    if (trials) c.trials = *trials;
    if (perplexity) c.perplexity = *perplexity;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (tsne_iters) c.tsne_iters = *tsne_iters;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  using namespace mvcp::cli;
  CLI::App app{"mvcp: phase-sliced similarity tensors and non-negative symmetric CP analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const PipelineConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"build-tensor", "embeddings CSV -> similarity tensor + manifest", cmd_build_tensor},
      {"fit", "fit a non-negative symmetric CP model", cmd_fit},
      {"diagnose", "rank report: CORCONDIA, SSE curve, holdout RMSE", cmd_diagnose},
      {"holdout", "holdout RMSE at one rank", cmd_holdout},
      {"project", "t-SNE of the fitted video loadings", cmd_project},
      {"pipeline", "run every stage in order", cmd_pipeline},
  };

  Overrides overrides[std::size(commands)];
  for (std::size_t n = 0; n < std::size(commands); ++n) {
    overrides[n].attach(*app.add_subcommand(commands[n].name, commands[n].help));
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t n = 0; n < std::size(commands); ++n) {
    if (!app.got_subcommand(commands[n].name)) continue;
    try {
      const PipelineConfig cfg = overrides[n].resolve();
      commands[n].run(cfg, std::cout);
      return 0;
    } catch (const ValidationError& e) {
      std::cerr << "mvcp: invalid configuration: " << e.what() << "\n";
      return 2;
    } catch (const StageError& e) {
      std::cerr << "mvcp: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "mvcp: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
