#include <iostream>

#include <CLI11.hpp>

#include "synthetic.hpp"

// Writes a synthetic embeddings.csv + metadata.csv pair for trying the pipeline.
int main(int argc, char** argv) {
  CLI::App app{"mvcp-synth: synthetic embeddings for the mvcp pipeline"};
  std::size_t videos = 31;
  std::size_t dim = 768;
  std::uint64_t seed = 0;
  std::string out_dir = "synthetic";
  app.add_option("--videos", videos, "number of videos")->check(CLI::PositiveNumber);
  app.add_option("--dim", dim, "embedding dimension")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--out-dir", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    mvcp::cli::write_synthetic_inputs(mvcp::cli::make_synthetic_inputs(videos, dim, seed), out_dir);
  } catch (const std::exception& e) {
    std::cerr << "mvcp-synth: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << out_dir << "/embeddings.csv and " << out_dir << "/metadata.csv\n";
  return 0;
}
