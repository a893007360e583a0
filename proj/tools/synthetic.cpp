#include "synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mvcp/error.hpp"

namespace mvcp::cli {

namespace {

const char* const kLocations[] = {"loc-1", "loc-2", "loc-3", "loc-4"};

std::size_t location_of(std::size_t video, std::size_t videos) {
  if (videos == 31) return video < 23 ? 0 : video < 29 ? 1 : video == 29 ? 2 : 3;
  return video % 4;
}

}  // namespace

SyntheticInputs make_synthetic_inputs(std::size_t videos, std::size_t dim, std::uint64_t seed,
                                      const std::vector<std::string>& phases) {
  if (videos == 0 || dim == 0 || phases.empty()) throw InvalidArgument("synthetic inputs need videos, dims and phases");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> tod(0, 3);

  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<Vector> prototypes;  // location-major, then phase
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t p = 0; p < phases.size(); ++p) {
      Vector v(d);
      for (Eigen::Index n = 0; n < d; ++n) v(n) = std::abs(gauss(rng));
      prototypes.push_back(v);
    }

  SyntheticInputs out;
  out.embeddings.phases = phases;
  for (std::size_t v = 0; v < videos; ++v) {
    const std::string id = "video-" + std::string(v < 9 ? "0" : "") + std::to_string(v + 1);
    const std::size_t loc = location_of(v, videos);
    out.embeddings.videos.push_back(id);
    out.metadata.push_back({id, kLocations[loc], static_cast<TimeOfDay>(tod(rng))});
    for (std::size_t p = 0; p < phases.size(); ++p) {
      Vector x = prototypes[loc * phases.size() + p];
      for (Eigen::Index n = 0; n < d; ++n) x(n) += 0.6 * std::abs(gauss(rng));
      out.embeddings.vectors.push_back(std::move(x));
    }
  }
  return out;
}

void write_synthetic_inputs(const SyntheticInputs& in, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream emb(std::filesystem::path(dir) / "embeddings.csv");
  std::ofstream meta(std::filesystem::path(dir) / "metadata.csv");
  if (!emb || !meta) throw Error("cannot write synthetic inputs into '" + dir + "'");
  write_embeddings_csv(emb, in.embeddings);
  write_metadata_csv(meta, in.metadata);
}

}  // namespace mvcp::cli
