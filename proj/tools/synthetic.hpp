#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvcp/similarity.hpp"

namespace mvcp::cli {

struct SyntheticInputs {
  EmbeddingSet embeddings;
  std::vector<VideoMetadata> metadata;
};

/// Location-clustered, non-negative embeddings for demos and end-to-end
/// tests. Each location has a prototype vector per phase; a video is its
/// location's prototype plus |noise|. With 31 videos the location sizes are
/// 23/6/1/1; otherwise videos are dealt round-robin over 4 locations.
SyntheticInputs make_synthetic_inputs(std::size_t videos, std::size_t dim, std::uint64_t seed,
                                      const std::vector<std::string>& phases = {"A", "B", "C"});

/// Writes embeddings.csv and metadata.csv into `dir` (created if needed).
void write_synthetic_inputs(const SyntheticInputs& in, const std::string& dir);

}  // namespace mvcp::cli
