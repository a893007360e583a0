#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvcp/tensor.hpp"

namespace mvcp {

/// One D-dimensional vector per (video, phase). Vectors are stored
/// video-major: vector(v, p) is entry v * phases.size() + p.
struct EmbeddingSet {
  std::vector<std::string> videos;
  std::vector<std::string> phases{"A", "B", "C"};
  std::vector<Vector> vectors;

  std::size_t video_count() const { return videos.size(); }
  std::size_t phase_count() const { return phases.size(); }
  std::size_t dimension() const { return vectors.empty() ? 0 : static_cast<std::size_t>(vectors.front().size()); }

  const Vector& vector(std::size_t video, std::size_t phase) const {
    return vectors[video * phases.size() + phase];
  }

  /// Throws InvalidArgument if a pair is missing, dimensions differ, or a
  /// vector is all zeros (the message names the offending video and phase).
  void validate() const;
};

enum class TimeOfDay { OffPeak, MorningRush, Midday, AfternoonEvening };

std::string to_string(TimeOfDay t);
/// Accepts "off-peak", "morning-rush", "midday", "afternoon-evening".
TimeOfDay parse_time_of_day(const std::string& s);

struct VideoMetadata {
  std::string video_id;
  std::string location;
  TimeOfDay time_of_day = TimeOfDay::OffPeak;
};

/// x.y / (|x| |y|) clamped to [-1, 1]. Throws InvalidArgument on a zero-norm
/// or size-mismatched input.
double cosine_similarity(const Vector& x, const Vector& y);

/// Stacks per-phase cosine-similarity matrices into an N x N x P tensor.
/// Only the upper triangle is computed; the lower triangle is a mirror and
/// the diagonal is exactly 1.
DenseTensor3 build_similarity_tensor(const EmbeddingSet& e);

/// Parses `video_id,phase,dim_0,...,dim_{D-1}` with one row per
/// (video, phase). Videos keep first-appearance order. When `phases` is empty
/// the phase order is first-appearance order too; otherwise rows must use
/// one of the listed labels. Errors carry the 1-based line number.
EmbeddingSet read_embeddings_csv(std::istream& in, const std::vector<std::string>& phases = {});
EmbeddingSet read_embeddings_csv(const std::string& path, const std::vector<std::string>& phases = {});

/// Parses `video_id,location,time_of_day`.
std::vector<VideoMetadata> read_metadata_csv(std::istream& in);
std::vector<VideoMetadata> read_metadata_csv(const std::string& path);

/// Reorders metadata to match `videos`; throws if a video lacks exactly one row.
std::vector<VideoMetadata> align_metadata(const std::vector<std::string>& videos,
                                          const std::vector<VideoMetadata>& rows);

/// Writers for the two CSV formats above. Numbers use shortest round-trip
/// formatting, so write -> read reproduces the doubles exactly.
void write_embeddings_csv(std::ostream& out, const EmbeddingSet& e);
void write_metadata_csv(std::ostream& out, const std::vector<VideoMetadata>& rows);

/// Number of strictly negative entries (cosines can be negative).
std::size_t count_negative(const DenseTensor3& t);

}  // namespace mvcp
