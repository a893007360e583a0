#include "mvcp/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "mvcp/error.hpp"

namespace mvcp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& text, std::size_t line) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("not a finite number: '" + s + "'", line);
  }
  return v;
}

// Reads the next non-blank line; returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void EmbeddingSet::validate() const {
  if (videos.empty() || phases.empty()) throw InvalidArgument("embedding set is empty");
  if (vectors.size() != videos.size() * phases.size()) {
    throw InvalidArgument("embedding set needs one vector per (video, phase): expected " +
                          std::to_string(videos.size() * phases.size()) + ", got " +
                          std::to_string(vectors.size()));
  }
  const auto d = vectors.front().size();
  if (d < 1) throw InvalidArgument("embedding dimension must be at least 1");
  for (std::size_t v = 0; v < videos.size(); ++v)
    for (std::size_t p = 0; p < phases.size(); ++p) {
      const Vector& x = vector(v, p);
      const std::string where = "(" + videos[v] + ", " + phases[p] + ")";
      if (x.size() != d) {
        throw InvalidArgument("embedding " + where + " has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(d));
      }
      if (!x.allFinite()) throw InvalidArgument("embedding " + where + " has non-finite values");
      if (x.squaredNorm() == 0.0) {
        throw InvalidArgument("embedding " + where + " is all zeros; cosine similarity is undefined");
      }
    }
}

std::string to_string(TimeOfDay t) {
  switch (t) {
    case TimeOfDay::OffPeak: return "off-peak";
    case TimeOfDay::MorningRush: return "morning-rush";
    case TimeOfDay::Midday: return "midday";
    case TimeOfDay::AfternoonEvening: return "afternoon-evening";
  }
  return "unknown";
}

TimeOfDay parse_time_of_day(const std::string& s) {
  static const std::map<std::string, TimeOfDay> table = {
      {"off-peak", TimeOfDay::OffPeak},
      {"morning-rush", TimeOfDay::MorningRush},
      {"midday", TimeOfDay::Midday},
      {"afternoon-evening", TimeOfDay::AfternoonEvening},
  };
  const auto it = table.find(trim(s));
  if (it == table.end()) {
    throw InvalidArgument("unknown time_of_day '" + s +
                          "' (expected off-peak, morning-rush, midday or afternoon-evening)");
  }
  return it->second;
}

double cosine_similarity(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InvalidArgument("cosine_similarity: vector sizes differ");
  const double xx = x.squaredNorm();
  const double yy = y.squaredNorm();
  if (xx == 0.0 || yy == 0.0) throw InvalidArgument("cosine_similarity: zero-norm vector");
  return std::clamp(x.dot(y) / std::sqrt(xx * yy), -1.0, 1.0);
}

DenseTensor3 build_similarity_tensor(const EmbeddingSet& e) {
  e.validate();
  const std::size_t N = e.video_count();
  const std::size_t P = e.phase_count();
  DenseTensor3 t(Dims{N, N, P});
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t j = 0; j < N; ++j) {
      t(j, j, p) = 1.0;
      for (std::size_t i = 0; i < j; ++i) {
        const double s = cosine_similarity(e.vector(i, p), e.vector(j, p));
        t(i, j, p) = s;
        t(j, i, p) = s;
      }
    }
  }
  return t;
}

EmbeddingSet read_embeddings_csv(std::istream& in, const std::vector<std::string>& phases) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError("embeddings CSV is empty");

  const auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "video_id" || trim(header[1]) != "phase") {
    throw ParseError("header must be video_id,phase,dim_0,...", line_no);
  }
  const std::size_t dim = header.size() - 2;

  EmbeddingSet set;
  set.phases = phases;
  const bool fixed_phases = !phases.empty();
  std::unordered_map<std::string, std::size_t> video_index;
  std::unordered_map<std::string, std::size_t> phase_index;
  for (std::size_t p = 0; p < phases.size(); ++p) phase_index.emplace(phases[p], p);

  struct Row {
    std::size_t video, phase;
    Vector values;
  };
  std::vector<Row> rows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;  // pair -> line

  while (next_line(in, line, line_no)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != dim + 2) {
      throw ParseError("expected " + std::to_string(dim + 2) + " fields, got " +
                       std::to_string(fields.size()), line_no);
    }
    const std::string video = trim(fields[0]);
    const std::string phase = trim(fields[1]);
    if (video.empty() || phase.empty()) throw ParseError("empty video_id or phase", line_no);

    auto [vit, new_video] = video_index.emplace(video, set.videos.size());
    if (new_video) set.videos.push_back(video);
    auto pit = phase_index.find(phase);
    if (pit == phase_index.end()) {
      if (fixed_phases) throw ParseError("unknown phase '" + phase + "'", line_no);
      pit = phase_index.emplace(phase, set.phases.size()).first;
      set.phases.push_back(phase);
    }

    const auto key = std::make_pair(vit->second, pit->second);
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
      throw ParseError("duplicate row for (" + video + ", " + phase + "), first seen on line " +
                       std::to_string(it->second), line_no);
    }

    Vector values(static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d) values(static_cast<Eigen::Index>(d)) = parse_double(fields[d + 2], line_no);
    rows.push_back({vit->second, pit->second, std::move(values)});
  }
  if (rows.empty()) throw ParseError("embeddings CSV has no data rows");

  const std::size_t P = set.phases.size();
  set.vectors.assign(set.videos.size() * P, Vector());
  for (auto& r : rows) set.vectors[r.video * P + r.phase] = std::move(r.values);
  for (std::size_t v = 0; v < set.videos.size(); ++v)
    for (std::size_t p = 0; p < P; ++p)
      if (set.vectors[v * P + p].size() == 0) {
        throw ParseError("missing row for (" + set.videos[v] + ", " + set.phases[p] + ")");
      }
  set.validate();
  return set;
}

EmbeddingSet read_embeddings_csv(const std::string& path, const std::vector<std::string>& phases) {
  auto in = open_or_throw(path);
  return read_embeddings_csv(in, phases);
}

std::vector<VideoMetadata> read_metadata_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError("metadata CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() != 3 || trim(header[0]) != "video_id" || trim(header[1]) != "location" ||
      trim(header[2]) != "time_of_day") {
    throw ParseError("header must be video_id,location,time_of_day", line_no);
  }
  std::vector<VideoMetadata> rows;
  while (next_line(in, line, line_no)) {
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(f.size()), line_no);
    try {
      rows.push_back({trim(f[0]), trim(f[1]), parse_time_of_day(f[2])});
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rows;
}

std::vector<VideoMetadata> read_metadata_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return read_metadata_csv(in);
}

std::vector<VideoMetadata> align_metadata(const std::vector<std::string>& videos,
                                          const std::vector<VideoMetadata>& rows) {
  std::unordered_map<std::string, const VideoMetadata*> by_id;
  for (const auto& r : rows) {
    if (!by_id.emplace(r.video_id, &r).second) {
      throw InvalidArgument("metadata has more than one row for video '" + r.video_id + "'");
    }
  }
  std::vector<VideoMetadata> out;
  out.reserve(videos.size());
  for (const auto& v : videos) {
    const auto it = by_id.find(v);
    if (it == by_id.end()) throw InvalidArgument("metadata has no row for video '" + v + "'");
    out.push_back(*it->second);
  }
  return out;
}

void write_embeddings_csv(std::ostream& out, const EmbeddingSet& e) {
  e.validate();
  out << "video_id,phase";
  for (std::size_t d = 0; d < e.dimension(); ++d) out << ",dim_" << d;
  out << '\n';
  char buf[64];
  for (std::size_t v = 0; v < e.video_count(); ++v)
    for (std::size_t p = 0; p < e.phase_count(); ++p) {
      out << e.videos[v] << ',' << e.phases[p];
      for (double x : e.vector(v, p)) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
        out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
      }
      out << '\n';
    }
}

void write_metadata_csv(std::ostream& out, const std::vector<VideoMetadata>& rows) {
  out << "video_id,location,time_of_day\n";
  for (const auto& r : rows) out << r.video_id << ',' << r.location << ',' << to_string(r.time_of_day) << '\n';
}

std::size_t count_negative(const DenseTensor3& t) {
  const auto v = t.values();
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x < 0.0; }));
}

}  // namespace mvcp
