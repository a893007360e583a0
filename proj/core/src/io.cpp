#include "mvcp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mvcp/error.hpp"

namespace mvcp::io {

namespace {

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows, Eigen::Index cols, const char* name) {
  if (!rows.is_array()) throw ParseError(std::string(name) + " must be an array of rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(std::string(name) + " row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

json tensor_to_json(const DenseTensor3& t) {
  const auto v = t.values();
  return json{{"dims", {t.dims().i, t.dims().j, t.dims().k}},
              {"values", std::vector<double>(v.begin(), v.end())}};
}

DenseTensor3 tensor_from_json(const json& j) {
  try {
    const auto dims = j.at("dims").get<std::vector<long long>>();
    if (dims.size() != 3) throw ParseError("tensor dims must have 3 entries");
    for (auto d : dims)
      if (d <= 0) throw ParseError("tensor dims must be positive");
    Dims d{static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
           static_cast<std::size_t>(dims[2])};
    return DenseTensor3(d, j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("tensor JSON: ") + e.what());
  } catch (const DimensionError& e) {
    throw ParseError(std::string("tensor JSON: ") + e.what());
  }
}

json model_to_json(const SymCpModel& m) {
  return json{{"rank", m.rank()},
              {"lambda", std::vector<double>(m.lambda().begin(), m.lambda().end())},
              {"phase_loadings", matrix_rows(m.phase_loadings())},
              {"video_loadings", matrix_rows(m.video_loadings())},
              {"final_sse", m.final_sse},
              {"per_restart_sse", m.per_restart_sse},
              {"seed", m.restart_seed}};
}

SymCpModel model_from_json(const json& j) {
  try {
    SymCpModel m;
    const int rank = j.at("rank").get<int>();
    if (rank < 1) throw ParseError("model rank must be positive");
    const auto lambda = j.at("lambda").get<std::vector<double>>();
    if (static_cast<int>(lambda.size()) != rank) throw ParseError("model lambda length differs from rank");
    m.factors.lambda = Eigen::Map<const Vector>(lambda.data(), rank);
    m.factors.phase_loadings = matrix_from_rows(j.at("phase_loadings"), rank, "phase_loadings");
    m.factors.video_loadings = matrix_from_rows(j.at("video_loadings"), rank, "video_loadings");
    m.final_sse = j.at("final_sse").get<double>();
    m.per_restart_sse = j.value("per_restart_sse", std::vector<double>{});
    m.restart_seed = j.value("seed", std::uint64_t{0});
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

json manifest_to_json(const std::vector<std::string>& videos, const std::vector<std::string>& phases) {
  json list = json::array();
  for (std::size_t n = 0; n < videos.size(); ++n) list.push_back({{"index", n}, {"video_id", videos[n]}});
  return json{{"videos", list}, {"phases", phases}};
}

std::vector<std::string> manifest_videos(const json& j) {
  try {
    const auto& list = j.at("videos");
    std::vector<std::string> out(list.size());
    std::vector<bool> filled(list.size(), false);
    for (const auto& v : list) {
      const auto idx = v.at("index").get<std::size_t>();
      if (idx >= out.size() || filled[idx]) throw ParseError("manifest indices must be a permutation of 0..N-1");
      out[idx] = v.at("video_id").get<std::string>();
      filled[idx] = true;
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest JSON: ") + e.what());
  }
}

json rank_report_to_json(const RankReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"rank", row.rank},
                    {"corcondia", row.corcondia ? json(*row.corcondia) : json(nullptr)},
                    {"sse", row.sse},
                    {"holdout_rmse_mean", row.holdout_rmse_mean},
                    {"holdout_rmse_std", row.holdout_rmse_std}});
  }
  return rows;
}

RankReport rank_report_from_json(const json& j) {
  try {
    RankReport r;
    const json& rows = j.is_object() ? j.at("rows") : j;
    for (const auto& row : rows) {
      RankReportRow out;
      out.rank = row.at("rank").get<int>();
      if (!row.at("corcondia").is_null()) out.corcondia = row.at("corcondia").get<double>();
      out.sse = row.at("sse").get<double>();
      out.holdout_rmse_mean = row.at("holdout_rmse_mean").get<double>();
      out.holdout_rmse_std = row.at("holdout_rmse_std").get<double>();
      r.rows.push_back(out);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("rank report JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::string rank_report_to_csv(const RankReport& r) {
  std::ostringstream out;
  out << "rank,corcondia,sse,holdout_rmse_mean,holdout_rmse_std\n";
  for (const auto& row : r.rows) {
    out << row.rank << ',' << (row.corcondia ? format_double(*row.corcondia) : "") << ','
        << format_double(row.sse) << ',' << format_double(row.holdout_rmse_mean) << ','
        << format_double(row.holdout_rmse_std) << '\n';
  }
  return out.str();
}

json holdout_to_json(int rank, const HoldoutResult& h) {
  return json{{"rank", rank},
              {"rmse_mean", h.rmse_mean},
              {"rmse_std", h.rmse_std},
              {"trial_rmse", h.trial_rmse}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace mvcp::io
