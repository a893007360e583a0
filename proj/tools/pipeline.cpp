#include "pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>

#include "mvcp/error.hpp"
#include "mvcp/io.hpp"
#include "mvcp/similarity.hpp"
#include "svg.hpp"

namespace mvcp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void read_key(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string provenance_line(const PipelineConfig& cfg, std::uint64_t stage_seed) {
  return "mvcp version=" + std::string(kVersion) + " config_hash=" + cfg.hash() +
         " seed=" + std::to_string(stage_seed) + " root_seed=" + std::to_string(cfg.seed);
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw Error("cannot create output directory '" + cfg.out_dir + "'");
  }
}

template <typename Body>
void run_stage(const std::string& stage, Body&& body) {
  try {
    body();
  } catch (const StageError&) {
    throw;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void validate_fit_params(const PipelineConfig& cfg) {
  if (cfg.rank < 1) throw ValidationError("rank must be at least 1, got " + std::to_string(cfg.rank));
  if (cfg.iters < 1) throw ValidationError("iters must be at least 1");
  if (cfg.restarts < 1) throw ValidationError("restarts must be at least 1");
  if (!(cfg.tol >= 0.0)) throw ValidationError("tol must be non-negative");
}

void validate_holdout_params(const PipelineConfig& cfg) {
  if (!(cfg.mask_fraction > 0.0 && cfg.mask_fraction < 1.0)) {
    throw ValidationError("mask_fraction must be in (0, 1)");
  }
  if (cfg.trials < 1) throw ValidationError("trials must be at least 1");
}

void validate_ranks(const PipelineConfig& cfg) {
  if (cfg.ranks.empty()) throw ValidationError("rank list is empty");
  for (int r : cfg.ranks)
    if (r < 1) throw ValidationError("ranks must be at least 1, got " + std::to_string(r));
}

void validate_tsne_params(const PipelineConfig& cfg) {
  if (!(cfg.perplexity > 0.0) || !(cfg.learning_rate > 0.0) || cfg.tsne_iters < 1) {
    throw ValidationError("tsne perplexity, learning_rate and iterations must be positive");
  }
}

DenseTensor3 load_tensor(const OutputPaths& out) {
  if (!fs::exists(out.tensor)) throw Error("missing '" + out.tensor + "'; run build-tensor first");
  return io::tensor_from_json(io::read_json_file(out.tensor));
}

void check_rank_fits(int rank, const DenseTensor3& t) {
  if (static_cast<std::size_t>(rank) > t.dims().i) {
    throw ValidationError("rank " + std::to_string(rank) + " exceeds N = " + std::to_string(t.dims().i));
  }
}

}  // namespace

json PipelineConfig::to_json() const {
  return json{{"paths", {{"embeddings", embeddings}, {"metadata", metadata}, {"out_dir", out_dir}}},
              {"phases", phases},
              {"seed", seed},
              {"fit", {{"rank", rank}, {"iters", iters}, {"restarts", restarts}, {"tol", tol}}},
              {"diagnostics", {{"ranks", ranks}, {"mask_fraction", mask_fraction}, {"trials", trials}}},
              {"tsne", {{"perplexity", perplexity}, {"learning_rate", learning_rate}, {"iterations", tsne_iters}}}};
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j, {"paths", "phases", "seed", "fit", "diagnostics", "tsne"}, "");
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      reject_unknown(p, {"embeddings", "metadata", "out_dir"}, "paths.");
      read_key(p, "embeddings", c.embeddings);
      read_key(p, "metadata", c.metadata);
      read_key(p, "out_dir", c.out_dir);
    }
    read_key(j, "phases", c.phases);
    read_key(j, "seed", c.seed);
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      reject_unknown(f, {"rank", "iters", "restarts", "tol"}, "fit.");
      read_key(f, "rank", c.rank);
      read_key(f, "iters", c.iters);
      read_key(f, "restarts", c.restarts);
      read_key(f, "tol", c.tol);
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      reject_unknown(d, {"ranks", "mask_fraction", "trials"}, "diagnostics.");
      if (d.contains("ranks")) {
        c.ranks = d.at("ranks").is_string() ? parse_rank_list(d.at("ranks").get<std::string>())
                                            : d.at("ranks").get<std::vector<int>>();
      }
      read_key(d, "mask_fraction", c.mask_fraction);
      read_key(d, "trials", c.trials);
    }
    if (j.contains("tsne")) {
      const auto& t = j.at("tsne");
      reject_unknown(t, {"perplexity", "learning_rate", "iterations"}, "tsne.");
      read_key(t, "perplexity", c.perplexity);
      read_key(t, "learning_rate", c.learning_rate);
      read_key(t, "iterations", c.tsne_iters);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  try {
    return from_json(io::read_json_file(path));
  } catch (const ParseError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

std::string PipelineConfig::hash() const {
  json j = to_json();
  j["paths"].erase("out_dir");  // where results land does not change them
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FitConfig PipelineConfig::fit_config(std::uint64_t stage_seed) const {
  FitConfig f;
  f.max_iters = iters;
  f.restarts = restarts;
  f.tol = tol;
  f.seed = stage_seed;
  return f;
}

HoldoutConfig PipelineConfig::holdout_config() const { return HoldoutConfig{mask_fraction, trials}; }

TsneConfig PipelineConfig::tsne_config() const {
  TsneConfig t;
  t.perplexity = perplexity;
  t.learning_rate = learning_rate;
  t.iterations = tsne_iters;
  t.seed = project_seed();
  return t;
}

std::vector<int> parse_rank_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  const auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("bad rank list '" + text + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) throw ValidationError("bad rank list '" + text + "'");
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(to_int(part));
      continue;
    }
    const int lo = to_int(part.substr(0, dash));
    const int hi = to_int(part.substr(dash + 1));
    if (hi < lo) throw ValidationError("bad rank range '" + part + "'");
    for (int r = lo; r <= hi; ++r) out.push_back(r);
  }
  if (out.empty()) throw ValidationError("empty rank list");
  return out;
}

OutputPaths OutputPaths::in(const std::string& out_dir) {
  const fs::path d(out_dir);
  OutputPaths p;
  p.tensor = (d / "tensor.json").string();
  p.manifest = (d / "manifest.json").string();
  p.model = (d / "model.json").string();
  p.report_json = (d / "rank_report.json").string();
  p.report_csv = (d / "rank_report.csv").string();
  p.holdout = (d / "holdout.json").string();
  p.tsne_csv = (d / "tsne.csv").string();
  p.tsne_svg = (d / "tsne.svg").string();
  p.report_svgs = {(d / "rank_report_corcondia.svg").string(), (d / "rank_report_sse.svg").string(),
                   (d / "rank_report_holdout.svg").string()};
  return p;
}

json provenance(const PipelineConfig& cfg, std::uint64_t stage_seed) {
  return json{{"config_hash", cfg.hash()}, {"seed", stage_seed}, {"root_seed", cfg.seed}, {"version", kVersion}};
}

void cmd_build_tensor(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.embeddings.empty()) throw ValidationError("no embeddings CSV given (paths.embeddings / --embeddings)");
  run_stage("build-tensor", [&] {
    const EmbeddingSet set = read_embeddings_csv(cfg.embeddings, cfg.phases);
    const DenseTensor3 t = build_similarity_tensor(set);
    if (!cfg.metadata.empty()) align_metadata(set.videos, read_metadata_csv(cfg.metadata));

    const auto out = OutputPaths::in(cfg.out_dir);
    ensure_out_dir(cfg);
    json tj = io::tensor_to_json(t);
    tj["provenance"] = provenance(cfg, cfg.seed);
    json mj = io::manifest_to_json(set.videos, set.phases);
    mj["provenance"] = provenance(cfg, cfg.seed);
    io::write_json_file(out.tensor, tj);
    io::write_json_file(out.manifest, mj);

    const auto negatives = count_negative(t);
    log << "build-tensor: dims (" << t.dims().i << "," << t.dims().j << "," << t.dims().k << "), "
        << negatives << " negative entries\n";
    if (negatives > 0) log << "build-tensor: warning: negative similarities are passed through unchanged\n";
  });
}

void cmd_fit(const PipelineConfig& cfg, std::ostream& log) {
  validate_fit_params(cfg);
  run_stage("fit", [&] {
    const auto out = OutputPaths::in(cfg.out_dir);
    const DenseTensor3 t = load_tensor(out);
    check_rank_fits(cfg.rank, t);
    const SymCpModel model = fit(t, cfg.rank, cfg.fit_config(cfg.fit_seed()));
    json j = io::model_to_json(model);
    j["provenance"] = provenance(cfg, cfg.fit_seed());
    io::write_json_file(out.model, j);
    log << "fit: rank " << cfg.rank << ", final SSE " << io::format_double(model.final_sse) << "\n";
  });
}

void cmd_diagnose(const PipelineConfig& cfg, std::ostream& log) {
  validate_fit_params(cfg);
  validate_holdout_params(cfg);
  validate_ranks(cfg);
  run_stage("diagnose", [&] {
    const auto out = OutputPaths::in(cfg.out_dir);
    const DenseTensor3 t = load_tensor(out);
    for (int r : cfg.ranks) check_rank_fits(r, t);
    const std::uint64_t seed = cfg.diagnose_seed();
    const RankReport report = rank_report(t, cfg.ranks, cfg.holdout_config(), cfg.fit_config(seed));

    const json prov = provenance(cfg, seed);
    io::write_json_file(out.report_json, json{{"rows", io::rank_report_to_json(report)}, {"provenance", prov}});
    io::write_text_file(out.report_csv, "# " + provenance_line(cfg, seed) + "\n" + io::rank_report_to_csv(report));

    std::vector<double> xs;
    std::vector<std::optional<double>> cc, sse, rmse;
    for (const auto& row : report.rows) {
      xs.push_back(row.rank);
      cc.push_back(row.corcondia);
      sse.push_back(row.sse);
      rmse.push_back(row.holdout_rmse_mean);
    }
    const std::string comment = provenance_line(cfg, seed);
    io::write_text_file(out.report_svgs[0], svg::line_plot("CORCONDIA", "rank", "core consistency (%)", xs, cc, comment));
    io::write_text_file(out.report_svgs[1], svg::line_plot("Reconstruction error", "rank", "SSE", xs, sse, comment));
    io::write_text_file(out.report_svgs[2], svg::line_plot("Holdout RMSE", "rank", "RMSE", xs, rmse, comment));

    for (const auto& row : report.rows) {
      log << "diagnose: rank " << row.rank << " corcondia "
          << (row.corcondia ? io::format_double(*row.corcondia) : std::string("n/a")) << " sse "
          << io::format_double(row.sse) << " holdout " << io::format_double(row.holdout_rmse_mean) << " +- "
          << io::format_double(row.holdout_rmse_std) << "\n";
    }
  });
}

void cmd_holdout(const PipelineConfig& cfg, std::ostream& log) {
  validate_fit_params(cfg);
  validate_holdout_params(cfg);
  run_stage("holdout", [&] {
    const auto out = OutputPaths::in(cfg.out_dir);
    const DenseTensor3 t = load_tensor(out);
    check_rank_fits(cfg.rank, t);
    const std::uint64_t seed = cfg.holdout_seed();
    const HoldoutResult h = holdout_validate(t, cfg.rank, cfg.holdout_config(), cfg.fit_config(seed));
    json j = io::holdout_to_json(cfg.rank, h);
    j["mask_fraction"] = cfg.mask_fraction;
    j["trials"] = cfg.trials;
    j["provenance"] = provenance(cfg, seed);
    io::write_json_file(out.holdout, j);
    log << "holdout: rank " << cfg.rank << " rmse " << io::format_double(h.rmse_mean) << " +- "
        << io::format_double(h.rmse_std) << "\n";
  });
}

void cmd_project(const PipelineConfig& cfg, std::ostream& log) {
  validate_tsne_params(cfg);
  run_stage("project", [&] {
    const auto out = OutputPaths::in(cfg.out_dir);
    if (!fs::exists(out.model)) throw Error("missing '" + out.model + "'; run fit first");
    if (!fs::exists(out.manifest)) throw Error("missing '" + out.manifest + "'; run build-tensor first");
    const SymCpModel model = io::model_from_json(io::read_json_file(out.model));
    const auto videos = io::manifest_videos(io::read_json_file(out.manifest));
    if (static_cast<std::size_t>(model.video_loadings().rows()) != videos.size()) {
      throw Error("model has " + std::to_string(model.video_loadings().rows()) + " videos but manifest has " +
                  std::to_string(videos.size()));
    }
    std::vector<VideoMetadata> meta;
    if (!cfg.metadata.empty()) meta = align_metadata(videos, read_metadata_csv(cfg.metadata));

    const TsneConfig tcfg = cfg.tsne_config();
    const TsneResult res = tsne_run(model.video_loadings(), tcfg);

    std::ostringstream csv;
    csv << "# " << provenance_line(cfg, tcfg.seed) << "\n";
    csv << "video_id,x,y" << (meta.empty() ? "" : ",location,time_of_day") << "\n";
    std::vector<double> xs, ys;
    std::vector<std::string> groups;
    for (std::size_t n = 0; n < videos.size(); ++n) {
      const auto i = static_cast<Eigen::Index>(n);
      xs.push_back(res.embedding(i, 0));
      ys.push_back(res.embedding(i, 1));
      csv << videos[n] << ',' << io::format_double(xs.back()) << ',' << io::format_double(ys.back());
      if (!meta.empty()) {
        csv << ',' << meta[n].location << ',' << to_string(meta[n].time_of_day);
        groups.push_back(meta[n].location);
      }
      csv << '\n';
    }
    io::write_text_file(out.tsne_csv, csv.str());
    io::write_text_file(out.tsne_svg, svg::scatter(meta.empty() ? "t-SNE of video loadings"
                                                                : "t-SNE of video loadings by location",
                                                   xs, ys, groups, provenance_line(cfg, tcfg.seed)));
    log << "project: " << videos.size() << " points, final KL " << io::format_double(res.kl.back()) << "\n";
  });
}

void cmd_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.embeddings.empty()) throw ValidationError("no embeddings CSV given (paths.embeddings / --embeddings)");
  validate_fit_params(cfg);
  validate_holdout_params(cfg);
  validate_ranks(cfg);
  validate_tsne_params(cfg);
  // Rank bounds depend on N, so read the input once before anything is written.
  std::size_t videos = 0;
  run_stage("build-tensor", [&] { videos = read_embeddings_csv(cfg.embeddings, cfg.phases).video_count(); });
  std::vector<int> all = cfg.ranks;
  all.push_back(cfg.rank);
  for (int r : all) {
    if (static_cast<std::size_t>(r) > videos) {
      throw ValidationError("rank " + std::to_string(r) + " exceeds N = " + std::to_string(videos));
    }
  }
  cmd_build_tensor(cfg, log);
  cmd_fit(cfg, log);
  cmd_diagnose(cfg, log);
  cmd_holdout(cfg, log);
  cmd_project(cfg, log);
}

}  // namespace mvcp::cli
