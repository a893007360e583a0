#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvcp/diagnostics.hpp"
#include "mvcp/similarity.hpp"
#include "mvcp/sym_ncp.hpp"
#include "mvcp/tensor.hpp"

namespace mvcp::io {

using nlohmann::json;

/// {"dims":[I,J,K],"values":[...]} with values in DenseTensor3 layout
/// (offset i + I*(j + J*k)).
json tensor_to_json(const DenseTensor3& t);
DenseTensor3 tensor_from_json(const json& j);

/// {"rank","lambda","phase_loadings","video_loadings","final_sse",
///  "per_restart_sse","seed"}; loadings are row arrays (P x R and N x R),
/// "seed" is the winning restart's seed.
json model_to_json(const SymCpModel& m);
SymCpModel model_from_json(const json& j);

/// {"videos":[{"index":0,"video_id":...},...],"phases":[...]}
json manifest_to_json(const std::vector<std::string>& videos, const std::vector<std::string>& phases);
std::vector<std::string> manifest_videos(const json& j);

/// Array of {"rank","corcondia"(null if not applicable),"sse",
/// "holdout_rmse_mean","holdout_rmse_std"}.
json rank_report_to_json(const RankReport& r);
/// Accepts the bare array or an object whose "rows" member is that array.
RankReport rank_report_from_json(const json& j);
/// `rank,corcondia,sse,holdout_rmse_mean,holdout_rmse_std`; an empty
/// corcondia field means not applicable.
std::string rank_report_to_csv(const RankReport& r);

json holdout_to_json(int rank, const HoldoutResult& h);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Two-space indented dump followed by a newline.
void write_json_file(const std::string& path, const json& j);

}  // namespace mvcp::io
