#include <gtest/gtest.h>

#include "mvcp/error.hpp"
#include "mvcp/io.hpp"
#include "mvcp/log.hpp"
#include "mvcp/sym_ncp.hpp"
#include "support/oracles.hpp"

using namespace mvcp;
using nlohmann::json;

TEST(TensorJson, RoundTripsExactly) {
  const DenseTensor3 t = oracle::random_symmetric(5, 3, 1);
  const json j = io::tensor_to_json(t);
  EXPECT_EQ(j.at("dims"), json({5, 5, 3}));
  EXPECT_EQ(io::tensor_from_json(json::parse(j.dump())), t);
}

TEST(TensorJson, RejectsMalformed) {
  EXPECT_THROW(io::tensor_from_json(json::parse(R"({"dims":[2,2],"values":[1,2,3,4]})")), ParseError);
  EXPECT_THROW(io::tensor_from_json(json::parse(R"({"dims":[1,1,2],"values":[1]})")), ParseError);
  EXPECT_THROW(io::tensor_from_json(json::parse(R"({"values":[1]})")), ParseError);
}

TEST(ModelJson, RoundTripsExactly) {
  set_warnings_enabled(false);
  FitConfig cfg;
  cfg.max_iters = 50;
  cfg.seed = 9;
  const SymCpModel m = fit(oracle::random_symmetric(6, 3, 2), 2, cfg);
  set_warnings_enabled(true);
  const json j = io::model_to_json(m);
  for (const char* key : {"rank", "lambda", "phase_loadings", "video_loadings", "final_sse", "per_restart_sse", "seed"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("video_loadings").size(), 6u);
  EXPECT_EQ(j.at("video_loadings")[0].size(), 2u);

  const SymCpModel back = io::model_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.lambda(), m.lambda());
  EXPECT_EQ(back.phase_loadings(), m.phase_loadings());
  EXPECT_EQ(back.video_loadings(), m.video_loadings());
  EXPECT_EQ(back.final_sse, m.final_sse);
  EXPECT_EQ(back.per_restart_sse, m.per_restart_sse);
  EXPECT_EQ(back.restart_seed, m.restart_seed);
}

TEST(RankReportJson, NullCorcondiaAndWrappedForm) {
  RankReport r;
  r.rows.push_back({1, 100.0, 2.5, 0.1, 0.01});
  r.rows.push_back({4, std::nullopt, 0.5, 0.2, 0.0});
  const json arr = io::rank_report_to_json(r);
  EXPECT_TRUE(arr[1].at("corcondia").is_null());

  for (const json& form : {arr, json{{"rows", arr}, {"provenance", json::object()}}}) {
    const RankReport back = io::rank_report_from_json(form);
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_EQ(back.rows[0].corcondia, 100.0);
    EXPECT_FALSE(back.rows[1].corcondia.has_value());
    EXPECT_EQ(back.rows[1].sse, 0.5);
  }

  const std::string csv = io::rank_report_to_csv(r);
  EXPECT_EQ(csv,
            "rank,corcondia,sse,holdout_rmse_mean,holdout_rmse_std\n"
            "1,100,2.5,0.1,0.01\n"
            "4,,0.5,0.2,0\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}
