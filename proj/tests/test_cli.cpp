#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mvcp/io.hpp"
#include "mvcp/log.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"

using namespace mvcp;
using namespace mvcp::cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    set_warnings_enabled(false);
    root_ = fs::temp_directory_path() /
            ("mvcp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override {
    fs::remove_all(root_);
    set_warnings_enabled(true);
  }

  // Small synthetic inputs with cheap solver settings.
  PipelineConfig small_config(std::size_t videos = 10) {
    write_synthetic_inputs(make_synthetic_inputs(videos, 24, 5), (root_ / "in").string());
    PipelineConfig c;
    c.embeddings = (root_ / "in" / "embeddings.csv").string();
    c.metadata = (root_ / "in" / "metadata.csv").string();
    c.out_dir = (root_ / "out").string();
    c.seed = 11;
    c.rank = 2;
    c.iters = 150;
    c.restarts = 2;
    c.ranks = {1, 2, 3, 4};
    c.trials = 2;
    c.tsne_iters = 300;
    c.perplexity = 2.0;
    return c;
  }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = root_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path root_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

}  // namespace

TEST(RankList, Parses) {
  EXPECT_EQ(parse_rank_list("1-4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_rank_list("1,2,5"), (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(parse_rank_list("1-3,6"), (std::vector<int>{1, 2, 3, 6}));
  EXPECT_THROW(parse_rank_list("3-1"), ValidationError);
  EXPECT_THROW(parse_rank_list("x"), ValidationError);
  EXPECT_THROW(parse_rank_list(""), ValidationError);
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  PipelineConfig c;
  c.rank = 3;
  c.ranks = {2, 3};
  c.out_dir = "elsewhere";
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.hash(), c.hash());

  PipelineConfig moved = c;
  moved.out_dir = "another";
  EXPECT_EQ(moved.hash(), c.hash());
  moved.seed = 1;
  EXPECT_NE(moved.hash(), c.hash());

  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json::parse(R"({"fit":{"rnak":3}})")), ValidationError);
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json::parse(R"({"extra":1})")), ValidationError);
  EXPECT_EQ(PipelineConfig::from_json(nlohmann::json::parse(R"({"diagnostics":{"ranks":"1-3"}})")).ranks,
            (std::vector<int>{1, 2, 3}));
}

TEST_F(Cli, EmptyCsvFailsWithoutOutputs) {
  PipelineConfig c;
  c.embeddings = write("empty.csv", "");
  c.out_dir = (root_ / "out").string();
  std::ostringstream log;
  try {
    cmd_build_tensor(c, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "build-tensor");
  }
  EXPECT_EQ(file_count(root_ / "out"), 0u);
}

TEST_F(Cli, DuplicateRowIsNamed) {
  PipelineConfig c;
  c.embeddings = write("dup.csv", "video_id,phase,dim_0\nv,A,1\nv,B,1\nv,C,1\nv,B,2\n");
  c.out_dir = (root_ / "out").string();
  std::ostringstream log;
  try {
    cmd_build_tensor(c, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate row for (v, B)"), std::string::npos) << e.what();
  }
  EXPECT_EQ(file_count(root_ / "out"), 0u);
}

TEST_F(Cli, RankZeroIsAValidationError) {
  PipelineConfig c = small_config();
  std::ostringstream log;
  cmd_build_tensor(c, log);
  const auto before = file_count(c.out_dir);
  c.rank = 0;
  EXPECT_THROW(cmd_fit(c, log), ValidationError);
  EXPECT_THROW(cmd_pipeline(c, log), ValidationError);
  EXPECT_EQ(file_count(c.out_dir), before);
}

TEST_F(Cli, BadSettingsAreValidationErrors) {
  std::ostringstream log;
  PipelineConfig c = small_config();
  c.ranks = {0, 1};
  EXPECT_THROW(cmd_pipeline(c, log), ValidationError);
  c = small_config();
  c.mask_fraction = 1.0;
  EXPECT_THROW(cmd_pipeline(c, log), ValidationError);
  c = small_config();
  c.restarts = 0;
  EXPECT_THROW(cmd_pipeline(c, log), ValidationError);
  c = small_config();
  c.rank = 11;
  EXPECT_THROW(cmd_pipeline(c, log), ValidationError);
  EXPECT_FALSE(fs::exists(c.out_dir));
}

TEST_F(Cli, MissingUpstreamNamesTheStage) {
  PipelineConfig c = small_config();
  std::ostringstream log;
  try {
    cmd_fit(c, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "fit");
  }
}

TEST_F(Cli, DiagnoseCorcondiaOnlyUpToSmallestDim) {
  PipelineConfig c = small_config(31);
  c.ranks = parse_rank_list("1-10");
  c.iters = 100;
  c.restarts = 1;
  c.trials = 1;
  std::ostringstream log;
  cmd_build_tensor(c, log);
  cmd_diagnose(c, log);
  const auto out = OutputPaths::in(c.out_dir);
  const RankReport r = io::rank_report_from_json(io::read_json_file(out.report_json));
  ASSERT_EQ(r.rows.size(), 10u);
  for (const auto& row : r.rows) EXPECT_EQ(row.corcondia.has_value(), row.rank <= 3) << "rank " << row.rank;
}

TEST_F(Cli, PipelineWritesEveryOutputWithProvenance) {
  PipelineConfig c = small_config();
  std::ostringstream log;
  cmd_pipeline(c, log);
  const auto out = OutputPaths::in(c.out_dir);
  const std::string hash = c.hash();
  for (const auto& p : {out.tensor, out.manifest, out.model, out.report_json, out.holdout}) {
    const auto j = io::read_json_file(p);
    ASSERT_TRUE(j.contains("provenance")) << p;
    EXPECT_EQ(j.at("provenance").at("config_hash"), hash) << p;
    EXPECT_EQ(j.at("provenance").at("version"), kVersion) << p;
    EXPECT_TRUE(j.at("provenance").contains("seed")) << p;
  }
  for (const auto& p : {out.report_csv, out.tsne_csv}) {
    EXPECT_EQ(slurp(p).rfind("# mvcp version=", 0), 0u) << p;
    EXPECT_NE(slurp(p).find("config_hash=" + hash), std::string::npos) << p;
  }
  auto svgs = out.report_svgs;
  svgs.push_back(out.tsne_svg);
  for (const auto& p : svgs) EXPECT_NE(slurp(p).find("config_hash=" + hash), std::string::npos) << p;

  const std::string tsne = slurp(out.tsne_csv);
  EXPECT_NE(tsne.find("video_id,x,y,location,time_of_day"), std::string::npos);
}

TEST_F(Cli, PipelineIsByteIdenticalAcrossRuns) {
  PipelineConfig a = small_config();
  PipelineConfig b = a;
  b.out_dir = (root_ / "out2").string();
  std::ostringstream log;
  cmd_pipeline(a, log);
  cmd_pipeline(b, log);
  for (const auto& entry : fs::directory_iterator(a.out_dir)) {
    const auto other = fs::path(b.out_dir) / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
  }
  EXPECT_EQ(file_count(a.out_dir), file_count(b.out_dir));
}

TEST_F(Cli, PipelineMatchesIndividualStages) {
  PipelineConfig a = small_config();
  PipelineConfig b = a;
  b.out_dir = (root_ / "staged").string();
  std::ostringstream log;
  cmd_pipeline(a, log);
  cmd_build_tensor(b, log);
  cmd_fit(b, log);
  cmd_diagnose(b, log);
  cmd_holdout(b, log);
  cmd_project(b, log);
  for (const auto& entry : fs::directory_iterator(a.out_dir))
    EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b.out_dir) / entry.path().filename())) << entry.path().filename();
}
