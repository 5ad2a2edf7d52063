#include "numforge/error.hpp"
#include "numforge/io.hpp"
#include "numforge/pipeline.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

namespace numforge {
namespace {

using testing::TempDir;

RunConfig fixture_config(const std::filesystem::path& out) {
  RunConfig cfg = RunConfig::parse(testing::fixture("forge.ini"), testing::fixture_dir());
  cfg.out_dir = out;
  return cfg;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

TEST(RunConfig, ParsesFixture) {
  const RunConfig cfg = RunConfig::parse(testing::fixture("forge.ini"), "/base");
  EXPECT_EQ(cfg.pipeline.n_min, 3u);
  EXPECT_EQ(cfg.pipeline.n_max, 8u);
  EXPECT_EQ(cfg.pipeline.n_cho, 4u);
  EXPECT_EQ(cfg.pipeline.seed, 42u);
  EXPECT_EQ(cfg.manifest, std::filesystem::path("/base/manifest.json"));
  EXPECT_EQ(cfg.out_dir, std::filesystem::path("/base/out"));
  EXPECT_EQ(cfg.window_k, 512u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(RunConfig, RejectsUnknownAndMalformedKeys) {
  EXPECT_THROW(RunConfig::parse("[extract]\nn_mni = 3\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[nowhere]\nx = 1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[extract]\nn_min = three\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[run]\nseed = -1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[corpus]\nrejoin_breaks = maybe\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[choices]\ns = abc\n"), ConfigError);
  EXPECT_NE(message_of([] { RunConfig::parse("[extract]\nn_mni = 3\n"); }).find("n_mni"), std::string::npos);
}

TEST(RunConfig, ValidationNamesTheConstraint) {
  RunConfig cfg = RunConfig::parse("[extract]\nn_min = 10\nn_max = 2\n");
  const std::string msg = message_of([&] { cfg.validate(); });
  EXPECT_NE(msg.find("n_max"), std::string::npos);
  EXPECT_NE(msg.find("n_min"), std::string::npos);
  EXPECT_THROW(RunConfig::parse("[instructions]\nidentifiers = A,B,C\n").validate(), ConfigError);
  EXPECT_THROW(RunConfig::parse("[instructions]\nidentifiers = A,A,C,D\n").validate(), ConfigError);
  EXPECT_THROW(RunConfig::parse("[instructions]\nwindow_k = 0\n").validate(), ConfigError);
}

TEST(RunConfig, EnvironmentSeed) {
  RunConfig cfg = RunConfig::parse("[run]\nseed = 1\n");
  ::setenv("FORGE_SEED", "777", 1);
  cfg.apply_environment();
  ::unsetenv("FORGE_SEED");
  EXPECT_EQ(cfg.pipeline.seed, 777u);
  ::setenv("FORGE_SEED", "x", 1);
  EXPECT_THROW(cfg.apply_environment(), ConfigError);
  ::unsetenv("FORGE_SEED");
}

TEST(RunConfig, MissingFile) {
  EXPECT_THROW(RunConfig::load("/nonexistent/forge.ini"), InputError);
}

TEST(RunAll, MatchesGoldens) {
  TempDir tmp;
  const RunConfig cfg = fixture_config(tmp.path());
  const RunOutputs out = run_all(cfg);
  EXPECT_EQ(read_text_file(tmp / out.corpus.string()), testing::golden("corpus.jsonl"));
  EXPECT_EQ(read_text_file(tmp / out.stats.string()), testing::golden("stats.json"));
  EXPECT_EQ(read_text_file(tmp / out.instances.string()), testing::golden("instances.jsonl"));
  EXPECT_EQ(read_text_file(tmp / out.numct.string()), testing::golden("numct.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(tmp / out.training.string()));

  const auto manifest = tmp / out.manifest.string();
  EXPECT_TRUE(verify_manifest(manifest).empty());
  write_text_file(tmp / out.numct.string(), "tampered\n");
  EXPECT_EQ(verify_manifest(manifest), std::vector<std::string>{"numct.jsonl"});
}

TEST(RunAll, OutputIndependentOfJobs) {
  TempDir a;
  TempDir b;
  RunConfig ca = fixture_config(a.path());
  RunConfig cb = fixture_config(b.path());
  cb.jobs = 4;
  const RunOutputs out = run_all(ca);
  run_all(cb);
  for (const auto& f : {out.corpus, out.stats, out.instances, out.numct, out.training}) {
    EXPECT_EQ(read_text_file(a / f.string()), read_text_file(b / f.string())) << f;
  }
}

TEST(RunAll, SeedChangesSelection) {
  TempDir a;
  RunConfig cfg = fixture_config(a.path());
  cfg.pipeline.seed = 43;
  run_all(cfg);
  EXPECT_NE(read_text_file(a / "numct.jsonl"), testing::golden("numct.jsonl"));
}

TEST(RunAll, MissingManifestIsNamed) {
  TempDir tmp;
  RunConfig cfg = fixture_config(tmp.path());
  cfg.manifest = tmp / "absent.json";
  try {
    run_all(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
    EXPECT_NE(std::string(e.what()).find("absent.json"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("preprocess"), std::string::npos);
  }
}

TEST(RunAll, InvalidConfigStopsBeforeOutput) {
  TempDir tmp;
  RunConfig cfg = fixture_config(tmp / "out");
  cfg.pipeline.n_min = 10;
  cfg.pipeline.n_max = 2;
  try {
    run_all(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  EXPECT_FALSE(std::filesystem::exists(tmp / "out"));
}

}  // namespace
}  // namespace numforge
