#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "support/expect_error.hpp"
#include "support/gradcheck.hpp"
#include "support/temp_dir.hpp"

using namespace fusiondrive;
using namespace fusiondrive::app;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// A pipeline small enough for a unit test.
RunConfig tiny_run(const std::filesystem::path& root) {
  RunConfig c;
  c.paths.dataset_dir = (root / "dataset").string();
  c.paths.checkpoint_dir = (root / "checkpoints").string();
  c.paths.report_dir = (root / "reports").string();
  c.seed = 3;
  c.camera.image_width = 80;
  c.camera.image_height = 60;
  c.collect.episodes = 3;
  c.collect.validation_episodes = 1;
  c.collect.route_kinds = {"straight"};
  c.collect.vehicles = 0;
  c.collect.pedestrians = 0;
  c.model = fdtest::tiny_config();
  c.train.max_epochs = 2;
  c.train.lr_patience_epochs = 1;
  c.train.early_stop_patience = 1;
  c.train.batch_size = 16;
  c.benchmark.tasks = {{"straight", sim::RouteKind::kStraight, 0, 0}};
  c.benchmark.routes_per_task = 2;
  c.benchmark.repetitions = 1;
  c.benchmark.weather_set = "custom";
  c.benchmark.weathers = {"clear_afternoon"};
  return c;
}

}  // namespace

TEST(Config, DefaultsValidateAndRoundTrip) {
  fdtest::TempDir dir;
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  save_run_config(dir / "run.json", c);
  EXPECT_EQ(load_run_config(dir / "run.json"), c);
}

TEST(Config, PartialFileKeepsDefaults) {
  fdtest::TempDir dir;
  std::ofstream(dir / "run.json") << R"({"seed": 9, "train": {"max_epochs": 30}})";
  const RunConfig c = load_run_config(dir / "run.json");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.train.max_epochs, 30);
  EXPECT_EQ(c.train.batch_size, RunConfig{}.train.batch_size);
  EXPECT_EQ(c.model, model::desk_config());
}

TEST(Config, Errors) {
  fdtest::TempDir dir;
  EXPECT_FD_ERROR(load_run_config(dir / "none.json"), ErrorCode::kMissingArtifact);
  std::ofstream(dir / "bad.json") << "{ nope";
  EXPECT_FD_ERROR(load_run_config(dir / "bad.json"), ErrorCode::kConfig);
  std::ofstream(dir / "invalid.json") << R"({"model": {"input_size": 100}})";
  EXPECT_FD_ERROR(load_run_config(dir / "invalid.json"), ErrorCode::kConfig);
}

TEST(Config, Overrides) {
  const RunConfig c = apply_overrides(RunConfig{}, {"train.max_epochs=70", "paths.report_dir=out/r",
                                                    "benchmark.weathers=[\"clear_sunset\"]", "loss.lambda3=0.5"});
  EXPECT_EQ(c.train.max_epochs, 70);
  EXPECT_EQ(c.paths.report_dir, "out/r");
  EXPECT_EQ(c.benchmark.weathers, (std::vector<std::string>{"clear_sunset"}));
  EXPECT_DOUBLE_EQ(c.loss.lambda3, 0.5);
  EXPECT_FD_ERROR(apply_overrides(RunConfig{}, {"train.bogus=1"}), ErrorCode::kConfig);
  EXPECT_FD_ERROR(apply_overrides(RunConfig{}, {"no_equals_sign"}), ErrorCode::kConfig);
  EXPECT_FD_ERROR(apply_overrides(RunConfig{}, {"model.input_size=100"}), ErrorCode::kConfig);
}

TEST(Config, ArtifactName) { EXPECT_EQ(artifact_name(bench::Variant::kMSF, 42), "MSF_s42"); }

TEST(Pipeline, MissingArtifacts) {
  fdtest::TempDir dir;
  const RunConfig c = tiny_run(dir.path());
  EXPECT_FD_ERROR(prepare(c, 1), ErrorCode::kMissingArtifact);
  EXPECT_FD_ERROR(bench_variant(c, bench::Variant::kMSFSU, 1), ErrorCode::kMissingArtifact);
}

TEST(Pipeline, EndToEndSmall) {
  fdtest::TempDir dir;
  const RunConfig c = tiny_run(dir.path());
  const data::Manifest m = collect(c, c.collect.episodes, c.seed);
  EXPECT_EQ(m.episodes.size(), 3u);

  const Prepared p = prepare(c, c.seed);
  EXPECT_FALSE(p.train.empty());
  EXPECT_FALSE(p.validation.empty());
  EXPECT_EQ(p.report.output, p.train.size());
  EXPECT_EQ(read_prepared(c.paths.dataset_dir), p);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.paths.report_dir) / "balance_report.csv"));

  const train::TrainSet set = load_frames(c.paths.dataset_dir, p.train, c.model.input_size, 10.0);
  EXPECT_EQ(set.count(), p.train.size());
  EXPECT_LE(set.frames(), set.count());

  std::vector<std::string> lines;
  const TrainOutcome t = train_variant(c, bench::Variant::kMSFSU, c.seed, [&](const std::string& s) {
    lines.push_back(s);
  });
  EXPECT_TRUE(std::filesystem::exists(t.checkpoint));
  EXPECT_TRUE(std::filesystem::exists(t.report_csv));
  EXPECT_FALSE(lines.empty());

  const BenchOutcome b = bench_variant(c, bench::Variant::kMSFSU, c.seed);
  EXPECT_EQ(b.report.episodes.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(b.report_csv));
  const BenchOutcome e = bench_expert(c);
  ASSERT_EQ(e.report.tasks.size(), 1u);
  EXPECT_DOUBLE_EQ(e.report.tasks[0].success.mean, 100.0);

  // A second prepare with the same seed reproduces the balance report bytes.
  const std::string before = slurp(std::filesystem::path(c.paths.report_dir) / "balance_report.csv");
  prepare(c, c.seed);
  EXPECT_EQ(slurp(std::filesystem::path(c.paths.report_dir) / "balance_report.csv"), before);
}
