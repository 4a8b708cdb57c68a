#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "datapipe/dataset_io.hpp"
#include "datapipe/sample.hpp"
#include "evalbench/ablation.hpp"
#include "evalbench/benchmark.hpp"
#include "evalbench/replay.hpp"
#include "training/train_set.hpp"
#include "training/trainer.hpp"

namespace fusiondrive::app {

using Log = std::function<void(const std::string&)>;

/// "<variant>_s<seed>", the stem of every per-variant artifact.
std::string artifact_name(bench::Variant variant, uint64_t seed);

/// Records `episodes` expert episodes with steering noise into the dataset
/// directory (replacing earlier episodes). The last
/// collect.validation_episodes are recorded in the test town.
data::Manifest collect(const RunConfig& config, int episodes, uint64_t seed, const Log& log = {});

/// A frame of the dataset: (episode index in the manifest, frame number).
struct FrameRef {
  int episode = 0;
  int frame = 0;

  bool operator==(const FrameRef&) const = default;
};

struct Prepared {
  uint64_t seed = 0;
  data::BalanceReport report;
  std::vector<FrameRef> train;       // balanced order, duplicates repeated
  std::vector<FrameRef> validation;  // test-town frames without noise

  bool operator==(const Prepared&) const = default;
};

/// Strips noise frames and balances the training-town frames. Writes
/// prepared.json into the dataset directory and balance_report.csv into the
/// report directory. Throws Error(kMissingArtifact) without a dataset.
Prepared prepare(const RunConfig& config, uint64_t seed, const Log& log = {});
Prepared read_prepared(const std::filesystem::path& dataset_dir);

/// Loads and preprocesses the referenced frames; repeated references share storage.
train::TrainSet load_frames(const std::filesystem::path& dataset_dir, const std::vector<FrameRef>& refs,
                            int input_size, double v_max);

struct TrainOutcome {
  std::filesystem::path checkpoint;
  std::filesystem::path report_csv;
  train::TrainReport report;
};

/// Trains one variant on the prepared dataset and writes the checkpoint and
/// the per-epoch CSV.
TrainOutcome train_variant(const RunConfig& config, bench::Variant variant, uint64_t seed, const Log& log = {});

struct BenchOutcome {
  std::filesystem::path report_csv;
  std::filesystem::path archive;
  bench::BenchmarkReport report;
};

/// Benchmarks the variant's checkpoint. Reads only the checkpoint; writes the
/// report CSV and archive under the report directory.
BenchOutcome bench_variant(const RunConfig& config, bench::Variant variant, uint64_t seed, const Log& log = {});
/// Benchmarks the scripted expert the same way.
BenchOutcome bench_expert(const RunConfig& config, const Log& log = {});

struct AblateOutcome {
  std::vector<TrainOutcome> trained;
  std::vector<BenchOutcome> benchmarked;
  std::filesystem::path report_csv;  // rows of all variants
};

AblateOutcome ablate(const RunConfig& config, uint64_t seed, const Log& log = {});

}  // namespace fusiondrive::app
