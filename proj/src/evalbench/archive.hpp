#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "evalbench/benchmark.hpp"
#include "evalbench/episode.hpp"

namespace fusiondrive::bench {

void to_json(nlohmann::json& j, const EpisodeResult& e);
void from_json(const nlohmann::json& j, EpisodeResult& e);

/// Writes spec.json, report.csv, episodes.jsonl (agent runs) and expert.jsonl
/// (reference runs) into dir.
void write_archive(const std::filesystem::path& dir, const BenchmarkSpec& spec, const BenchmarkReport& report);

struct Archive {
  BenchmarkSpec spec;
  std::vector<EpisodeResult> episodes;
  std::vector<EpisodeResult> expert_episodes;
};

/// Throws Error(kMissingArtifact) when dir holds no archive.
Archive read_archive(const std::filesystem::path& dir);

}  // namespace fusiondrive::bench
