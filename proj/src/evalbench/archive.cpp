#include "evalbench/archive.hpp"

#include <fstream>

#include "common/error.hpp"

namespace fusiondrive::bench {
namespace {

void write_jsonl(const std::filesystem::path& path, const std::vector<EpisodeResult>& episodes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& e : episodes) out << nlohmann::json(e).dump() << '\n';
}

std::vector<EpisodeResult> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing " + path.string());
  std::vector<EpisodeResult> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line).get<EpisodeResult>());
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const EpisodeResult& e) {
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& p : e.trajectory) traj.push_back({p.t, p.x, p.y, p.heading, p.speed, p.yaw_rate});
  nlohmann::json log = nlohmann::json::array();
  for (const auto& c : e.commands_log)
    log.push_back({c.t, to_string(c.command), c.steer, c.speed, c.throttle, c.brake});
  j = {{"agent", e.agent},        {"task", e.task},
       {"weather", e.weather},    {"route_id", e.route_id},
       {"repetition", e.repetition}, {"seed", e.seed},
       {"success", e.success},    {"failure", to_string(e.failure)},
       {"error", e.error},        {"route_length", e.route_length},
       {"time_limit", e.time_limit}, {"trajectory", traj},
       {"commands", log}};
}

void from_json(const nlohmann::json& j, EpisodeResult& e) {
  e.agent = j.at("agent");
  e.task = j.at("task");
  e.weather = j.at("weather");
  e.route_id = j.at("route_id");
  e.repetition = j.at("repetition");
  e.seed = j.at("seed");
  e.success = j.at("success");
  e.failure = failure_reason_from_string(j.at("failure").get<std::string>());
  e.error = j.value("error", std::string());
  e.route_length = j.at("route_length");
  e.time_limit = j.at("time_limit");
  e.trajectory.clear();
  for (const auto& p : j.at("trajectory")) e.trajectory.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>(),
                            p[4].get<double>(), p[5].get<double>()});
  e.commands_log.clear();
  for (const auto& c : j.at("commands")) {
    const auto cmd = nav_command_from_string(c[1].get<std::string>());
    if (!cmd) throw Error(ErrorCode::kIo, "unknown command in archive");
    e.commands_log.push_back({c[0].get<double>(), *cmd,
                              c[2].get<double>(), c[3].get<double>(), c[4].get<double>(), c[5].get<double>()});
  }
}

void write_archive(const std::filesystem::path& dir, const BenchmarkSpec& spec, const BenchmarkReport& report) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "spec.json", std::ios::trunc) << nlohmann::json(spec).dump(2) << '\n';
  std::ofstream(dir / "report.csv", std::ios::trunc) << report_csv(std::span(&report, 1));
  write_jsonl(dir / "episodes.jsonl", report.episodes);
  write_jsonl(dir / "expert.jsonl", report.expert_episodes);
}

Archive read_archive(const std::filesystem::path& dir) {
  std::ifstream in(dir / "spec.json");
  if (!in) throw Error(ErrorCode::kMissingArtifact, "no benchmark archive in " + dir.string());
  Archive a;
  try {
    a.spec = nlohmann::json::parse(in).get<BenchmarkSpec>();
    a.episodes = read_jsonl(dir / "episodes.jsonl");
    a.expert_episodes = read_jsonl(dir / "expert.jsonl");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "corrupt archive in " + dir.string() + ": " + e.what());
  }
  return a;
}

}  // namespace fusiondrive::bench
