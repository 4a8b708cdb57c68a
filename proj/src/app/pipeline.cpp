#include "app/pipeline.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "datapipe/balance.hpp"
#include "datapipe/record.hpp"
#include "evalbench/agent.hpp"
#include "evalbench/archive.hpp"
#include "model/checkpoint.hpp"
#include "simworld/weather.hpp"

namespace fusiondrive::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void say(const Log& log, const std::string& s) {
  if (log) log(s);
}

sim::RouteKind route_kind(const std::string& s) {
  if (s == "straight") return sim::RouteKind::kStraight;
  if (s == "one_turn") return sim::RouteKind::kOneTurn;
  if (s == "navigation") return sim::RouteKind::kNavigation;
  throw Error(ErrorCode::kConfig, "unknown route kind '" + s + "'");
}

json report_json(const data::BalanceReport& r) {
  return {{"input", r.input},   {"lane_follow", r.lane_follow}, {"other_commands", r.other_commands},
          {"small_steer", r.small_steer}, {"large_steer", r.large_steer}, {"stage1", r.stage1},
          {"stage2", r.stage2}, {"stage3", r.stage3},           {"output", r.output}};
}

data::BalanceReport report_from(const json& j) {
  data::BalanceReport r;
  r.input = j.at("input");
  r.lane_follow = j.at("lane_follow");
  r.other_commands = j.at("other_commands");
  r.small_steer = j.at("small_steer");
  r.large_steer = j.at("large_steer");
  r.stage1 = j.at("stage1");
  r.stage2 = j.at("stage2");
  r.stage3 = j.at("stage3");
  r.output = j.at("output");
  return r;
}

json refs_json(const std::vector<FrameRef>& refs) {
  json a = json::array();
  for (const auto& r : refs) a.push_back({r.episode, r.frame});
  return a;
}

std::vector<FrameRef> refs_from(const json& a) {
  std::vector<FrameRef> out;
  for (const auto& r : a) out.push_back({r[0].get<int>(), r[1].get<int>()});
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

fs::path checkpoint_path(const RunConfig& c, bench::Variant v, uint64_t seed) {
  return fs::path(c.paths.checkpoint_dir) / (artifact_name(v, seed) + ".ckpt");
}

BenchOutcome run_and_write(const RunConfig& config, bench::Agent& agent, const std::string& stem, const Log& log) {
  size_t done = 0;
  const auto& spec = config.benchmark;
  const size_t total = spec.tasks.size() * static_cast<size_t>(spec.routes_per_task) * spec.weathers.size() *
                       static_cast<size_t>(spec.repetitions);
  BenchOutcome out;
  out.report = bench::run_benchmark(agent, spec, config.episode_rules(), [&](const bench::EpisodeResult& e) {
    ++done;
    std::ostringstream os;
    os << "[bench " << stem << "] " << done << "/" << total << " " << e.task << " route " << e.route_id << " "
       << (e.success ? "success" : std::string(bench::to_string(e.failure)));
    say(log, os.str());
  });
  const fs::path dir(config.paths.report_dir);
  out.report_csv = dir / ("bench_" + stem + ".csv");
  out.archive = dir / ("bench_" + stem);
  write_text(out.report_csv, bench::report_csv(std::span(&out.report, 1)));
  bench::write_archive(out.archive, spec, out.report);
  return out;
}

}  // namespace

std::string artifact_name(bench::Variant variant, uint64_t seed) {
  return std::string(bench::to_string(variant)) + "_s" + std::to_string(seed);
}

data::Manifest collect(const RunConfig& config, int episodes, uint64_t seed, const Log& log) {
  RunConfig cfg = config;
  cfg.collect.episodes = episodes;
  if (cfg.collect.validation_episodes >= episodes) cfg.collect.validation_episodes = episodes > 1 ? 1 : 0;
  cfg.validate();

  const fs::path root(cfg.paths.dataset_dir);
  fs::create_directories(root);
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && entry.path().filename().string().rfind("episode_", 0) == 0)
      fs::remove_all(entry.path());
  fs::remove(root / "prepared.json");

  data::RecordOptions opt;
  opt.dt = cfg.dt;
  opt.goal_radius = cfg.goal_radius;
  opt.timeout_speed = cfg.timeout_speed;
  opt.stationary_limit_s = cfg.stationary_limit_s;
  opt.camera = cfg.camera;
  opt.autopilot = cfg.autopilot;
  opt.sim = cfg.sim;
  opt.pid = cfg.pid;
  opt.noise = cfg.noise;

  data::Manifest manifest;
  manifest.image_width = cfg.camera.image_width;
  manifest.image_height = cfg.camera.image_height;
  manifest.dt = cfg.dt;
  const int first_validation = episodes - cfg.collect.validation_episodes;
  for (int i = 0; i < episodes; ++i) {
    const sim::TownId town_id = i >= first_validation ? sim::TownId::kTest : sim::TownId::kTrain;
    const sim::TownMap& town = sim::builtin_town(town_id);
    const uint64_t ep_seed = mix_seed(seed, static_cast<uint64_t>(i), 0xC011ull);
    Rng rng(ep_seed);
    const auto& kinds = cfg.collect.route_kinds;
    const sim::RouteSpec route =
        sim::sample_route(town, route_kind(kinds[static_cast<size_t>(i) % kinds.size()]), rng,
                          cfg.collect.min_navigation_length);
    sim::ScenarioSpec scenario;
    scenario.n_vehicles = cfg.collect.vehicles;
    scenario.n_pedestrians = cfg.collect.pedestrians;
    scenario.weather = sim::weather_by_name(cfg.collect.weathers[static_cast<size_t>(i) % cfg.collect.weathers.size()]);
    scenario.seed = ep_seed;
    scenario.ego_start = route.start_pose;
    const sim::WorldState initial = sim::spawn_scenario(town, scenario, cfg.sim);

    data::EpisodeWriter writer(root / data::episode_dir_name(i));
    const auto summary = data::record_episode(town, initial, route, opt, ep_seed,
                                              [&writer](data::Sample&& s) { writer.add(s); });
    data::EpisodeInfo info;
    info.name = data::episode_dir_name(i);
    info.town = town_id;
    info.weather = scenario.weather.name;
    info.seed = ep_seed;
    info.frames = summary.frames;
    info.flagged = summary.flagged;
    info.end = std::string(data::to_string(summary.end));
    info.route_length = route.length();
    manifest.episodes.push_back(info);
    say(log, "[collect] " + info.name + " " + std::string(sim::to_string(town_id)) + " " + info.weather + " " +
                 std::to_string(info.frames) + " frames, " + info.end);
  }
  data::write_manifest(root, manifest);
  return manifest;
}

Prepared prepare(const RunConfig& config, uint64_t seed, const Log& log) {
  const fs::path root(config.paths.dataset_dir);
  const data::Manifest manifest = data::read_manifest(root);
  std::vector<FrameRef> train_refs;
  std::vector<data::BalanceKey> keys;
  Prepared p;
  p.seed = seed;
  for (size_t e = 0; e < manifest.episodes.size(); ++e) {
    const auto& info = manifest.episodes[e];
    for (const auto& r : data::read_records(root / info.name)) {
      if (r.noise) continue;
      const FrameRef ref{static_cast<int>(e), r.frame};
      if (info.town == sim::TownId::kTrain) {
        train_refs.push_back(ref);
        keys.push_back({r.command, r.steer, r.speed});
      } else {
        p.validation.push_back(ref);
      }
    }
  }
  const data::BalancePlan plan = data::plan_balance(keys, seed, config.balance);
  p.report = plan.report;
  for (size_t i : plan.order) p.train.push_back(train_refs[i]);

  const json j = {{"seed", seed},
                  {"balance", report_json(p.report)},
                  {"train", refs_json(p.train)},
                  {"validation", refs_json(p.validation)}};
  write_text(root / "prepared.json", j.dump() + "\n");
  const auto& r = p.report;
  std::ostringstream csv;
  csv << "input,lane_follow,other_commands,small_steer,large_steer,stage1,stage2,stage3,output,validation\n"
      << r.input << ',' << r.lane_follow << ',' << r.other_commands << ',' << r.small_steer << ',' << r.large_steer
      << ',' << r.stage1 << ',' << r.stage2 << ',' << r.stage3 << ',' << r.output << ',' << p.validation.size()
      << '\n';
  write_text(fs::path(config.paths.report_dir) / "balance_report.csv", csv.str());
  say(log, "[prepare] " + std::to_string(r.input) + " clean frames -> " + std::to_string(r.output) +
               " training samples, " + std::to_string(p.validation.size()) + " validation frames");
  return p;
}

Prepared read_prepared(const fs::path& dataset_dir) {
  std::ifstream in(dataset_dir / "prepared.json");
  if (!in) throw Error(ErrorCode::kMissingArtifact, "dataset in " + dataset_dir.string() + " is not prepared");
  try {
    const json j = json::parse(in);
    Prepared p;
    p.seed = j.at("seed");
    p.report = report_from(j.at("balance"));
    p.train = refs_from(j.at("train"));
    p.validation = refs_from(j.at("validation"));
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("corrupt prepared.json: ") + e.what());
  }
}

train::TrainSet load_frames(const fs::path& dataset_dir, const std::vector<FrameRef>& refs, int input_size,
                            double v_max) {
  const data::Manifest manifest = data::read_manifest(dataset_dir);
  std::map<int, std::vector<data::FrameRecord>> records;
  std::map<std::pair<int, int>, uint32_t> loaded;
  train::TrainSet set(input_size);
  for (const auto& ref : refs) {
    const auto key = std::pair(ref.episode, ref.frame);
    auto it = loaded.find(key);
    if (it == loaded.end()) {
      if (ref.episode < 0 || static_cast<size_t>(ref.episode) >= manifest.episodes.size())
        throw Error(ErrorCode::kMissingArtifact, "frame reference to a missing episode");
      const fs::path dir = dataset_dir / manifest.episodes[ref.episode].name;
      auto& recs = records[ref.episode];
      if (recs.empty()) recs = data::read_records(dir);
      const auto rec = std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.frame == ref.frame; });
      if (rec == recs.end()) throw Error(ErrorCode::kMissingArtifact, "frame " + std::to_string(ref.frame) + " missing");
      it = loaded.emplace(key, set.add_frame(data::load_sample(dir, *rec), v_max)).first;
    }
    set.order.push_back(it->second);
  }
  return set;
}

TrainOutcome train_variant(const RunConfig& config, bench::Variant variant, uint64_t seed, const Log& log) {
  const fs::path root(config.paths.dataset_dir);
  const Prepared p = read_prepared(root);
  const auto setup = bench::make_ablation(variant, config.model, config.train, config.loss);
  model::ModelConfig mc = setup.model;
  mc.init_seed = mix_seed(seed, mc.init_seed);
  train::TrainConfig tc = setup.train;
  tc.seed = seed;
  const double v_max = config.sim.vehicle.v_max;
  say(log, "[train " + artifact_name(variant, seed) + "] loading " + std::to_string(p.train.size()) +
               " training and " + std::to_string(p.validation.size()) + " validation samples");
  const train::TrainSet train_set = load_frames(root, p.train, mc.input_size, v_max);
  const train::TrainSet val_set = load_frames(root, p.validation, mc.input_size, v_max);
  auto result = train::train_model(train_set, val_set, mc, tc, setup.weights, [&](const train::EpochRecord& e) {
    std::ostringstream os;
    os << "[train " << artifact_name(variant, seed) << "] epoch " << e.epoch << " lr " << e.lr << " train "
       << e.train.total << " val " << e.validation.total << (e.improved ? " *" : "");
    say(log, os.str());
  });

  TrainOutcome out;
  out.report = result.report;
  out.checkpoint = checkpoint_path(config, variant, seed);
  model::CheckpointMeta meta;
  meta.epoch = result.report.best_epoch;
  meta.validation_loss = result.report.best_validation;
  meta.variant = std::string(bench::to_string(variant));
  meta.seed = seed;
  meta.extra = {{"train", tc}, {"loss", setup.weights}, {"stop", train::to_string(result.report.stop)}};
  model::save_checkpoint(out.checkpoint, *result.net, meta);
  out.report_csv = fs::path(config.paths.report_dir) / ("train_" + artifact_name(variant, seed) + ".csv");
  write_text(out.report_csv, result.report.to_csv());
  return out;
}

BenchOutcome bench_variant(const RunConfig& config, bench::Variant variant, uint64_t seed, const Log& log) {
  auto loaded = model::load_checkpoint(checkpoint_path(config, variant, seed));
  if (loaded.meta.variant != bench::to_string(variant))
    throw Error(ErrorCode::kMissingArtifact, "checkpoint holds variant " + loaded.meta.variant);
  bench::ModelAgent agent(*loaded.net, std::string(bench::to_string(variant)));
  return run_and_write(config, agent, artifact_name(variant, seed), log);
}

BenchOutcome bench_expert(const RunConfig& config, const Log& log) {
  bench::ExpertAgent agent(config.autopilot, config.sim.vehicle);
  return run_and_write(config, agent, "expert", log);
}

AblateOutcome ablate(const RunConfig& config, uint64_t seed, const Log& log) {
  AblateOutcome out;
  std::vector<bench::BenchmarkReport> reports;
  for (bench::Variant v : bench::kAllVariants) {
    out.trained.push_back(train_variant(config, v, seed, log));
    out.benchmarked.push_back(bench_variant(config, v, seed, log));
    reports.push_back(out.benchmarked.back().report);
  }
  out.report_csv = fs::path(config.paths.report_dir) / ("ablation_s" + std::to_string(seed) + ".csv");
  write_text(out.report_csv, bench::report_csv(reports));
  return out;
}

}  // namespace fusiondrive::app
