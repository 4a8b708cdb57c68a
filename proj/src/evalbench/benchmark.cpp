#include "evalbench/benchmark.hpp"

#include <cstdio>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "simworld/weather.hpp"

namespace fusiondrive::bench {
namespace {

std::string_view route_kind_name(sim::RouteKind k) {
  switch (k) {
    case sim::RouteKind::kStraight: return "straight";
    case sim::RouteKind::kOneTurn: return "one_turn";
    case sim::RouteKind::kNavigation: return "navigation";
  }
  return "navigation";
}

sim::RouteKind route_kind_from(std::string_view s) {
  for (auto k : {sim::RouteKind::kStraight, sim::RouteKind::kOneTurn, sim::RouteKind::kNavigation})
    if (route_kind_name(k) == s) return k;
  throw Error(ErrorCode::kConfig, "unknown route kind '" + std::string(s) + "'");
}

std::vector<std::string> names(std::span<const std::string_view> v) { return {v.begin(), v.end()}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

TaskReport summarize(const std::string& task, std::span<const EpisodeResult> agent,
                     std::span<const EpisodeResult> expert, int repetitions, bool empty_traffic) {
  TaskReport t;
  t.task = task;
  t.episodes = static_cast<int>(agent.size());
  for (int rep = 0; rep < repetitions; ++rep) {
    std::vector<EpisodeResult> subset;
    for (const auto& e : agent)
      if (e.repetition == rep) subset.push_back(e);
    t.repetition_rates.push_back(success_rate(subset));
  }
  t.success = mean_std(t.repetition_rates);
  if (empty_traffic && !expert.empty()) {
    t.rmse_episodes = successful_pairs(agent, expert);
    if (t.rmse_episodes > 0) t.rmse = trajectory_rmse(agent, expert);
  }
  return t;
}

}  // namespace

BenchmarkSpec BenchmarkSpec::corl2017(sim::TownId town, const std::string& set) {
  BenchmarkSpec s;
  s.style = BenchmarkStyle::kCorl2017;
  s.town = town;
  s.tasks = {{"straight", sim::RouteKind::kStraight, 0, 0},
             {"one_turn", sim::RouteKind::kOneTurn, 0, 0},
             {"navigation", sim::RouteKind::kNavigation, 0, 0},
             {"nav_dynamic", sim::RouteKind::kNavigation, kRegularTraffic.vehicles, kRegularTraffic.pedestrians}};
  s.weather_set = set;
  s.weathers = weather_names(s.style, set);
  return s;
}

BenchmarkSpec BenchmarkSpec::nocrash(sim::TownId town, const std::string& set) {
  BenchmarkSpec s;
  s.style = BenchmarkStyle::kNoCrash;
  s.town = town;
  s.tasks = {{"empty", sim::RouteKind::kNavigation, 0, 0},
             {"regular", sim::RouteKind::kNavigation, kRegularTraffic.vehicles, kRegularTraffic.pedestrians},
             {"dense", sim::RouteKind::kNavigation, kDenseTraffic.vehicles, kDenseTraffic.pedestrians}};
  s.weather_set = set;
  s.weathers = weather_names(s.style, set);
  return s;
}

std::vector<std::string> weather_names(BenchmarkStyle style, const std::string& name) {
  if (name == "training") return names(sim::training_weathers());
  if (name == "testing")
    return names(style == BenchmarkStyle::kNoCrash ? sim::nocrash_test_weathers() : sim::corl2017_test_weathers());
  throw Error(ErrorCode::kConfig, "unknown weather set '" + name + "'");
}

void BenchmarkSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, "benchmark: " + what); };
  if (tasks.empty()) fail("no tasks");
  if (routes_per_task < 1) fail("routes_per_task must be positive");
  if (repetitions < 1) fail("repetitions must be positive");
  if (weathers.empty()) fail("no weathers");
  for (const auto& w : weathers) sim::weather_by_name(w);
  for (const auto& t : tasks)
    if (t.vehicles < 0 || t.pedestrians < 0) fail("negative traffic in task " + t.name);
}

void to_json(nlohmann::json& j, const TaskSpec& t) {
  j = {{"name", t.name}, {"route_kind", route_kind_name(t.route_kind)}, {"vehicles", t.vehicles},
       {"pedestrians", t.pedestrians}};
}

void from_json(const nlohmann::json& j, TaskSpec& t) {
  t.name = j.at("name");
  t.route_kind = route_kind_from(j.at("route_kind").get<std::string>());
  t.vehicles = j.value("vehicles", 0);
  t.pedestrians = j.value("pedestrians", 0);
}

void to_json(nlohmann::json& j, const BenchmarkSpec& s) {
  j = {{"style", to_string(s.style)},
       {"tasks", s.tasks},
       {"routes_per_task", s.routes_per_task},
       {"weather_set", s.weather_set},
       {"weathers", s.weathers},
       {"town", sim::to_string(s.town)},
       {"repetitions", s.repetitions},
       {"seed", s.seed},
       {"min_navigation_length", s.min_navigation_length}};
}

void from_json(const nlohmann::json& j, BenchmarkSpec& s) {
  const BenchmarkStyle style = benchmark_style_from_string(j.value("style", std::string("corl2017")));
  const sim::TownId town = sim::town_id_from_string(j.value("town", std::string("train_town")));
  const std::string set = j.value("weather_set", std::string("training"));
  s = style == BenchmarkStyle::kNoCrash ? BenchmarkSpec::nocrash(town, set == "custom" ? "training" : set)
                                        : BenchmarkSpec::corl2017(town, set == "custom" ? "training" : set);
  s.weather_set = set;
  if (j.contains("tasks")) s.tasks = j.at("tasks").get<std::vector<TaskSpec>>();
  if (j.contains("weathers")) s.weathers = j.at("weathers").get<std::vector<std::string>>();
  s.routes_per_task = j.value("routes_per_task", s.routes_per_task);
  s.repetitions = j.value("repetitions", s.repetitions);
  s.seed = j.value("seed", s.seed);
  s.min_navigation_length = j.value("min_navigation_length", s.min_navigation_length);
}

std::vector<sim::RouteSpec> benchmark_routes(const sim::TownMap& town, const BenchmarkSpec& spec, size_t task) {
  const TaskSpec& t = spec.tasks.at(task);
  // Tasks sharing a route kind share routes, as in the reference benchmarks.
  Rng rng(mix_seed(spec.seed, static_cast<uint64_t>(t.route_kind), 0xB0u));
  std::vector<sim::RouteSpec> routes;
  for (int i = 0; i < spec.routes_per_task; ++i)
    routes.push_back(sim::sample_route(town, t.route_kind, rng, spec.min_navigation_length));
  return routes;
}

uint64_t episode_seed(const BenchmarkSpec& spec, size_t task, int route, size_t weather, int repetition) {
  return mix_seed(spec.seed, task, static_cast<uint64_t>(route), weather, static_cast<uint64_t>(repetition));
}

BenchmarkReport run_benchmark(Agent& agent, const BenchmarkSpec& spec, const EpisodeRules& rules,
                              const EpisodeCallback& on_episode) {
  spec.validate();
  const sim::TownMap& town = sim::builtin_town(spec.town);
  BenchmarkReport report;
  report.agent = agent.name();
  report.style = spec.style;
  report.town = spec.town;
  report.weather_set = spec.weather_set;
  EpisodeRules r = rules;
  r.style = spec.style;
  ExpertAgent expert(rules.expert, rules.sim.vehicle);

  for (size_t ti = 0; ti < spec.tasks.size(); ++ti) {
    const TaskSpec& task = spec.tasks[ti];
    const auto routes = benchmark_routes(town, spec, ti);
    std::vector<EpisodeResult> agent_runs, expert_runs;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      for (size_t wi = 0; wi < spec.weathers.size(); ++wi) {
        for (int ri = 0; ri < spec.routes_per_task; ++ri) {
          const uint64_t seed = episode_seed(spec, ti, ri, wi, rep);
          sim::ScenarioSpec scenario;
          scenario.n_vehicles = task.vehicles;
          scenario.n_pedestrians = task.pedestrians;
          scenario.weather = sim::weather_by_name(spec.weathers[wi]);
          scenario.seed = seed;
          scenario.ego_start = routes[ri].start_pose;
          auto label = [&](EpisodeResult& e) {
            e.task = task.name;
            e.weather = spec.weathers[wi];
            e.route_id = ri;
            e.repetition = rep;
            e.seed = seed;
          };
          EpisodeResult result;
          sim::WorldState initial;
          try {
            initial = sim::spawn_scenario(town, scenario, rules.sim);
            result = run_episode(agent, town, initial, routes[ri], r);
          } catch (const Error& e) {
            result = EpisodeResult{};
            result.agent = agent.name();
            result.failure = FailureReason::kError;
            result.error = e.what();
            result.trajectory.push_back({});
          }
          label(result);
          if (on_episode) on_episode(result);
          if (task.empty_traffic() && result.failure != FailureReason::kError) {
            EpisodeResult ref = run_episode(expert, town, initial, routes[ri], r);
            label(ref);
            expert_runs.push_back(std::move(ref));
          } else if (task.empty_traffic()) {
            EpisodeResult ref;
            ref.agent = "expert";
            ref.failure = FailureReason::kError;
            label(ref);
            expert_runs.push_back(std::move(ref));
          }
          agent_runs.push_back(std::move(result));
        }
      }
    }
    report.tasks.push_back(summarize(task.name, agent_runs, expert_runs, spec.repetitions, task.empty_traffic()));
    report.episodes.insert(report.episodes.end(), agent_runs.begin(), agent_runs.end());
    report.expert_episodes.insert(report.expert_episodes.end(), expert_runs.begin(), expert_runs.end());
  }
  return report;
}

std::vector<TaskReport> recount(const BenchmarkReport& report, int repetitions) {
  std::vector<TaskReport> out;
  for (const auto& t : report.tasks) {
    std::vector<EpisodeResult> agent, expert;
    for (const auto& e : report.episodes)
      if (e.task == t.task) agent.push_back(e);
    for (const auto& e : report.expert_episodes)
      if (e.task == t.task) expert.push_back(e);
    out.push_back(summarize(t.task, agent, expert, repetitions, !expert.empty()));
  }
  return out;
}

std::string report_csv(std::span<const BenchmarkReport> reports) {
  std::ostringstream os;
  os << "agent,style,town,weather_set,task,episodes,success_mean,success_std,repetition_rates,rmse,rmse_episodes\n";
  for (const auto& r : reports) {
    for (const auto& t : r.tasks) {
      std::string rates;
      for (size_t i = 0; i < t.repetition_rates.size(); ++i) rates += (i ? ";" : "") + fmt(t.repetition_rates[i]);
      os << r.agent << ',' << to_string(r.style) << ',' << sim::to_string(r.town) << ',' << r.weather_set << ','
         << t.task << ',' << t.episodes << ',' << fmt(t.success.mean) << ',' << fmt(t.success.std) << ',' << rates
         << ',' << (t.rmse ? fmt(*t.rmse) : "") << ',' << t.rmse_episodes << '\n';
    }
  }
  return os.str();
}

}  // namespace fusiondrive::bench
