// Command-line front end over the C API.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fusiondrive/fusiondrive.h"

namespace {

void print_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int fail(fd_status status) {
  std::fprintf(stderr, "error (%s): %s\n", fd_status_name(status), fd_last_error());
  return static_cast<int>(status);
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config,-c", c.config, "Run config (JSON); defaults to $FUSIONDRIVE_CONFIG");
  cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set train.max_epochs=10");
  cmd->add_option("--seed", c.seed, "Seed for this stage (default: config seed)");
}

// Loads the config, applies overrides and resolves the seed.
fd_status open_config(Common& c, fd_config** out) {
  std::string path = c.config;
  if (path.empty())
    if (const char* env = std::getenv("FUSIONDRIVE_CONFIG")) path = env;
  fd_status s = path.empty() ? fd_config_new(out) : fd_config_load(path.c_str(), out);
  if (s != FD_OK) return s;
  for (const auto& o : c.overrides)
    if ((s = fd_config_set(*out, o.c_str())) != FD_OK) return s;
  return FD_OK;
}

uint64_t config_uint(const fd_config* cfg, const char* key) {
  char* json = nullptr;
  uint64_t value = 0;
  if (fd_config_get(cfg, key, &json) == FD_OK) value = std::strtoull(json, nullptr, 10);
  fd_string_free(json);
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale RGBD end-to-end driving: data collection, training and closed-loop benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fd_version());

  Common common;
  int episodes = -1;
  auto* collect = app.add_subcommand("collect", "Record expert episodes with steering noise");
  add_common(collect, common);
  collect->add_option("--episodes,-n", episodes, "Number of episodes (default: collect.episodes)");

  auto* prepare = app.add_subcommand("prepare", "Strip noise frames, balance and write prepared.json");
  add_common(prepare, common);

  std::string variant = "MSFSU";
  auto* train = app.add_subcommand("train", "Train a model variant on the prepared dataset");
  add_common(train, common);
  train->add_option("--variant", variant, "MSFSU, MSF or SU")->check(CLI::IsMember({"MSFSU", "MSF", "SU"}));

  std::string style, town, weather_set;
  auto* bench = app.add_subcommand("bench", "Run the closed-loop benchmark on a trained variant or the expert");
  add_common(bench, common);
  bench->add_option("--variant", variant, "MSFSU, MSF, SU or expert")
      ->check(CLI::IsMember({"MSFSU", "MSF", "SU", "expert"}));
  bench->add_option("--style", style, "corl2017 or nocrash (resets the benchmark tasks)")
      ->check(CLI::IsMember({"corl2017", "nocrash"}));
  bench->add_option("--town", town, "train_town or test_town")->check(CLI::IsMember({"train_town", "test_town"}));
  bench->add_option("--weathers", weather_set, "training or testing")->check(CLI::IsMember({"training", "testing"}));

  auto* ablate = app.add_subcommand("ablate", "Train and benchmark MSFSU, MSF and SU");
  add_common(ablate, common);

  std::string archive, task = "straight", out_dir = "replay";
  int route = 0, repetition = 0, stride = 1, max_frames = -1;
  auto* replay = app.add_subcommand("replay", "Re-simulate an archived episode into frames and plots");
  add_common(replay, common);
  replay->add_option("--archive", archive, "Benchmark archive directory")->required();
  replay->add_option("--task", task, "Task name");
  replay->add_option("--route", route, "Route index");
  replay->add_option("--repetition", repetition, "Repetition index");
  replay->add_option("--out,-o", out_dir, "Output directory");
  replay->add_option("--stride", stride, "Write every n-th frame");
  replay->add_option("--max-frames", max_frames, "Frame limit (-1 = all)");

  std::string save_path;
  auto* config_cmd = app.add_subcommand("config", "Print the effective config or write it to a file");
  add_common(config_cmd, common);
  config_cmd->add_option("--save", save_path, "Write the config here instead of printing it");

  std::string checkpoint;
  auto* summary = app.add_subcommand("summary", "Print the layer summary of a checkpoint");
  summary->add_option("checkpoint", checkpoint, "Checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  if (summary->parsed()) {
    fd_model* model = nullptr;
    if (fd_status s = fd_model_load(checkpoint.c_str(), &model); s != FD_OK) return fail(s);
    char* text = nullptr;
    const fd_status s = fd_model_summary(model, &text);
    if (s == FD_OK) std::fputs(text, stdout);
    fd_string_free(text);
    fd_model_free(model);
    return s == FD_OK ? 0 : fail(s);
  }

  fd_config* cfg = nullptr;
  if (fd_status s = open_config(common, &cfg); s != FD_OK) return fail(s);
  for (auto* sub : {collect, prepare, train, bench, ablate, replay, config_cmd})
    if (sub->parsed() && sub->count("--seed")) common.seed_given = true;
  const uint64_t seed = common.seed_given ? common.seed : config_uint(cfg, "seed");

  fd_status s = FD_OK;
  if (collect->parsed()) {
    const int n = episodes >= 0 ? episodes : static_cast<int>(config_uint(cfg, "collect.episodes"));
    s = fd_collect(cfg, n, seed, print_line, nullptr);
  } else if (prepare->parsed()) {
    s = fd_prepare(cfg, seed, print_line, nullptr);
  } else if (train->parsed()) {
    s = fd_train(cfg, variant.c_str(), seed, print_line, nullptr);
  } else if (bench->parsed()) {
    if (!style.empty() || !town.empty() || !weather_set.empty())
      s = fd_config_set_benchmark_style(cfg, style.empty() ? "corl2017" : style.c_str(),
                                        town.empty() ? nullptr : town.c_str(),
                                        weather_set.empty() ? nullptr : weather_set.c_str());
    if (s == FD_OK) s = fd_bench(cfg, variant.c_str(), seed, print_line, nullptr);
  } else if (ablate->parsed()) {
    s = fd_ablate(cfg, seed, print_line, nullptr);
  } else if (replay->parsed()) {
    s = fd_replay(cfg, archive.c_str(), task.c_str(), route, repetition, out_dir.c_str(), stride, max_frames,
                  print_line, nullptr);
  } else if (config_cmd->parsed()) {
    if (!save_path.empty()) {
      s = fd_config_save(cfg, save_path.c_str());
    } else {
      char* json = nullptr;
      s = fd_config_to_json(cfg, &json);
      if (s == FD_OK) std::printf("%s\n", json);
      fd_string_free(json);
    }
  }
  fd_config_free(cfg);
  return s == FD_OK ? 0 : fail(s);
}
