#include "fusiondrive/fusiondrive.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>

#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "common/error.hpp"
#include "control/pid.hpp"
#include "evalbench/replay.hpp"
#include "model/checkpoint.hpp"
#include "training/train_set.hpp"

struct fd_config {
  fusiondrive::app::RunConfig config;
};

struct fd_model {
  fusiondrive::model::LoadedCheckpoint loaded;
};

namespace {

using fusiondrive::Error;
using fusiondrive::ErrorCode;

thread_local std::string g_last_error;

template <typename F>
fd_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return FD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<fd_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fusiondrive::app::Log logger(fd_log_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& line) { fn(line.c_str(), user); };
}

}  // namespace

extern "C" {

const char* fd_version(void) { return "0.1.0"; }

const char* fd_status_name(fd_status status) {
  if (status == FD_OK) return "ok";
  if (status < FD_ERR_INVALID_ARGUMENT || status > FD_ERR_INTERNAL) return "unknown";
  return fusiondrive::error_code_name(static_cast<ErrorCode>(status));
}

const char* fd_last_error(void) { return g_last_error.c_str(); }

void fd_string_free(char* s) { std::free(s); }

fd_status fd_config_new(fd_config** out) {
  return guard([&] {
    require(out, "out");
    *out = new fd_config{};
  });
}

fd_status fd_config_load(const char* path, fd_config** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto c = std::make_unique<fd_config>();
    c->config = fusiondrive::app::load_run_config(path);
    *out = c.release();
  });
}

fd_status fd_config_save(const fd_config* config, const char* path) {
  return guard([&] {
    require(config, "config");
    require(path, "path");
    fusiondrive::app::save_run_config(path, config->config);
  });
}

fd_status fd_config_set(fd_config* config, const char* assignment) {
  return guard([&] {
    require(config, "config");
    require(assignment, "assignment");
    config->config = fusiondrive::app::apply_overrides(config->config, {assignment});
  });
}

fd_status fd_config_set_benchmark_style(fd_config* config, const char* style, const char* town,
                                        const char* weather_set) {
  return guard([&] {
    require(config, "config");
    require(style, "style");
    auto& b = config->config.benchmark;
    const auto s = fusiondrive::bench::benchmark_style_from_string(style);
    const auto t = town ? fusiondrive::sim::town_id_from_string(town) : b.town;
    const std::string set = weather_set ? weather_set : "training";
    auto spec = s == fusiondrive::bench::BenchmarkStyle::kNoCrash ? fusiondrive::bench::BenchmarkSpec::nocrash(t, set)
                                                                  : fusiondrive::bench::BenchmarkSpec::corl2017(t, set);
    spec.routes_per_task = b.routes_per_task;
    spec.repetitions = b.repetitions;
    spec.seed = b.seed;
    spec.min_navigation_length = b.min_navigation_length;
    b = spec;
  });
}

fd_status fd_config_get(const fd_config* config, const char* key, char** out_json) {
  return guard([&] {
    require(config, "config");
    require(key, "key");
    require(out_json, "out_json");
    std::string pointer = "/" + std::string(key);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const nlohmann::json j = config->config;
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
    *out_json = dup(j.at(ptr).dump());
  });
}

fd_status fd_config_to_json(const fd_config* config, char** out_json) {
  return guard([&] {
    require(config, "config");
    require(out_json, "out_json");
    *out_json = dup(nlohmann::json(config->config).dump(2));
  });
}

void fd_config_free(fd_config* config) { delete config; }

fd_status fd_collect(const fd_config* config, int episodes, uint64_t seed, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    fusiondrive::app::collect(config->config, episodes, seed, logger(log, user));
  });
}

fd_status fd_prepare(const fd_config* config, uint64_t seed, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    fusiondrive::app::prepare(config->config, seed, logger(log, user));
  });
}

fd_status fd_train(const fd_config* config, const char* variant, uint64_t seed, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    require(variant, "variant");
    fusiondrive::app::train_variant(config->config, fusiondrive::bench::variant_from_string(variant), seed,
                                    logger(log, user));
  });
}

fd_status fd_bench(const fd_config* config, const char* variant, uint64_t seed, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    require(variant, "variant");
    if (std::strcmp(variant, "expert") == 0)
      fusiondrive::app::bench_expert(config->config, logger(log, user));
    else
      fusiondrive::app::bench_variant(config->config, fusiondrive::bench::variant_from_string(variant), seed,
                                      logger(log, user));
  });
}

fd_status fd_ablate(const fd_config* config, uint64_t seed, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    fusiondrive::app::ablate(config->config, seed, logger(log, user));
  });
}

fd_status fd_replay(const fd_config* config, const char* archive_dir, const char* task, int route, int repetition,
                    const char* out_dir, int frame_stride, int max_frames, fd_log_fn log, void* user) {
  return guard([&] {
    require(config, "config");
    require(archive_dir, "archive_dir");
    require(task, "task");
    require(out_dir, "out_dir");
    const auto archive = fusiondrive::bench::read_archive(archive_dir);
    const size_t index = fusiondrive::bench::find_episode(archive, task, route, repetition);
    fusiondrive::bench::ReplayOptions opt;
    opt.frame_stride = frame_stride;
    opt.max_frames = max_frames;
    const auto summary =
        fusiondrive::bench::replay_episode(archive, index, config->config.episode_rules(), out_dir, opt);
    if (log) {
      const std::string line = "[replay] " + std::to_string(summary.frames_written) + " frames, " +
                               std::to_string(summary.ticks) + " ticks, max deviation " +
                               std::to_string(summary.max_deviation) + " m";
      log(line.c_str(), user);
    }
  });
}

fd_status fd_model_load(const char* checkpoint, fd_model** out) {
  return guard([&] {
    require(checkpoint, "checkpoint");
    require(out, "out");
    auto m = std::make_unique<fd_model>();
    m->loaded = fusiondrive::model::load_checkpoint(checkpoint);
    *out = m.release();
  });
}

fd_status fd_model_summary(const fd_model* model, char** out_text) {
  return guard([&] {
    require(model, "model");
    require(out_text, "out_text");
    *out_text = dup(model->loaded.net->summary());
  });
}

fd_status fd_model_predict(fd_model* model, const float* rgb, const float* depth, int width, int height,
                           fd_command command, float* steer, float* speed, uint8_t* semantics) {
  return guard([&] {
    require(model, "model");
    require(rgb, "rgb");
    require(depth, "depth");
    require(steer, "steer");
    require(speed, "speed");
    if (width < 1 || height < 2) throw Error(ErrorCode::kShapeMismatch, "image too small");
    const int c = static_cast<int>(command);
    if (c < 0 || c >= fusiondrive::kNumNavCommands) throw Error(ErrorCode::kUnknownCommand, "unknown command");
    auto& net = *model->loaded.net;
    fusiondrive::ImageF r(width, height, 3), d(width, height, 1);
    std::memcpy(r.data.data(), rgb, r.data.size() * sizeof(float));
    std::memcpy(d.data.data(), depth, d.data.size() * sizeof(float));
    const auto x = fusiondrive::train::observation_input(r, d, net.config().input_size, net.config().input_channels);
    const auto cmd = static_cast<fusiondrive::NavCommand>(c);
    const auto out = net.forward(x, std::span(&cmd, 1), false);
    *steer = out.controls.at(0, 0);
    *speed = out.controls.at(0, 1);
    if (semantics && !out.semantics.empty()) {
      const size_t plane = static_cast<size_t>(out.semantics.plane());
      for (size_t p = 0; p < plane; ++p) {
        int best = 0;
        for (int k = 1; k < out.semantics.c; ++k)
          if (out.semantics.data[k * plane + p] > out.semantics.data[best * plane + p]) best = k;
        semantics[p] = static_cast<uint8_t>(best);
      }
    }
  });
}

int fd_model_input_size(const fd_model* model) { return model ? model->loaded.net->config().input_size : 0; }

void fd_model_free(fd_model* model) { delete model; }

double fd_denormalize_steer(double steer_norm) { return fusiondrive::control::denormalize_steer(steer_norm); }

}  // extern "C"
