#include "training/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "model/checkpoint.hpp"
#include "training/nadam.hpp"
#include "training/schedule.hpp"

namespace fusiondrive::train {
namespace {

BatchTargets<float> targets_of(const Batch& b) {
  return {b.commands, b.steer, b.speed, b.labels};
}

std::vector<uint32_t> iota_entries(size_t n) {
  std::vector<uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

void check_finite(const LossBreakdown& l, int epoch) {
  if (!std::isfinite(l.total))
    throw Error(ErrorCode::kDivergence, "loss became non-finite in epoch " + std::to_string(epoch));
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, "train config: " + what); };
  if (initial_lr <= 0.0) fail("initial_lr must be positive");
  if (lr_decay_factor <= 0.0 || lr_decay_factor > 1.0) fail("lr_decay_factor must be in (0, 1]");
  if (batch_size < 1 || eval_batch_size < 1) fail("batch sizes must be positive");
  if (max_epochs < 1) fail("max_epochs must be positive");
  if (lr_patience_epochs < 1 || early_stop_patience < 1) fail("patience must be positive");
  if (lr_patience_epochs >= max_epochs || early_stop_patience >= max_epochs)
    fail("patience must be below max_epochs");
}

const char* to_string(StopReason r) { return r == StopReason::kEarlyStop ? "early_stop" : "max_epochs"; }

std::vector<double> TrainReport::lr_history() const {
  std::vector<double> v;
  for (const auto& e : epochs) v.push_back(e.lr);
  return v;
}

std::string TrainReport::to_csv() const {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,lr,train_total,train_steer,train_speed,train_scene,"
        "val_total,val_steer,val_speed,val_scene,improved\n";
  auto row = [&](int epoch, double lr, const LossBreakdown& t, const LossBreakdown& v, bool imp) {
    os << epoch << ',' << lr << ',' << t.total << ',' << t.steer << ',' << t.speed << ',' << t.scene << ','
       << v.total << ',' << v.steer << ',' << v.speed << ',' << v.scene << ',' << (imp ? 1 : 0) << '\n';
  };
  row(0, 0.0, LossBreakdown{}, baseline, false);
  for (const auto& e : epochs) row(e.epoch, e.lr, e.train, e.validation, e.improved);
  os << "# best_epoch=" << best_epoch << " best_val=" << best_validation << " stop=" << to_string(stop) << '\n';
  return os.str();
}

LossBreakdown evaluate_loss(model::DrivingNet<float>& net, const TrainSet& set, const LossWeights& weights,
                            int batch_size) {
  if (set.empty()) throw Error(ErrorCode::kEmptyInput, "evaluation set is empty");
  const int channels = net.config().input_channels;
  const auto entries = iota_entries(set.count());
  LossBreakdown sum;
  for (size_t start = 0; start < entries.size(); start += batch_size) {
    const size_t n = std::min<size_t>(batch_size, entries.size() - start);
    const Batch b = make_batch(set, std::span(entries).subspan(start, n), channels);
    const LossBreakdown l = batch_objective(net, b.x, targets_of(b), weights, false, false);
    const double w = static_cast<double>(n);
    sum.total += l.total * w;
    sum.steer += l.steer * w;
    sum.speed += l.speed * w;
    sum.scene += l.scene * w;
  }
  const double inv = 1.0 / static_cast<double>(entries.size());
  return {sum.total * inv, sum.steer * inv, sum.speed * inv, sum.scene * inv};
}

FitMetrics evaluate_fit(model::DrivingNet<float>& net, const TrainSet& set, int batch_size) {
  if (set.empty()) throw Error(ErrorCode::kEmptyInput, "evaluation set is empty");
  const int channels = net.config().input_channels;
  const auto entries = iota_entries(set.count());
  double steer = 0.0, speed = 0.0;
  size_t correct = 0, pixels = 0;
  for (size_t start = 0; start < entries.size(); start += batch_size) {
    const size_t n = std::min<size_t>(batch_size, entries.size() - start);
    const Batch b = make_batch(set, std::span(entries).subspan(start, n), channels);
    const auto out = net.forward(b.x, b.commands, false);
    for (size_t i = 0; i < n; ++i) {
      steer += std::abs(out.controls.at(static_cast<int>(i), 0) - b.steer[i]);
      speed += std::abs(out.controls.at(static_cast<int>(i), 1) - b.speed[i]);
    }
    if (net.has_decoder()) {
      const auto& sem = out.semantics;
      const size_t plane = static_cast<size_t>(sem.plane());
      for (int i = 0; i < sem.n; ++i) {
        const float* img = sem.image(i);
        for (size_t p = 0; p < plane; ++p) {
          int best = 0;
          for (int k = 1; k < sem.c; ++k)
            if (img[k * plane + p] > img[best * plane + p]) best = k;
          correct += best == b.labels[i * plane + p];
        }
        pixels += plane;
      }
    }
  }
  FitMetrics m;
  m.steer_mae = steer / static_cast<double>(entries.size());
  m.speed_mae = speed / static_cast<double>(entries.size());
  m.pixel_accuracy = pixels ? static_cast<double>(correct) / static_cast<double>(pixels)
                            : std::numeric_limits<double>::quiet_NaN();
  return m;
}

TrainResult train_model(const TrainSet& train, const TrainSet& validation, const model::ModelConfig& model_config,
                        const TrainConfig& config, const LossWeights& weights, const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty()) throw Error(ErrorCode::kEmptyInput, "training set is empty");
  if (train.size != model_config.input_size)
    throw Error(ErrorCode::kShapeMismatch, "training frames do not match the model input size");
  const TrainSet& val = validation.empty() ? train : validation;

  TrainResult result;
  result.net = std::make_unique<model::DrivingNet<float>>(model_config);
  auto& net = *result.net;
  model::DrivingNet<float> best(model_config);
  model::copy_weights(net, best);

  Nadam<float> opt(net.parameters(), {config.beta1, config.beta2, config.epsilon, config.momentum_decay});
  TrainReport& report = result.report;
  report.baseline = evaluate_loss(net, val, weights, config.eval_batch_size);
  check_finite(report.baseline, 0);
  report.best_validation = report.baseline.total;
  PlateauSchedule schedule(config.initial_lr, config.lr_decay_factor, config.lr_patience_epochs,
                           config.early_stop_patience, report.baseline.total);

  const int channels = model_config.input_channels;
  auto entries = iota_entries(train.count());
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng shuffle(mix_seed(config.seed, epoch, 0x5EEDull));
    for (size_t i = entries.size(); i > 1; --i)
      std::swap(entries[i - 1], entries[static_cast<size_t>(shuffle.uniform_int(0, static_cast<int64_t>(i) - 1))]);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = schedule.lr();
    LossBreakdown sum;
    size_t batch_index = 0;
    for (size_t start = 0; start < entries.size(); start += config.batch_size, ++batch_index) {
      const size_t n = std::min<size_t>(config.batch_size, entries.size() - start);
      const uint64_t batch_seed = mix_seed(config.seed, epoch, batch_index);
      const Batch b = make_batch(train, std::span(entries).subspan(start, n), channels,
                                 config.augment ? &config.augmentation : nullptr, batch_seed);
      net.reseed_dropout(batch_seed);
      net.zero_grad();
      const LossBreakdown l = batch_objective(net, b.x, targets_of(b), weights, true, true);
      check_finite(l, epoch);
      opt.step(rec.lr);
      const double w = static_cast<double>(n);
      sum.total += l.total * w;
      sum.steer += l.steer * w;
      sum.speed += l.speed * w;
      sum.scene += l.scene * w;
    }
    const double inv = 1.0 / static_cast<double>(entries.size());
    rec.train = {sum.total * inv, sum.steer * inv, sum.speed * inv, sum.scene * inv};
    rec.validation = evaluate_loss(net, val, weights, config.eval_batch_size);
    check_finite(rec.validation, epoch);

    const auto step = schedule.observe(rec.validation.total);
    rec.improved = step.improved;
    if (step.improved) {
      model::copy_weights(net, best);
      report.best_epoch = epoch;
      report.best_validation = rec.validation.total;
    }
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (step.stop) {
      report.stop = StopReason::kEarlyStop;
      break;
    }
  }
  model::copy_weights(best, net);
  return result;
}

}  // namespace fusiondrive::train
