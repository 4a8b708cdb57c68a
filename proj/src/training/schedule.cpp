#include "training/schedule.hpp"

#include "common/error.hpp"

namespace fusiondrive::train {

PlateauSchedule::PlateauSchedule(double initial_lr, double decay_factor, int lr_patience, int stop_patience,
                                 double baseline)
    : lr_(initial_lr), decay_(decay_factor), lr_patience_(lr_patience), stop_patience_(stop_patience),
      best_(baseline) {
  if (initial_lr <= 0.0 || decay_factor <= 0.0 || decay_factor > 1.0 || lr_patience < 1 || stop_patience < 1)
    throw Error(ErrorCode::kConfig, "invalid learning-rate schedule");
}

PlateauSchedule::Step PlateauSchedule::observe(double validation_loss) {
  Step s;
  if (validation_loss < best_) {
    best_ = validation_loss;
    since_best_ = 0;
    since_decay_ = 0;
    s.improved = true;
    return s;
  }
  ++since_best_;
  ++since_decay_;
  if (since_decay_ >= lr_patience_) {
    lr_ *= decay_;
    since_decay_ = 0;
    s.decayed = true;
  }
  s.stop = since_best_ >= stop_patience_;
  return s;
}

}  // namespace fusiondrive::train
