#pragma once

#include <limits>

namespace fusiondrive::train {

/// Learning-rate halving on plateaus plus early stopping, driven by one
/// validation loss per epoch. An epoch improves only when its loss is strictly
/// below the best so far.
class PlateauSchedule {
 public:
  PlateauSchedule(double initial_lr, double decay_factor, int lr_patience, int stop_patience,
                  double baseline = std::numeric_limits<double>::infinity());

  struct Step {
    bool improved = false;
    bool decayed = false;
    bool stop = false;
  };
  /// Call after each epoch; the returned lr() applies to the next epoch.
  Step observe(double validation_loss);

  double lr() const { return lr_; }
  double best() const { return best_; }
  int epochs_since_best() const { return since_best_; }

 private:
  double lr_;
  double decay_;
  int lr_patience_;
  int stop_patience_;
  double best_;
  int since_best_ = 0;
  int since_decay_ = 0;
};

}  // namespace fusiondrive::train
