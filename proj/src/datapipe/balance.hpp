#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "common/commands.hpp"
#include "datapipe/sample.hpp"

namespace fusiondrive::data {

struct BalanceParams {
  double small_steer_deg = 5.0;  // |steer_gt x 70| below this is "small"
  double keep_fraction = 0.2;    // share of small-steer samples kept
  int large_multiplicity = 7;    // final count of each large-steer sample
  double slow_speed = 1.0;       // m/s
  int slow_multiplicity = 4;     // final count of each slow sample

  bool operator==(const BalanceParams&) const = default;
};

/// The fields balancing looks at.
struct BalanceKey {
  NavCommand command = NavCommand::kLaneFollow;
  double steer_gt = 0.0;
  double speed_gt = 0.0;
};

struct BalancePlan {
  /// Input positions in output order; repeated entries are duplicates.
  std::vector<size_t> order;
  BalanceReport report;
};

/// Lane-follow samples go through the three stages (subsample small steer,
/// duplicate large steer, duplicate slow); other commands pass through once.
/// Kept samples keep their input order and copies are appended after them.
/// Throws Error(kEmptyInput) for an empty input.
BalancePlan plan_balance(std::span<const BalanceKey> keys, uint64_t seed,
                         const BalanceParams& params = {});

Dataset balance(const Dataset& dataset, uint64_t seed, const BalanceParams& params = {});

}  // namespace fusiondrive::data
