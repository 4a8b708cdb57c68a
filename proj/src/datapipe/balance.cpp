#include "datapipe/balance.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "control/pid.hpp"

namespace fusiondrive::data {

BalancePlan plan_balance(std::span<const BalanceKey> keys, uint64_t seed, const BalanceParams& params) {
  if (keys.empty()) throw Error(ErrorCode::kEmptyInput, "cannot balance an empty dataset");
  BalancePlan plan;
  BalanceReport& r = plan.report;
  r.input = keys.size();

  std::vector<size_t> small;
  std::vector<bool> keep(keys.size(), true);
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].command != NavCommand::kLaneFollow) {
      ++r.other_commands;
      continue;
    }
    ++r.lane_follow;
    if (std::abs(control::denormalize_steer(keys[i].steer_gt)) < params.small_steer_deg) {
      small.push_back(i);
      keep[i] = false;
    } else {
      ++r.large_steer;
    }
  }
  r.small_steer = small.size();

  // Stage 1: seeded partial shuffle picks the survivors.
  const auto n_keep = static_cast<size_t>(std::floor(params.keep_fraction * small.size() + 1e-9));
  Rng rng(seed);
  for (size_t k = 0; k < n_keep; ++k) {
    const auto j = static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(k), static_cast<int64_t>(small.size()) - 1));
    std::swap(small[k], small[j]);
    keep[small[k]] = true;
  }
  r.stage1 = n_keep;

  std::vector<size_t> lane_order;
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keep[i]) plan.order.push_back(i);
    if (keep[i] && keys[i].command == NavCommand::kLaneFollow) lane_order.push_back(i);
  }

  // Stage 2: large-steer copies.
  std::vector<size_t> stage2 = lane_order;
  std::vector<size_t> large;
  for (size_t i : lane_order)
    if (std::abs(control::denormalize_steer(keys[i].steer_gt)) >= params.small_steer_deg) large.push_back(i);
  for (int c = 1; c < params.large_multiplicity; ++c) {
    stage2.insert(stage2.end(), large.begin(), large.end());
    plan.order.insert(plan.order.end(), large.begin(), large.end());
  }
  r.stage2 = stage2.size();

  // Stage 3: slow copies of the stage-2 result.
  std::vector<size_t> slow;
  for (size_t i : stage2)
    if (keys[i].speed_gt < params.slow_speed) slow.push_back(i);
  for (int c = 1; c < params.slow_multiplicity; ++c)
    plan.order.insert(plan.order.end(), slow.begin(), slow.end());
  r.stage3 = stage2.size() + slow.size() * static_cast<size_t>(std::max(params.slow_multiplicity - 1, 0));
  r.output = plan.order.size();
  return plan;
}

Dataset balance(const Dataset& dataset, uint64_t seed, const BalanceParams& params) {
  std::vector<BalanceKey> keys;
  keys.reserve(dataset.samples.size());
  for (const Sample& s : dataset.samples) keys.push_back({s.nav_command, s.steer_gt, s.speed_gt});
  const BalancePlan plan = plan_balance(keys, seed, params);
  Dataset out;
  out.town_id = dataset.town_id;
  out.balancing_report = plan.report;
  out.samples.reserve(plan.order.size());
  for (size_t i : plan.order) out.samples.push_back(dataset.samples[i]);
  return out;
}

}  // namespace fusiondrive::data
