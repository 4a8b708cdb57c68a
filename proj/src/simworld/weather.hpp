#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace fusiondrive::sim {

/// Rendering-only weather: a color tint, glossy puddle patches on the road
/// and the amplitude of the per-surface texture noise.
struct WeatherParams {
  std::string name;
  std::array<double, 3> tint{1.0, 1.0, 1.0};
  double ground_gloss = 0.0;
  double texture_noise_sigma = 0.0;
  std::array<double, 3> sky{0.55, 0.70, 0.90};

  bool operator==(const WeatherParams&) const = default;
};

/// Throws Error(kInvalidArgument) for names outside the roster.
WeatherParams weather_by_name(std::string_view name);

std::span<const std::string_view> training_weathers();
std::span<const std::string_view> corl2017_test_weathers();
std::span<const std::string_view> nocrash_test_weathers();
std::span<const std::string_view> all_weathers();

}  // namespace fusiondrive::sim
