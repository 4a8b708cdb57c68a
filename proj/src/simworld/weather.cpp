#include "simworld/weather.hpp"

#include "common/error.hpp"

namespace fusiondrive::sim {
namespace {

constexpr std::array<std::string_view, 4> kTraining = {
    "clear_afternoon", "wet_afternoon", "hard_rain_afternoon", "clear_sunset"};
constexpr std::array<std::string_view, 2> kCorlTest = {"cloudy_wet_afternoon",
                                                       "soft_rain_sunset"};
constexpr std::array<std::string_view, 2> kNoCrashTest = {"wet_sunset", "soft_rain_sunset"};
constexpr std::array<std::string_view, 7> kAll = {
    "clear_afternoon",      "wet_afternoon",    "hard_rain_afternoon", "clear_sunset",
    "cloudy_wet_afternoon", "soft_rain_sunset", "wet_sunset"};

}  // namespace

WeatherParams weather_by_name(std::string_view name) {
  if (name == "clear_afternoon")
    return {std::string(name), {1.0, 1.0, 1.0}, 0.0, 0.03, {0.55, 0.70, 0.92}};
  if (name == "wet_afternoon")
    return {std::string(name), {0.90, 0.90, 0.95}, 0.55, 0.04, {0.60, 0.68, 0.80}};
  if (name == "hard_rain_afternoon")
    return {std::string(name), {0.70, 0.72, 0.78}, 0.80, 0.08, {0.45, 0.48, 0.52}};
  if (name == "clear_sunset")
    return {std::string(name), {1.00, 0.82, 0.62}, 0.0, 0.03, {0.95, 0.62, 0.40}};
  if (name == "cloudy_wet_afternoon")
    return {std::string(name), {0.80, 0.82, 0.86}, 0.60, 0.05, {0.62, 0.64, 0.68}};
  if (name == "soft_rain_sunset")
    return {std::string(name), {0.86, 0.72, 0.60}, 0.50, 0.06, {0.70, 0.52, 0.45}};
  if (name == "wet_sunset")
    return {std::string(name), {0.95, 0.76, 0.60}, 0.60, 0.04, {0.90, 0.60, 0.42}};
  throw Error(ErrorCode::kInvalidArgument, "unknown weather: " + std::string(name));
}

std::span<const std::string_view> training_weathers() { return kTraining; }
std::span<const std::string_view> corl2017_test_weathers() { return kCorlTest; }
std::span<const std::string_view> nocrash_test_weathers() { return kNoCrashTest; }
std::span<const std::string_view> all_weathers() { return kAll; }

}  // namespace fusiondrive::sim
