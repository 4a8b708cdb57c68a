#include "datapipe/sample.hpp"

#include <iostream>

namespace fusiondrive::data {

Dataset strip_noise(const Dataset& dataset) {
  Dataset out;
  out.town_id = dataset.town_id;
  out.balancing_report = dataset.balancing_report;
  for (const Sample& s : dataset.samples)
    if (!s.noise_flag) out.samples.push_back(s);
  if (out.samples.empty() && !dataset.samples.empty())
    std::cerr << "warning: every sample carried the noise flag; dataset is empty\n";
  return out;
}

}  // namespace fusiondrive::data
