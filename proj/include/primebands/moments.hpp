#pragma once

#include <cmath>

#include "primebands/common.hpp"

namespace primebands {

/// Predicted mean and variance of a constellation count (or of the matching
/// urn-model sum). variance <= mean always; sd = sqrt(variance).
struct MomentEstimates {
  double mean = 0.0;
  double variance = 0.0;
  double sd = 0.0;

  static MomentEstimates from_mean_and_variance(double mean, double raw_variance) {
    MomentEstimates m;
    m.mean = mean;
    // The integral approximation can dip below zero only in the x ~ e regime
    // where counts are empty; clamp so the invariants hold everywhere.
    m.variance = std::max(0.0, raw_variance);
    m.sd = std::sqrt(m.variance);
    return m;
  }
};

}  // namespace primebands
