#pragma once

#include <cmath>

#include "primebands/moments.hpp"

namespace primebands {

/// Standard normal CDF.
inline double normal_cdf(double s) { return 0.5 * std::erfc(-s / std::sqrt(2.0)); }

/// 2*Phi(s) - 1: probability mass of the central band [-s, s] for s >= 0.
inline double normal_two_sided(double s) { return std::erf(s / std::sqrt(2.0)); }

/// One row of a deviation report: predicted vs actual with the z-score and
/// the two-sided band probability. Sign convention: difference = predicted - actual.
struct DeviationRow {
  u64 x = 0;
  u64 actual = 0;
  double predicted = 0.0;
  double difference = 0.0;
  double sd = 0.0;
  double z = 0.0;
  double band_probability = 0.0;

  friend bool operator==(const DeviationRow&, const DeviationRow&) = default;
};

inline DeviationRow deviation_row(u64 x, u64 actual, const MomentEstimates& estimates) {
  if (!(estimates.sd > 0.0))
    throw std::domain_error("deviation_row: standard deviation must be positive");
  DeviationRow row;
  row.x = x;
  row.actual = actual;
  row.predicted = estimates.mean;
  row.difference = estimates.mean - static_cast<double>(actual);
  row.sd = estimates.sd;
  row.z = row.difference / row.sd;
  // erf saturates to 1.0 in doubles near |z| ~ 8; keep the value inside [0, 1).
  row.band_probability = std::min(normal_two_sided(std::abs(row.z)), 0x1.fffffffffffffp-1);
  return row;
}

}  // namespace primebands
