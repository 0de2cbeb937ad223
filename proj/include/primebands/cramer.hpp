#pragma once

#include <cmath>

#include "primebands/logint.hpp"
#include "primebands/moments.hpp"
#include "primebands/stats.hpp"

namespace primebands {

enum class UrnModelKind { classic, tuple, bateman_horn, constant_probability };

namespace detail {

// SplitMix64 finalizer. All randomness in the urn model is counter-based:
// the draw for urn i under stream s is mix64(s + i * kGolden), and trial t
// of a batch runs with stream mix64(seed + t * kGolden). This makes every
// draw independent of evaluation order and of the worker count.
inline constexpr u64 kGolden = 0x9E3779B97F4A7C15ull;

inline u64 mix64(u64 z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double unit_double(u64 bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// An independent-urns Bernoulli model: urn i succeeds with probability
/// p_i = prefactor / ln^k(i). The first urns where that expression would
/// exceed 1 are excluded: start_index() is the minimal i with p_i <= 1,
/// and every reported count or moment is over i in [start_index, x].
class UrnModel {
public:
  static UrnModel classic() { return UrnModel(UrnModelKind::classic, 1.0, 1); }

  static UrnModel tuple(double constant, unsigned k) {
    if (k < 1) throw std::domain_error("UrnModel::tuple: k must be at least 1");
    return UrnModel(UrnModelKind::tuple, constant, static_cast<int>(k));
  }

  static UrnModel bateman_horn(double constant, unsigned r, double degree_product) {
    if (r < 1) throw std::domain_error("UrnModel::bateman_horn: r must be at least 1");
    if (!(degree_product >= 1.0))
      throw std::domain_error("UrnModel::bateman_horn: degree product must be >= 1");
    return UrnModel(UrnModelKind::bateman_horn, constant / degree_product, static_cast<int>(r));
  }

  /// Fixed-probability urns (degenerate cases for tests and bounds).
  static UrnModel constant(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::domain_error("UrnModel::constant: p must lie in [0, 1]");
    UrnModel m;
    m.kind_ = UrnModelKind::constant_probability;
    m.prefactor_ = p;
    m.exponent_ = 0;
    m.start_ = 2;
    return m;
  }

  UrnModelKind kind() const { return kind_; }
  double prefactor() const { return prefactor_; }
  int exponent() const { return exponent_; }
  u64 start_index() const { return start_; }

  double probability(u64 i) const {
    if (kind_ == UrnModelKind::constant_probability) return prefactor_;
    return prefactor_ / detail::pow_int(std::log(static_cast<double>(i)), exponent_);
  }

private:
  UrnModel() = default;

  UrnModel(UrnModelKind kind, double prefactor, int exponent) {
    if (!(prefactor > 0.0)) throw std::domain_error("UrnModel: constant must be positive");
    kind_ = kind;
    prefactor_ = prefactor;
    exponent_ = exponent;
    // Minimal i with p_i <= 1; p is nonincreasing for i >= 2, so everything
    // after start_ stays in [0, 1] (checked).
    double threshold = std::exp(std::pow(prefactor, 1.0 / exponent));
    if (!(threshold < 1e15))
      throw std::domain_error("UrnModel: constant too large, no usable start index");
    u64 i = std::max<u64>(2, threshold < 2.0 ? 2 : static_cast<u64>(threshold));
    while (i > 2 && prefactor_ / detail::pow_int(std::log(static_cast<double>(i - 1)), exponent_) <= 1.0)
      --i;
    while (prefactor_ / detail::pow_int(std::log(static_cast<double>(i)), exponent_) > 1.0) ++i;
    start_ = i;
  }

  UrnModelKind kind_ = UrnModelKind::classic;
  double prefactor_ = 1.0;
  int exponent_ = 1;
  u64 start_ = 3;
};

/// One realization: the urns that produced a success, in increasing order.
struct SimOutcome {
  u64 count = 0;
  std::vector<u64> positions;
};

/// Exact mean sum p_i and variance sum p_i - p_i^2 over i in [start, x].
inline MomentEstimates moments(const UrnModel& m, u64 x, unsigned threads = 1) {
  if (x < m.start_index()) throw std::domain_error("moments: x is below the model start index");
  struct Sums {
    detail::neumaier_sum p, p2;
  };
  Sums s = detail::blocked_reduce(
      m.start_index(), x + 1, u64{1} << 16, threads, Sums{},
      [&](u64 lo, u64 hi) {
        Sums part;
        for (u64 i = lo; i < hi; ++i) {
          const double p = m.probability(i);
          part.p.add(p);
          part.p2.add(p * p);
        }
        return part;
      },
      [](Sums acc, const Sums& part) {
        acc.p.add(part.p.value());
        acc.p2.add(part.p2.value());
        return acc;
      });
  const double mean = s.p.value();
  return MomentEstimates::from_mean_and_variance(mean, mean - s.p2.value());
}

struct LyapunovResult {
  double ratio;     // sum of third absolute central moments / D_n^{3/2}
  double bound;     // 1/sqrt(D_n); ratio <= bound always
  double variance;  // D_n
};

/// Third-moment Lyapunov quotient using the exact Bernoulli form
/// (1-p)^3 p + p^3 (1-p) = (p - p^2)[(1-p)^2 + p^2].
inline LyapunovResult lyapunov_ratio(const UrnModel& m, u64 n, unsigned threads = 1) {
  if (n < m.start_index()) throw std::domain_error("lyapunov_ratio: n is below the model start index");
  struct Sums {
    detail::neumaier_sum var, third;
  };
  Sums s = detail::blocked_reduce(
      m.start_index(), n + 1, u64{1} << 16, threads, Sums{},
      [&](u64 lo, u64 hi) {
        Sums part;
        for (u64 i = lo; i < hi; ++i) {
          const double p = m.probability(i);
          const double q = p - p * p;
          part.var.add(q);
          part.third.add(q * ((1.0 - p) * (1.0 - p) + p * p));
        }
        return part;
      },
      [](Sums acc, const Sums& part) {
        acc.var.add(part.var.value());
        acc.third.add(part.third.value());
        return acc;
      });
  const double variance = s.var.value();
  if (!(variance > 0.0))
    throw std::domain_error("lyapunov_ratio: degenerate model, D_n = 0");
  return {s.third.value() / std::pow(variance, 1.5), 1.0 / std::sqrt(variance), variance};
}

/// One Bernoulli draw per urn i in [start, x]. Identical (model, x, seed)
/// reproduce the identical outcome regardless of platform or worker count.
inline SimOutcome simulate(const UrnModel& m, u64 x, u64 seed) {
  if (x < m.start_index()) throw std::domain_error("simulate: x is below the model start index");
  SimOutcome out;
  for (u64 i = m.start_index(); i <= x; ++i) {
    const double u = detail::unit_double(detail::mix64(seed + i * detail::kGolden));
    if (u < m.probability(i)) out.positions.push_back(i);
  }
  out.count = out.positions.size();
  return out;
}

struct BatchSummary {
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;  // sample variance, n-1 divisor
  std::vector<double> z_scores;     // (count - exact mean)/exact sd, per trial
  double ks_statistic = 0.0;        // z-scores against the standard normal
  MomentEstimates exact;            // the moments the z-scores were built from
};

/// `trials` independent realizations; trial t runs with the derived stream
/// mix64(seed + t * kGolden). Deterministic for any worker count.
inline BatchSummary simulate_batch(const UrnModel& m, u64 x, u64 trials, u64 seed,
                                   unsigned threads = 1) {
  if (trials < 2) throw std::domain_error("simulate_batch: at least 2 trials required");
  if (x < m.start_index()) throw std::domain_error("simulate_batch: x is below the model start index");

  // Per-urn probabilities once; trials reuse them.
  const u64 start = m.start_index();
  std::vector<double> probs(static_cast<std::size_t>(x - start + 1));
  for (u64 i = start; i <= x; ++i)
    probs[static_cast<std::size_t>(i - start)] = m.probability(i);

  std::vector<u64> counts(static_cast<std::size_t>(trials));
  detail::blocked_reduce<int>(
      0, trials, 16, threads, 0,
      [&](u64 lo, u64 hi) {
        for (u64 t = lo; t < hi; ++t) {
          const u64 stream = detail::mix64(seed + t * detail::kGolden);
          u64 c = 0;
          for (u64 i = start; i <= x; ++i) {
            const double u = detail::unit_double(detail::mix64(stream + i * detail::kGolden));
            c += (u < probs[static_cast<std::size_t>(i - start)]);
          }
          counts[static_cast<std::size_t>(t)] = c;
        }
        return 0;
      },
      [](int, int) { return 0; });

  BatchSummary summary;
  summary.exact = moments(m, x);

  detail::neumaier_sum mean_sum;
  for (u64 c : counts) mean_sum.add(static_cast<double>(c));
  summary.empirical_mean = mean_sum.value() / static_cast<double>(trials);

  detail::neumaier_sum var_sum;
  for (u64 c : counts) {
    const double d = static_cast<double>(c) - summary.empirical_mean;
    var_sum.add(d * d);
  }
  summary.empirical_variance = var_sum.value() / static_cast<double>(trials - 1);

  summary.z_scores.reserve(counts.size());
  const double sd = summary.exact.sd;
  for (u64 c : counts)
    summary.z_scores.push_back((static_cast<double>(c) - summary.exact.mean) /
                               (sd > 0.0 ? sd : 1.0));

  std::vector<double> sorted = summary.z_scores;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    ks = std::max(ks, cdf - static_cast<double>(i) / n);
    ks = std::max(ks, static_cast<double>(i + 1) / n - cdf);
  }
  summary.ks_statistic = ks;
  return summary;
}

}  // namespace primebands
