#pragma once

#include <functional>
#include <optional>

#include "primebands/logint.hpp"
#include "primebands/primes.hpp"

namespace primebands {

/// Local root counts w(p) feeding each Euler factor, plus what is known
/// about their behaviour for large p. If `stable_after` is set, w(p) equals
/// `asymptotic_roots` exactly for every prime p > stable_after.
struct LocalRootCounter {
  std::function<u64(u64)> roots;  // prime p -> w(p) in [0, p]
  u64 asymptotic_roots = 0;
  std::optional<u64> stable_after;
};

/// Truncated singular-series value with its tail estimate.
struct SingularSeriesResult {
  double value = 0.0;
  u64 prime_limit = 0;
  double tail_factor_bound = 1.0;  // multiplicative uncertainty from p > prime_limit
  bool vanished = false;           // some local factor was exactly 0
  bool tail_is_heuristic = false;  // no stabilization known; the tail estimate is not rigorous
};

/// prod_{p <= P} (1 - w(p)/p) * (1 - 1/p)^{-r}, accumulated in log space.
/// Vanishes exactly (value 0) when some w(p) = p. Deterministic for any
/// worker count; `table` may supply the primes (it must cover P).
inline SingularSeriesResult euler_product(const LocalRootCounter& counter, unsigned r, u64 P,
                                          const PrimeTable* table = nullptr,
                                          unsigned threads = 1) {
  if (P < 2) throw std::domain_error("euler_product: prime limit must be at least 2");
  if (r < 1) throw std::domain_error("euler_product: r must be at least 1");

  PrimeTable local;
  if (table == nullptr) {
    SieveOptions opt;
    opt.threads = threads;
    local = PrimeTable::sieve(P, opt);
    table = &local;
  } else if (table->limit() < P) {
    throw std::range_error("euler_product: prime table does not cover the requested limit");
  }

  const std::vector<u64> primes = table->primes_up_to(P);

  struct BlockResult {
    detail::neumaier_sum log_sum;
    bool vanished = false;
    u64 violating_prime = 0;  // first p with w(p) > p, 0 if none
  };

  BlockResult folded = detail::blocked_reduce(
      0, primes.size(), 4096, threads, BlockResult{},
      [&](u64 lo, u64 hi) {
        BlockResult part;
        for (u64 i = lo; i < hi; ++i) {
          const u64 p = primes[i];
          const u64 w = counter.roots(p);
          if (w > p) {
            if (part.violating_prime == 0) part.violating_prime = p;
            continue;
          }
          if (w == p) {
            part.vanished = true;
            continue;
          }
          const double pd = static_cast<double>(p);
          part.log_sum.add(std::log1p(-static_cast<double>(w) / pd) -
                           static_cast<double>(r) * std::log1p(-1.0 / pd));
        }
        return part;
      },
      [](BlockResult acc, const BlockResult& part) {
        acc.log_sum.add(part.log_sum.value());
        acc.vanished = acc.vanished || part.vanished;
        if (acc.violating_prime == 0) acc.violating_prime = part.violating_prime;
        return acc;
      });

  if (folded.violating_prime != 0)
    throw std::logic_error("euler_product: local root counter returned w(p) > p at p = " +
                           std::to_string(folded.violating_prime));

  SingularSeriesResult result;
  result.prime_limit = P;

  // Tail: for a counter stabilized at w = r the log of each omitted factor is
  // -r(r-1)/(2p^2) + O(p^-3); bound sum_{p>P} p^-2 by 1/(P ln P). Without
  // stabilization the same figure is reported but flagged non-rigorous.
  const double tail_exponent =
      static_cast<double>(r) * (static_cast<double>(r) - 1.0) /
      (static_cast<double>(P) * std::log(static_cast<double>(P)));
  result.tail_factor_bound = std::exp(tail_exponent);
  result.tail_is_heuristic = !(counter.stable_after.has_value() &&
                               *counter.stable_after <= P && counter.asymptotic_roots == r);

  if (folded.vanished) {
    result.value = 0.0;
    result.vanished = true;
    result.tail_factor_bound = 1.0;
    return result;
  }
  result.value = std::exp(folded.log_sum.value());
  return result;
}

}  // namespace primebands
