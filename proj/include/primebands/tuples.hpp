#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "primebands/euler_product.hpp"
#include "primebands/moments.hpp"

namespace primebands {

/// An offset pattern n, n+o_1, ..., n+o_{k-1} with even offsets
/// 0 < o_1 < ... < o_{k-1}; the leading 0 is implicit. k >= 1.
class TuplePattern {
public:
  static TuplePattern from_offsets(std::vector<u64> offsets) {
    u64 prev = 0;
    for (u64 o : offsets) {
      if (o == 0 || (o & 1) != 0)
        throw std::invalid_argument("TuplePattern: offsets must be positive even integers");
      if (o <= prev)
        throw std::invalid_argument("TuplePattern: offsets must be strictly increasing");
      if (o >= (u64{1} << 32))
        throw std::invalid_argument("TuplePattern: offsets must be below 2^32");
      prev = o;
    }
    TuplePattern t;
    t.offsets_ = std::move(offsets);
    return t;
  }

  /// CLI notation: comma-separated offsets including the leading 0,
  /// e.g. "0,2" or "0,4,6".
  static TuplePattern parse(std::string_view text) {
    std::vector<u64> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string_view tok = text.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos);
      if (tok.empty())
        throw std::invalid_argument("TuplePattern: empty element in pattern (expected e.g. 0,4,6)");
      u64 v = 0;
      for (char c : tok) {
        if (c < '0' || c > '9')
          throw std::invalid_argument("TuplePattern: pattern must be comma-separated integers, e.g. 0,4,6");
        v = v * 10 + static_cast<u64>(c - '0');
        if (v >= (u64{1} << 33))
          throw std::invalid_argument("TuplePattern: offset out of range");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (values.empty() || values.front() != 0)
      throw std::invalid_argument("TuplePattern: pattern must start with 0, e.g. 0,4,6");
    values.erase(values.begin());
    return from_offsets(std::move(values));
  }

  unsigned k() const { return static_cast<unsigned>(offsets_.size()) + 1; }
  const std::vector<u64>& offsets() const { return offsets_; }
  u64 max_offset() const { return offsets_.empty() ? 0 : offsets_.back(); }

  std::string to_string() const {
    std::string s = "0";
    for (u64 o : offsets_) s += "," + std::to_string(o);
    return s;
  }

private:
  std::vector<u64> offsets_;
};

/// Number of distinct residues of {0} + offsets modulo p; equals the root
/// count of x(x+o_1)...(x+o_{k-1}) mod p.
inline u64 tuple_w(const TuplePattern& t, u64 p) {
  if (p > t.max_offset()) return t.k();  // distinct offsets below p stay distinct mod p
  std::vector<u64> residues;
  residues.reserve(t.k());
  residues.push_back(0);
  for (u64 o : t.offsets()) residues.push_back(o % p);
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  return residues.size();
}

/// Smallest prime p <= k whose residue classes are fully covered, if any.
/// Patterns with such an obstruction have finitely many prime instances.
inline std::optional<u64> first_obstruction(const TuplePattern& t) {
  for (u64 p = 2; p <= t.k(); ++p) {
    bool prime = true;
    for (u64 d = 2; d * d <= p; ++d)
      if (p % d == 0) {
        prime = false;
        break;
      }
    if (!prime) continue;
    if (tuple_w(t, p) == p) return p;
  }
  return std::nullopt;
}

inline bool is_admissible(const TuplePattern& t) { return !first_obstruction(t).has_value(); }

inline LocalRootCounter tuple_counter(const TuplePattern& t) {
  LocalRootCounter counter;
  counter.roots = [t](u64 p) { return tuple_w(t, p); };
  counter.asymptotic_roots = t.k();
  counter.stable_after = std::max<u64>(2, t.max_offset());
  return counter;
}

/// The constellation constant truncated at P. Inadmissible patterns vanish
/// (value 0) at the obstruction prime.
inline SingularSeriesResult tuple_constant(const TuplePattern& t, u64 P,
                                           const PrimeTable* table = nullptr,
                                           unsigned threads = 1) {
  if (P < std::max<u64>(2, t.max_offset()))
    throw std::domain_error("tuple_constant: prime limit must reach the largest offset");
  return euler_product(tuple_counter(t), t.k(), P, table, threads);
}

/// Exact count of n <= x with n and every n+offset prime. Counts first
/// elements; the table must cover x + max offset.
inline u64 count_prime_tuples(const TuplePattern& t, u64 x, const PrimeTable& table,
                              unsigned threads = 1) {
  if (table.limit() < x || table.limit() - x < t.max_offset())
    throw std::range_error("count_prime_tuples: table limit must reach x + max offset");
  const auto& offsets = t.offsets();
  return detail::blocked_reduce(
      2, x + 1, u64{1} << 18, threads, u64{0},
      [&](u64 lo, u64 hi) {
        u64 count = 0;
        for (u64 n = lo; n < hi; ++n) {
          if (!table.contains(n)) continue;
          bool all = true;
          for (u64 o : offsets)
            if (!table.contains(n + o)) {
              all = false;
              break;
            }
          count += all;
        }
        return count;
      },
      [](u64 acc, u64 part) { return acc + part; });
}

/// Predicted mean C*I_k(x) and variance C*I_k(x) - C^2*I_{2k}(x).
inline MomentEstimates predicted_tuples(const TuplePattern& t, u64 x, u64 P,
                                        double rel_tol = 1e-10, unsigned threads = 1) {
  if (x < 2) throw std::domain_error("predicted_tuples: x must be at least 2");
  const SingularSeriesResult c = tuple_constant(t, P, nullptr, threads);
  if (c.vanished)
    throw std::domain_error("predicted_tuples: pattern is inadmissible (vanishing constant)");
  const double xd = static_cast<double>(x);
  const int k = static_cast<int>(t.k());
  const double ik = log_integral({xd, k, rel_tol});
  const double i2k = log_integral({xd, 2 * k, rel_tol});
  return MomentEstimates::from_mean_and_variance(c.value * ik,
                                                 c.value * ik - c.value * c.value * i2k);
}

}  // namespace primebands
