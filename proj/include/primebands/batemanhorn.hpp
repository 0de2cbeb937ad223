#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "primebands/euler_product.hpp"
#include "primebands/moments.hpp"
#include "primebands/tuples.hpp"

namespace primebands {

/// Integer polynomial with exact 64-bit evaluation (overflow is an error,
/// never a wraparound). Degree >= 1, positive leading coefficient.
class IntPolynomial {
public:
  /// Coefficients constant-first: {1,0,1} is n^2+1, {3,4} is 4n+3.
  static IntPolynomial from_coefficients(std::vector<i64> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    if (coeffs.size() < 2)
      throw std::invalid_argument("IntPolynomial: degree must be at least 1");
    if (coeffs.back() <= 0)
      throw std::invalid_argument("IntPolynomial: leading coefficient must be positive");
    IntPolynomial f;
    f.coeffs_ = std::move(coeffs);
    return f;
  }

  static IntPolynomial parse(std::string_view text) {
    std::vector<i64> coeffs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string tok(text.substr(pos, comma == std::string_view::npos
                                           ? std::string_view::npos
                                           : comma - pos));
      tok.erase(0, tok.find_first_not_of(" \t"));
      tok.erase(tok.find_last_not_of(" \t") + 1);
      try {
        std::size_t used = 0;
        coeffs.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument(
            "IntPolynomial: coefficients must be integers, constant first, e.g. 1,0,1 for n^2+1");
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return from_coefficients(std::move(coeffs));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<i64>& coefficients() const { return coeffs_; }

  /// Exact Horner evaluation; throws range_error naming n on 64-bit overflow.
  i64 eval(i64 n) const {
    i64 acc = coeffs_.back();
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
      i64 t;
      if (__builtin_mul_overflow(acc, n, &t) || __builtin_add_overflow(t, coeffs_[i], &acc))
        throw std::range_error("IntPolynomial::eval: 64-bit overflow at n = " + std::to_string(n));
    }
    return acc;
  }

  /// f(n) mod p by modular Horner; requires p < 2^32.
  u64 eval_mod(u64 n, u64 p) const {
    u64 acc = mod_coeff(coeffs_.back(), p);
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;)
      acc = (acc * n + mod_coeff(coeffs_[i], p)) % p;
    return acc;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(coeffs_[i]);
    }
    return s;
  }

  bool is_linear() const { return degree() == 1; }
  bool is_n_squared_plus_one() const {
    return coeffs_.size() == 3 && coeffs_[0] == 1 && coeffs_[1] == 0 && coeffs_[2] == 1;
  }

private:
  static u64 mod_coeff(i64 c, u64 p) {
    i64 r = c % static_cast<i64>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(p) : r);
  }
  std::vector<i64> coeffs_;
};

class PolynomialSystem {
public:
  static PolynomialSystem from_polynomials(std::vector<IntPolynomial> polys) {
    if (polys.empty())
      throw std::invalid_argument("PolynomialSystem: at least one polynomial is required");
    PolynomialSystem s;
    s.polys_ = std::move(polys);
    return s;
  }

  /// Systems separated by ';', e.g. "1,0,1" or "0,1;2,1" for {n, n+2}.
  static PolynomialSystem parse(std::string_view text) {
    std::vector<IntPolynomial> polys;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t semi = text.find(';', pos);
      polys.push_back(IntPolynomial::parse(text.substr(
          pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos)));
      if (semi == std::string_view::npos) break;
      pos = semi + 1;
    }
    return from_polynomials(std::move(polys));
  }

  unsigned r() const { return static_cast<unsigned>(polys_.size()); }
  const std::vector<IntPolynomial>& polynomials() const { return polys_; }

  double degree_product() const {
    double h = 1.0;
    for (const auto& f : polys_) h *= static_cast<double>(f.degree());
    return h;
  }

  bool all_linear() const {
    return std::all_of(polys_.begin(), polys_.end(),
                       [](const IntPolynomial& f) { return f.is_linear(); });
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < polys_.size(); ++i) {
      if (i) s += ";";
      s += polys_[i].to_string();
    }
    return s;
  }

private:
  std::vector<IntPolynomial> polys_;
};

/// w(p) = #{n in [0,p) : f_1(n)...f_r(n) = 0 mod p} by brute force.
inline u64 system_roots_mod_p(const PolynomialSystem& s, u64 p) {
  u64 count = 0;
  for (u64 n = 0; n < p; ++n) {
    for (const auto& f : s.polynomials())
      if (f.eval_mod(n, p) == 0) {
        ++count;
        break;
      }
  }
  return count;
}

/// Closed form for n^2+1: 1 + Legendre(-1|p), i.e. 1 at p=2, 2 when
/// p = 1 mod 4, 0 when p = 3 mod 4.
inline u64 nsq_plus_one_w(u64 p) {
  if (p == 2) return 1;
  return p % 4 == 1 ? 2 : 0;
}

namespace detail {

// Closed-form root counting for all-linear systems: each a*n + b has the
// root -b/a mod p when p does not divide a; if p divides both a and b the
// polynomial vanishes identically mod p.
inline u64 linear_system_w(const PolynomialSystem& s, u64 p) {
  u64 roots[64];
  std::size_t n_roots = 0;
  for (const auto& f : s.polynomials()) {
    const i64 a = f.coefficients()[1];
    const i64 b = f.coefficients()[0];
    const u64 am = static_cast<u64>(((a % static_cast<i64>(p)) + static_cast<i64>(p))) % p;
    const u64 bm = static_cast<u64>(((b % static_cast<i64>(p)) + static_cast<i64>(p))) % p;
    if (am == 0) {
      if (bm == 0) return p;  // identically zero: the product vanishes everywhere
      continue;               // no root
    }
    // root = -b * a^{-1} mod p via Fermat inverse; 128-bit products so any
    // p below 2^63 is safe
    auto mulmod = [p](u64 x, u64 y) {
      return static_cast<u64>(static_cast<unsigned __int128>(x) * y % p);
    };
    u64 inv = 1, base = am, e = p - 2;
    while (e) {
      if (e & 1) inv = mulmod(inv, base);
      base = mulmod(base, base);
      e >>= 1;
    }
    const u64 root = mulmod((p - bm) % p, inv);
    bool seen = false;
    for (std::size_t i = 0; i < n_roots; ++i)
      if (roots[i] == root) {
        seen = true;
        break;
      }
    if (!seen && n_roots < 64) roots[n_roots++] = root;
  }
  return n_roots;
}

struct CounterPlan {
  LocalRootCounter counter;
  u64 effective_limit_cap;  // brute-force counting caps the usable P
};

// Generic brute-force counting costs O(p * sum of degrees) per prime; cap
// its P so a constant never takes more than desk-scale time.
inline constexpr u64 kGenericRootCap = 100000;

inline CounterPlan plan_counter(const PolynomialSystem& s) {
  CounterPlan plan;
  plan.effective_limit_cap = ~u64{0};
  if (s.r() == 1 && s.polynomials()[0].is_n_squared_plus_one()) {
    plan.counter.roots = [](u64 p) { return nsq_plus_one_w(p); };
    plan.counter.asymptotic_roots = 1;
    plan.counter.stable_after = std::nullopt;  // oscillates with p mod 4
    return plan;
  }
  if (s.all_linear() && s.r() <= 64) {
    plan.counter.roots = [s](u64 p) { return linear_system_w(s, p); };
    // Distinct rational roots -b/a; roots of two polynomials collide for
    // large p only when the cross products b_i*a_j match.
    u64 stable = 2;
    bool bounded = true;
    const auto& polys = s.polynomials();
    std::vector<std::pair<i64, i64>> dedup;
    for (const auto& f : polys) {
      const i64 a = f.coefficients()[1];
      const i64 b = f.coefficients()[0];
      stable = std::max<u64>(stable, static_cast<u64>(a < 0 ? -a : a));
      bool dup = false;
      for (auto& [pa, pb] : dedup) {
        __int128 cross = static_cast<__int128>(pa) * b - static_cast<__int128>(pb) * a;
        if (cross == 0) {
          dup = true;
        } else {
          __int128 mag = cross < 0 ? -cross : cross;
          if (mag > static_cast<__int128>(u64{1} << 62))
            bounded = false;
          else
            stable = std::max<u64>(stable, static_cast<u64>(mag));
        }
      }
      if (!dup) dedup.emplace_back(a, b);
    }
    plan.counter.asymptotic_roots = dedup.size();
    if (bounded) plan.counter.stable_after = stable;
    return plan;
  }
  plan.counter.roots = [s](u64 p) { return system_roots_mod_p(s, p); };
  plan.counter.asymptotic_roots = 0;
  plan.counter.stable_after = std::nullopt;
  plan.effective_limit_cap = kGenericRootCap;
  return plan;
}

}  // namespace detail

/// The Euler product of the system truncated at P. Closed-form counters
/// (n^2+1; all-linear systems) are substituted automatically; generic
/// systems fall back to brute-force root counting with P capped, reported
/// via prime_limit in the result.
inline SingularSeriesResult bh_constant(const PolynomialSystem& s, u64 P,
                                        const PrimeTable* table = nullptr,
                                        unsigned threads = 1) {
  if (P < 2) throw std::domain_error("bh_constant: prime limit must be at least 2");
  detail::CounterPlan plan = detail::plan_counter(s);
  const u64 p_eff = std::min(P, plan.effective_limit_cap);
  return euler_product(plan.counter, s.r(), p_eff, table, threads);
}

/// #{n_start <= n <= x : every f_j(n) is prime}. Values inside the table
/// use sieve lookups; anything larger goes through is_prime_64.
inline u64 count_prime_values(const PolynomialSystem& s, u64 x, u64 n_start = 1,
                              const PrimeTable* table = nullptr, unsigned threads = 1) {
  if (n_start < 1) n_start = 1;
  if (x < n_start) return 0;
  const u64 table_limit = table ? table->limit() : 0;
  return detail::blocked_reduce(
      n_start, x + 1, u64{1} << 14, threads, u64{0},
      [&](u64 lo, u64 hi) {
        u64 count = 0;
        for (u64 n = lo; n < hi; ++n) {
          bool all = true;
          for (const auto& f : s.polynomials()) {
            const i64 v = f.eval(static_cast<i64>(n));
            if (v < 2) {
              all = false;
              break;
            }
            const u64 uv = static_cast<u64>(v);
            const bool prime = (table && uv <= table_limit) ? table->contains(uv)
                                                            : is_prime_64(uv);
            if (!prime) {
              all = false;
              break;
            }
          }
          count += all;
        }
        return count;
      },
      [](u64 acc, u64 part) { return acc + part; });
}

/// Predicted mean C/(h_1...h_r) * I_r(x) and the matching variance.
inline MomentEstimates bh_prediction(const PolynomialSystem& s, u64 x, u64 P,
                                     double rel_tol = 1e-10, unsigned threads = 1) {
  if (x < 2) throw std::domain_error("bh_prediction: x must be at least 2");
  const SingularSeriesResult c = bh_constant(s, P, nullptr, threads);
  if (c.vanished)
    throw std::domain_error(
        "bh_prediction: singular series vanishes; some polynomial has only finitely many prime values");
  const double prefactor = c.value / s.degree_product();
  const double xd = static_cast<double>(x);
  const int r = static_cast<int>(s.r());
  const double ir = log_integral({xd, r, rel_tol});
  const double i2r = log_integral({xd, 2 * r, rel_tol});
  return MomentEstimates::from_mean_and_variance(
      prefactor * ir, prefactor * ir - prefactor * prefactor * i2r);
}

}  // namespace primebands
