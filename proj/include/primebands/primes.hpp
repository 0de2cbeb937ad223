#pragma once

#include <bit>

#include "primebands/common.hpp"

namespace primebands {

struct SieveOptions {
  // Odd entries per segment; one segment spans 2*segment_odds integers.
  // Default keeps a segment's bitmap (128 KiB) L2-resident. Must be a
  // multiple of 64 so parallel segments never share a bitmap word.
  u64 segment_odds = u64{1} << 20;
  u64 max_limit = u64{1} << 40;
  unsigned threads = 1;
};

/// Immutable primality bitmap over the odd integers up to `limit`; 2 is
/// special-cased. Safe to share across threads after construction.
class PrimeTable {
public:
  static PrimeTable sieve(u64 limit, const SieveOptions& opt = {});

  u64 limit() const { return limit_; }

  bool contains(u64 n) const {
    if (n > limit_) throw std::range_error("PrimeTable::contains: n exceeds table limit");
    if (n == 2) return true;
    if (n < 2 || (n & 1) == 0) return false;
    return (bits_[(n >> 1) >> 6] >> ((n >> 1) & 63)) & 1;
  }

  /// pi(x) for x <= limit.
  u64 count_up_to(u64 x) const {
    if (x > limit_) throw std::range_error("PrimeTable::count_up_to: x exceeds table limit");
    if (x < 2) return 0;
    u64 count = 1;  // the prime 2
    const u64 last_idx = (x - 1) >> 1;  // odd m <= x  <=>  m>>1 <= (x-1)>>1
    if (x < 3) return count;
    const u64 full_words = (last_idx + 1) >> 6;
    for (u64 w = 0; w < full_words; ++w) count += std::popcount(bits_[w]);
    const u64 rem = (last_idx + 1) & 63;
    if (rem) count += std::popcount(bits_[full_words] & ((u64{1} << rem) - 1));
    return count;
  }

  /// Calls f(p) for every prime p <= limit in increasing order, starting 2, 3, 5, 7.
  template <typename F>
  void for_each_prime(F&& f) const {
    if (limit_ >= 2) f(u64{2});
    for (u64 w = 0; w < bits_.size(); ++w) {
      u64 word = bits_[w];
      while (word) {
        unsigned b = static_cast<unsigned>(std::countr_zero(word));
        word &= word - 1;
        f(((w << 6) + b) * 2 + 1);
      }
    }
  }

  std::vector<u64> primes_up_to(u64 x) const {
    if (x > limit_) throw std::range_error("PrimeTable::primes_up_to: x exceeds table limit");
    std::vector<u64> out;
    if (x >= 2) out.reserve(static_cast<std::size_t>(1.2 * x / std::max(1.0, std::log(double(x)) - 1.0)) + 16);
    for_each_prime([&](u64 p) {
      if (p <= x) out.push_back(p);
    });
    return out;
  }

  const std::vector<u64>& raw_bits() const { return bits_; }

private:
  u64 limit_ = 0;
  std::vector<u64> bits_;  // bit j <=> 2j+1 is prime (bit 0, the integer 1, always clear)
};

inline PrimeTable PrimeTable::sieve(u64 limit, const SieveOptions& opt) {
  if (limit < 2) throw std::domain_error("sieve_primes: limit must be at least 2");
  if (limit > opt.max_limit)
    throw std::length_error("sieve_primes: limit exceeds the configured memory cap");
  if (opt.segment_odds == 0 || opt.segment_odds % 64 != 0)
    throw std::invalid_argument("sieve_primes: segment_odds must be a positive multiple of 64");

  PrimeTable t;
  t.limit_ = limit;
  const u64 n_odds = (limit + 1) / 2;  // odd integers 1, 3, ..., <= limit
  t.bits_.assign((n_odds + 63) / 64, ~u64{0});

  // Base primes up to sqrt(limit) by a plain odd-only sieve.
  u64 root = static_cast<u64>(std::sqrt(static_cast<double>(limit)));
  while ((root + 1) * (root + 1) <= limit) ++root;
  while (root * root > limit) --root;
  std::vector<u64> base;
  {
    std::vector<u8> small(root / 2 + 1, 1);
    for (u64 m = 3; m * m <= root; m += 2)
      if (small[m >> 1])
        for (u64 c = m * m; c <= root; c += 2 * m) small[c >> 1] = 0;
    for (u64 m = 3; m <= root; m += 2)
      if (small[m >> 1]) base.push_back(m);
  }

  const u64 seg = opt.segment_odds;
  const u64 n_segments = (n_odds + seg - 1) / seg;

  auto sieve_segment = [&](u64 s) {
    const u64 idx_lo = s * seg;                      // odd index = m>>1
    const u64 idx_hi = std::min(n_odds, idx_lo + seg);
    for (u64 p : base) {
      // First odd multiple of p at or beyond max(p^2, 2*idx_lo+1).
      u64 start = p * p;
      const u64 lo_val = 2 * idx_lo + 1;
      if (start < lo_val) {
        u64 q = (lo_val + p - 1) / p;
        if ((q & 1) == 0) ++q;
        start = q * p;
      }
      for (u64 j = start >> 1; j < idx_hi; j += p)
        t.bits_[j >> 6] &= ~(u64{1} << (j & 63));
    }
  };

  detail::blocked_reduce<int>(
      0, n_segments, 1, opt.threads, 0,
      [&](u64 lo, u64) {
        sieve_segment(lo);
        return 0;
      },
      [](int, int) { return 0; });

  t.bits_[0] &= ~u64{1};  // 1 is not prime
  const u64 rem = n_odds & 63;
  if (rem) t.bits_.back() &= (u64{1} << rem) - 1;
  return t;
}

inline PrimeTable sieve_primes(u64 limit, const SieveOptions& opt = {}) {
  return PrimeTable::sieve(limit, opt);
}

inline u64 prime_count(const PrimeTable& table, u64 x) { return table.count_up_to(x); }

namespace detail {

// Montgomery arithmetic modulo an odd 64-bit n.
struct montgomery64 {
  u64 n;
  u64 neg_inv;  // -n^{-1} mod 2^64
  u64 r1;       // 2^64 mod n
  u64 r2;       // 2^128 mod n

  explicit montgomery64(u64 modulus) : n(modulus) {
    u64 inv = n;  // Newton: inv *= 2 - n*inv, five rounds give 64 bits
    for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
    neg_inv = ~inv + 1;
    r1 = (~u64{0} % n) + 1;
    if (r1 == n) r1 = 0;
    r2 = static_cast<u64>((static_cast<unsigned __int128>(r1) * r1) % n);
  }

  u64 reduce(unsigned __int128 t) const {
    u64 m = static_cast<u64>(t) * neg_inv;
    unsigned __int128 s = t + static_cast<unsigned __int128>(m) * n;
    u64 hi = static_cast<u64>(s >> 64);
    if (s < t) return hi - n;  // 128-bit wrap (n > 2^63): true sum carries 2^128
    return hi >= n ? hi - n : hi;
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<unsigned __int128>(a) * b); }
  u64 to_mont(u64 a) const { return mul(a, r2); }
  u64 pow(u64 base_mont, u64 e) const {
    u64 acc = r1;  // 1 in Montgomery form
    while (e) {
      if (e & 1) acc = mul(acc, base_mont);
      base_mont = mul(base_mont, base_mont);
      e >>= 1;
    }
    return acc;
  }
};

inline constexpr u64 kMillerRabinBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace detail

/// Deterministic primality for any 64-bit n: trial division by small primes,
/// then Miller-Rabin with the fixed base set {2,...,37}, proven complete
/// below 2^64. Pure and reentrant.
inline bool is_prime_64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {u64{2}, u64{3}, u64{5}, u64{7}, u64{11}, u64{13}, u64{17}, u64{19},
                u64{23}, u64{29}, u64{31}, u64{37}, u64{41}, u64{43}, u64{47}, u64{53}, u64{59}}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 61 * 61) return true;

  const detail::montgomery64 m(n);
  const u64 n1 = n - 1;
  const int s = std::countr_zero(n1);
  const u64 d = n1 >> s;
  const u64 one = m.r1;
  const u64 minus_one = n - one;

  for (u64 a : detail::kMillerRabinBases) {
    u64 x = m.pow(m.to_mont(a), d);
    if (x == one || x == minus_one) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = m.mul(x, x);
      if (x == minus_one) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace primebands
