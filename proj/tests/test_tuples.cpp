#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "primebands/tuples.hpp"

using namespace primebands;

namespace {

bool trial_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Brute-force root count of x(x+o_1)...(x+o_{k-1}) mod p.
u64 roots_oracle(const TuplePattern& t, u64 p) {
  u64 count = 0;
  for (u64 x = 0; x < p; ++x) {
    u64 prod = x % p;
    for (u64 o : t.offsets()) prod = (prod * ((x + o) % p)) % p;
    count += (prod == 0);
  }
  return count;
}

u64 count_oracle(const TuplePattern& t, u64 x) {
  u64 count = 0;
  for (u64 n = 2; n <= x; ++n) {
    if (!trial_prime(n)) continue;
    bool all = true;
    for (u64 o : t.offsets()) all = all && trial_prime(n + o);
    count += all;
  }
  return count;
}

}  // namespace

TEST_CASE("pattern parsing and validation") {
  CHECK(TuplePattern::parse("0,2").offsets() == std::vector<u64>{2});
  CHECK(TuplePattern::parse("0,4,6").k() == 3);
  CHECK(TuplePattern::parse("0").k() == 1);
  CHECK(TuplePattern::parse("0,4,6").to_string() == "0,4,6");
  CHECK_THROWS_AS(TuplePattern::parse("0,3"), std::invalid_argument);     // odd offset
  CHECK_THROWS_AS(TuplePattern::parse("2,4"), std::invalid_argument);     // missing leading 0
  CHECK_THROWS_AS(TuplePattern::parse("0,6,4"), std::invalid_argument);   // not increasing
  CHECK_THROWS_AS(TuplePattern::parse("0,4,4"), std::invalid_argument);   // repeated
  CHECK_THROWS_AS(TuplePattern::parse("0,"), std::invalid_argument);
  CHECK_THROWS_AS(TuplePattern::parse("0,x"), std::invalid_argument);
}

TEST_CASE("admissibility") {
  CHECK(is_admissible(TuplePattern::parse("0,2")));
  CHECK(is_admissible(TuplePattern::parse("0,4,6")));
  CHECK_FALSE(is_admissible(TuplePattern::parse("0,2,4")));
  CHECK(first_obstruction(TuplePattern::parse("0,2,4")) == u64{3});
  CHECK_FALSE(first_obstruction(TuplePattern::parse("0,2")).has_value());
  CHECK(is_admissible(TuplePattern::parse("0")));
}

TEST_CASE("tuple_w examples and brute-force agreement") {
  CHECK(tuple_w(TuplePattern::parse("0,2"), 3) == 2);
  CHECK(tuple_w(TuplePattern::parse("0,4,6"), 5) == roots_oracle(TuplePattern::parse("0,4,6"), 5));
  CHECK(tuple_w(TuplePattern::parse("0,4,6"), 5) == 3);
  for (const char* pat : {"0,2", "0,4,6", "0,2,6,8", "0,6,12", "0,10"}) {
    const TuplePattern t = TuplePattern::parse(pat);
    for (u64 p : {u64{2}, u64{3}, u64{5}, u64{7}, u64{11}, u64{13}, u64{37}}) {
      CAPTURE(pat);
      CAPTURE(p);
      CHECK(tuple_w(t, p) == roots_oracle(t, p));
    }
    // stabilization beyond the largest offset
    CHECK(tuple_w(t, 101) == t.k());
    CHECK(tuple_w(t, 1009) == t.k());
  }
}

TEST_CASE("tuple_constant reference values") {
  const SingularSeriesResult twin = tuple_constant(TuplePattern::parse("0,2"), 10000000);
  CHECK(std::abs(twin.value - 1.320324) < 1e-5);
  CHECK(twin.value == doctest::Approx(1.3203236394).epsilon(1e-8));

  const SingularSeriesResult triple = tuple_constant(TuplePattern::parse("0,4,6"), 10000000);
  CHECK(std::abs(triple.value - 2.858249) < 1e-5);

  // k = 1: empty product with the 2^0 prefactor
  CHECK(tuple_constant(TuplePattern::parse("0"), 1000).value == 1.0);

  const SingularSeriesResult bad = tuple_constant(TuplePattern::parse("0,2,4"), 1000);
  CHECK(bad.vanished);
  CHECK(bad.value == 0.0);
}

TEST_CASE("the 2^{k-1} prefactor is exactly the p=2 factor") {
  // second algebraic route: 2^{k-1} * prod_{2<p<=P} (1 - w/p)/(1 - 1/p)^k,
  // checked on fixed patterns plus seeded random admissible ones with k <= 4
  const u64 P = 10000;
  const PrimeTable table = PrimeTable::sieve(P);
  std::vector<TuplePattern> patterns = {
      TuplePattern::parse("0,2"), TuplePattern::parse("0,4,6"),
      TuplePattern::parse("0,2,6"), TuplePattern::parse("0,6,8,14")};
  u64 rng = 0x5DEECE66Dull;
  while (patterns.size() < 14) {
    std::vector<u64> offsets;
    u64 prev = 0;
    const unsigned k = 2 + static_cast<unsigned>((rng >> 13) % 3);
    for (unsigned j = 0; j + 1 < k; ++j) {
      rng = rng * 6364136223846793005ull + 1442695040888963407ull;
      prev += 2 + 2 * ((rng >> 33) % 8);
      offsets.push_back(prev);
    }
    const TuplePattern t = TuplePattern::from_offsets(offsets);
    if (is_admissible(t)) patterns.push_back(t);
  }
  for (const TuplePattern& t : patterns) {
    REQUIRE(is_admissible(t));
    double product = std::pow(2.0, static_cast<double>(t.k() - 1));
    table.for_each_prime([&](u64 p) {
      if (p == 2) return;
      const double pd = static_cast<double>(p);
      product *= (1.0 - static_cast<double>(tuple_w(t, p)) / pd) /
                 std::pow(1.0 - 1.0 / pd, static_cast<double>(t.k()));
    });
    const double direct = tuple_constant(t, P, &table).value;
    CAPTURE(t.to_string());
    CHECK(std::abs(direct - product) < 1e-12 * std::abs(product));
  }
}

TEST_CASE("count_prime_tuples examples") {
  const PrimeTable table = PrimeTable::sieve(100008);
  CHECK(count_prime_tuples(TuplePattern::parse("0,2"), 20, table) == 4);  // 3, 5, 11, 17
  CHECK(count_prime_tuples(TuplePattern::parse("0,2"), 100000, table) == 1224);
  CHECK_THROWS_AS(count_prime_tuples(TuplePattern::parse("0,2"), 100008, table),
                  std::range_error);
}

TEST_CASE("count_prime_tuples equals brute force for every small admissible pattern") {
  const PrimeTable table = PrimeTable::sieve(10012);
  // all subsets of {2,4,6,8,10,12} as offset sets
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<u64> offsets;
    for (unsigned b = 0; b < 6; ++b)
      if (mask & (1u << b)) offsets.push_back(2 * (b + 1));
    const TuplePattern t = TuplePattern::from_offsets(offsets);
    if (!is_admissible(t)) continue;
    CAPTURE(t.to_string());
    CHECK(count_prime_tuples(t, 10000, table) == count_oracle(t, 10000));
  }
}

TEST_CASE("predicted_tuples reproduces the twin moments") {
  const MomentEstimates m = predicted_tuples(TuplePattern::parse("0,2"), 1000000, 10000000);
  CHECK(std::abs(m.mean - 8248.0) < 2.0);
  CHECK(std::abs(m.sd - 90.0) < 1.0);
  CHECK(m.variance < m.mean);
}

TEST_CASE("predicted_tuples edge cases") {
  const MomentEstimates zero = predicted_tuples(TuplePattern::parse("0,2"), 2, 1000);
  CHECK(zero.mean == 0.0);
  CHECK(zero.variance == 0.0);
  CHECK_THROWS_AS(predicted_tuples(TuplePattern::parse("0,2,4"), 1000, 1000),
                  std::domain_error);
}

TEST_CASE("variance stays below the mean and sd^2/mean approaches 1") {
  const TuplePattern t = TuplePattern::parse("0,2");
  const MomentEstimates small = predicted_tuples(t, 10000, 100000);
  const MomentEstimates large = predicted_tuples(t, 1000000, 100000);
  CHECK(small.variance < small.mean);
  CHECK(large.variance < large.mean);
  CHECK(std::abs(large.variance / large.mean - 1.0) <
        std::abs(small.variance / small.mean - 1.0));
}

TEST_CASE("count is thread-count invariant") {
  const PrimeTable table = PrimeTable::sieve(100008);
  const TuplePattern t = TuplePattern::parse("0,4,6");
  CHECK(count_prime_tuples(t, 100000, table, 1) == count_prime_tuples(t, 100000, table, 4));
}
