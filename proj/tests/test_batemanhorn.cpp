#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "primebands/batemanhorn.hpp"

using namespace primebands;

TEST_CASE("polynomial parsing and validation") {
  const IntPolynomial f = IntPolynomial::parse("1,0,1");
  CHECK(f.degree() == 2);
  CHECK(f.is_n_squared_plus_one());
  CHECK(IntPolynomial::parse("3,4").degree() == 1);
  CHECK(IntPolynomial::parse("-9,1").eval(20) == 11);
  CHECK_THROWS_AS(IntPolynomial::parse("5"), std::invalid_argument);      // constant
  CHECK_THROWS_AS(IntPolynomial::parse("1,-2"), std::invalid_argument);   // negative leading
  CHECK_THROWS_AS(IntPolynomial::parse("1,0,0"), std::invalid_argument);  // degree drops to 0
  CHECK_THROWS_AS(IntPolynomial::parse("a,1"), std::invalid_argument);

  const PolynomialSystem s = PolynomialSystem::parse("0,1;2,1");
  CHECK(s.r() == 2);
  CHECK(s.to_string() == "0,1;2,1");
  CHECK(s.degree_product() == 1.0);
  CHECK(PolynomialSystem::parse("1,0,1").degree_product() == 2.0);
}

TEST_CASE("poly_eval is exact and overflow-checked") {
  const IntPolynomial nsq = IntPolynomial::parse("1,0,1");
  CHECK(nsq.eval(0) == 1);
  CHECK(nsq.eval(14000000) == i64{196000000000000} + 1);
  CHECK(IntPolynomial::parse("3,4").eval(5) == 23);
  CHECK_THROWS_WITH_AS(nsq.eval(i64{1} << 32), doctest::Contains("4294967296"),
                       std::range_error);
}

TEST_CASE("system_roots_mod_p examples") {
  const PolynomialSystem id = PolynomialSystem::parse("0,1");
  for (u64 p : {u64{2}, u64{3}, u64{97}}) CHECK(system_roots_mod_p(id, p) == 1);
  const PolynomialSystem nsq = PolynomialSystem::parse("1,0,1");
  CHECK(system_roots_mod_p(nsq, 5) == 2);
  CHECK(system_roots_mod_p(nsq, 3) == 0);
  CHECK(system_roots_mod_p(nsq, 2) == 1);
}

TEST_CASE("nsq_plus_one_w closed form, exhaustive against brute force") {
  CHECK(nsq_plus_one_w(2) == 1);
  CHECK(nsq_plus_one_w(13) == 2);
  CHECK(nsq_plus_one_w(7) == 0);
  const PolynomialSystem nsq = PolynomialSystem::parse("1,0,1");
  const PrimeTable table = PrimeTable::sieve(10000);
  table.for_each_prime([&](u64 p) {
    if (nsq_plus_one_w(p) != system_roots_mod_p(nsq, p)) {
      CAPTURE(p);
      REQUIRE(nsq_plus_one_w(p) == system_roots_mod_p(nsq, p));
    }
  });
}

TEST_CASE("bh_constant closed forms and reference values") {
  // f = n: every factor is exactly 1
  CHECK(bh_constant(PolynomialSystem::parse("0,1"), 1000).value == 1.0);

  // {n, n+2} matches the twin constellation constant through the same product
  const SingularSeriesResult twin_bh = bh_constant(PolynomialSystem::parse("0,1;2,1"), 10000000);
  const SingularSeriesResult twin_t = tuple_constant(TuplePattern::parse("0,2"), 10000000);
  CHECK(std::abs(twin_bh.value - twin_t.value) < 1e-10 * twin_t.value);

  // n^2+1: truncated products, and the halved value against the published constant
  const SingularSeriesResult nsq6 = bh_constant(PolynomialSystem::parse("1,0,1"), 1000000);
  CHECK(nsq6.value == doctest::Approx(1.3728105098).epsilon(1e-8));
  CHECK(std::abs(nsq6.value / 2.0 - 0.686407) < 1e-5);
  CHECK(nsq6.tail_is_heuristic);
  const SingularSeriesResult nsq7 = bh_constant(PolynomialSystem::parse("1,0,1"), 10000000);
  CHECK(nsq7.value == doctest::Approx(1.3727890285).epsilon(1e-8));

  // linear closed form a1/phi(a1)
  CHECK(bh_constant(PolynomialSystem::parse("3,4"), 1000000).value ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(bh_constant(PolynomialSystem::parse("1,2"), 1000000).value ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(bh_constant(PolynomialSystem::parse("1,6"), 1000000).value ==
        doctest::Approx(3.0).epsilon(1e-6));  // 6/phi(6) = 3

  // {n, n+1}: n(n+1) always even, the p=2 factor vanishes
  const SingularSeriesResult consec = bh_constant(PolynomialSystem::parse("0,1;1,1"), 1000);
  CHECK(consec.vanished);
  CHECK(consec.value == 0.0);
}

TEST_CASE("closed-form linear root counting equals brute force") {
  const PrimeTable table = PrimeTable::sieve(200);
  const char* systems[] = {"0,1;2,1",  "3,4",      "1,6;5,6",   "-7,3;2,5",
                           "0,1;0,1",  "4,6;2,3",  "1,2;3,2;5,2"};
  for (const char* text : systems) {
    const PolynomialSystem s = PolynomialSystem::parse(text);
    REQUIRE(s.all_linear());
    table.for_each_prime([&](u64 p) {
      const u64 closed = primebands::detail::linear_system_w(s, p);
      const u64 brute = system_roots_mod_p(s, p);
      if (closed != brute) {
        CAPTURE(text);
        CAPTURE(p);
        REQUIRE(closed == brute);
      }
    });
  }
}

TEST_CASE("generic systems cap the brute-force prime limit") {
  const SingularSeriesResult c = bh_constant(PolynomialSystem::parse("1,1,1"), 10000000);
  CHECK(c.prime_limit == 100000);
  CHECK(c.tail_is_heuristic);
  CHECK(c.value > 0.0);
}

TEST_CASE("count_prime_values examples") {
  const PolynomialSystem nsq = PolynomialSystem::parse("1,0,1");
  CHECK(count_prime_values(nsq, 10) == 5);  // n = 1, 2, 4, 6, 10
  CHECK(count_prime_values(nsq, 10000) == 841);

  // cross-module agreement with the constellation counter
  const PrimeTable table = PrimeTable::sieve(100002);
  const PolynomialSystem twin = PolynomialSystem::parse("0,1;2,1");
  CHECK(count_prime_values(twin, 100000, 1, &table) == 1224);
  CHECK(count_prime_values(twin, 100000, 1, &table) ==
        count_prime_tuples(TuplePattern::parse("0,2"), 100000, table));

  // negative values are never prime: f = n - 9
  const PolynomialSystem shifted = PolynomialSystem::parse("-9,1");
  CHECK(count_prime_values(shifted, 20) == 5);  // n-9 in {2,3,5,7,11}

  // n_start shifts the window
  CHECK(count_prime_values(nsq, 10, 2) == 4);  // drops n = 1
  CHECK(count_prime_values(nsq, 0, 1) == 0);
}

TEST_CASE("linear case equals a sieve count of the progression") {
  const PolynomialSystem f = PolynomialSystem::parse("3,4");  // 4n+3
  const PrimeTable table = PrimeTable::sieve(400003);
  u64 direct = 0;
  table.for_each_prime([&](u64 p) {
    if (p % 4 == 3 && p >= 7 && (p - 3) % 4 == 0 && (p - 3) / 4 <= 100000) ++direct;
  });
  CHECK(count_prime_values(f, 100000, 1, &table) == direct);
}

TEST_CASE("bh_prediction reference values") {
  const PolynomialSystem nsq = PolynomialSystem::parse("1,0,1");
  const MomentEstimates m = bh_prediction(nsq, 10000, 1000000);
  CHECK(std::abs(m.mean - 855.0) < 3.0);
  CHECK(std::abs(m.sd - 28.0) < 1.0);

  // f = n with C = 1 and h = 1 recovers the log integral
  const MomentEstimates pnt = bh_prediction(PolynomialSystem::parse("0,1"), 100000, 1000);
  CHECK(pnt.mean == doctest::Approx(log_integral({1e5, 1})).epsilon(1e-12));

  // reduction to the constellation machinery
  const MomentEstimates bh_twin = bh_prediction(PolynomialSystem::parse("0,1;2,1"), 1000000, 10000000);
  const MomentEstimates t_twin = predicted_tuples(TuplePattern::parse("0,2"), 1000000, 10000000);
  CHECK(std::abs(bh_twin.mean - t_twin.mean) < 1e-10 * t_twin.mean);
  CHECK(std::abs(bh_twin.sd - t_twin.sd) < 1e-10 * t_twin.sd);

  CHECK_THROWS_AS(bh_prediction(PolynomialSystem::parse("0,1;1,1"), 1000, 1000),
                  std::domain_error);
}

TEST_CASE("variance stays below the mean for non-degenerate systems") {
  for (const char* sys : {"1,0,1", "0,1", "3,4", "0,1;2,1"}) {
    const MomentEstimates m = bh_prediction(PolynomialSystem::parse(sys), 10000, 10000);
    CAPTURE(sys);
    CHECK(m.variance < m.mean);
  }
}

TEST_CASE("count is thread-count invariant") {
  const PolynomialSystem nsq = PolynomialSystem::parse("1,0,1");
  CHECK(count_prime_values(nsq, 30000, 1, nullptr, 1) ==
        count_prime_values(nsq, 30000, 1, nullptr, 4));
}
