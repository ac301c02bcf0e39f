#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linhyp/asymptotics.hpp"
#include "linhyp/exact.hpp"

using namespace linhyp;

TEST_CASE("main exponent, frozen values") {
  auto t = theorem11_log_count(100, 3, 10, CountForm::binomial);
  // -36*90/(4*10^4) - 216*2*1000/(24*10^8) = -0.081 - 0.00018
  CHECK_THAT(t.exponent, Catch::Matchers::WithinAbs(-0.08118, 1e-12));
  CHECK_THAT(t.scale.value, Catch::Matchers::WithinAbs(0.0729, 1e-12));

  CHECK(theorem11_log_count(100, 3, 0, CountForm::binomial).exponent == 0.0);
  auto t1 = theorem11_log_count(100, 3, 1, CountForm::binomial);
  CHECK_THAT(t1.exponent, Catch::Matchers::WithinAbs(-216.0 * 2.0 / 24e8, 1e-18));
}

TEST_CASE("main estimate is consistent with the tiny exact count") {
  auto t = theorem11_log_count(5, 3, 2, CountForm::binomial);
  double exact_ln = std::log(15.0);
  // trend check only: agreement within multiplier x error scale
  CHECK(std::fabs(t.value.ln_mag - exact_ln) <= 5.0 * t.scale.value);
}

TEST_CASE("binomial-model probability cases") {
  auto small = theorem13_from_m0(1000, 3, 100);
  CHECK(small.which == ProbCase::small_m0);
  CHECK_THAT(small.ln_prob, Catch::Matchers::WithinAbs(-0.09, 1e-12));

  auto large = theorem13_from_m0(1000, 3, 150);
  CHECK(large.which == ProbCase::large_m0);
  CHECK_THAT(large.small_value, Catch::Matchers::WithinAbs(-0.2025, 1e-12));
  CHECK_THAT(large.large_value - large.small_value, Catch::Matchers::WithinAbs(4.86e-4, 1e-12));
  CHECK(large.scale.terms.size() == 2);

  CHECK(theorem13_log_prob(1000, 3, 0.0).ln_prob == 0.0);
  // both case values remain retrievable
  CHECK(large.small_value != large.large_value);
}

TEST_CASE("case values stay close at the crossover") {
  for (long n : {1000L, 10000L}) {
    double m0 = static_cast<double>(n) / 9.0;
    auto res = theorem13_from_m0(n, 3, m0);
    double es_small = detail::error_scale_main(n, 3, m0);
    double lg = log_r2n(n, 3);
    double es_large = es_small + lg * lg * lg / std::sqrt(m0);
    CHECK(std::fabs(res.small_value - res.large_value) <= es_small + es_large);
  }
}

TEST_CASE("conditional moment parameters") {
  auto [mean, var] = corollary14_params(1000, 3, 150);
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(149.595, 1e-9));
  CHECK(var == 150.0);
  auto [m0, v0] = corollary14_params(1000, 3, 0);
  CHECK(m0 == 0.0);
  CHECK(v0 == 0.0);
  auto [m2, v2] = corollary14_params(100, 3, 10);
  CHECK_THAT(m2, Catch::Matchers::WithinAbs(9.82, 1e-9));
}

TEST_CASE("containment probability formula") {
  auto t = theorem15_log_prob(100, 3, 20, 2);
  double expected = std::log(380.0) - 2.0 * std::log(161700.0) + 36.0 * 4.0 / (4.0 * 1e4);
  CHECK_THAT(t.ln_prob, Catch::Matchers::WithinAbs(expected, 1e-10));
  CHECK(theorem15_log_prob(100, 3, 20, 0).ln_prob == 0.0);
  CHECK_THROWS_AS(theorem15_log_prob(100, 3, 20, 21), error);

  // consistency with the exact oracle at (5,3,2), within error-scale multiples
  auto K = Hypergraph::build(5, 3, {{1, 2, 3}});
  double exact = to_double(BigRat(count_linear_containing(5, 3, 2, K), count_linear(5, 3, 2)));
  auto f = theorem15_log_prob(5, 3, 2, 1);
  CHECK(std::fabs(f.ln_prob - std::log(exact)) <= 5.0 * f.scale.value);
}

TEST_CASE("leading conflict-free count") {
  CHECK(expected_conflict_free_sets(30, 3, 0, 4).value == to_double(BigRat(big_binomial(30, 4))));
  auto a = expected_conflict_free_sets(5, 3, 1, 3);
  CHECK(a.value == 1.0);  // 10 - 3*3; tiny-n discrepancy vs exact count 3 is documented
  CHECK(a.in_paper_range);
  auto b = expected_conflict_free_sets(100, 3, 10, 3);
  CHECK(b.value == 161700.0 - 2940.0);
  auto c = expected_conflict_free_sets(100, 3, 10, 20);
  CHECK_FALSE(c.in_paper_range);
}

TEST_CASE("refined exponent, frozen values") {
  // sparse instance evaluated with exact rationals:
  // [2]_2 C(4,2) C(2,1) [C(5,4) - C(3,2)*2*C(3,2)] / (2 [C(5,3) - C(3,2)*2*C(3,1)]^2)
  auto sp = refined_inverse_prob(5, 3, 2, Regime::sparse);
  CHECK_THAT(sp.ln_inv_prob, Catch::Matchers::WithinAbs(-2.4375, 1e-12));

  // single edge in the mid/sparse form vanishes with [m]_2
  CHECK(refined_inverse_prob(50, 3, 1, auto_regime(50, 3, 1)).ln_inv_prob == 0.0);

  auto mid = refined_inverse_prob(100, 3, 8, Regime::mid);
  CHECK_THAT(mid.ln_inv_prob, Catch::Matchers::WithinAbs(0.050378632410467486, 1e-12));

  auto dn = refined_inverse_prob(500, 3, 300, Regime::dense);
  CHECK_THAT(dn.ln_inv_prob, Catch::Matchers::WithinAbs(3.245658, 1e-5));
  CHECK(dn.terms.size() == 3);
}

TEST_CASE("main exponent accuracy improves with n at fixed m/n") {
  // m = floor(0.35 n) = 2 across these sizes; exact probabilities from the oracle
  double prev_gap = 1e9;
  for (long n : {6L, 7L, 8L}) {
    long m = static_cast<long>(0.35 * n);
    REQUIRE(m == 2);
    double lnp = ln_big(count_linear(n, 3, m)) - ln_big(count_all(n, 3, m));
    double gap = std::fabs(theorem11_log_count(n, 3, m, CountForm::binomial).exponent - lnp);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("refined exponent tracks the main exponent in the dense regime") {
  for (auto [n, m] : {std::pair<long, long>{500, 300}, {1000, 300}, {2000, 600}}) {
    auto refined = refined_inverse_prob(n, 3, m, Regime::dense);
    auto main = theorem11_log_count(n, 3, m, CountForm::binomial);
    CHECK(std::fabs(-refined.ln_inv_prob - main.exponent) <= 5.0 * main.scale.value);
  }
}

TEST_CASE("binomial tools") {
  double bound = binomial_tools(10, 0.5, 2, BinomialTool::chernoff);
  CHECK_THAT(bound, Catch::Matchers::WithinAbs(2.0 * std::exp(-4.0 / 15.0), 1e-12));
  CHECK(112.0 / 1024.0 <= bound);  // exact two-sided tail 2(1+10+45)/1024

  double lnpmf = binomial_tools(10, 0.5, 0, BinomialTool::point_exact);
  CHECK_THAT(lnpmf, Catch::Matchers::WithinAbs(std::log(252.0) - 10.0 * std::log(2.0), 1e-12));

  double approx = binomial_tools(1000000, 1e-3, 0, BinomialTool::point_approx);
  double exact = std::exp(binomial_tools(1000000, 1e-3, 0, BinomialTool::point_exact));
  CHECK(std::fabs(approx - exact) / exact < 1e-2);

  CHECK_THROWS_AS(binomial_tools(10, 0.5, 6, BinomialTool::chernoff), error);
  CHECK_THROWS_AS(binomial_tools(10, 0.5, 0, BinomialTool::chernoff), error);
}
