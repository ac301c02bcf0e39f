#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "linhyp/exact.hpp"
#include "linhyp/montecarlo.hpp"

using namespace linhyp;

TEST_CASE("samplers hit the degenerate cases") {
  CHECK(sample_fixed(5, 3, 0, 1).m() == 0);
  CHECK(sample_fixed(4, 3, 4, 1).m() == 4);  // complete 3-graph on 4 vertices
  CHECK(sample_binomial(5, 3, 0.0, 1).m() == 0);
  CHECK(sample_binomial(5, 3, 1.0, 1).m() == 10);
  CHECK_THROWS_AS(sample_fixed(5, 3, 11, 1), error);
}

TEST_CASE("sampling is deterministic in the seed") {
  auto a = sample_binomial(20, 3, 0.05, 99);
  auto b = sample_binomial(20, 3, 0.05, 99);
  CHECK(a == b);
  auto c = sample_fixed(20, 3, 7, 123, 5);
  auto d = sample_fixed(20, 3, 7, 123, 5);
  CHECK(c == d);
  CHECK_FALSE(sample_fixed(20, 3, 7, 123, 6) == c);
}

TEST_CASE("fixed sampler is uniform over a tiny outcome space") {
  // C(C(4,3), 2) = 6 outcomes; chi-square on 1e5 seeded draws
  std::map<std::string, long> counts;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    auto h = sample_fixed(4, 3, 2, 777, static_cast<std::uint64_t>(i));
    std::string key;
    for (const auto& e : h.edges_1based())
      for (int v : e) key += static_cast<char>('0' + v);
    ++counts[key];
  }
  REQUIRE(counts.size() == 6);
  double expect = trials / 6.0;
  double chi2 = 0;
  for (const auto& [k, v] : counts) chi2 += (v - expect) * (v - expect) / expect;
  // 1 - 1e-3 quantile of chi-square with 5 dof
  CHECK(chi2 < 20.515);
}

TEST_CASE("fixed sampler marginal inclusion is m/N") {
  const long trials = 60000;
  long hits = 0;  // count appearances of the edge {1,2,3}
  std::vector<int> probe = {0, 1, 2};
  for (long i = 0; i < trials; ++i) {
    auto h = sample_fixed(5, 3, 4, 555, static_cast<std::uint64_t>(i));
    if (h.find_edge(probe) >= 0) ++hits;
  }
  double p = static_cast<double>(hits) / trials;
  double expect = 4.0 / 10.0;
  double sigma = std::sqrt(expect * (1 - expect) / trials);
  CHECK(std::fabs(p - expect) <= 4 * sigma);
}

TEST_CASE("binomial sampler edge count moments") {
  const long trials = 30000;
  long long total = 0;
  for (long i = 0; i < trials; ++i)
    total += sample_binomial(10, 3, 0.3, 888, static_cast<std::uint64_t>(i)).m();
  double mean = static_cast<double>(total) / trials;
  double expect = 120 * 0.3;
  double sigma = std::sqrt(120 * 0.3 * 0.7 / trials);
  CHECK(std::fabs(mean - expect) <= 4 * sigma);
}

TEST_CASE("linearity estimates: exact cases and oracle agreement") {
  CHECK(estimate_linearity_fixed(10, 3, 1, 50, 1).point == 1.0);
  CHECK(estimate_linearity_fixed(10, 3, 0, 50, 1).point == 1.0);
  CHECK_THROWS_MATCHES(estimate_linearity_fixed(10, 3, 2, 0, 1), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("ZeroTrials")));

  auto est = estimate_linearity_fixed(5, 3, 2, 200000, 4242, 2);
  double truth = 15.0 / 45.0;
  CHECK(std::fabs(est.point - truth) <= 4 * est.stderr_);
  CHECK(est.trials == 200000);
  CHECK(est.ci_lo <= est.point);
  CHECK(est.point <= est.ci_hi);
}

TEST_CASE("estimates are independent of the worker count") {
  auto a = estimate_linearity_fixed(30, 3, 10, 40000, 2024, 1);
  auto b = estimate_linearity_fixed(30, 3, 10, 40000, 2024, 3);
  CHECK(a.successes == b.successes);
  CHECK(a.point == b.point);

  auto pa = estimate_profile_distribution(20, 3, 6, 20000, 11, Regime::dense, 1);
  auto pb = estimate_profile_distribution(20, 3, 6, 20000, 11, Regime::dense, 3);
  REQUIRE(pa.profiles.size() == pb.profiles.size());
  CHECK(pa.plusplus_fraction.successes == pb.plusplus_fraction.successes);
}

TEST_CASE("profile distribution on exhaustively known instances") {
  auto dist = estimate_profile_distribution(5, 3, 1, 500, 5, Regime::sparse);
  REQUIRE(dist.profiles.size() == 1);
  CHECK(dist.profiles.begin()->second.point == 1.0);
  CHECK(dist.plus_fraction.point == 1.0);

  auto d2 = estimate_profile_distribution(5, 3, 2, 150000, 52, Regime::sparse, 2);
  ProfileKey h4key;
  h4key.h4 = 1;
  REQUIRE(d2.profiles.count(h4key) == 1);
  auto est = d2.profiles.at(h4key);
  double truth = 30.0 / 45.0;
  CHECK(std::fabs(est.point - truth) <= 4 * est.stderr_);
}

TEST_CASE("conditional moments in a degenerate model") {
  auto mom = estimate_conditional_moments(10, 3, 0.0, 100, 9);
  CHECK(mom.mean.point == 0.0);
  CHECK(mom.accepted == 100);
  CHECK_THROWS_MATCHES(estimate_conditional_moments(60, 3, 0.5, 100, 9), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("AcceptanceTooLow")));
}

TEST_CASE("containment estimates agree with the exact oracle") {
  auto K0 = Hypergraph::build(5, 3, {});
  CHECK(estimate_containment(5, 3, 2, K0, 100, 3).point == 1.0);

  auto K = Hypergraph::build(5, 3, {{1, 2, 3}});
  auto est = estimate_containment(5, 3, 2, K, 60000, 31, 2);
  CHECK(std::fabs(est.point - 0.2) <= 4 * est.stderr_);

  auto K9 = Hypergraph::build(9, 3, {{1, 2, 3}});
  auto est9 = estimate_containment(9, 3, 3, K9, 60000, 33, 2);
  double truth = to_double(BigRat(count_linear_containing(9, 3, 3, K9), count_linear(9, 3, 3)));
  CHECK(std::fabs(est9.point - truth) <= 4 * est9.stderr_);

  auto bad = Hypergraph::build(5, 3, {{1, 2, 3}, {1, 2, 4}});
  CHECK_THROWS_MATCHES(estimate_containment(5, 3, 3, bad, 100, 3), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("NotLinearK")));
}

TEST_CASE("wilson interval at the boundary") {
  auto e = bernoulli_estimate(0, 100, 1);
  CHECK(e.ci_lo >= 0.0);
  CHECK(e.ci_hi > 0.0);  // wilson upper end is positive even at zero successes
  auto f = bernoulli_estimate(100, 100, 1);
  CHECK(f.ci_hi <= 1.0);
  CHECK(f.ci_lo < 1.0);
}
