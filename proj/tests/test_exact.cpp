#include <catch2/catch_amalgamated.hpp>

#include "linhyp/exact.hpp"
#include "test_util.hpp"

using namespace linhyp;

TEST_CASE("count_all") {
  CHECK(count_all(5, 3, 2) == 45);
  CHECK(count_all(9, 4, 0) == 1);
  CHECK(count_all(6, 3, 1) == 20);
  CHECK_THROWS_AS(count_all(5, 3, 99), error);
}

TEST_CASE("count_linear frozen vectors") {
  // golden vectors, cross-derived by exhaustive subset filtering
  const long v53[] = {1, 10, 15, 0};
  for (long m = 0; m < 4; ++m) CHECK(count_linear(5, 3, m) == v53[m]);
  const long v63[] = {1, 20, 100, 120, 30, 0};
  for (long m = 0; m < 6; ++m) CHECK(count_linear(6, 3, m) == v63[m]);
  const long v73[] = {1, 35, 385, 1575, 2310, 1050, 210, 30, 0};
  for (long m = 0; m < 9; ++m) CHECK(count_linear(7, 3, m) == v73[m]);
}

TEST_CASE("count_linear basics and threading") {
  for (long n = 4; n <= 7; ++n) CHECK(count_linear(n, 3, 1) == big_binomial(n, 3));
  CHECK(count_linear(8, 3, 3, Budget{}, 1) == count_linear(8, 3, 3, Budget{}, 3));
  CHECK(count_linear(8, 3, 3) <= count_all(8, 3, 3));
}

TEST_CASE("count_linear budget") {
  Budget tiny;
  tiny.dfs_node_cap = 10;
  CHECK_THROWS_MATCHES(count_linear(8, 3, 4, tiny), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("BudgetExceeded")));
  CHECK_THROWS_MATCHES(count_linear(30, 3, 6), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("BudgetExceeded")));
}

TEST_CASE("count_linear_containing") {
  auto K1 = Hypergraph::build(5, 3, {{1, 2, 3}});
  CHECK(count_linear_containing(5, 3, 2, K1) == 3);
  CHECK(count_linear_containing(5, 3, 1, K1) == 1);  // k = m
  auto K2 = Hypergraph::build(6, 3, {{1, 2, 3}});
  CHECK(count_linear_containing(6, 3, 2, K2) == 10);

  auto bad = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  CHECK_THROWS_MATCHES(count_linear_containing(6, 3, 3, bad), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("NotLinearK")));
}

TEST_CASE("containing is invariant under vertex relabeling") {
  auto K = Hypergraph::build(7, 3, {{1, 2, 3}, {3, 4, 5}});
  // relabel via the permutation v -> 8 - v
  std::vector<std::vector<int>> relabeled;
  for (const auto& e : K.edges_1based()) {
    std::vector<int> f;
    for (int v : e) f.push_back(8 - v);
    relabeled.push_back(f);
  }
  auto K2 = Hypergraph::build(7, 3, relabeled);
  for (long m = 2; m <= 4; ++m)
    CHECK(count_linear_containing(7, 3, m, K) == count_linear_containing(7, 3, m, K2));
  CHECK(count_linear_containing(7, 3, 4, K) <= count_linear(7, 3, 4));
}

TEST_CASE("profile census matches frozen buckets") {
  auto th = ThresholdSet::for_regime(Regime::dense, 8, 3, 3);
  auto c = profile_census(8, 3, 3, Regime::dense, th);
  CHECK(c.total == 27720);  // C(56,3)
  ClusterProfile lin, h2, h3, h4, other;
  h2.h2 = 1;
  h3.h3 = 1;
  h4.h4 = 1;
  other.other = 1;
  CHECK(c.count_with_profile(lin) == 10080);
  CHECK(c.count_with_profile(h2) == 3360);
  CHECK(c.count_with_profile(h3) == 560);
  CHECK(c.count_with_profile(h4) == 13440);
  CHECK(c.count_with_profile(other) == 280);
  CHECK(c.count_with_profile(lin) == count_linear(8, 3, 3));

  // single edge: one all-zero bucket of size C(n,r)
  auto th1 = ThresholdSet::for_regime(Regime::sparse, 7, 3, 1);
  auto c1 = profile_census(7, 3, 1, Regime::sparse, th1);
  CHECK(c1.total == 35);
  CHECK(c1.count_with_profile(lin) == 35);

  Budget tiny;
  tiny.census_cap = 100;
  CHECK_THROWS_MATCHES(profile_census(8, 3, 3, Regime::dense, th, tiny), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("BudgetExceeded")));
}

TEST_CASE("census totals equal count_all across a grid") {
  for (long m = 0; m <= 3; ++m) {
    Regime reg = auto_regime(6, 3, m);
    auto th = ThresholdSet::for_regime(reg, 6, 3, m);
    auto c = profile_census(6, 3, m, reg, th);
    CHECK(c.total == count_all(6, 3, m));
    ClusterProfile lin;
    CHECK(c.count_with_profile(lin) == count_linear(6, 3, m));
  }
}

TEST_CASE("smallgrid analysis agrees with the hypergraph route") {
  CounterRng rng(37, 0);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 6 + static_cast<int>(rng.below(6));
    int r = 3 + static_cast<int>(rng.below(2));
    long m = 2 + static_cast<long>(rng.below(4));
    Hypergraph h = sample_random(n, r, m, rng);
    std::vector<std::uint64_t> vm;
    for (const auto& e : h.edges()) vm.push_back(e.mask.words[0]);
    ClusterProfile fast = smallgrid::profile_of(vm.data(), static_cast<int>(m), r);
    CHECK(fast == cluster_profile(h));
    Regime reg = auto_regime(n, r, m);
    auto th = ThresholdSet::for_regime(reg, n, r, m);
    auto mem = smallgrid::membership_of(vm.data(), static_cast<int>(m), n, r, reg, th, fast);
    auto rep = property_report(h, reg, th);
    CHECK(mem.in_plus == rep.in_plus);
    CHECK(mem.in_plusplus == rep.in_plusplus);
  }
}

TEST_CASE("expected t-edge overlap tallies match a direct filter") {
  // two routes to the number of t-edge subsets whose union is small
  auto table = detail::RSetTable::lex(8, 3, 1u << 20);
  const int t = 3, r = 3;
  for (int alpha = 1; alpha <= 3; ++alpha) {
    long direct = 0;
    smallgrid::for_each_subset(table, t,
                               [&](const std::vector<long>&, const std::vector<std::uint64_t>& vm) {
                                 if (__builtin_popcountll(vm[0] | vm[1] | vm[2]) <= r * t - alpha)
                                   ++direct;
                               });
    long via_masks = 0;
    for (long i = 0; i < table.count; ++i)
      for (long j = i + 1; j < table.count; ++j)
        for (long k = j + 1; k < table.count; ++k)
          if (__builtin_popcountll(table.vmask[i] | table.vmask[j] | table.vmask[k]) <=
              r * t - alpha)
            ++via_masks;
    CHECK(direct == via_masks);
    CHECK(direct > 0);
  }
}

TEST_CASE("exact binomial-model linearity probability") {
  auto r0 = exact_binomial_linearity(5, 3, 0.0);
  CHECK(r0.probability == 1.0);
  auto r1 = exact_binomial_linearity(5, 3, 1.0);
  CHECK(r1.probability == 0.0);
  CHECK_FALSE(r1.truncated);
  auto r2 = exact_binomial_linearity(5, 3, 0.1);
  CHECK_THAT(r2.probability, Catch::Matchers::WithinAbs(0.8006690106, 1e-12));
}
