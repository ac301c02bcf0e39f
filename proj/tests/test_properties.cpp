#include <catch2/catch_amalgamated.hpp>

#include "linhyp/properties.hpp"
#include "test_util.hpp"

using namespace linhyp;

TEST_CASE("threshold formulas") {
  // ceil(ln(100/9) + 81*9*10/100) = ceil(2.4079 + 72.9) = 76
  auto t = ThresholdSet::dense(100, 3, 10);
  CHECK(t.m0_star == 76);
  CHECK(t.m0_cap == 79);
  CHECK(t.m1 == 6);   // ceil(2.4079 + 81*6561*1000/2e8) = ceil(5.065)
  CHECK(t.m2 == 4);   // ceil(2.4079 + 81*2187*1000/2e8) = ceil(3.294)
  CHECK(t.m3 == 3);   // ceil(2.4079 + 81*729*1000/2e8)  = ceil(2.703)
  CHECK(t.m4 == 36);  // ceil(2.4079 + 81*81*100/2e4)    = ceil(35.21)
  CHECK(t.consistent_with(Regime::dense));

  auto mid = ThresholdSet::mid(100, 3, 5);
  CHECK(mid.m0_star == 3);  // ceil(ln 11.11)
  CHECK(mid.m0_cap == 5);
  CHECK(mid.m4 == 3);
  CHECK(mid.m1 == 0);
  CHECK(mid.consistent_with(Regime::mid));

  auto sp = ThresholdSet::sparse(100, 3, 2);
  CHECK(sp.m4 == 2);
  CHECK(sp.consistent_with(Regime::sparse));

  CHECK_FALSE(mid.consistent_with(Regime::dense));
}

TEST_CASE("regime auto rule") {
  // dense iff m >= n / r^2, else mid iff m >= ln(n / r^2)
  CHECK(auto_regime(90, 3, 10) == Regime::dense);
  CHECK(auto_regime(900, 3, 10) == Regime::mid);
  CHECK(auto_regime(900, 3, 4) == Regime::sparse);
  CHECK(auto_regime(900, 3, 5) == Regime::mid);  // ln(100) = 4.6
}

TEST_CASE("property report on simple instances") {
  auto reg = Regime::dense;
  {
    auto h = Hypergraph::build(9, 3, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    auto th = ThresholdSet::for_regime(reg, 9, 3, 3);
    auto rep = property_report(h, reg, th);
    for (const auto& [k, v] : rep.props) CHECK(v);
    CHECK(rep.in_plus);
    CHECK(rep.in_plusplus);
  }
  {
    auto h = Hypergraph::build(5, 4, {{1, 2, 3, 4}, {1, 2, 3, 5}});
    auto th = ThresholdSet::for_regime(reg, 5, 4, 2);
    auto rep = property_report(h, reg, th);
    CHECK_FALSE(rep.prop("a"));
    CHECK_FALSE(rep.in_plus);
  }
  {
    // sparse: three disjoint Type-4 clusters break the cap of two
    auto h = Hypergraph::build(12, 3,
                               {{1, 2, 3}, {1, 2, 4}, {5, 6, 7}, {5, 6, 8}, {9, 10, 11},
                                {9, 10, 12}});
    auto th = ThresholdSet::for_regime(Regime::sparse, 12, 3, 6);
    auto rep = property_report(h, Regime::sparse, th);
    CHECK_FALSE(rep.prop("d"));
    CHECK_FALSE(rep.in_plus);
  }
}

TEST_CASE("regime mismatch is rejected") {
  auto h = Hypergraph::build(5, 3, {{1, 2, 3}});
  auto th = ThresholdSet::for_regime(Regime::mid, 5, 3, 1);
  CHECK_THROWS_MATCHES(property_report(h, Regime::dense, th), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("RegimeMismatch")));
}

TEST_CASE("reports are monotone in thresholds") {
  CounterRng rng(31, 0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 8 + static_cast<int>(rng.below(5));
    long m = 2 + static_cast<long>(rng.below(6));
    Hypergraph h = sample_random(n, 3, m, rng);
    auto lo = ThresholdSet::for_regime(Regime::dense, n, 3, m);
    auto hi = lo;
    hi.m0_star += static_cast<long>(rng.below(3));
    hi.m0_cap = hi.m0_star + 3;
    hi.m1 += static_cast<long>(rng.below(3));
    hi.m2 += static_cast<long>(rng.below(3));
    hi.m3 += static_cast<long>(rng.below(3));
    hi.m4 += static_cast<long>(rng.below(3));
    auto rlo = property_report(h, Regime::dense, lo);
    auto rhi = property_report(h, Regime::dense, hi);
    for (std::size_t i = 0; i < rlo.props.size(); ++i) {
      if (rlo.props[i].second) CHECK(rhi.props[i].second);
    }
    if (rlo.in_plus) CHECK(rhi.in_plus);
    if (rlo.in_plusplus) CHECK(rhi.in_plusplus);
  }
}

TEST_CASE("mid and sparse property lists") {
  auto h = Hypergraph::build(10, 3, {{1, 2, 3}, {1, 2, 4}});
  {
    auto th = ThresholdSet::for_regime(Regime::mid, 10, 3, 2);
    auto rep = property_report(h, Regime::mid, th);
    CHECK(rep.props.size() == 6);  // a..e plus e*
    CHECK(rep.prop("b"));
    CHECK(rep.prop("c"));
  }
  {
    auto th = ThresholdSet::for_regime(Regime::sparse, 10, 3, 2);
    auto rep = property_report(h, Regime::sparse, th);
    CHECK(rep.props.size() == 4);  // a..d
    CHECK(rep.in_plus == rep.in_plusplus);
  }
  {
    // two Type-4 clusters sharing a vertex violate mid/sparse (c)
    auto h2 = Hypergraph::build(8, 3, {{1, 2, 3}, {1, 2, 4}, {4, 5, 6}, {4, 5, 7}});
    auto th = ThresholdSet::for_regime(Regime::sparse, 8, 3, 4);
    auto rep = property_report(h2, Regime::sparse, th);
    CHECK_FALSE(rep.prop("c"));
  }
}
