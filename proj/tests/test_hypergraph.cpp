#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "linhyp/clusters.hpp"
#include "linhyp/io.hpp"
#include "linhyp/rng.hpp"
#include "test_util.hpp"

using namespace linhyp;

TEST_CASE("build validates and canonicalizes") {
  auto h = Hypergraph::build(5, 3, {{1, 2, 3}});
  CHECK(h.m() == 1);
  CHECK(h.n() == 5);

  CHECK_THROWS_MATCHES(Hypergraph::build(5, 3, {{1, 2, 3}, {3, 2, 1}}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("DuplicateEdge")));
  CHECK_THROWS_MATCHES(Hypergraph::build(4, 3, {{1, 2, 5}}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("VertexOutOfRange")));
  CHECK_THROWS_MATCHES(Hypergraph::build(5, 3, {{1, 2}}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("WrongEdgeSize")));
  CHECK_THROWS_MATCHES(Hypergraph::build(5, 3, {{1, 2, 2}}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("WrongEdgeSize")));

  // canonical order regardless of input order
  auto a = Hypergraph::build(6, 3, {{4, 5, 6}, {1, 2, 3}});
  auto b = Hypergraph::build(6, 3, {{1, 2, 3}, {4, 5, 6}});
  CHECK(a == b);
}

TEST_CASE("codegree") {
  auto h1 = Hypergraph::build(5, 3, {{1, 2, 3}});
  CHECK(h1.codegree({1}) == 1);
  CHECK(h1.codegree({4, 5}) == 0);
  auto h2 = Hypergraph::build(5, 3, {{1, 2, 3}, {1, 2, 4}});
  CHECK(h2.codegree({1, 2}) == 2);
  CHECK_THROWS_AS(h1.codegree({9}), error);
}

TEST_CASE("codegree invariants on random hypergraphs") {
  CounterRng rng(7, 0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 5 + static_cast<int>(rng.below(6));
    int r = 2 + static_cast<int>(rng.below(3));
    long m = 1 + static_cast<long>(rng.below(8));
    auto nmax = big_binomial(n, r);
    if (BigCount(m) > nmax) m = nmax.get_si();
    Hypergraph h = sample_random(n, r, m, rng);

    long total = 0;
    for (int v = 1; v <= n; ++v) total += h.codegree({v});
    CHECK(total == static_cast<long>(r) * h.m());

    // U subset of U' implies codegree(U) >= codegree(U')
    int a = 1 + static_cast<int>(rng.below(n));
    int b = 1 + static_cast<int>(rng.below(n));
    if (a != b) {
      CHECK(h.codegree({a}) >= h.codegree({a, b}));
    }
  }
}

TEST_CASE("is_linear") {
  CHECK(Hypergraph::build(5, 3, {{1, 2, 3}, {3, 4, 5}}).is_linear());
  CHECK_FALSE(Hypergraph::build(5, 3, {{1, 2, 3}, {1, 2, 4}}).is_linear());
  CHECK(Hypergraph::build(5, 3, {{1, 2, 3}}).is_linear());
  CHECK(Hypergraph::build(5, 3, {}).is_linear());
}

TEST_CASE("cluster kinds") {
  auto t1 = Hypergraph::build(8, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}, {3, 4, 7, 8}});
  auto c1 = clusters(t1);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].kind == ClusterKind::type1);
  CHECK(c1[0].vertex_span == 8);

  auto t2 = Hypergraph::build(8, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}, {2, 3, 7, 8}});
  auto c2 = clusters(t2);
  REQUIRE(c2.size() == 1);
  CHECK(c2[0].kind == ClusterKind::type2);
  CHECK(c2[0].vertex_span == 8);

  auto t3 = Hypergraph::build(8, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}, {1, 2, 7, 8}});
  auto c3 = clusters(t3);
  REQUIRE(c3.size() == 1);
  CHECK(c3[0].kind == ClusterKind::type3);

  auto t4 = Hypergraph::build(4, 3, {{1, 2, 3}, {1, 2, 4}});
  auto c4 = clusters(t4);
  REQUIRE(c4.size() == 1);
  CHECK(c4[0].kind == ClusterKind::type4);
  CHECK(c4[0].vertex_span == 4);
}

TEST_CASE("cluster profiles") {
  CHECK(cluster_profile(Hypergraph::build(6, 3, {{1, 2, 3}, {4, 5, 6}})).all_zero());

  auto p = cluster_profile(Hypergraph::build(8, 3, {{1, 2, 3}, {1, 2, 4}, {5, 6, 7}, {5, 6, 8}}));
  CHECK(p.h4 == 2);
  CHECK(p.h1 + p.h2 + p.h3 + p.other == 0);

  auto q = cluster_profile(Hypergraph::build(5, 4, {{1, 2, 3, 4}, {1, 2, 3, 5}}));
  CHECK(q.other == 1);
  CHECK(q.h4 == 0);
}

TEST_CASE("linear iff no clusters") {
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 5 + static_cast<int>(rng.below(5));
    int r = 3;
    long m = 1 + static_cast<long>(rng.below(6));
    Hypergraph h = sample_random(n, r, m, rng);
    bool lin = h.is_linear();
    CHECK(lin == clusters(h).empty());
    CHECK(lin == cluster_profile(h).all_zero());
  }
}

TEST_CASE("classification completeness for 2- and 3-edge configurations") {
  // Every connected component on 2 or 3 edges with pairwise intersections
  // <= 2 and the right span must classify as a numbered type.
  for (int r : {3, 4}) {
    int n = r == 3 ? 7 : 10;
    std::vector<std::vector<int>> sets;
    std::vector<int> cur(r);
    std::function<void(int, int)> gen = [&](int from, int left) {
      if (left == 0) {
        sets.push_back(cur);
        return;
      }
      for (int v = from; v <= n - left + 1; ++v) {
        cur[r - left] = v;
        gen(v + 1, left - 1);
      }
    };
    gen(1, r);

    long checked = 0;
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        auto h = Hypergraph::build(n, r, {sets[i], sets[j]});
        int is = h.intersection_size(0, 1);
        auto cl = clusters(h);
        if (is == 2) {
          REQUIRE(cl.size() == 1);
          CHECK(cl[0].kind == ClusterKind::type4);
          ++checked;
        } else if (is >= 3) {
          REQUIRE(cl.size() == 1);
          CHECK(cl[0].kind == ClusterKind::other);
        } else {
          CHECK(cl.empty());
        }
      }
    REQUIRE(checked > 0);

    // 3-edge configurations: sample exhaustively for r=3, by stride for r=4
    std::size_t stride = r == 3 ? 1 : 17;
    long complete = 0, others = 0;
    for (std::size_t i = 0; i < sets.size(); i += 1)
      for (std::size_t j = i + 1; j < sets.size(); j += (r == 3 ? 1 : 3))
        for (std::size_t k = j + 1; k < sets.size(); k += stride) {
          auto h = Hypergraph::build(n, r, {sets[i], sets[j], sets[k]});
          auto cl = clusters(h);
          for (const auto& c : cl) {
            if (c.edge_indices.size() == 3) {
              bool le2 = true;
              for (int x = 0; x < 3 && le2; ++x)
                for (int y = x + 1; y < 3; ++y)
                  if (h.intersection_size(c.edge_indices[x], c.edge_indices[y]) > 2) le2 = false;
              if (le2 && c.vertex_span >= 3 * r - 4) {
                CHECK(c.kind != ClusterKind::other);
                ++complete;
              } else if (c.kind == ClusterKind::other) {
                ++others;
              }
            }
          }
        }
    REQUIRE(complete > 0);
    REQUIRE(others > 0);
  }
}

TEST_CASE("lh round trip and comments") {
  auto h = Hypergraph::build(8, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}});
  std::stringstream ss;
  write_lh(ss, h);
  auto h2 = read_lh(ss);
  CHECK(h == h2);

  std::stringstream in("# comment\n5 3 1\n# another\n1 2 3\n");
  auto h3 = read_lh(in);
  CHECK(h3.m() == 1);
}

TEST_CASE("lh parse errors name the line") {
  auto expect_fail = [](const std::string& text, const std::string& needle) {
    std::stringstream in(text);
    CHECK_THROWS_MATCHES(read_lh(in), error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring(needle)));
  };
  expect_fail("5 3 1\n1 2\n", "line 2");
  expect_fail("5 3 1\n3 2 1\n", "line 2");          // not increasing
  expect_fail("5 3 1\n1  2 3\n", "line 2");         // double space
  expect_fail("5 3 1\n1 2 3 \n", "line 2");         // trailing space
  expect_fail("5 3\n", "line 1");                   // bad header
  expect_fail("5 3 2\n1 2 3\n", "expected 2 edges");
  expect_fail("5 3 1\n1 2 9\n", "invalid hypergraph");
}
