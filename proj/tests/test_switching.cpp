#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "linhyp/switching.hpp"
#include "test_util.hpp"

using namespace linhyp;

namespace {

// canonical form for descriptor comparison
std::string canon(const SwitchingDescriptor& d) {
  auto dump_sorted = [](std::vector<std::vector<int>> es) {
    for (auto& e : es) std::sort(e.begin(), e.end());
    std::sort(es.begin(), es.end());
    std::string s;
    for (const auto& e : es) {
      for (int v : e) s += std::to_string(v) + ".";
      s += "|";
    }
    return s;
  };
  std::string s = std::to_string(static_cast<int>(d.op)) + "/" + std::to_string(d.cluster_kind);
  s += ";rm=";
  for (const auto& e : d.removed) {
    for (int v : e) s += std::to_string(v) + ".";
    s += "|";
  }
  s += ";add=" + dump_sorted(d.added);
  if (d.target_set) {
    auto t = *d.target_set;
    std::sort(t.begin(), t.end());
    s += ";T=";
    for (int v : t) s += std::to_string(v) + ".";
  }
  return s;
}

}  // namespace

TEST_CASE("forward switching counts, frozen examples") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  CHECK(count_forward_switchings(h, 4) == 200);  // 20 * 10 sequential counts

  // sequential-count consistency: h4 x product when steps are symmetric
  BigCount step1 = count_conflict_free_sets(Hypergraph::build(6, 3, {}), 3);
  CHECK(step1 == 20);
  auto after = Hypergraph::build(6, 3, {{1, 2, 3}});
  CHECK(count_conflict_free_sets(after, 3) == 10);

  auto lin = Hypergraph::build(9, 3, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  for (int kind = 1; kind <= 4; ++kind) CHECK(count_forward_switchings(lin, kind) == 0);

  // all three edges form the Type-3 cluster; sequences are ordered linear triples
  auto t3 = Hypergraph::build(12, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}, {1, 2, 7, 8}});
  CHECK(count_forward_switchings(t3, 3) == BigCount("22765050"));
}

TEST_CASE("forward stream matches count and descriptors apply cleanly") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  long produced = 0;
  bool all_h4_zero = true;
  for_each_forward_switching(h, 4, [&](const SwitchingDescriptor& d) {
    ++produced;
    Hypergraph image = apply_switching(h, d);
    if (cluster_profile(image).h4 != 0) all_h4_zero = false;
  });
  CHECK(produced == 200);
  CHECK(all_h4_zero);  // removing the only Type-4 cluster
}

TEST_CASE("reverse switching counts, frozen examples") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {4, 5, 6}});
  CHECK(count_reverse_switchings(h, 4) == 180);
  long produced = 0;
  for_each_reverse_switching(h, 4, [&](const SwitchingDescriptor&) { ++produced; });
  CHECK(produced == 180);

  // every edge carries a link: no deletable edges
  auto linked = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  CHECK_THROWS_MATCHES(count_reverse_switchings(linked, 1), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("TooFewFreeEdges")));

  // Type-1 needs four link vertices inside one edge: impossible at r=3
  auto lin3 = Hypergraph::build(9, 3, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  CHECK(count_reverse_switchings(lin3, 1) == 0);
}

TEST_CASE("creation pattern enumeration matches the closed-form counts") {
  for (int r : {3, 4, 5}) {
    std::vector<int> T;
    for (int v = 0; v < 3 * r - 4; ++v) T.push_back(v);
    for (int kind : {1, 2, 3}) {
      long produced = 0;
      detail::enumerate_creations(kind, r, T, {}, [&](const std::vector<std::vector<int>>& es) {
        REQUIRE(es.size() == 3);
        ++produced;
      });
      CHECK(BigCount(produced) == detail::creation_count_cf(kind, r));
    }
    std::vector<int> T4;
    for (int v = 0; v < 2 * r - 2; ++v) T4.push_back(v);
    long produced = 0;
    std::set<std::string> uniq;
    detail::enumerate_creations(4, r, T4, {}, [&](const std::vector<std::vector<int>>& es) {
      REQUIRE(es.size() == 2);
      std::string key;
      auto a = es;
      std::sort(a.begin(), a.end());
      for (const auto& e : a)
        for (int v : e) key += std::to_string(v) + ".";
      uniq.insert(key);
      ++produced;
    });
    CHECK(BigCount(produced) == detail::creation_count_cf(4, r));
    CHECK(static_cast<long>(uniq.size()) == produced);  // no duplicates

    produced = 0;
    detail::enumerate_creations(4, r, T4, std::make_pair(0, 1),
                                [&](const std::vector<std::vector<int>>&) { ++produced; });
    CHECK(BigCount(produced) == detail::creation_count_one_conflict(r));
  }
}

TEST_CASE("round trips through apply and inverse") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  long checked = 0;
  for_each_forward_switching(h, 4, [&](const SwitchingDescriptor& d) {
    if (++checked > 25) return;
    Hypergraph image = apply_switching(h, d);
    Hypergraph back = apply_switching(image, inverse_of(d, h));
    CHECK(back == h);
  });

  auto h2 = Hypergraph::build(6, 3, {{1, 2, 3}, {4, 5, 6}});
  checked = 0;
  for_each_reverse_switching(h2, 4, [&](const SwitchingDescriptor& d) {
    if (++checked > 25) return;
    Hypergraph image = apply_switching(h2, d);
    Hypergraph back = apply_switching(image, inverse_of(d, h2));
    CHECK(back == h2);
  });
}

TEST_CASE("forward inverses appear among the image's reverse descriptors") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  long checked = 0;
  for_each_forward_switching(h, 4, [&](const SwitchingDescriptor& d) {
    if (++checked > 10) return;
    Hypergraph image = apply_switching(h, d);
    auto inv = inverse_of(d, h);
    std::string want = canon(inv);
    bool found = false;
    for_each_reverse_switching(image, 4, [&](const SwitchingDescriptor& rd) {
      if (!found && canon(rd) == want) found = true;
    });
    CHECK(found);
  });
}

TEST_CASE("degree bound contract: applications raise degrees by at most three") {
  auto h = Hypergraph::build(8, 3, {{1, 2, 3}, {1, 2, 4}, {5, 6, 7}});
  long checked = 0;
  for_each_forward_switching(h, 4, [&](const SwitchingDescriptor& d) {
    if (++checked > 200) return;
    Hypergraph image = apply_switching(h, d);
    for (int v = 1; v <= 8; ++v) CHECK(image.degree(v) <= h.degree(v) + 3);
  });
}

TEST_CASE("stale descriptors are rejected") {
  auto h = Hypergraph::build(6, 3, {{1, 2, 3}, {1, 2, 4}});
  SwitchingDescriptor d;
  d.op = SwitchOp::forward;
  d.cluster_kind = 4;
  d.removed = {{1, 2, 3}, {1, 2, 4}};
  d.added = {{1, 3, 5}, {1, 3, 6}};  // second insertion collides with the first
  CHECK_THROWS_MATCHES(apply_switching(h, d), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("StaleDescriptor")));

  d.removed = {{1, 2, 3}, {3, 4, 5}};  // not a cluster
  d.added = {{1, 3, 5}, {2, 4, 6}};
  CHECK_THROWS_AS(apply_switching(h, d), error);
}

TEST_CASE("degree switchings") {
  auto h = Hypergraph::build(5, 3, {{1, 2, 3}});
  CHECK(count_degree_switchings(h, 1, DegreeDirection::down) == 4);
  CHECK(count_degree_switchings(h, 4, DegreeDirection::down) == 0);  // degree zero
  CHECK(count_degree_switchings(h, 4, DegreeDirection::up) == 6);
  // ceiling m C(n-1, r-1)
  CHECK(BigCount(6) <= BigCount(1) * big_binomial(4, 2));

  long produced = 0;
  for_each_degree_switching(h, 1, DegreeDirection::down, [&](const SwitchingDescriptor& d) {
    ++produced;
    Hypergraph image = apply_switching(h, d);
    CHECK(image.degree(1) == 0);
    Hypergraph back = apply_switching(image, inverse_of(d, h));
    CHECK(back == h);
  });
  CHECK(produced == 4);

  // whole-cluster moves keep the profile
  auto hc = Hypergraph::build(8, 3, {{1, 2, 3}, {1, 2, 4}, {5, 6, 7}});
  for_each_degree_switching(hc, 3, DegreeDirection::down, [&](const SwitchingDescriptor& d) {
    Hypergraph image = apply_switching(hc, d);
    CHECK(image.degree(3) == hc.degree(3) - 1);
    CHECK(cluster_profile(image).h4 == cluster_profile(hc).h4);
  });

  CHECK_THROWS_AS(count_degree_switchings(h, 9, DegreeDirection::down), error);
}

TEST_CASE("displacements and replacements") {
  auto h = Hypergraph::build(5, 3, {{1, 2, 3}});
  CHECK(count_displacements(h, {1, 2, 3}) == 9);  // C(5,3) - 1
  CHECK_THROWS_MATCHES(count_displacements(h, {1, 2, 4}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("EdgeAbsent")));

  auto empty = Hypergraph::build(5, 3, {});
  CHECK(count_replacements(empty, {1, 2, 3}, {}) == 0);

  auto h2 = Hypergraph::build(5, 3, {{1, 2, 3}, {1, 4, 5}});
  CHECK(count_replacements(h2, {2, 4, 5}, {}) == 2);
  CHECK_THROWS_MATCHES(count_replacements(h2, {1, 2, 3}, {}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("EdgePresent")));

  std::vector<bool> legal;
  for_each_replacement(h2, {2, 4, 5}, {}, [&](const SwitchingDescriptor& d) {
    legal.push_back(d.legal);
    Hypergraph image = apply_switching(h2, d);
    CHECK(image.is_linear() == d.legal);
    Hypergraph back = apply_switching(image, inverse_of(d, h2));
    CHECK(back == h2);
  });
  // removing {1,2,3} leaves {1,4,5},{2,4,5} sharing two vertices: illegal;
  // removing {1,4,5} leaves a linear pair: legal
  REQUIRE(legal.size() == 2);
  CHECK(legal[0] != legal[1]);

  // protected prefix blocks a removal
  CHECK(count_replacements(h2, {2, 4, 5}, {{1, 2, 3}}) == 1);

  long produced = 0;
  for_each_displacement(h, {1, 2, 3}, [&](const SwitchingDescriptor& d) {
    ++produced;
    Hypergraph image = apply_switching(h, d);
    CHECK(image.m() == 1);
    Hypergraph back = apply_switching(image, inverse_of(d, h));
    CHECK(back == h);
  });
  CHECK(produced == 9);
}

TEST_CASE("audit on a tiny grid") {
  ClusterProfile P;
  P.h4 = 1;
  auto rep = double_count_audit(6, 3, 2, 4, P);
  CHECK(rep.forward_total == 18000);
  CHECK(rep.reverse_total == 18000);
  CHECK(rep.equal);
  CHECK(rep.class_a_size == 90);
  CHECK(rep.class_b_size == 100);
  CHECK(rep.sandwich_ok);
  CHECK(rep.ratio_lo <= rep.ratio_observed);
  CHECK(rep.ratio_observed <= rep.ratio_hi);

  ClusterProfile none;
  CHECK_THROWS_AS(double_count_audit(6, 3, 2, 4, none), error);
}

TEST_CASE("forward application decrements exactly the audited profile entry") {
  // over every class member on the tiny grid
  auto table = detail::RSetTable::lex(6, 3, 1u << 20);
  long members = 0;
  smallgrid::for_each_subset(
      table, 2, [&](const std::vector<long>& idx, const std::vector<std::uint64_t>& vm) {
        ClusterProfile p = smallgrid::profile_of(vm.data(), 2, 3);
        ClusterProfile want;
        want.h4 = 1;
        if (!(p == want)) return;
        ++members;
        if (members > 30) return;
        std::vector<std::vector<int>> edges;
        for (long i : idx) {
          const int* v = table.verts_of(i);
          edges.emplace_back(v, v + 3);
        }
        Hypergraph h = Hypergraph::build(6, 3, edges);
        for_each_forward_switching(h, 4, [&](const SwitchingDescriptor& d) {
          Hypergraph image = apply_switching(h, d);
          CHECK(cluster_profile(image).all_zero());
        });
      });
  CHECK(members == 90);
}
