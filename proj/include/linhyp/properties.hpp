#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/clusters.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/hypergraph.hpp"

namespace linhyp {

/// Parameter regimes. Dense: r^-2 n <= m = o(r^-3 n^1.5); Mid: log(r^-2 n) <= m
/// = O(r^-2 n); Sparse: 1 <= m = O(log(r^-2 n)). Finite-n selection is the
/// heuristic below.
enum class Regime { dense, mid, sparse };

inline const char* regime_name(Regime t) {
  switch (t) {
    case Regime::dense: return "dense";
    case Regime::mid: return "mid";
    case Regime::sparse: return "sparse";
  }
  return "?";
}

inline double log_r2n(long n, long r) { return std::log(static_cast<double>(n) / (static_cast<double>(r) * r)); }

/// Dense if m >= r^-2 n, else Mid if m >= ln(r^-2 n), else Sparse.
inline Regime auto_regime(long n, long r, long m) {
  if (m * r * r >= n) return Regime::dense;
  if (static_cast<double>(m) >= log_r2n(n, r)) return Regime::mid;
  return Regime::sparse;
}

namespace detail {

// ceil(L + q) with the rational part exact; only the log term rides on a double.
inline long ceil_log_plus_rational(double L, const BigRat& q) {
  BigCount fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  BigRat frac = q - BigRat(fl);
  long base = static_cast<long>(fl.get_si());
  double rest = L + to_double(frac);
  long out = base + static_cast<long>(std::ceil(rest));
  return out < 0 ? 0 : out;
}

}  // namespace detail

/// Cluster-count caps M_1..M_4 and degree caps M_0^*, M_0 for a regime.
struct ThresholdSet {
  long m0_star = 0;
  long m0_cap = 0;
  long m1 = 0, m2 = 0, m3 = 0, m4 = 0;

  static ThresholdSet dense(long n, long r, long m) {
    const double L = log_r2n(n, r);
    BigCount r2(r * r);
    BigCount rr(r);
    BigCount mm(m), nn(n);
    ThresholdSet t;
    t.m0_star = detail::ceil_log_plus_rational(L, BigRat(81 * r2 * mm, nn));
    t.m0_cap = t.m0_star + 3;
    BigCount r6 = r2 * r2 * r2;
    BigCount m3_ = mm * mm * mm;
    BigCount n4 = nn * nn * nn * nn;
    t.m1 = detail::ceil_log_plus_rational(L, BigRat(81 * r6 * rr * rr * m3_, 2 * n4));
    t.m2 = detail::ceil_log_plus_rational(L, BigRat(81 * r6 * rr * m3_, 2 * n4));
    t.m3 = detail::ceil_log_plus_rational(L, BigRat(81 * r6 * m3_, 2 * n4));
    t.m4 = detail::ceil_log_plus_rational(L, BigRat(81 * r2 * r2 * mm * mm, 2 * nn * nn));
    return t;
  }

  static ThresholdSet mid(long n, long r, long /*m*/) {
    const double L = log_r2n(n, r);
    ThresholdSet t;
    t.m0_star = detail::ceil_log_plus_rational(L, BigRat(0));
    t.m0_cap = t.m0_star + 2;
    t.m4 = t.m0_star;
    return t;
  }

  static ThresholdSet sparse(long /*n*/, long /*r*/, long /*m*/) {
    ThresholdSet t;
    t.m4 = 2;
    return t;
  }

  static ThresholdSet for_regime(Regime reg, long n, long r, long m) {
    switch (reg) {
      case Regime::dense: return dense(n, r, m);
      case Regime::mid: return mid(n, r, m);
      case Regime::sparse: return sparse(n, r, m);
    }
    fail(errc::out_of_range, "bad regime");
  }

  bool consistent_with(Regime reg) const {
    switch (reg) {
      case Regime::dense: return m0_cap == m0_star + 3;
      case Regime::mid: return m0_cap == m0_star + 2 && m1 == 0 && m2 == 0 && m3 == 0;
      case Regime::sparse: return m4 == 2;
    }
    return false;
  }
};

/// Per-property booleans for the active regime plus the class memberships.
/// Dense uses (a)-(g) and (g*); Mid (a)-(e) and (e*); Sparse (a)-(d). In the
/// Sparse regime the plus and plusplus classes coincide.
struct PropertyReport {
  Regime regime = Regime::dense;
  std::vector<std::pair<std::string, bool>> props;
  bool in_plus = false;
  bool in_plusplus = false;

  bool prop(const std::string& name) const {
    for (const auto& [k, v] : props)
      if (k == name) return v;
    fail(errc::out_of_range, "no property " + name);
  }
};

namespace detail {

struct ClusterFacts {
  std::vector<Cluster> clusters;
  std::vector<VertexMask> spans;
  bool pairwise_edge_le2 = true;
  int max_degree = 0;
};

template <typename EdgeRange>
inline ClusterFacts cluster_facts(int n, const EdgeRange& edges, const std::vector<Cluster>& cl) {
  ClusterFacts f;
  f.clusters = cl;
  for (const auto& c : f.clusters) {
    VertexMask span(n);
    for (int e : c.edge_indices) span.or_with(edges[e].mask);
    f.spans.push_back(std::move(span));
  }
  return f;
}

}  // namespace detail

inline PropertyReport property_report(const Hypergraph& h, Regime reg, const ThresholdSet& th) {
  require(th.consistent_with(reg), errc::regime_mismatch,
          std::string("thresholds inconsistent with regime ") + regime_name(reg));

  const int r = h.r();
  auto cl = clusters(h);
  auto facts = detail::cluster_facts(h.n(), h.edges(), cl);

  bool a = true;
  for (int i = 0; i < h.m() && a; ++i)
    for (int j = i + 1; j < h.m(); ++j)
      if (h.intersection_size(i, j) > 2) {
        a = false;
        break;
      }

  ClusterProfile prof = cluster_profile(h);
  int max_deg = h.max_degree();

  auto cluster_int = [&](std::size_t x, std::size_t y) {
    return facts.spans[x].and_popcount(facts.spans[y]);
  };
  auto triple_span_ok = [&](const std::vector<std::size_t>& idx, int floor_span) {
    for (std::size_t x = 0; x < idx.size(); ++x)
      for (std::size_t y = x + 1; y < idx.size(); ++y)
        for (std::size_t z = y + 1; z < idx.size(); ++z) {
          VertexMask u = facts.spans[idx[x]];
          u.or_with(facts.spans[idx[y]]);
          u.or_with(facts.spans[idx[z]]);
          if (u.popcount() < floor_span) return false;
        }
    return true;
  };

  std::vector<std::size_t> t123, t4;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    if (cl[i].kind == ClusterKind::type4) t4.push_back(i);
    if (cl[i].kind == ClusterKind::type1 || cl[i].kind == ClusterKind::type2 ||
        cl[i].kind == ClusterKind::type3)
      t123.push_back(i);
  }

  PropertyReport rep;
  rep.regime = reg;
  if (reg == Regime::dense) {
    bool b = prof.other == 0;
    bool c = true;
    for (std::size_t x = 0; x < cl.size() && c; ++x)
      for (std::size_t y = x + 1; y < cl.size(); ++y)
        if (cluster_int(x, y) > 1) {
          c = false;
          break;
        }
    bool d = triple_span_ok(t123, 9 * r - 13);
    bool e = triple_span_ok(t4, 6 * r - 8);
    bool fcap = prof.h1 <= th.m1 && prof.h2 <= th.m2 && prof.h3 <= th.m3 && prof.h4 <= th.m4;
    bool g = max_deg <= th.m0_cap;
    bool gstar = max_deg <= th.m0_star;
    rep.props = {{"a", a}, {"b", b}, {"c", c}, {"d", d},
                 {"e", e}, {"f", fcap}, {"g", g}, {"g_star", gstar}};
    rep.in_plus = a && b && c && d && e && fcap && g;
    rep.in_plusplus = a && b && c && d && e && fcap && gstar;
  } else {
    bool b = prof.other == 0 && prof.h1 == 0 && prof.h2 == 0 && prof.h3 == 0;
    bool c = true;
    for (std::size_t x = 0; x < t4.size() && c; ++x)
      for (std::size_t y = x + 1; y < t4.size(); ++y)
        if (facts.spans[t4[x]].and_popcount(facts.spans[t4[y]]) > 0) {
          c = false;
          break;
        }
    bool d = prof.h4 <= th.m4;
    if (reg == Regime::mid) {
      bool e = max_deg <= th.m0_cap;
      bool estar = max_deg <= th.m0_star;
      rep.props = {{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"e", e}, {"e_star", estar}};
      rep.in_plus = a && b && c && d && e;
      rep.in_plusplus = a && b && c && d && estar;
    } else {
      rep.props = {{"a", a}, {"b", b}, {"c", c}, {"d", d}};
      rep.in_plus = a && b && c && d;
      rep.in_plusplus = rep.in_plus;
    }
  }
  return rep;
}

}  // namespace linhyp
