#pragma once

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "linhyp/asymptotics.hpp"
#include "linhyp/exact.hpp"
#include "linhyp/montecarlo.hpp"
#include "linhyp/rng.hpp"
#include "linhyp/summation.hpp"
#include "linhyp/switching.hpp"

namespace linhyp {

struct VerifySettings {
  std::uint64_t seed = 20240901;
  double tolerance_multiplier = 5.0;
  double z = 3.0;
  int threads = 1;
  Budget budget;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = true;
  std::vector<CheckResult> checks;

  void add(const std::string& n, bool ok, const std::string& detail = "") {
    checks.push_back({n, ok, detail});
    passed = passed && ok;
  }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  double tolerance_multiplier = 0;
  std::vector<CriterionResult> criteria;
  bool all_passed = true;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

inline std::string fmt_big(const BigCount& v) { return v.get_str(); }

/// Independent oracle: count linear m-subsets by filtering every subset.
inline BigCount filter_count_linear(long n, long r, long m, const Budget& budget) {
  auto table = RSetTable::lex(static_cast<int>(n), static_cast<int>(r), budget.census_cap);
  unsigned long long hits = 0;
  smallgrid::for_each_subset(table, static_cast<int>(m),
                             [&](const std::vector<long>&, const std::vector<std::uint64_t>& vm) {
                               for (std::size_t i = 0; i < vm.size(); ++i)
                                 for (std::size_t j = i + 1; j < vm.size(); ++j)
                                   if (__builtin_popcountll(vm[i] & vm[j]) > 1) return;
                               ++hits;
                             });
  return big_from_u64(hits);
}

/// Independent oracle: conflict-free t-sets by filtering every t-subset.
inline BigCount filter_conflict_free(int n, const std::vector<std::uint64_t>& edges, int t,
                                     std::uint64_t forbidden = 0) {
  std::vector<int> cur(t);
  for (int i = 0; i < t; ++i) cur[i] = i;
  if (t > n) return 0;
  unsigned long long hits = 0;
  while (true) {
    std::uint64_t sm = 0;
    for (int v : cur) sm |= std::uint64_t(1) << v;
    bool ok = forbidden == 0 || sm != forbidden;
    for (std::size_t e = 0; ok && e < edges.size(); ++e)
      if (__builtin_popcountll(edges[e] & sm) >= 2) ok = false;
    if (ok) ++hits;
    int k = t - 1;
    while (k >= 0 && cur[k] == n - (t - k)) --k;
    if (k < 0) break;
    ++cur[k];
    for (int j = k + 1; j < t; ++j) cur[j] = cur[j - 1] + 1;
  }
  return big_from_u64(hits);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult criterion1_oracle(const VerifySettings& s) {
  CriterionResult c{1, "oracle correctness on small grids"};
  BigCount l = count_linear(5, 3, 2, s.budget, s.threads);
  BigCount a = count_all(5, 3, 2);
  c.add("count_linear(5,3,2) == 15", l == 15, detail::fmt_big(l));
  c.add("count_all(5,3,2) == 45", a == 45, detail::fmt_big(a));
  auto th = ThresholdSet::for_regime(Regime::dense, 5, 3, 2);
  auto census = profile_census(5, 3, 2, Regime::dense, th, s.budget);
  ClusterProfile lin, h4;
  h4.h4 = 1;
  c.add("census(5,3,2) linear bucket == 15", census.count_with_profile(lin) == 15,
        detail::fmt_big(census.count_with_profile(lin)));
  c.add("census(5,3,2) h4 bucket == 30", census.count_with_profile(h4) == 30,
        detail::fmt_big(census.count_with_profile(h4)));
  bool dual = true;
  std::string bad;
  for (long n = 3; n <= 7 && dual; ++n)
    for (long m = 0; m <= 3; ++m) {
      if (BigCount(m) > big_binomial(n, 3)) break;
      BigCount dfs = count_linear(n, 3, m, s.budget, s.threads);
      BigCount flt = detail::filter_count_linear(n, 3, m, s.budget);
      if (dfs != flt) {
        dual = false;
        bad = "n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " + detail::fmt_big(dfs) +
              " vs " + detail::fmt_big(flt);
        break;
      }
    }
  c.add("DFS count agrees with subset filter for n<=7, r=3, m<=3", dual, bad);
  return c;
}

inline CriterionResult criterion2_monotone(const VerifySettings& s) {
  CriterionResult c{2, "linearity probability non-increasing in m"};
  const std::pair<long, long> grids[] = {{5, 3}, {6, 3}, {7, 3}, {8, 3}, {9, 4}};
  for (auto [n, r] : grids) {
    BigCount N = big_binomial(n, r);
    bool mono = true;
    std::string bad;
    BigCount prev_l = 1, prev_c = 1;  // m = 0
    long last_m = 0;
    for (long m = 1; BigCount(m) <= N; ++m) {
      BigCount l = count_linear(n, r, m, s.budget, s.threads);
      BigCount cm = count_all(n, r, m);
      // P(m) <= P(m-1)  <=>  l * prev_c <= prev_l * cm
      if (l * prev_c > prev_l * cm) {
        mono = false;
        bad = "m=" + std::to_string(m);
        break;
      }
      prev_l = l;
      prev_c = cm;
      last_m = m;
      if (l == 0) break;  // identically zero (hence monotone) beyond this point
    }
    c.add("non-increasing on (" + std::to_string(n) + "," + std::to_string(r) + ") up to m=" +
              std::to_string(last_m),
          mono, bad);
  }
  return c;
}

inline CriterionResult criterion3_main_mc(const VerifySettings& s) {
  CriterionResult c{3, "main count theorem vs Monte Carlo at (1000,3,150)"};
  auto t = theorem11_log_count(1000, 3, 150, CountForm::binomial);
  double predicted = std::exp(t.exponent);
  auto est = estimate_linearity_fixed(1000, 3, 150, 1000000, s.seed + 3, s.threads);
  double tol = s.z * est.stderr_ + s.tolerance_multiplier * t.scale.value;
  double gap = std::fabs(est.point - predicted);
  c.add("|frequency - exp(E)| within 3 stderr + 5 error-scale", gap <= tol,
        "freq=" + detail::fmt(est.point) + " exp(E)=" + detail::fmt(predicted) +
            " gap=" + detail::fmt(gap) + " tol=" + detail::fmt(tol));
  return c;
}

inline CriterionResult criterion4_trend(const VerifySettings& s) {
  CriterionResult c{4, "main exponent trend for m = 0.15 n"};
  const long ns[] = {200, 500, 1000};
  std::vector<double> ratios;
  for (long n : ns) {
    long m = static_cast<long>(0.15 * n);
    auto t = theorem11_log_count(n, 3, m, CountForm::binomial);
    auto est = estimate_linearity_fixed(static_cast<int>(n), 3, m, 200000,
                                        s.seed + 40 + n, s.threads);
    double ratio = std::fabs(std::log(est.point) - t.exponent) / t.scale.value;
    ratios.push_back(ratio);
    c.add("ratio at n=" + std::to_string(n) + " within multiplier",
          ratio <= s.tolerance_multiplier, "ratio=" + detail::fmt(ratio));
  }
  c.add("ratio does not grow with n", ratios.back() <= ratios.front() + 0.5,
        "first=" + detail::fmt(ratios.front()) + " last=" + detail::fmt(ratios.back()));
  return c;
}

inline CriterionResult criterion5_binomial_model(const VerifySettings& s) {
  CriterionResult c{5, "independent-edge model linearity probability"};
  double N = to_double(BigRat(big_binomial(1000, 3)));
  double p = 150.0 / N;
  auto t = theorem13_log_prob(1000, 3, p);
  double predicted = std::exp(t.ln_prob);
  auto est = estimate_linearity_binomial(1000, 3, p, 1000000, s.seed + 5, s.threads);
  double tol = s.z * est.stderr_ + s.tolerance_multiplier * t.scale.value;
  double gap = std::fabs(est.point - predicted);
  c.add(std::string("case ") + (t.which == ProbCase::large_m0 ? "large_m0" : "small_m0") +
            " frequency within 3 stderr + 5 error-scale",
        gap <= tol, "freq=" + detail::fmt(est.point) + " predicted=" + detail::fmt(predicted) +
                        " gap=" + detail::fmt(gap) + " tol=" + detail::fmt(tol));
  return c;
}

inline CriterionResult criterion6_conditional_moments(const VerifySettings& s) {
  CriterionResult c{6, "conditional edge-count moments"};
  double N = to_double(BigRat(big_binomial(1000, 3)));
  double m0 = 150.0;
  double p = m0 / N;
  auto [mean_pred, var_pred] = corollary14_params(1000, 3, m0);
  auto mom = estimate_conditional_moments(1000, 3, p, 150000, s.seed + 6, s.threads);
  c.add("at least 1e5 accepted samples", mom.accepted >= 100000,
        std::to_string(mom.accepted) + " accepted");
  double mean_gap = std::fabs(mom.mean.point - mean_pred);
  c.add("conditional mean within 3 sigma of " + detail::fmt(mean_pred),
        mean_gap <= 3.0 * mom.mean.stderr_,
        "mean=" + detail::fmt(mom.mean.point) + " gap=" + detail::fmt(mean_gap) + " sigma=" +
            detail::fmt(mom.mean.stderr_));
  double zshift = (m0 - mom.mean.point) / mom.mean.stderr_;
  c.add("downward shift from m0 detected at z > 3", zshift > 3.0, "z=" + detail::fmt(zshift));
  double var_gap = std::fabs(mom.variance.point - var_pred);
  c.add("sample variance within 5 sigma of " + detail::fmt(var_pred),
        var_gap <= 5.0 * mom.variance.stderr_,
        "var=" + detail::fmt(mom.variance.point) + " gap=" + detail::fmt(var_gap) + " sigma=" +
            detail::fmt(mom.variance.stderr_));
  return c;
}

inline CriterionResult criterion7_containment(const VerifySettings& s) {
  CriterionResult c{7, "subhypergraph containment probability at (5,3,2)"};
  auto K = Hypergraph::build(5, 3, {{1, 2, 3}});
  BigCount num = count_linear_containing(5, 3, 2, K, s.budget);
  BigCount den = count_linear(5, 3, 2, s.budget, s.threads);
  bool exact_ok = num == 3 && den == 15;
  c.add("exact containment ratio equals 3/15", exact_ok,
        detail::fmt_big(num) + "/" + detail::fmt_big(den));
  auto t = theorem15_log_prob(5, 3, 2, 1);
  double formula = std::exp(t.ln_prob);
  double exact = 0.2;
  double rel = std::fabs(formula - exact) / exact;
  c.add("formula value within 1% of exact", rel <= 0.01,
        "formula=" + detail::fmt(formula) + " exact=" + detail::fmt(exact) + " rel=" +
            detail::fmt(rel));
  auto est = estimate_containment(5, 3, 2, K, 50000, s.seed + 7, s.threads);
  double gap = std::fabs(est.point - exact);
  c.add("Monte Carlo containment within 4 sigma of 0.2", gap <= 4.0 * est.stderr_ + 1e-12,
        "freq=" + detail::fmt(est.point) + " sigma=" + detail::fmt(est.stderr_));
  return c;
}

inline CriterionResult criterion8_switching_audits(const VerifySettings& s) {
  CriterionResult c{8, "switching double-count audits"};
  struct Job {
    long n, r;
    int kind;
    const char* expect_fwd;  // frozen totals, independently derived
  };
  ClusterProfile P4;
  P4.h4 = 1;
  {
    auto rep = double_count_audit(8, 3, 3, 4, P4, s.budget);
    c.add("(8,3,3) Type-4 totals equal", rep.equal,
          detail::fmt_big(rep.forward_total) + " vs " + detail::fmt_big(rep.reverse_total));
    c.add("(8,3,3) Type-4 totals match frozen 14515200", rep.forward_total == BigCount("14515200"),
          detail::fmt_big(rep.forward_total));
    c.add("(8,3,3) Type-4 ratio sandwich", rep.sandwich_ok,
          detail::fmt(rep.ratio_lo) + " <= " + detail::fmt(rep.ratio_observed) + " <= " +
              detail::fmt(rep.ratio_hi));
  }
  struct K12 {
    int kind;
    const char* frozen;
  };
  const K12 kinds[] = {{2, "56794246740000"}, {3, "4732853895000"}, {4, "372891519000"}};
  for (const auto& k : kinds) {
    ClusterProfile P;
    (k.kind == 2 ? P.h2 : k.kind == 3 ? P.h3 : P.h4) = 1;
    auto rep = double_count_audit(12, 4, 3, k.kind, P, s.budget);
    std::string tag = "(12,4,3) Type-" + std::to_string(k.kind);
    c.add(tag + " totals equal", rep.equal,
          detail::fmt_big(rep.forward_total) + " vs " + detail::fmt_big(rep.reverse_total));
    c.add(tag + " totals match frozen " + k.frozen, rep.forward_total == BigCount(k.frozen),
          detail::fmt_big(rep.forward_total));
    c.add(tag + " ratio sandwich", rep.sandwich_ok,
          detail::fmt(rep.ratio_lo) + " <= " + detail::fmt(rep.ratio_observed) + " <= " +
              detail::fmt(rep.ratio_hi));
  }
  return c;
}

inline CriterionResult criterion9_conflict_free(const VerifySettings& s) {
  CriterionResult c{9, "conflict-free counters vs exhaustive filter"};
  struct Grid {
    long n, r, m;
  };
  const Grid grids[] = {{5, 3, 2}, {8, 3, 3}};
  for (const auto& g : grids) {
    auto table = detail::RSetTable::lex(static_cast<int>(g.n), static_cast<int>(g.r),
                                        s.budget.census_cap);
    bool ok = true;
    std::string bad;
    long tmax = std::min(g.n, 3 * g.r - 4);
    smallgrid::for_each_subset(
        table, static_cast<int>(g.m),
        [&](const std::vector<long>& idx, const std::vector<std::uint64_t>& vm) {
          if (!ok) return;
          std::vector<std::vector<int>> edges;
          for (long i : idx) {
            const int* v = table.verts_of(i);
            edges.emplace_back(v, v + g.r);
          }
          Hypergraph h = Hypergraph::build(static_cast<int>(g.n), static_cast<int>(g.r), edges);
          for (long t = g.r; t <= tmax; ++t) {
            BigCount fast = count_conflict_free_sets(h, static_cast<int>(t));
            BigCount slow = detail::filter_conflict_free(static_cast<int>(g.n), vm,
                                                         static_cast<int>(t));
            if (fast != slow) {
              ok = false;
              bad = "t=" + std::to_string(t) + ": " + detail::fmt_big(fast) + " vs " +
                    detail::fmt_big(slow);
              return;
            }
          }
        });
    c.add("counter equals filter on (" + std::to_string(g.n) + "," + std::to_string(g.r) + "," +
              std::to_string(g.m) + ") grids",
          ok, bad);
  }
  {
    // leading-term accuracy at (100,3,10,3) for a fixed linear hypergraph
    std::vector<std::vector<int>> edges;
    for (int i = 0; i < 10; ++i) edges.push_back({3 * i + 1, 3 * i + 2, 3 * i + 3});
    Hypergraph h = Hypergraph::build(100, 3, edges);
    BigCount exact = count_conflict_free_sets(h, 3);
    auto lead = expected_conflict_free_sets(100, 3, 10, 3);
    double rel = std::fabs(lead.value - to_double(BigRat(exact))) / to_double(BigRat(exact));
    c.add("leading term within 1% of exact at (100,3,10,3)", rel <= 0.01,
          "lead=" + detail::fmt(lead.value) + " exact=" + detail::fmt_big(exact) + " rel=" +
              detail::fmt(rel));
  }
  return c;
}

inline CriterionResult criterion10_bounds(const VerifySettings& s) {
  CriterionResult c{10, "probability and summation bound suites"};
  {
    CounterRng rng(s.seed, 1001);
    long violations = 0;
    for (int i = 0; i < 10000; ++i) {
      long N = 2 + static_cast<long>(rng.below(1000000));
      long m = static_cast<long>(rng.below(static_cast<std::uint64_t>(N) + 1));
      long t = 1 + static_cast<long>(rng.below(std::min<long>(50, std::max<long>(m, 1))));
      // [m]_t / [N]_t <= (m/N)^t  <=>  N^t [m]_t <= m^t [N]_t
      BigCount lhs, rhs;
      mpz_ui_pow_ui(lhs.get_mpz_t(), static_cast<unsigned long>(N), static_cast<unsigned long>(t));
      mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(t));
      if (lhs * big_falling(m, t) > rhs * big_falling(N, t)) ++violations;
    }
    c.add("edge-set probability bound holds on 10^4 random (N,m,t)", violations == 0,
          std::to_string(violations) + " violations");
  }
  {
    long violations = 0;
    for (long N = 1; N <= 30; ++N)
      for (int pk = 1; pk <= 9; ++pk) {
        BigRat p(pk, 10), q(10 - pk, 10);
        double Np = to_double(p) * N;
        for (double t = 0.5; t <= Np; t += 0.5) {
          BigRat tail(0);
          for (long j = 0; j <= N; ++j) {
            if (std::fabs(static_cast<double>(j) - Np) <= t) continue;
            BigRat term(big_binomial(N, j));
            for (long q1 = 0; q1 < j; ++q1) term *= p;
            for (long q2 = 0; q2 < N - j; ++q2) term *= q;
            tail += term;
          }
          double bound = binomial_tools(N, to_double(p), t, BinomialTool::chernoff);
          if (to_double(tail) > bound) ++violations;
        }
      }
    c.add("Chernoff bound dominates exact two-sided tails for N <= 30", violations == 0,
          std::to_string(violations) + " violations");
  }
  {
    CounterRng rng(s.seed, 1002);
    long bad_plain = 0, bad_pert = 0;
    for (int i = 0; i < 1000; ++i) {
      SummationSpec spec;
      spec.N = 2 + static_cast<long>(rng.below(39));
      double chat = 0.05 + 0.25 * rng.uniform01();
      spec.c_hat = chat;
      for (long j = 1; j <= spec.N; ++j) {
        double a = chat * spec.N * rng.uniform01();
        double bcap = std::min(j > 1 ? 1.0 / (j - 1) : 1.0, a > 0 ? chat / a : 1.0);
        double b = bcap * (2.0 * rng.uniform01() - 1.0);
        if (b * a > chat) b = chat / a;
        if (j > 1 && 1.0 - (j - 1) * b < 0) b = 1.0 / (j - 1);
        spec.A.push_back(a);
        spec.B.push_back(b);
      }
      auto r = summation_bounds(spec, SummationLemma::plain);
      if (!r.ok) ++bad_plain;

      SummationSpec sp2;
      sp2.N = 2 + static_cast<long>(rng.below(39));
      sp2.c = 6.0 + 94.0 * rng.uniform01();
      double g0 = 0.09 * rng.uniform01();
      double g1 = 0.09 * rng.uniform01() / sp2.N;
      sp2.gamma = {g0, g1};
      double amax = 0.9 * (sp2.N - 1 + 1) / sp2.c;
      for (long j = 1; j <= sp2.N; ++j) {
        sp2.A.push_back(amax * rng.uniform01());
        double bcap = 0.9 / sp2.N;
        double b = bcap * (2.0 * rng.uniform01() - 1.0);
        sp2.B.push_back(b);
        sp2.delta.push_back((g0 / sp2.N) * (2.0 * rng.uniform01() - 1.0));
      }
      auto r2 = summation_bounds(sp2, SummationLemma::perturbed);
      if (!r2.ok) ++bad_pert;
    }
    c.add("plain summation envelopes hold on 10^3 random specs", bad_plain == 0,
          std::to_string(bad_plain) + " violations");
    c.add("perturbed summation envelopes hold on 10^3 random specs", bad_pert == 0,
          std::to_string(bad_pert) + " violations");
  }
  return c;
}

inline CriterionResult criterion11_class_mass(const VerifySettings& s) {
  CriterionResult c{11, "almost-all class membership at (500,3,100)"};
  auto dist = estimate_profile_distribution(500, 3, 100, 100000, s.seed + 11, Regime::dense,
                                            s.threads);
  double missing = 1.0 - dist.plusplus_fraction.point;
  double scale = detail::error_scale_main(500, 3, 100);
  double tol = s.tolerance_multiplier * scale + s.z * dist.plusplus_fraction.stderr_;
  c.add("1 - plusplus fraction within 5 error-scale + 3 stderr", missing <= tol,
        "missing=" + detail::fmt(missing) + " tol=" + detail::fmt(tol) + " scale=" +
            detail::fmt(scale));
  return c;
}

inline VerifyReport run_core_criteria(const VerifySettings& s) {
  VerifyReport rep;
  rep.seed = s.seed;
  rep.tolerance_multiplier = s.tolerance_multiplier;
  rep.criteria.push_back(criterion1_oracle(s));
  rep.criteria.push_back(criterion2_monotone(s));
  rep.criteria.push_back(criterion3_main_mc(s));
  rep.criteria.push_back(criterion4_trend(s));
  rep.criteria.push_back(criterion5_binomial_model(s));
  rep.criteria.push_back(criterion6_conditional_moments(s));
  rep.criteria.push_back(criterion7_containment(s));
  rep.criteria.push_back(criterion8_switching_audits(s));
  rep.criteria.push_back(criterion9_conflict_free(s));
  rep.criteria.push_back(criterion10_bounds(s));
  rep.criteria.push_back(criterion11_class_mass(s));
  for (const auto& c : rep.criteria) rep.all_passed = rep.all_passed && c.passed;
  return rep;
}

/// Canonical serialization of a report for determinism comparisons; excludes
/// anything run-dependent besides the criteria outcomes themselves.
inline std::string canonical_string(const VerifyReport& rep) {
  std::string out;
  out += "seed=" + std::to_string(rep.seed) + ";mult=" + detail::fmt(rep.tolerance_multiplier) +
         "\n";
  for (const auto& c : rep.criteria) {
    out += std::to_string(c.id) + ":" + c.name + ":" + (c.passed ? "pass" : "fail") + "\n";
    for (const auto& k : c.checks)
      out += "  " + k.name + ":" + (k.passed ? "pass" : "fail") + ":" + k.detail + "\n";
  }
  return out;
}

/// Criteria 1-11 plus the determinism criterion (12), which re-runs the
/// battery at a different worker count and compares canonical reports.
inline VerifyReport run_acceptance(const VerifySettings& s) {
  VerifyReport rep = run_core_criteria(s);
  CriterionResult c12{12, "determinism across worker counts"};
  VerifySettings alt = s;
  alt.threads = s.threads == 1 ? 2 : 1;
  VerifyReport other = run_core_criteria(alt);
  bool same = canonical_string(rep) == canonical_string(other);
  c12.add("reports byte-identical for threads=" + std::to_string(s.threads) + " and " +
              std::to_string(alt.threads),
          same);
  rep.criteria.push_back(c12);
  rep.all_passed = rep.all_passed && c12.passed;
  return rep;
}

}  // namespace linhyp
