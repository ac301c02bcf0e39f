#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/lognumber.hpp"
#include "linhyp/properties.hpp"

namespace linhyp {

/// Numeric magnitude of an O(.) argument with implied constant 1, with a
/// labeled breakdown. Acceptance comparisons multiply this by a configurable
/// tolerance factor; the implied constants are unknown.
struct ErrorScale {
  double value = 0;
  std::vector<std::pair<std::string, double>> terms;

  static ErrorScale of(std::initializer_list<std::pair<std::string, double>> parts) {
    ErrorScale s;
    for (const auto& p : parts) {
      s.terms.push_back(p);
      s.value += p.second;
    }
    return s;
  }
};

enum class CountForm { binomial, poisson };

struct MainCountResult {
  LogNumber value;     // ln-space count estimate
  double exponent;     // the linearity-probability exponent alone
  ErrorScale scale;    // r^6 m^2 / n^3
};

namespace detail {

inline double r2sq_over(long r) { return static_cast<double>(r) * (r - 1); }

inline double main_exponent(long n, long r, long m) {
  // -[r]_2^2 [m]_2 / (4 n^2) - [r]_2^3 (3r^2-15r+20) m^3 / (24 n^4), exactly
  // in rationals before the final rounding.
  BigCount r2 = big_falling(r, 2);
  BigRat t1(r2 * r2 * big_falling(m, 2), BigCount(4) * n * n);
  BigCount n2 = BigCount(n) * n;
  BigRat t2(r2 * r2 * r2 * BigCount(3 * r * r - 15 * r + 20) * BigCount(m) * m * m,
            BigCount(24) * n2 * n2);
  return -to_double(t1) - to_double(t2);
}

inline double error_scale_main(long n, long r, double m) {
  double rr = static_cast<double>(r);
  return std::pow(rr, 6) * m * m / (static_cast<double>(n) * n * n);
}

}  // namespace detail

/// ln of the main enumeration estimate: ln C(N,m) + E or ln(N^m/m!) + E with
/// E the linearity exponent; the two forms share E exactly.
inline MainCountResult theorem11_log_count(long n, long r, long m, CountForm form) {
  require(r >= 2 && r <= n, errc::out_of_range, "need 2 <= r <= n");
  BigCount N = big_binomial(n, r);
  require(m >= 0 && BigCount(m) <= N, errc::out_of_range, "need 0 <= m <= C(n,r)");
  MainCountResult out;
  out.exponent = detail::main_exponent(n, r, m);
  double lnN = ln_big(N);
  double base = form == CountForm::binomial
                    ? ln_big(big_binomial_big(N, static_cast<unsigned long>(m)))
                    : (m * lnN - ln_factorial(m));
  out.value = LogNumber::from_ln(base + out.exponent);
  out.scale = ErrorScale::of({{"r^6 m^2 / n^3", detail::error_scale_main(n, r, m)}});
  return out;
}

enum class ProbCase { small_m0, large_m0 };

struct LinearityProbResult {
  double ln_prob = 0;
  ProbCase which = ProbCase::small_m0;
  ErrorScale scale;
  double small_value = 0;  // case small_m0 exponent
  double large_value = 0;  // case large_m0 exponent
};

/// ln P[H_r(n,p) linear] with m0 = p C(n,r). Case split: large when
/// m0 >= r^-2 n, small otherwise; both exponents are retrievable.
inline LinearityProbResult theorem13_from_m0(long n, long r, double m0) {
  require(r >= 3, errc::out_of_range, "need r >= 3");
  require(m0 >= 0, errc::out_of_range, "need m0 >= 0");
  LinearityProbResult out;
  double r2 = detail::r2sq_over(r);
  double n2 = static_cast<double>(n) * n;
  double n4 = n2 * n2;
  out.small_value = -r2 * r2 * m0 * m0 / (4 * n2);
  out.large_value = out.small_value + r2 * r2 * r2 * (3.0 * r - 5.0) * m0 * m0 * m0 / (6 * n4);
  double es_main = detail::error_scale_main(n, r, m0);
  bool large = m0 * r * r >= static_cast<double>(n);
  out.which = large ? ProbCase::large_m0 : ProbCase::small_m0;
  if (large) {
    double lg = log_r2n(n, r);
    double t_log = m0 > 0 ? lg * lg * lg / std::sqrt(m0) : 0.0;
    out.scale = ErrorScale::of({{"log^3(r^-2 n)/sqrt(m0)", t_log}, {"r^6 m0^2 / n^3", es_main}});
    out.ln_prob = out.large_value;
  } else {
    out.scale = ErrorScale::of({{"r^6 m0^2 / n^3", es_main}});
    out.ln_prob = out.small_value;
  }
  return out;
}

inline LinearityProbResult theorem13_log_prob(long n, long r, double p) {
  require(p >= 0.0 && p <= 1.0, errc::out_of_range, "need 0 <= p <= 1");
  double m0 = p * to_double(BigRat(big_binomial(n, r)));
  return theorem13_from_m0(n, r, m0);
}

/// Mean and variance of the edge count conditioned on linearity.
inline std::pair<double, double> corollary14_params(long n, long r, double m0) {
  require(m0 >= 0, errc::out_of_range, "need m0 >= 0");
  double r2 = detail::r2sq_over(r);
  double mean = m0 - r2 * r2 * m0 * m0 / (2.0 * static_cast<double>(n) * n);
  return {mean, m0};
}

struct ContainmentProbResult {
  double ln_prob = 0;
  ErrorScale scale;
};

/// ln P[K subseteq H] for uniform H in L_r(n,m), |K| = k.
inline ContainmentProbResult theorem15_log_prob(long n, long r, long m, long k) {
  require(k >= 0 && k <= m, errc::out_of_range, "need 0 <= k <= m");
  ContainmentProbResult out;
  BigCount N = big_binomial(n, r);
  LogNumber ratio = log_from_big(big_falling(m, k)) / log_from_big(N).pow_int(k);
  double r2 = detail::r2sq_over(r);
  double n2 = static_cast<double>(n) * n;
  out.ln_prob = ratio.ln_mag + r2 * r2 * k * k / (4 * n2);
  double rr = static_cast<double>(r);
  double t1 = std::pow(rr, 4) * k / n2;
  double t2 = std::min(std::pow(rr, 6) * m * static_cast<double>(m) * k / (n2 * n),
                       std::pow(rr, 5) * m * static_cast<double>(k) / n2);
  out.scale = ErrorScale::of({{"r^4 k / n^2", t1}, {"min(r^6 m^2 k / n^3, r^5 m k / n^2)", t2}});
  return out;
}

struct LeadingCountResult {
  double value = 0;
  bool in_paper_range = true;  // r <= t <= 3r-4
};

/// Leading bracket of the conflict-free set count: C(n,t) - C(r,2) m C(n-2,t-2).
inline LeadingCountResult expected_conflict_free_sets(long n, long r, long m, long t) {
  require(t >= 2 && t <= n, errc::out_of_range, "need 2 <= t <= n");
  BigCount v = big_binomial(n, t) - big_binomial(r, 2) * m * big_binomial(n - 2, t - 2);
  LeadingCountResult out;
  out.value = to_double(BigRat(v));
  out.in_paper_range = t >= r && t <= 3 * r - 4;
  return out;
}

struct RefinedExponent {
  double ln_inv_prob = 0;  // ln(1/P) estimate
  Regime regime = Regime::dense;
  std::vector<std::pair<std::string, double>> terms;
};

/// The full bracketed exponent of the refined per-regime expansion, with exact
/// rational binomial arithmetic and one final rounding. This is the
/// pre-simplification, finite-n-sharper form of the exponent.
inline RefinedExponent refined_inverse_prob(long n, long r, long m, Regime reg) {
  require(r >= 3 && r <= n, errc::out_of_range, "need 3 <= r <= n");
  require(m >= 0, errc::out_of_range, "need m >= 0");
  RefinedExponent out;
  out.regime = reg;
  BigCount N = big_binomial(n, r);
  BigCount D = N - big_binomial(r, 2) * m * big_binomial(n - 2, r - 2);
  require(D != 0, errc::out_of_range, "denominator N - C(r,2) m C(n-2,r-2) vanishes");
  BigRat D2(D * D);

  if (reg == Regime::dense) {
    BigRat rho(BigCount(r) * r - r - 1, BigCount(r - 1) * (2 * r - 3));
    BigRat X4 = BigRat(big_binomial(n, 2 * r - 2)) -
                rho * BigRat(big_binomial(r, 2) * m * big_binomial(n - 2, 2 * r - 4));
    BigCount c4 = big_binomial(2 * r - 2, 2) * big_binomial(2 * r - 4, r - 2);
    BigCount m2 = BigCount(m) * m;
    BigRat term1 = BigRat(c4 * m2) * X4 / (BigRat(2) * D2);
    BigRat term2 = BigRat(c4 * c4 * m2 * m) * X4 * X4 / (BigRat(2) * D2 * D2);
    BigCount X123 = big_binomial(n, 3 * r - 4) -
                    big_binomial(r, 2) * m * big_binomial(n - 2, 3 * r - 6);
    BigRat bracket = BigRat(BigCount(6) * big_binomial(r, 4) + BigCount(3) * big_binomial(r, 3)) +
                     BigRat(big_binomial(r, 2), BigCount(6));
    BigRat term3 = bracket * BigRat(big_binomial(3 * r - 4, r) * big_binomial(2 * r - 4, r - 2) *
                                    m2 * m * X123) /
                   (D2 * BigRat(D));
    out.terms = {{"pair-cluster sum", to_double(term1)},
                 {"pair-cluster correction", -to_double(term2)},
                 {"triple-cluster sum", to_double(term3)}};
    out.ln_inv_prob = to_double(term1 - term2 + term3);
  } else {
    // mid and sparse share the single displayed term
    BigCount X = big_binomial(n, 2 * r - 2) -
                 big_binomial(r, 2) * m * big_binomial(n - 2, 2 * r - 4);
    BigRat term = BigRat(big_falling(m, 2) * big_binomial(2 * r - 2, 2) *
                         big_binomial(2 * r - 4, r - 2) * X) /
                  (BigRat(2) * D2);
    out.terms = {{"pair-cluster sum", to_double(term)}};
    out.ln_inv_prob = to_double(term);
  }
  return out;
}

enum class BinomialTool { chernoff, point_approx, point_exact };

/// Tail and point tools for Bin(N,p): chernoff -> 2 exp(-t^2/(3Np)) bound,
/// point_approx -> pmf leading term at offset t, point_exact -> exact log-pmf
/// at floor(Np)+t.
inline double binomial_tools(long N, double p, double t, BinomialTool which) {
  require(N >= 1 && p >= 0.0 && p <= 1.0, errc::out_of_range, "need N >= 1, p in [0,1]");
  double Np = N * p;
  switch (which) {
    case BinomialTool::chernoff:
      require(t > 0 && t <= Np, errc::out_of_range, "chernoff needs 0 < t <= Np");
      return 2.0 * std::exp(-t * t / (3.0 * Np));
    case BinomialTool::point_approx:
      require(Np > 0, errc::out_of_range, "point_approx needs Np > 0");
      return std::exp(-t * t / (2.0 * Np)) / std::sqrt(2.0 * M_PI * Np);
    case BinomialTool::point_exact: {
      long k = static_cast<long>(std::floor(Np)) + static_cast<long>(t);
      require(k >= 0 && k <= N, errc::out_of_range, "pmf point outside support");
      require(p > 0.0 && p < 1.0, errc::out_of_range, "exact pmf needs 0 < p < 1");
      return log_binomial(N, k).ln_mag + k * std::log(p) + (N - k) * std::log1p(-p);
    }
  }
  fail(errc::out_of_range, "bad tool");
}

}  // namespace linhyp
