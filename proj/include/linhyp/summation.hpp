#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "linhyp/errors.hpp"
#include "linhyp/lognumber.hpp"

namespace linhyp {

/// Input for the summation-bound checkers. Sequences are 1-indexed in the
/// statements; A[i-1] holds A(i). delta/gamma/c belong to the perturbed
/// variant, c_hat to the plain one.
struct SummationSpec {
  long N = 0;
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> delta;
  std::vector<double> gamma;  // gamma_0..gamma_K
  double c = 0;
  double c_hat = 0;
};

enum class SummationLemma { perturbed, plain };

struct SummationBounds {
  double sum = 0;
  double sigma1 = 0;
  double sigma2 = 0;
  bool ok = false;
};

namespace detail {

inline double falling_int(double x, long t) {
  double acc = 1;
  for (long i = 0; i < t; ++i) acc *= (x - i);
  return acc;
}

[[noreturn]] inline void precondition(const std::string& clause) {
  fail(errc::precondition_failed, clause);
}

}  // namespace detail

/// Computes n_i by the ratio recurrence with zero propagation, the total, and
/// the variant's lower/upper envelopes. Hypotheses are checked up front and a
/// violation names the failed clause.
inline SummationBounds summation_bounds(const SummationSpec& spec, SummationLemma lemma) {
  const long N = spec.N;
  if (N < 2) detail::precondition("N >= 2");
  if (static_cast<long>(spec.A.size()) != N || static_cast<long>(spec.B.size()) != N)
    detail::precondition("A and B must have N entries");
  double A1 = spec.A[0], A2 = spec.A[0];
  for (double a : spec.A) {
    if (a < 0) detail::precondition("A(i) >= 0");
    A1 = std::min(A1, a);
    A2 = std::max(A2, a);
  }
  for (long i = 1; i <= N; ++i)
    if (1.0 - (i - 1) * spec.B[i - 1] < 0) detail::precondition("1 - (i-1)B(i) >= 0");

  double gamma_term_hi = 0;
  long K = 0;
  if (lemma == SummationLemma::perturbed) {
    if (static_cast<long>(spec.delta.size()) != N) detail::precondition("delta must have N entries");
    if (spec.gamma.empty()) detail::precondition("gamma_0..gamma_K required");
    K = static_cast<long>(spec.gamma.size()) - 1;
    if (K < 0 || K > N) detail::precondition("0 <= K <= N");
    double abs_delta_prefix = 0;
    for (long i = 1; i <= N; ++i) {
      abs_delta_prefix += std::fabs(spec.delta[i - 1]);
      double g = 0;
      for (long j = 0; j <= K; ++j) g += spec.gamma[j] * detail::falling_int(i, j);
      if (!(abs_delta_prefix <= g))
        detail::precondition("sum |delta_j| <= sum gamma_j [i]_j");
      if (!(g < 0.2)) detail::precondition("sum gamma_j [i]_j < 1/5");
      gamma_term_hi = std::max(gamma_term_hi, g);
    }
    if (!(spec.c > 2.0 * std::exp(1.0))) detail::precondition("c > 2e");
    if (!(A2 * spec.c < static_cast<double>(N - K + 1))) detail::precondition("A c < N - K + 1");
    double Bmax = 0;
    for (double b : spec.B) Bmax = std::max(Bmax, std::fabs(b));
    if (!(Bmax * N < 1.0)) detail::precondition("|B N| < 1");
  } else {
    if (!(spec.c_hat > 0 && spec.c_hat < 1.0 / 3.0)) detail::precondition("0 < c_hat < 1/3");
    double Cmax = 0;
    for (long i = 0; i < N; ++i) Cmax = std::max(Cmax, std::fabs(spec.A[i] * spec.B[i]));
    if (!(A2 / N <= spec.c_hat && Cmax <= spec.c_hat))
      detail::precondition("max{A/N, |C|} <= c_hat");
  }

  SummationBounds out;
  KahanSum acc;
  acc.add(1.0);  // n_0
  double ni = 1.0;
  for (long i = 1; i <= N; ++i) {
    double a = spec.A[i - 1];
    double shrink = 1.0 - (i - 1) * spec.B[i - 1];
    if (a == 0.0 || shrink == 0.0) break;  // n_j = 0 from here on
    double ratio = a / static_cast<double>(i) * shrink;
    if (lemma == SummationLemma::perturbed) ratio *= (1.0 + spec.delta[i - 1]);
    ni *= ratio;
    acc.add(ni);
  }
  out.sum = acc.value();

  if (lemma == SummationLemma::perturbed) {
    double B1 = spec.B[0], B2 = spec.B[0];
    for (double b : spec.B) {
      B1 = std::min(B1, b);
      B2 = std::max(B2, b);
    }
    double g1 = 0, g2 = 0;
    for (long j = 0; j <= K; ++j) {
      g1 += spec.gamma[j] * std::pow(3.0 * A1, static_cast<double>(j));
      g2 += spec.gamma[j] * std::pow(3.0 * A2, static_cast<double>(j));
    }
    double tail = 0.25 * std::pow(2.0 * std::exp(1.0) / spec.c, static_cast<double>(N));
    out.sigma1 = std::exp(A1 - 0.5 * A1 * A1 * B2 - 4.0 * g1) - tail;
    out.sigma2 = std::exp(A2 - 0.5 * A2 * A2 * B1 + 0.5 * A2 * A2 * A2 * B1 * B1 + 4.0 * g2) + tail;
  } else {
    double C1 = spec.A[0] * spec.B[0], C2 = C1;
    for (long i = 0; i < N; ++i) {
      double c = spec.A[i] * spec.B[i];
      C1 = std::min(C1, c);
      C2 = std::max(C2, c);
    }
    double tail = std::pow(2.0 * std::exp(1.0) * spec.c_hat, static_cast<double>(N));
    out.sigma1 = std::exp(A1 - 0.5 * A1 * C2) - tail;
    out.sigma2 = std::exp(A2 - 0.5 * A2 * C1 + 0.5 * A2 * C1 * C1) + tail;
  }
  out.ok = out.sigma1 <= out.sum && out.sum <= out.sigma2;
  return out;
}

}  // namespace linhyp
