#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "linhyp/bigint.hpp"
#include "linhyp/errors.hpp"

namespace linhyp {

/// Sign + natural-log magnitude. Products, quotients and integer powers are
/// exact in log space; sums go through a stable log-sum-exp.
struct LogNumber {
  int sign = 0;  // -1, 0, +1
  double ln_mag = -std::numeric_limits<double>::infinity();

  static LogNumber zero() { return {}; }
  static LogNumber one() { return {+1, 0.0}; }

  static LogNumber from_ln(double ln_value, int sign = +1) {
    if (sign == 0) return zero();
    return {sign, ln_value};
  }

  static LogNumber from_value(double v) {
    if (v == 0.0) return zero();
    return {v > 0 ? +1 : -1, std::log(std::fabs(v))};
  }

  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(ln_mag); }
  bool is_zero() const { return sign == 0; }

  LogNumber operator*(const LogNumber& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return {sign * o.sign, ln_mag + o.ln_mag};
  }

  LogNumber operator/(const LogNumber& o) const {
    if (o.sign == 0) fail(errc::out_of_range, "division by zero LogNumber");
    if (sign == 0) return zero();
    return {sign * o.sign, ln_mag - o.ln_mag};
  }

  LogNumber pow_int(long k) const {
    if (sign == 0) return k == 0 ? one() : zero();
    int s = (sign < 0 && (k % 2 != 0)) ? -1 : +1;
    return {s, ln_mag * static_cast<double>(k)};
  }

  LogNumber operator+(const LogNumber& o) const {
    if (sign == 0) return o;
    if (o.sign == 0) return *this;
    const LogNumber& hi = ln_mag >= o.ln_mag ? *this : o;
    const LogNumber& lo = ln_mag >= o.ln_mag ? o : *this;
    double d = lo.ln_mag - hi.ln_mag;  // <= 0
    if (hi.sign == lo.sign) return {hi.sign, hi.ln_mag + std::log1p(std::exp(d))};
    double t = -std::expm1(d);  // 1 - exp(d) in [0,1]
    if (t == 0.0) return zero();
    return {hi.sign, hi.ln_mag + std::log(t)};
  }

  LogNumber operator-() const { return {-sign, ln_mag}; }
  LogNumber operator-(const LogNumber& o) const { return *this + (-o); }
};

inline LogNumber log_from_big(const BigCount& v) {
  int s = sgn(v);
  if (s == 0) return LogNumber::zero();
  BigCount a = abs(v);
  return LogNumber::from_ln(ln_big(a), s);
}

/// [x]_t = x(x-1)...(x-t+1) in log space; sign tracked when x < t-1.
inline LogNumber log_falling_factorial(double x, long t) {
  require(t >= 0, errc::negative_t, "falling factorial needs t >= 0");
  LogNumber acc = LogNumber::one();
  for (long i = 0; i < t; ++i) acc = acc * LogNumber::from_value(x - static_cast<double>(i));
  return acc;
}

// Exact integer binomials below this bound, lgamma above.
inline constexpr long kExactBinomialArgCap = 1000000;

inline LogNumber log_binomial(long a, long b) {
  require(b >= 0 && b <= a, errc::out_of_range, "log_binomial needs 0 <= b <= a");
  if (b == 0 || b == a) return LogNumber::one();
  if (a <= kExactBinomialArgCap) return log_from_big(big_binomial(a, b));
  double ln = std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  return LogNumber::from_ln(ln);
}

inline double ln_factorial(long n) {
  require(n >= 0, errc::out_of_range, "factorial of negative");
  if (n <= kExactBinomialArgCap / 100) {
    BigCount f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return ln_big(f);
  }
  return std::lgamma(n + 1.0);
}

/// Neumaier compensated accumulator for sum-heavy expressions.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace linhyp
