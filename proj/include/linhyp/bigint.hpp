#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "linhyp/errors.hpp"

namespace linhyp {

/// Exact nonnegative counts; all oracle arithmetic stays in this type.
using BigCount = mpz_class;
using BigRat = mpq_class;

inline BigCount big_binomial(unsigned long n, unsigned long k) {
  if (k > n) return BigCount(0);
  BigCount out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline BigCount big_binomial_big(const BigCount& n, unsigned long k) {
  BigCount out;
  mpz_bin_ui(out.get_mpz_t(), n.get_mpz_t(), k);
  return out;
}

/// Falling factorial [x]_t over integers, x may be any integer.
inline BigCount big_falling(long x, unsigned long t) {
  BigCount out(1);
  for (unsigned long i = 0; i < t; ++i) out *= BigCount(x - static_cast<long>(i));
  return out;
}

/// Natural log of a positive big integer without overflowing double.
inline double ln_big(const BigCount& v) {
  if (v <= 0) fail(errc::out_of_range, "ln of non-positive value");
  signed long exp2;
  double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

inline double to_double(const BigRat& q) { return mpq_get_d(q.get_mpq_t()); }

/// C(n,k) in 64 bits, or nullopt on overflow.
inline std::optional<std::uint64_t> binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i);
    acc /= i;
    if (acc > static_cast<unsigned __int128>(UINT64_MAX)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

inline std::string to_string(const BigCount& v) { return v.get_str(); }

inline BigCount big_from_u64(unsigned long long v) {
  BigCount out(static_cast<unsigned long>(v >> 32));
  out <<= 32;
  out += static_cast<unsigned long>(v & 0xffffffffULL);
  return out;
}

}  // namespace linhyp
