#pragma once

#include <cstdint>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/errors.hpp"

namespace linhyp {

/// Counter-based generator: stream (seed, index) is an independent splitmix64
/// sequence, so trial outcomes are fixed by (seed, trial index) alone and
/// never depend on worker scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Unbiased uniform draw in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_ = 0;
};

/// Colexicographic ranking of r-subsets of {0..n-1}: rank = sum C(a_i, i)
/// over the sorted elements. Binomials are saturating so comparisons stay
/// exact whenever C(n,r) itself fits in 63 bits.
class ColexUnranker {
 public:
  ColexUnranker(int n, int r) : n_(n), r_(r), table_(static_cast<std::size_t>(n + 1) * (r + 1), 0) {
    for (int v = 0; v <= n; ++v)
      for (int k = 0; k <= r; ++k) {
        if (k == 0) {
          at(v, k) = 1;
        } else if (v == 0) {
          at(v, k) = 0;
        } else {
          std::uint64_t a = at(v - 1, k - 1), b = at(v - 1, k);
          at(v, k) = (a > kSat - b) ? kSat : a + b;
        }
      }
    require(at(n, r) < kSat, errc::out_of_range, "C(n,r) too large for 64-bit ranks");
    count_ = at(n, r);
  }

  std::uint64_t count() const { return count_; }

  /// Writes the 0-based sorted vertex set of `rank` into out[0..r-1].
  void unrank(std::uint64_t rank, int* out) const {
    int v = n_ - 1;
    for (int k = r_; k >= 1; --k) {
      while (at(v, k) > rank) --v;
      out[k - 1] = v;
      rank -= at(v, k);
      --v;
    }
  }

  std::uint64_t rank(const int* verts) const {
    std::uint64_t acc = 0;
    for (int k = 1; k <= r_; ++k) acc += at(verts[k - 1], k);
    return acc;
  }

 private:
  static constexpr std::uint64_t kSat = std::uint64_t(1) << 62;

  std::uint64_t& at(int v, int k) { return table_[static_cast<std::size_t>(v) * (r_ + 1) + k]; }
  const std::uint64_t& at(int v, int k) const {
    return table_[static_cast<std::size_t>(v) * (r_ + 1) + k];
  }

  int n_;
  int r_;
  std::vector<std::uint64_t> table_;
  std::uint64_t count_ = 0;
};

namespace detail {

/// Open-addressing set of 64-bit keys with epoch-based O(1) reset.
class ScratchSet {
 public:
  explicit ScratchSet(std::size_t capacity_pow2) : mask_(capacity_pow2 - 1), keys_(capacity_pow2), epochs_(capacity_pow2, 0) {}

  void reset() { ++epoch_; }

  bool insert(std::uint64_t key) {  // returns false if already present
    std::size_t i = static_cast<std::size_t>(key * 0x9E3779B97F4A7C15ULL) & mask_;
    for (;;) {
      if (epochs_[i] != epoch_) {
        epochs_[i] = epoch_;
        keys_[i] = key;
        return true;
      }
      if (keys_[i] == key) return false;
      i = (i + 1) & mask_;
    }
  }

  bool contains(std::uint64_t key) const {
    std::size_t i = static_cast<std::size_t>(key * 0x9E3779B97F4A7C15ULL) & mask_;
    for (;;) {
      if (epochs_[i] != epoch_) return false;
      if (keys_[i] == key) return true;
      i = (i + 1) & mask_;
    }
  }

 private:
  std::size_t mask_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> epochs_;
  std::uint32_t epoch_ = 1;
};

/// Floyd's distinct sampling of m ranks in [0, N).
inline void sample_distinct_ranks(std::uint64_t N, long m, CounterRng& rng, ScratchSet& seen,
                                  std::vector<std::uint64_t>& out) {
  out.clear();
  seen.reset();
  for (std::uint64_t j = N - static_cast<std::uint64_t>(m); j < N; ++j) {
    std::uint64_t t = rng.below(j + 1);
    if (!seen.insert(t)) {
      seen.insert(j);
      out.push_back(j);
    } else {
      out.push_back(t);
    }
  }
}

}  // namespace detail

}  // namespace linhyp
