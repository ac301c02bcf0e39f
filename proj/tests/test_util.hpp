#pragma once

#include <functional>
#include <vector>

#include "linhyp/hypergraph.hpp"
#include "linhyp/montecarlo.hpp"
#include "linhyp/rng.hpp"

namespace linhyp {

inline Hypergraph sample_random(int n, int r, long m, CounterRng& rng) {
  return sample_fixed(n, r, m, rng.next(), 0);
}

namespace testutil {

/// Independent subset-filter oracle for conflict-free t-set counts.
inline long filter_conflict_free(const Hypergraph& h, int t,
                                 const std::vector<int>* forbidden_1based = nullptr) {
  long hits = 0;
  std::vector<int> cur(t);
  std::function<void(int, int)> gen = [&](int from, int left) {
    if (left == 0) {
      VertexMask m(h.n());
      for (int v : cur) m.set(v - 1);
      if (forbidden_1based) {
        VertexMask f(h.n());
        for (int v : *forbidden_1based) f.set(v - 1);
        if (f == m) return;
      }
      for (const auto& e : h.edges())
        if (e.mask.and_popcount(m) >= 2) return;
      ++hits;
    } else {
      for (int v = from; v <= h.n() - left + 1; ++v) {
        cur[t - left] = v;
        gen(v + 1, left - 1);
      }
    }
  };
  gen(1, t);
  return hits;
}

/// Independent oracle for sets with exactly one inside-edge pair.
inline long filter_one_conflict(const Hypergraph& h, int t) {
  long hits = 0;
  std::vector<int> cur(t);
  std::function<void(int, int)> gen = [&](int from, int left) {
    if (left == 0) {
      int pairs = 0;
      for (int x = 0; x < t; ++x)
        for (int y = x + 1; y < t; ++y) {
          for (const auto& e : h.edges())
            if (e.mask.test(cur[x] - 1) && e.mask.test(cur[y] - 1)) {
              ++pairs;
              break;
            }
        }
      if (pairs == 1) ++hits;
    } else {
      for (int v = from; v <= h.n() - left + 1; ++v) {
        cur[t - left] = v;
        gen(v + 1, left - 1);
      }
    }
  };
  gen(1, t);
  return hits;
}

}  // namespace testutil
}  // namespace linhyp
