#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/hypergraph.hpp"

namespace linhyp {

namespace detail {

/// Backtracking counter over vertices with per-edge occupancy counters.
/// Counts t-subsets of the allowed vertices with no two vertices in a common
/// edge; optionally enumerates them.
class ConflictFreeSearch {
 public:
  ConflictFreeSearch(int n, const std::vector<VertexMask>& edge_masks,
                     const VertexMask* excluded = nullptr)
      : n_(n), incident_(n) {
    for (std::size_t e = 0; e < edge_masks.size(); ++e)
      for (int v = 0; v < n; ++v)
        if (edge_masks[e].test(v)) incident_[v].push_back(static_cast<int>(e));
    occupancy_.assign(edge_masks.size(), 0);
    excluded_ = excluded;
  }

  /// Exact count; no enumeration callback.
  unsigned long long count(int t) {
    chosen_.clear();
    yield_ = nullptr;
    total_ = 0;
    dfs(0, t);
    return total_;
  }

  /// Calls fn(sorted 0-based vertex vector) for every conflict-free t-set.
  void enumerate(int t, const std::function<void(const std::vector<int>&)>& fn) {
    chosen_.clear();
    yield_ = &fn;
    total_ = 0;
    dfs(0, t);
  }

 private:
  void dfs(int from, int need) {
    if (need == 0) {
      ++total_;
      if (yield_) (*yield_)(chosen_);
      return;
    }
    for (int v = from; v + need <= n_; ++v) {
      if (excluded_ && excluded_->test(v)) continue;
      bool ok = true;
      for (int e : incident_[v])
        if (occupancy_[e]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (int e : incident_[v]) ++occupancy_[e];
      chosen_.push_back(v);
      dfs(v + 1, need - 1);
      chosen_.pop_back();
      for (int e : incident_[v]) --occupancy_[e];
    }
  }

  int n_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::uint8_t> occupancy_;
  std::vector<int> chosen_;
  const VertexMask* excluded_ = nullptr;
  const std::function<void(const std::vector<int>&)>* yield_ = nullptr;
  unsigned long long total_ = 0;
};

inline std::vector<VertexMask> edge_masks_of(const Hypergraph& h) {
  std::vector<VertexMask> ms;
  ms.reserve(h.m());
  for (const auto& e : h.edges()) ms.push_back(e.mask);
  return ms;
}

}  // namespace detail

/// Exact number of t-subsets of {1..n} with no two vertices inside a common
/// edge of H; when `forbidden` (1-based r-set) is supplied with t = r, that
/// one set is excluded from the count.
inline BigCount count_conflict_free_sets(const Hypergraph& h, int t,
                                         const std::optional<std::vector<int>>& forbidden = {}) {
  require(t >= 1 && t <= h.n(), errc::out_of_range,
          "need 1 <= t <= n, got t=" + std::to_string(t));
  if (forbidden) {
    require(t == h.r(), errc::bad_set_size, "forbidden set given but t != r");
    require(static_cast<int>(forbidden->size()) == h.r(), errc::bad_set_size,
            "forbidden set must have r vertices");
  }
  detail::ConflictFreeSearch search(h.n(), detail::edge_masks_of(h));
  BigCount total = big_from_u64(search.count(t));

  if (forbidden) {
    VertexMask fm(h.n());
    for (int v : *forbidden) {
      require(v >= 1 && v <= h.n(), errc::vertex_out_of_range,
              "forbidden vertex " + std::to_string(v) + " outside range");
      fm.set(v - 1);
    }
    bool conflict_free = true;
    for (const auto& e : h.edges())
      if (e.mask.and_popcount(fm) >= 2) {
        conflict_free = false;
        break;
      }
    if (conflict_free && fm.popcount() == t) total -= 1;
  }
  return total;
}

/// Exact number of (2r-2)-subsets with exactly one pair of chosen vertices
/// lying inside a common edge of H.
inline BigCount count_one_conflict_sets(const Hypergraph& h) {
  const int t = 2 * h.r() - 2;
  require(h.n() >= t, errc::too_few_vertices,
          "need n >= 2r-2 = " + std::to_string(t));

  // covered[v] = vertices sharing an edge with v
  std::vector<VertexMask> covered(h.n(), VertexMask(h.n()));
  for (const auto& e : h.edges())
    for (int v : e.verts) covered[v].or_with(e.mask);

  unsigned long long total = 0;
  VertexMask chosen(h.n());
  std::function<void(int, int, int)> dfs = [&](int from, int need, int conflicts) {
    if (need == 0) {
      if (conflicts == 1) ++total;
      return;
    }
    for (int v = from; v + need <= h.n(); ++v) {
      int add = covered[v].and_popcount(chosen);
      if (conflicts + add > 1) continue;
      chosen.set(v);
      dfs(v + 1, need - 1, conflicts + add);
      chosen.clear(v);
    }
  };
  dfs(0, t, 0);
  return big_from_u64(total);
}

namespace detail {

/// Count of t-subsets avoiding `excluded` vertices, conflict-free against the
/// given edge masks. Used by switchings where landing sets avoid a vertex.
inline unsigned long long count_cf_raw(int n, const std::vector<VertexMask>& masks, int t,
                                       const VertexMask* excluded = nullptr) {
  if (t < 0) return 0;
  ConflictFreeSearch search(n, masks, excluded);
  return search.count(t);
}

}  // namespace detail

}  // namespace linhyp
