#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "linhyp/errors.hpp"

namespace linhyp {

/// Fixed-width bit mask over vertices 0..n-1.
struct VertexMask {
  std::vector<std::uint64_t> words;

  explicit VertexMask(int n = 0) : words((n + 63) / 64, 0) {}

  void set(int v) { words[v >> 6] |= std::uint64_t(1) << (v & 63); }
  void clear(int v) { words[v >> 6] &= ~(std::uint64_t(1) << (v & 63)); }
  bool test(int v) const { return (words[v >> 6] >> (v & 63)) & 1; }

  int and_popcount(const VertexMask& o) const {
    int c = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
      c += __builtin_popcountll(words[i] & o.words[i]);
    return c;
  }

  void or_with(const VertexMask& o) {
    for (std::size_t i = 0; i < words.size(); ++i) words[i] |= o.words[i];
  }

  int popcount() const {
    int c = 0;
    for (auto w : words) c += __builtin_popcountll(w);
    return c;
  }

  bool contains(const VertexMask& o) const {
    for (std::size_t i = 0; i < words.size(); ++i)
      if (o.words[i] & ~words[i]) return false;
    return true;
  }

  bool operator==(const VertexMask& o) const { return words == o.words; }
};

/// Labeled r-uniform hypergraph on {1..n}. Edges are canonically sorted and
/// pairwise distinct; vertices are 0-based internally and 1-based at every
/// external boundary (build input, accessors suffixed _1based, file format).
class Hypergraph {
 public:
  struct Edge {
    std::vector<int> verts;  // sorted, 0-based
    VertexMask mask;
  };

  Hypergraph() = default;

  /// Validates and canonicalizes: edges sorted lexicographically, duplicates rejected.
  static Hypergraph build(int n, int r, const std::vector<std::vector<int>>& edges_1based) {
    require(r >= 1 && r <= n, errc::out_of_range,
            "need 1 <= r <= n, got r=" + std::to_string(r) + " n=" + std::to_string(n));
    Hypergraph h;
    h.n_ = n;
    h.r_ = r;
    h.edges_.reserve(edges_1based.size());
    for (std::size_t idx = 0; idx < edges_1based.size(); ++idx) {
      std::vector<int> vs = edges_1based[idx];
      std::sort(vs.begin(), vs.end());
      require(std::adjacent_find(vs.begin(), vs.end()) == vs.end() &&
                  static_cast<int>(vs.size()) == r,
              errc::wrong_edge_size,
              "edge " + std::to_string(idx) + " does not have " + std::to_string(r) +
                  " distinct vertices");
      for (int v : vs)
        require(v >= 1 && v <= n, errc::vertex_out_of_range,
                "edge " + std::to_string(idx) + " has vertex " + std::to_string(v) +
                    " outside 1.." + std::to_string(n));
      Edge e;
      e.mask = VertexMask(n);
      e.verts.reserve(r);
      for (int v : vs) {
        e.verts.push_back(v - 1);
        e.mask.set(v - 1);
      }
      h.edges_.push_back(std::move(e));
    }
    std::vector<int> order(h.edges_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return h.edges_[a].verts < h.edges_[b].verts; });
    std::vector<Edge> sorted;
    sorted.reserve(h.edges_.size());
    for (int i : order) sorted.push_back(std::move(h.edges_[i]));
    for (std::size_t i = 1; i < sorted.size(); ++i)
      require(sorted[i - 1].verts != sorted[i].verts, errc::duplicate_edge,
              "edge " + std::to_string(order[i]) + " duplicates edge " +
                  std::to_string(order[i - 1]));
    h.edges_ = std::move(sorted);
    return h;
  }

  int n() const { return n_; }
  int r() const { return r_; }
  int m() const { return static_cast<int>(edges_.size()); }

  const Edge& edge(int i) const { return edges_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<std::vector<int>> edges_1based() const {
    std::vector<std::vector<int>> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) {
      std::vector<int> vs;
      vs.reserve(e.verts.size());
      for (int v : e.verts) vs.push_back(v + 1);
      out.push_back(std::move(vs));
    }
    return out;
  }

  int intersection_size(int i, int j) const {
    return edges_[i].mask.and_popcount(edges_[j].mask);
  }

  /// Number of edges containing every vertex of U (1-based).
  int codegree(const std::vector<int>& U) const {
    require(!U.empty(), errc::out_of_range, "codegree of empty set");
    VertexMask u(n_);
    for (int v : U) {
      require(v >= 1 && v <= n_, errc::vertex_out_of_range,
              "vertex " + std::to_string(v) + " outside 1.." + std::to_string(n_));
      u.set(v - 1);
    }
    int c = 0;
    for (const auto& e : edges_)
      if (e.mask.contains(u)) ++c;
    return c;
  }

  int degree(int v_1based) const { return codegree({v_1based}); }

  bool is_linear() const {
    for (int i = 0; i < m(); ++i)
      for (int j = i + 1; j < m(); ++j)
        if (intersection_size(i, j) > 1) return false;
    return true;
  }

  int max_degree() const {
    std::vector<int> deg(n_, 0);
    for (const auto& e : edges_)
      for (int v : e.verts) ++deg[v];
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  }

  /// Index of the edge with these 0-based sorted vertices, or -1.
  int find_edge(const std::vector<int>& verts0) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), verts0,
                               [](const Edge& e, const std::vector<int>& v) { return e.verts < v; });
    if (it == edges_.end() || it->verts != verts0) return -1;
    return static_cast<int>(it - edges_.begin());
  }

  bool operator==(const Hypergraph& o) const {
    if (n_ != o.n_ || r_ != o.r_ || edges_.size() != o.edges_.size()) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (edges_[i].verts != o.edges_[i].verts) return false;
    return true;
  }

 private:
  int n_ = 0;
  int r_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace linhyp
