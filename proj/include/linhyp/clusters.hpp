#pragma once

#include <array>
#include <vector>

#include "linhyp/hypergraph.hpp"

namespace linhyp {

enum class ClusterKind { type1, type2, type3, type4, other };

inline const char* kind_name(ClusterKind k) {
  switch (k) {
    case ClusterKind::type1: return "Type1";
    case ClusterKind::type2: return "Type2";
    case ClusterKind::type3: return "Type3";
    case ClusterKind::type4: return "Type4";
    case ClusterKind::other: return "Other";
  }
  return "?";
}

struct Cluster {
  std::vector<int> edge_indices;  // sorted
  ClusterKind kind = ClusterKind::other;
  int vertex_span = 0;
};

struct ClusterProfile {
  int h1 = 0, h2 = 0, h3 = 0, h4 = 0, other = 0;

  bool operator==(const ClusterProfile& o) const {
    return h1 == o.h1 && h2 == o.h2 && h3 == o.h3 && h4 == o.h4 && other == o.other;
  }
  bool operator<(const ClusterProfile& o) const {
    return std::array<int, 5>{h1, h2, h3, h4, other} <
           std::array<int, 5>{o.h1, o.h2, o.h3, o.h4, o.other};
  }
  bool all_zero() const { return h1 == 0 && h2 == 0 && h3 == 0 && h4 == 0 && other == 0; }
};

namespace detail {

// Three-edge component with pairwise intersections <= 2. The paper's kinds by
// intersection signature: {2,2,0} Type-1, {2,2,1} with the two shared pairs
// meeting in one vertex Type-2, common shared pair Type-3.
inline ClusterKind classify_triple(int r, const VertexMask& ma, const VertexMask& mb,
                                   const VertexMask& mc) {
  int iab = ma.and_popcount(mb);
  int ibc = mb.and_popcount(mc);
  int iac = ma.and_popcount(mc);
  std::array<int, 3> sig{iab, ibc, iac};
  std::sort(sig.begin(), sig.end());

  VertexMask span = ma;
  span.or_with(mb);
  span.or_with(mc);
  if (span.popcount() != 3 * r - 4) return ClusterKind::other;

  if (sig == std::array<int, 3>{0, 2, 2}) return ClusterKind::type1;
  if (sig == std::array<int, 3>{1, 2, 2}) return ClusterKind::type2;  // span fixes the shared vertex
  if (sig == std::array<int, 3>{2, 2, 2}) {
    VertexMask pab = ma, pbc = mb;
    for (std::size_t w = 0; w < pab.words.size(); ++w) pab.words[w] &= mb.words[w];
    for (std::size_t w = 0; w < pbc.words.size(); ++w) pbc.words[w] &= mc.words[w];
    return pab == pbc ? ClusterKind::type3 : ClusterKind::other;
  }
  return ClusterKind::other;
}

}  // namespace detail

/// Connected components (>= 2 edges) of the graph whose vertices are edges and
/// whose adjacency is |e ^ f| >= 2. Pairs meeting in exactly two vertices are
/// the paper's linked edges; overlaps of three or more surface as Other.
inline std::vector<Cluster> clusters_of_masks(int n, int r, const std::vector<VertexMask>& vm) {
  const int m = static_cast<int>(vm.size());
  std::vector<int> parent(m);
  for (int i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<std::vector<int>> isize(m, std::vector<int>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      int s = vm[i].and_popcount(vm[j]);
      isize[i][j] = isize[j][i] = s;
      if (s >= 2) parent[find(i)] = find(j);
    }

  std::vector<std::vector<int>> comps(m);
  for (int i = 0; i < m; ++i) comps[find(i)].push_back(i);

  std::vector<Cluster> out;
  for (auto& comp : comps) {
    if (comp.size() < 2) continue;
    Cluster c;
    c.edge_indices = comp;
    VertexMask span(n);
    for (int e : comp) span.or_with(vm[e]);
    c.vertex_span = span.popcount();

    bool big_overlap = false;
    for (std::size_t x = 0; x < comp.size() && !big_overlap; ++x)
      for (std::size_t y = x + 1; y < comp.size(); ++y)
        if (isize[comp[x]][comp[y]] >= 3) {
          big_overlap = true;
          break;
        }

    if (big_overlap || comp.size() > 3) {
      c.kind = ClusterKind::other;
    } else if (comp.size() == 2) {
      c.kind = ClusterKind::type4;  // adjacency forces intersection exactly 2 here
    } else {
      c.kind = detail::classify_triple(r, vm[comp[0]], vm[comp[1]], vm[comp[2]]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Cluster> clusters(const Hypergraph& h) {
  std::vector<VertexMask> vm;
  vm.reserve(h.m());
  for (const auto& e : h.edges()) vm.push_back(e.mask);
  return clusters_of_masks(h.n(), h.r(), vm);
}

inline ClusterProfile profile_from_clusters(const std::vector<Cluster>& cl) {
  ClusterProfile p;
  for (const auto& c : cl) {
    switch (c.kind) {
      case ClusterKind::type1: ++p.h1; break;
      case ClusterKind::type2: ++p.h2; break;
      case ClusterKind::type3: ++p.h3; break;
      case ClusterKind::type4: ++p.h4; break;
      case ClusterKind::other: ++p.other; break;
    }
  }
  return p;
}

inline ClusterProfile cluster_profile(const Hypergraph& h) {
  return profile_from_clusters(clusters(h));
}

}  // namespace linhyp
