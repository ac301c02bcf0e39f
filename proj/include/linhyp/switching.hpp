#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/clusters.hpp"
#include "linhyp/conflict.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/exact.hpp"
#include "linhyp/hypergraph.hpp"

namespace linhyp {

enum class SwitchOp {
  forward,       // remove a Type-i cluster, insert conflict-free edges in sequence
  reverse,       // delete link-free edges in order, pick T, create a Type-i cluster
  degree_down,   // move an edge/cluster at v to a conflict-free landing set
  degree_up,     // inverse: move a relocatable object onto a set containing v
  displacement,  // remove anchor edge, land on a conflict-free r-set
  replacement,   // remove a non-protected edge, insert the anchor edge
};

/// Value object describing one switching. Removed/added vertex lists are
/// 1-based and ordered the way the operation consumes them; validity against
/// a hypergraph is re-derived at apply time.
struct SwitchingDescriptor {
  SwitchOp op = SwitchOp::forward;
  int cluster_kind = 0;  // 1..4 for forward/reverse
  std::vector<std::vector<int>> removed;
  std::vector<std::vector<int>> added;
  std::optional<int> anchor_vertex;
  std::optional<std::vector<int>> anchor_edge;
  std::optional<std::vector<int>> target_set;
  bool legal = true;  // replacement: result is linear
};

namespace detail {

inline ClusterKind kind_of_int(int k) {
  switch (k) {
    case 1: return ClusterKind::type1;
    case 2: return ClusterKind::type2;
    case 3: return ClusterKind::type3;
    case 4: return ClusterKind::type4;
  }
  fail(errc::out_of_range, "cluster kind must be 1..4");
}

inline std::vector<int> verts_1based(const VertexMask& m) {
  std::vector<int> out;
  for (int w = 0; w < static_cast<int>(m.words.size()); ++w) {
    std::uint64_t bits = m.words[w];
    while (bits) {
      int b = __builtin_ctzll(bits);
      out.push_back(w * 64 + b + 1);
      bits &= bits - 1;
    }
  }
  return out;
}

inline VertexMask mask_of_1based(int n, const std::vector<int>& verts) {
  VertexMask m(n);
  for (int v : verts) m.set(v - 1);
  return m;
}

// --- creation-pattern counts per target set (unordered clusters) -----------

inline BigCount creation_count_cf(int kind, long r) {
  switch (kind) {
    case 1:
      return big_binomial(3 * r - 4, r) * big_binomial(r, 4) * 3 * big_binomial(2 * r - 4, r - 2);
    case 2:
      return big_binomial(3 * r - 4, r) * 3 * big_binomial(r, 3) * big_binomial(2 * r - 4, r - 2);
    case 3: {
      BigCount c = big_binomial(3 * r - 4, r) * big_binomial(r, 2) * big_binomial(2 * r - 4, r - 2);
      BigCount out;
      mpz_divexact_ui(out.get_mpz_t(), c.get_mpz_t(), 6);
      return out;
    }
    case 4: {
      BigCount c = big_binomial(2 * r - 2, 2) * big_binomial(2 * r - 4, r - 2);
      BigCount out;
      mpz_divexact_ui(out.get_mpz_t(), c.get_mpz_t(), 2);
      return out;
    }
  }
  fail(errc::out_of_range, "bad kind");
}

inline BigCount creation_count_one_conflict(long r) {
  if (r < 3) return 0;
  return big_binomial(2 * r - 4, 2) * big_binomial(2 * r - 6, r - 3);
}

/// Enumerates the distinct edge sets of a kind-i cluster spanning exactly the
/// sorted 0-based set T; with an inside pair {u,v} (kind 4 only) the pair is
/// split across the two non-shared parts. Each unordered cluster is produced
/// once; counts match creation_count_* and are pinned by tests.
inline void enumerate_creations(int kind, int r, const std::vector<int>& T,
                                std::optional<std::pair<int, int>> inside_pair,
                                const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  const int t = static_cast<int>(T.size());
  std::vector<std::vector<int>> cluster;

  auto subsets = [](const std::vector<int>& pool, int k,
                    const std::function<void(const std::vector<int>&, const std::vector<int>&)>& cb) {
    std::vector<int> pick, rest;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (pick.size() == static_cast<std::size_t>(k)) {
        std::vector<int> rem = rest;
        rem.insert(rem.end(), pool.begin() + i, pool.end());
        cb(pick, rem);
        return;
      }
      if (pool.size() - i < k - pick.size()) return;
      pick.push_back(pool[i]);
      rec(i + 1);
      pick.pop_back();
      rest.push_back(pool[i]);
      rec(i + 1);
      rest.pop_back();
    };
    rec(0);
  };

  if (kind == 4) {
    if (t != 2 * r - 2) return;
    if (!inside_pair) {
      // shared pair s, then split the rest; the half holding the minimum is e
      subsets(T, 2, [&](const std::vector<int>& s, const std::vector<int>& rest) {
        std::vector<int> pool(rest.begin() + 1, rest.end());
        subsets(pool, r - 3, [&](const std::vector<int>& extra, const std::vector<int>& others) {
          std::vector<int> e = {rest[0]};
          e.insert(e.end(), extra.begin(), extra.end());
          e.insert(e.end(), s.begin(), s.end());
          std::vector<int> f = others;
          f.insert(f.end(), s.begin(), s.end());
          std::sort(e.begin(), e.end());
          std::sort(f.begin(), f.end());
          fn({e, f});
        });
      });
    } else {
      if (r < 3) return;
      auto [u, v] = *inside_pair;
      std::vector<int> base;
      for (int x : T)
        if (x != u && x != v) base.push_back(x);
      subsets(base, 2, [&](const std::vector<int>& s, const std::vector<int>& rest) {
        subsets(rest, r - 3, [&](const std::vector<int>& eu, const std::vector<int>& fv) {
          std::vector<int> e = {u};
          e.insert(e.end(), eu.begin(), eu.end());
          e.insert(e.end(), s.begin(), s.end());
          std::vector<int> f = {v};
          f.insert(f.end(), fv.begin(), fv.end());
          f.insert(f.end(), s.begin(), s.end());
          std::sort(e.begin(), e.end());
          std::sort(f.begin(), f.end());
          fn({e, f});
        });
      });
    }
    return;
  }

  if (t != 3 * r - 4) return;
  if (kind == 1) {
    // middle edge e holds both links; assign each outside half to a link
    subsets(T, r, [&](const std::vector<int>& e, const std::vector<int>& outside) {
      subsets(e, 4, [&](const std::vector<int>& links, const std::vector<int>&) {
        // unordered split of the 4 link vertices into two pairs, anchored at links[0]
        static const int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        for (const auto& sp : splits) {
          std::vector<int> p1 = {links[sp[0]], links[sp[1]]};
          std::vector<int> p2 = {links[sp[2]], links[sp[3]]};
          subsets(outside, r - 2, [&](const std::vector<int>& f_out, const std::vector<int>& g_out) {
            std::vector<int> f = p1, g = p2;
            f.insert(f.end(), f_out.begin(), f_out.end());
            g.insert(g.end(), g_out.begin(), g_out.end());
            std::vector<int> e2 = e;
            std::sort(e2.begin(), e2.end());
            std::sort(f.begin(), f.end());
            std::sort(g.begin(), g.end());
            fn({e2, f, g});
          });
        }
      });
    });
  } else if (kind == 2) {
    subsets(T, r, [&](const std::vector<int>& e, const std::vector<int>& outside) {
      subsets(e, 3, [&](const std::vector<int>& tri, const std::vector<int>&) {
        for (int center = 0; center < 3; ++center) {
          int b = tri[center];
          int a = tri[(center + 1) % 3], c = tri[(center + 2) % 3];
          if (a > c) std::swap(a, c);  // links {a,b} and {b,c}; orientation fixed by a < c
          subsets(outside, r - 2, [&](const std::vector<int>& f_out, const std::vector<int>& g_out) {
            std::vector<int> f = {a, b}, g = {b, c};
            f.insert(f.end(), f_out.begin(), f_out.end());
            g.insert(g.end(), g_out.begin(), g_out.end());
            std::vector<int> e2 = e;
            std::sort(e2.begin(), e2.end());
            std::sort(f.begin(), f.end());
            std::sort(g.begin(), g.end());
            fn({e2, f, g});
          });
        }
      });
    });
  } else if (kind == 3) {
    subsets(T, 2, [&](const std::vector<int>& s, const std::vector<int>& rest) {
      // unordered partition of the rest into three (r-2)-blocks
      std::vector<int> pool1(rest.begin() + 1, rest.end());
      subsets(pool1, r - 3, [&](const std::vector<int>& b1extra, const std::vector<int>& rest2) {
        if (rest2.empty()) return;
        std::vector<int> pool2(rest2.begin() + 1, rest2.end());
        subsets(pool2, r - 3, [&](const std::vector<int>& b2extra, const std::vector<int>& b3) {
          std::vector<int> e = {rest[0]}, f = {rest2[0]}, g = b3;
          e.insert(e.end(), b1extra.begin(), b1extra.end());
          f.insert(f.end(), b2extra.begin(), b2extra.end());
          for (auto* edge : {&e, &f, &g}) {
            edge->insert(edge->end(), s.begin(), s.end());
            std::sort(edge->begin(), edge->end());
          }
          fn({e, f, g});
        });
      });
    });
  }
}

// --- memoized sequence / target-set counts ----------------------------------

/// Signature of a remaining graph when it has at most two edges; larger
/// remainders are not memoizable by intersection multiset alone.
inline std::optional<long> remaining_signature(const std::vector<VertexMask>& rem) {
  if (rem.size() == 0) return 0;
  if (rem.size() == 1) return 1;
  if (rem.size() == 2) return 10 + rem[0].and_popcount(rem[1]);
  return std::nullopt;
}

struct SwitchMemo {
  std::map<std::tuple<int, long>, BigCount> forward;  // (steps, sig) -> count
  std::map<std::tuple<int, long>, BigCount> reverse;  // (kind, sig) -> per-deletion factor
};

/// Number of ordered sequences of `steps` insertions, each conflict-free
/// against the evolving graph.
inline BigCount count_forward_sequences(int n, int r, std::vector<VertexMask>& rem, int steps,
                                        SwitchMemo* memo) {
  std::optional<long> sig;
  if (memo && (sig = remaining_signature(rem))) {
    auto it = memo->forward.find({steps, *sig});
    if (it != memo->forward.end()) return it->second;
  }
  BigCount total = 0;
  if (steps == 1) {
    total = big_from_u64(count_cf_raw(n, rem, r));
  } else {
    ConflictFreeSearch search(n, rem);
    std::vector<std::vector<int>> found;
    search.enumerate(r, [&](const std::vector<int>& verts) { found.push_back(verts); });
    for (const auto& verts : found) {
      VertexMask m(n);
      for (int v : verts) m.set(v);
      rem.push_back(m);
      total += count_forward_sequences(n, r, rem, steps - 1, nullptr);
      rem.pop_back();
    }
  }
  if (memo && sig) memo->forward[{steps, *sig}] = total;
  return total;
}

/// One-conflict T count over raw masks (mirrors count_one_conflict_sets).
inline unsigned long long count_one_conflict_raw(int n, const std::vector<VertexMask>& masks,
                                                 int t) {
  std::vector<VertexMask> covered(n, VertexMask(n));
  for (const auto& em : masks)
    for (int v = 0; v < n; ++v)
      if (em.test(v)) covered[v].or_with(em);
  unsigned long long total = 0;
  VertexMask chosen(n);
  std::function<void(int, int, int)> dfs = [&](int from, int need, int conflicts) {
    if (need == 0) {
      if (conflicts == 1) ++total;
      return;
    }
    for (int v = from; v + need <= n; ++v) {
      int add = covered[v].and_popcount(chosen);
      if (conflicts + add > 1) continue;
      chosen.set(v);
      dfs(v + 1, need - 1, conflicts + add);
      chosen.clear(v);
    }
  };
  dfs(0, t, 0);
  return total;
}

/// Sum over target sets T of the number of kind-i clusters creatable in T,
/// for one (ordered) deletion leaving `rem`.
inline BigCount reverse_target_factor(int n, int r, const std::vector<VertexMask>& rem, int kind,
                                      SwitchMemo* memo) {
  std::optional<long> sig;
  if (memo && (sig = remaining_signature(rem))) {
    auto it = memo->reverse.find({kind, *sig});
    if (it != memo->reverse.end()) return it->second;
  }
  BigCount total;
  if (kind <= 3) {
    unsigned long long nT = count_cf_raw(n, rem, 3 * r - 4);
    total = big_from_u64(nT) * creation_count_cf(kind, r);
  } else {
    unsigned long long n_cf = count_cf_raw(n, rem, 2 * r - 2);
    unsigned long long n_1p = count_one_conflict_raw(n, rem, 2 * r - 2);
    total = big_from_u64(n_cf) * creation_count_cf(4, r) +
            big_from_u64(n_1p) * creation_count_one_conflict(r);
  }
  if (memo && sig) memo->reverse[{kind, *sig}] = total;
  return total;
}

inline std::vector<VertexMask> masks_of(const Hypergraph& h) {
  std::vector<VertexMask> out;
  out.reserve(h.m());
  for (const auto& e : h.edges()) out.push_back(e.mask);
  return out;
}

inline std::vector<int> edge_1based(const Hypergraph& h, int idx) {
  std::vector<int> out;
  for (int v : h.edge(idx).verts) out.push_back(v + 1);
  return out;
}

/// Edge contains no link: it meets every other edge in at most one vertex.
inline std::vector<int> link_free_edges(const Hypergraph& h) {
  std::vector<int> out;
  for (int i = 0; i < h.m(); ++i) {
    bool free = true;
    for (int j = 0; j < h.m() && free; ++j)
      if (j != i && h.intersection_size(i, j) >= 2) free = false;
    if (free) out.push_back(i);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Forward switchings

/// Exact number of kind-i forward switchings: sum over kind-i clusters of the
/// sequential conflict-free insertion counts against the evolving hypergraph.
inline BigCount count_forward_switchings(const Hypergraph& h, int kind,
                                         detail::SwitchMemo* memo = nullptr) {
  ClusterKind want = detail::kind_of_int(kind);
  const int steps = kind == 4 ? 2 : 3;
  BigCount total = 0;
  auto all_masks = detail::masks_of(h);
  for (const auto& c : clusters(h)) {
    if (c.kind != want) continue;
    std::vector<VertexMask> rem;
    for (int i = 0; i < h.m(); ++i)
      if (std::find(c.edge_indices.begin(), c.edge_indices.end(), i) == c.edge_indices.end())
        rem.push_back(all_masks[i]);
    total += detail::count_forward_sequences(h.n(), h.r(), rem, steps, memo);
  }
  return total;
}

/// Streams every forward descriptor (cluster choice + ordered insertions).
inline void for_each_forward_switching(
    const Hypergraph& h, int kind, const std::function<void(const SwitchingDescriptor&)>& fn) {
  ClusterKind want = detail::kind_of_int(kind);
  const int steps = kind == 4 ? 2 : 3;
  auto all_masks = detail::masks_of(h);
  for (const auto& c : clusters(h)) {
    if (c.kind != want) continue;
    SwitchingDescriptor d;
    d.op = SwitchOp::forward;
    d.cluster_kind = kind;
    for (int i : c.edge_indices) d.removed.push_back(detail::edge_1based(h, i));
    std::vector<VertexMask> rem;
    for (int i = 0; i < h.m(); ++i)
      if (std::find(c.edge_indices.begin(), c.edge_indices.end(), i) == c.edge_indices.end())
        rem.push_back(all_masks[i]);

    std::function<void(int)> extend = [&](int left) {
      if (left == 0) {
        fn(d);
        return;
      }
      detail::ConflictFreeSearch search(h.n(), rem);
      std::vector<std::vector<int>> found;
      search.enumerate(h.r(), [&](const std::vector<int>& verts) { found.push_back(verts); });
      for (const auto& verts : found) {
        VertexMask m(h.n());
        std::vector<int> v1;
        for (int v : verts) {
          m.set(v);
          v1.push_back(v + 1);
        }
        rem.push_back(m);
        d.added.push_back(v1);
        extend(left - 1);
        d.added.pop_back();
        rem.pop_back();
      }
    };
    extend(steps);
  }
}

// ---------------------------------------------------------------------------
// Reverse switchings

/// Exact number of kind-i reverse switchings: ordered deletions of link-free
/// edges, a target set conflict-free against the remainder (for kind 4 also
/// the one-conflict sets), and a creation pattern inside the target.
inline BigCount count_reverse_switchings(const Hypergraph& h, int kind,
                                         detail::SwitchMemo* memo = nullptr) {
  detail::kind_of_int(kind);
  const int d = kind == 4 ? 2 : 3;
  auto lf = detail::link_free_edges(h);
  require(static_cast<int>(lf.size()) >= d, errc::too_few_free_edges,
          "need " + std::to_string(d) + " link-free edges, have " + std::to_string(lf.size()));
  auto all_masks = detail::masks_of(h);
  BigCount orderings = d == 2 ? 2 : 6;
  BigCount total = 0;
  std::vector<int> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (static_cast<int>(pick.size()) == d) {
      std::vector<VertexMask> rem;
      for (int i = 0; i < h.m(); ++i)
        if (std::find(pick.begin(), pick.end(), i) == pick.end()) rem.push_back(all_masks[i]);
      total += orderings * detail::reverse_target_factor(h.n(), h.r(), rem, kind, memo);
      return;
    }
    for (std::size_t q = from; q < lf.size(); ++q) {
      pick.push_back(lf[q]);
      rec(q + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return total;
}

/// Streams every reverse descriptor (ordered deletions, target set, creation).
inline void for_each_reverse_switching(
    const Hypergraph& h, int kind, const std::function<void(const SwitchingDescriptor&)>& fn) {
  detail::kind_of_int(kind);
  const int d = kind == 4 ? 2 : 3;
  auto lf = detail::link_free_edges(h);
  require(static_cast<int>(lf.size()) >= d, errc::too_few_free_edges,
          "need " + std::to_string(d) + " link-free edges, have " + std::to_string(lf.size()));
  auto all_masks = detail::masks_of(h);

  std::vector<int> perm;
  std::vector<char> used(lf.size(), 0);
  std::function<void()> rec = [&]() {
    if (static_cast<int>(perm.size()) == d) {
      std::vector<VertexMask> rem;
      for (int i = 0; i < h.m(); ++i)
        if (std::find(perm.begin(), perm.end(), i) == perm.end()) rem.push_back(all_masks[i]);

      SwitchingDescriptor base;
      base.op = SwitchOp::reverse;
      base.cluster_kind = kind;
      for (int i : perm) base.removed.push_back(detail::edge_1based(h, i));

      auto emit_for_target = [&](const std::vector<int>& T0,
                                 std::optional<std::pair<int, int>> inside) {
        std::vector<int> T1;
        for (int v : T0) T1.push_back(v + 1);
        detail::enumerate_creations(kind, h.r(), T0, inside,
                                    [&](const std::vector<std::vector<int>>& edges0) {
                                      SwitchingDescriptor d2 = base;
                                      d2.target_set = T1;
                                      for (const auto& e0 : edges0) {
                                        std::vector<int> e1;
                                        for (int v : e0) e1.push_back(v + 1);
                                        d2.added.push_back(e1);
                                      }
                                      fn(d2);
                                    });
      };

      const int tsize = kind == 4 ? 2 * h.r() - 2 : 3 * h.r() - 4;
      detail::ConflictFreeSearch search(h.n(), rem);
      search.enumerate(tsize, [&](const std::vector<int>& T0) { emit_for_target(T0, {}); });

      if (kind == 4) {
        // one-conflict targets: enumerate and locate the inside pair
        std::vector<VertexMask> covered(h.n(), VertexMask(h.n()));
        for (const auto& em : rem)
          for (int v = 0; v < h.n(); ++v)
            if (em.test(v)) covered[v].or_with(em);
        std::vector<int> chosen;
        VertexMask chosen_mask(h.n());
        std::function<void(int, int, int, int, int)> dfs = [&](int from, int need, int conflicts,
                                                               int pu, int pv) {
          if (need == 0) {
            if (conflicts == 1) emit_for_target(chosen, std::make_pair(pu, pv));
            return;
          }
          for (int v = from; v + need <= h.n(); ++v) {
            int add = covered[v].and_popcount(chosen_mask);
            if (conflicts + add > 1) continue;
            int npu = pu, npv = pv;
            if (add == 1) {
              for (int u : chosen)
                if (covered[v].test(u)) {
                  npu = u;
                  npv = v;
                  break;
                }
            }
            chosen.push_back(v);
            chosen_mask.set(v);
            dfs(v + 1, need - 1, conflicts + add, npu, npv);
            chosen_mask.clear(v);
            chosen.pop_back();
          }
        };
        dfs(0, tsize, 0, -1, -1);
      }
      return;
    }
    for (std::size_t q = 0; q < lf.size(); ++q) {
      if (used[q]) continue;
      used[q] = 1;
      perm.push_back(lf[q]);
      rec();
      perm.pop_back();
      used[q] = 0;
    }
  };
  rec();
}

// ---------------------------------------------------------------------------
// Degree switchings

namespace detail {

struct DegreeObject {
  bool is_cluster = false;
  ClusterKind kind = ClusterKind::other;
  std::vector<int> edge_indices;
  VertexMask span;
  int landing_size = 0;
};

/// Clusterless edges and non-Other clusters, with spans and landing sizes.
inline std::vector<DegreeObject> degree_objects(const Hypergraph& h) {
  std::vector<DegreeObject> out;
  std::vector<char> in_cluster(h.m(), 0);
  for (const auto& c : clusters(h)) {
    for (int i : c.edge_indices) in_cluster[i] = 1;
    if (c.kind == ClusterKind::other) continue;  // no paper strategy moves these
    DegreeObject o;
    o.is_cluster = true;
    o.kind = c.kind;
    o.edge_indices = c.edge_indices;
    o.span = VertexMask(h.n());
    for (int i : c.edge_indices) o.span.or_with(h.edge(i).mask);
    o.landing_size = c.kind == ClusterKind::type4 ? 2 * h.r() - 2 : 3 * h.r() - 4;
    out.push_back(std::move(o));
  }
  for (int i = 0; i < h.m(); ++i) {
    if (in_cluster[i]) continue;
    DegreeObject o;
    o.edge_indices = {i};
    o.span = h.edge(i).mask;
    o.landing_size = h.r();
    out.push_back(std::move(o));
  }
  return out;
}

/// Order-preserving re-embedding of the object's edges onto the sorted
/// landing set (1-based in, 1-based out).
inline std::vector<std::vector<int>> re_embed(const Hypergraph& h,
                                              const std::vector<int>& edge_indices,
                                              const VertexMask& span,
                                              const std::vector<int>& landing_1based) {
  std::vector<int> from = verts_1based(span);
  std::vector<int> to = landing_1based;  // sorted
  std::vector<int> map(h.n() + 1, 0);
  for (std::size_t i = 0; i < from.size(); ++i) map[from[i]] = to[i];
  std::vector<std::vector<int>> out;
  for (int idx : edge_indices) {
    std::vector<int> e;
    for (int v : h.edge(idx).verts) e.push_back(map[v + 1]);
    std::sort(e.begin(), e.end());
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<VertexMask> masks_without(const Hypergraph& h, const std::vector<int>& drop) {
  std::vector<VertexMask> rem;
  for (int i = 0; i < h.m(); ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) rem.push_back(h.edge(i).mask);
  return rem;
}

}  // namespace detail

enum class DegreeDirection { down, up };

/// Exact count of degree switchings at v. Down moves an edge or whole cluster
/// containing v to a conflict-free set avoiding v; up is the inverse.
inline BigCount count_degree_switchings(const Hypergraph& h, int v_1based, DegreeDirection dir) {
  require(v_1based >= 1 && v_1based <= h.n(), errc::vertex_out_of_range, "vertex outside 1..n");
  const int v0 = v_1based - 1;
  BigCount total = 0;
  for (const auto& obj : detail::degree_objects(h)) {
    auto rem = detail::masks_without(h, obj.edge_indices);
    if (dir == DegreeDirection::down) {
      if (!obj.span.test(v0)) continue;
      VertexMask excluded(h.n());
      excluded.set(v0);
      total += big_from_u64(detail::count_cf_raw(h.n(), rem, obj.landing_size, &excluded));
    } else {
      if (obj.span.test(v0)) continue;
      // relocatable: the object's span is conflict-free against the rest
      bool relocatable = true;
      for (const auto& m : rem)
        if (m.and_popcount(obj.span) >= 2) {
          relocatable = false;
          break;
        }
      if (!relocatable) continue;
      VertexMask excluded(h.n());
      excluded.set(v0);
      for (const auto& m : rem)
        if (m.test(v0))
          excluded.or_with(m);  // vertices sharing a remaining edge with v
      total += big_from_u64(detail::count_cf_raw(h.n(), rem, obj.landing_size - 1, &excluded));
    }
  }
  return total;
}

/// Streams degree-switching descriptors.
inline void for_each_degree_switching(const Hypergraph& h, int v_1based, DegreeDirection dir,
                                      const std::function<void(const SwitchingDescriptor&)>& fn) {
  require(v_1based >= 1 && v_1based <= h.n(), errc::vertex_out_of_range, "vertex outside 1..n");
  const int v0 = v_1based - 1;
  for (const auto& obj : detail::degree_objects(h)) {
    auto rem = detail::masks_without(h, obj.edge_indices);
    bool down = dir == DegreeDirection::down;
    if (down && !obj.span.test(v0)) continue;
    if (!down) {
      if (obj.span.test(v0)) continue;
      bool relocatable = true;
      for (const auto& m : rem)
        if (m.and_popcount(obj.span) >= 2) {
          relocatable = false;
          break;
        }
      if (!relocatable) continue;
    }
    VertexMask excluded(h.n());
    excluded.set(v0);
    if (!down)
      for (const auto& m : rem)
        if (m.test(v0)) excluded.or_with(m);

    detail::ConflictFreeSearch search(h.n(), rem, &excluded);
    const int want = down ? obj.landing_size : obj.landing_size - 1;
    search.enumerate(want, [&](const std::vector<int>& verts0) {
      std::vector<int> landing;
      for (int v : verts0) landing.push_back(v + 1);
      if (!down) {
        landing.push_back(v_1based);
        std::sort(landing.begin(), landing.end());
      }
      SwitchingDescriptor d;
      d.op = down ? SwitchOp::degree_down : SwitchOp::degree_up;
      d.anchor_vertex = v_1based;
      for (int i : obj.edge_indices) d.removed.push_back(detail::edge_1based(h, i));
      d.added = detail::re_embed(h, obj.edge_indices, obj.span, landing);
      d.target_set = landing;
      fn(d);
    });
  }
}

// ---------------------------------------------------------------------------
// Displacement / replacement

/// Displace: remove anchor edge, land on any conflict-free r-set distinct
/// from it. Replace: remove any non-protected edge and insert the anchor;
/// descriptors carry a legality flag (result linear).
inline BigCount count_displacements(const Hypergraph& h, const std::vector<int>& e_i_1based) {
  std::vector<int> key;
  for (int v : e_i_1based) key.push_back(v - 1);
  std::sort(key.begin(), key.end());
  int idx = h.find_edge(key);
  require(idx >= 0, errc::edge_absent, "anchor edge not in hypergraph");
  auto rem = detail::masks_without(h, {idx});
  detail::ConflictFreeSearch search(h.n(), rem);
  BigCount total = big_from_u64(search.count(h.r()));
  // exclude the anchor itself when it is conflict-free against the rest
  bool cf = true;
  for (const auto& m : rem)
    if (m.and_popcount(h.edge(idx).mask) >= 2) {
      cf = false;
      break;
    }
  if (cf) total -= 1;
  return total;
}

inline void for_each_displacement(const Hypergraph& h, const std::vector<int>& e_i_1based,
                                  const std::function<void(const SwitchingDescriptor&)>& fn) {
  std::vector<int> key;
  for (int v : e_i_1based) key.push_back(v - 1);
  std::sort(key.begin(), key.end());
  int idx = h.find_edge(key);
  require(idx >= 0, errc::edge_absent, "anchor edge not in hypergraph");
  auto rem = detail::masks_without(h, {idx});
  std::vector<int> anchor_sorted = detail::edge_1based(h, idx);
  detail::ConflictFreeSearch search(h.n(), rem);
  search.enumerate(h.r(), [&](const std::vector<int>& verts0) {
    std::vector<int> x;
    for (int v : verts0) x.push_back(v + 1);
    if (x == anchor_sorted) return;
    SwitchingDescriptor d;
    d.op = SwitchOp::displacement;
    d.anchor_edge = anchor_sorted;
    d.removed = {anchor_sorted};
    d.added = {x};
    fn(d);
  });
}

inline BigCount count_replacements(const Hypergraph& h, const std::vector<int>& e_i_1based,
                                   const std::vector<std::vector<int>>& protected_edges) {
  std::vector<int> key;
  for (int v : e_i_1based) key.push_back(v - 1);
  std::sort(key.begin(), key.end());
  require(h.find_edge(key) < 0, errc::edge_present, "anchor edge already in hypergraph");
  long removable = 0;
  for (int i = 0; i < h.m(); ++i) {
    auto e1 = detail::edge_1based(h, i);
    bool prot = false;
    for (auto p : protected_edges) {
      std::sort(p.begin(), p.end());
      if (p == e1) {
        prot = true;
        break;
      }
    }
    if (!prot) ++removable;
  }
  return removable;
}

inline void for_each_replacement(const Hypergraph& h, const std::vector<int>& e_i_1based,
                                 const std::vector<std::vector<int>>& protected_edges,
                                 const std::function<void(const SwitchingDescriptor&)>& fn) {
  std::vector<int> key;
  for (int v : e_i_1based) key.push_back(v - 1);
  std::sort(key.begin(), key.end());
  require(h.find_edge(key) < 0, errc::edge_present, "anchor edge already in hypergraph");
  std::vector<int> anchor = e_i_1based;
  std::sort(anchor.begin(), anchor.end());
  for (int i = 0; i < h.m(); ++i) {
    auto e1 = detail::edge_1based(h, i);
    bool prot = false;
    for (auto p : protected_edges) {
      std::sort(p.begin(), p.end());
      if (p == e1) {
        prot = true;
        break;
      }
    }
    if (prot) continue;
    SwitchingDescriptor d;
    d.op = SwitchOp::replacement;
    d.anchor_edge = anchor;
    d.removed = {e1};
    d.added = {anchor};
    // legality: the result is linear
    std::vector<std::vector<int>> edges = h.edges_1based();
    edges.erase(edges.begin() + i);
    edges.push_back(anchor);
    d.legal = Hypergraph::build(h.n(), h.r(), edges).is_linear();
    fn(d);
  }
}

// ---------------------------------------------------------------------------
// Apply / inverse

namespace detail {

inline void require_stale(bool ok, const std::string& what) {
  if (!ok) fail(errc::stale_descriptor, what);
}

}  // namespace detail

/// Applies a descriptor after re-validating it against the current
/// hypergraph; any mismatch raises StaleDescriptor.
inline Hypergraph apply_switching(const Hypergraph& h, const SwitchingDescriptor& d) {
  using detail::require_stale;
  auto sorted1 = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  // locate removed edges
  std::vector<int> removed_idx;
  for (const auto& e : d.removed) {
    std::vector<int> key;
    for (int v : sorted1(e)) key.push_back(v - 1);
    int idx = h.find_edge(key);
    require_stale(idx >= 0, "removed edge not present");
    removed_idx.push_back(idx);
  }
  {
    auto dedup = removed_idx;
    std::sort(dedup.begin(), dedup.end());
    require_stale(std::adjacent_find(dedup.begin(), dedup.end()) == dedup.end(),
                  "removed edges repeat");
  }
  auto rem_masks = detail::masks_without(h, removed_idx);

  auto added_masks = [&]() {
    std::vector<VertexMask> out;
    for (const auto& e : d.added) out.push_back(detail::mask_of_1based(h.n(), e));
    return out;
  }();

  auto check_sequential_cf = [&]() {
    std::vector<VertexMask> cur = rem_masks;
    for (const auto& am : added_masks) {
      for (const auto& m : cur)
        require_stale(m.and_popcount(am) <= 1, "added edge conflicts with evolving graph");
      cur.push_back(am);
    }
  };

  switch (d.op) {
    case SwitchOp::forward: {
      ClusterKind want = detail::kind_of_int(d.cluster_kind);
      bool found = false;
      for (const auto& c : clusters(h)) {
        if (c.kind != want) continue;
        auto ids = c.edge_indices;
        auto mine = removed_idx;
        std::sort(mine.begin(), mine.end());
        if (ids == mine) {
          found = true;
          break;
        }
      }
      require_stale(found, "removed edges are not a cluster of the stated kind");
      require_stale(static_cast<int>(d.added.size()) == (d.cluster_kind == 4 ? 2 : 3),
                    "wrong number of insertions");
      check_sequential_cf();
      break;
    }
    case SwitchOp::reverse: {
      detail::kind_of_int(d.cluster_kind);
      const int del = d.cluster_kind == 4 ? 2 : 3;
      require_stale(static_cast<int>(d.removed.size()) == del, "wrong number of deletions");
      auto lf = detail::link_free_edges(h);
      for (int idx : removed_idx)
        require_stale(std::find(lf.begin(), lf.end(), idx) != lf.end(),
                      "deleted edge contains a link");
      require_stale(d.target_set.has_value(), "reverse descriptor needs a target set");
      auto T = sorted1(*d.target_set);
      const int tsize = d.cluster_kind == 4 ? 2 * h.r() - 2 : 3 * h.r() - 4;
      require_stale(static_cast<int>(T.size()) == tsize, "target set has the wrong size");
      VertexMask tmask = detail::mask_of_1based(h.n(), T);
      require_stale(tmask.popcount() == tsize, "target set repeats vertices");
      // added edges live inside T, span it, and form the stated cluster
      VertexMask span(h.n());
      for (const auto& am : added_masks) {
        require_stale(tmask.contains(am), "created edge leaves the target set");
        span.or_with(am);
      }
      require_stale(span == tmask, "created cluster does not span the target");
      ClusterProfile p = profile_from_clusters(
          clusters_of_masks(h.n(), h.r(), added_masks));
      ClusterProfile wantp;
      (d.cluster_kind == 1   ? wantp.h1
       : d.cluster_kind == 2 ? wantp.h2
       : d.cluster_kind == 3 ? wantp.h3
                             : wantp.h4) = 1;
      require_stale(p == wantp, "created edges are not a single cluster of the stated kind");
      // conflicts of T against the remainder
      int inside_pairs = 0;
      std::pair<int, int> inside{-1, -1};
      for (std::size_t x = 0; x < T.size(); ++x)
        for (std::size_t y = x + 1; y < T.size(); ++y) {
          for (const auto& m : rem_masks)
            if (m.test(T[x] - 1) && m.test(T[y] - 1)) {
              ++inside_pairs;
              inside = {T[x], T[y]};
              break;
            }
        }
      if (d.cluster_kind <= 3) {
        require_stale(inside_pairs == 0, "target set conflicts with remaining edges");
      } else {
        require_stale(inside_pairs <= 1, "target set has two conflicting pairs");
        if (inside_pairs == 1)
          for (const auto& am : added_masks)
            require_stale(!(am.test(inside.first - 1) && am.test(inside.second - 1)),
                          "inside pair must split across the created edges");
      }
      break;
    }
    case SwitchOp::degree_down:
    case SwitchOp::degree_up: {
      require_stale(d.anchor_vertex.has_value(), "degree descriptor needs a vertex");
      const int v = *d.anchor_vertex;
      require(v >= 1 && v <= h.n(), errc::vertex_out_of_range, "anchor vertex outside 1..n");
      bool matched = false;
      for (const auto& obj : detail::degree_objects(h)) {
        auto mine = removed_idx;
        std::sort(mine.begin(), mine.end());
        auto theirs = obj.edge_indices;
        std::sort(theirs.begin(), theirs.end());
        if (mine != theirs) continue;
        matched = true;
        bool down = d.op == SwitchOp::degree_down;
        require_stale(down == obj.span.test(v - 1),
                      down ? "object does not contain the vertex" : "object already covers vertex");
        require_stale(d.target_set.has_value(), "degree descriptor needs a landing set");
        auto L = sorted1(*d.target_set);
        require_stale(static_cast<int>(L.size()) == obj.landing_size, "landing size mismatch");
        VertexMask lmask = detail::mask_of_1based(h.n(), L);
        require_stale(down ? !lmask.test(v - 1) : lmask.test(v - 1),
                      down ? "landing set must avoid the vertex" : "landing set must contain it");
        for (const auto& m : rem_masks)
          require_stale(m.and_popcount(lmask) <= 1, "landing set conflicts with remaining edges");
        if (!down) {
          bool relocatable = true;
          for (const auto& m : rem_masks)
            if (m.and_popcount(obj.span) >= 2) relocatable = false;
          require_stale(relocatable, "object is pinned by conflicts");
        }
        auto expect = detail::re_embed(h, obj.edge_indices, obj.span, L);
        std::vector<std::vector<int>> got;
        for (const auto& e : d.added) got.push_back(sorted1(e));
        std::sort(expect.begin(), expect.end());
        std::sort(got.begin(), got.end());
        require_stale(expect == got, "added edges are not the re-embedded object");
        break;
      }
      require_stale(matched, "removed edges are not a movable object");
      break;
    }
    case SwitchOp::displacement: {
      require_stale(d.anchor_edge.has_value() && d.removed.size() == 1 && d.added.size() == 1,
                    "displacement needs one removed and one added edge");
      require_stale(sorted1(d.removed[0]) == sorted1(*d.anchor_edge),
                    "displacement removes its anchor");
      require_stale(sorted1(d.added[0]) != sorted1(*d.anchor_edge), "landing must differ");
      check_sequential_cf();
      break;
    }
    case SwitchOp::replacement: {
      require_stale(d.anchor_edge.has_value() && d.removed.size() == 1 && d.added.size() == 1,
                    "replacement needs one removed and one added edge");
      require_stale(sorted1(d.added[0]) == sorted1(*d.anchor_edge),
                    "replacement inserts its anchor");
      std::vector<int> key;
      for (int v : sorted1(*d.anchor_edge)) key.push_back(v - 1);
      require_stale(h.find_edge(key) < 0, "anchor already present");
      break;
    }
  }

  std::vector<std::vector<int>> edges;
  for (int i = 0; i < h.m(); ++i)
    if (std::find(removed_idx.begin(), removed_idx.end(), i) == removed_idx.end())
      edges.push_back(detail::edge_1based(h, i));
  for (const auto& e : d.added) edges.push_back(e);
  try {
    return Hypergraph::build(h.n(), h.r(), edges);
  } catch (const error&) {
    fail(errc::stale_descriptor, "application produced an invalid hypergraph");
  }
}

/// The descriptor undoing d; apply(apply(H,d), inverse_of(d, H)) == H when d
/// is valid against H.
inline SwitchingDescriptor inverse_of(const SwitchingDescriptor& d, const Hypergraph& h) {
  SwitchingDescriptor inv;
  switch (d.op) {
    case SwitchOp::forward: {
      inv.op = SwitchOp::reverse;
      inv.cluster_kind = d.cluster_kind;
      inv.removed = d.added;
      inv.added = d.removed;
      VertexMask span(h.n());
      for (const auto& e : d.removed) span.or_with(detail::mask_of_1based(h.n(), e));
      inv.target_set = detail::verts_1based(span);
      break;
    }
    case SwitchOp::reverse: {
      inv.op = SwitchOp::forward;
      inv.cluster_kind = d.cluster_kind;
      inv.removed = d.added;
      inv.added = d.removed;
      break;
    }
    case SwitchOp::degree_down:
    case SwitchOp::degree_up: {
      inv.op = d.op == SwitchOp::degree_down ? SwitchOp::degree_up : SwitchOp::degree_down;
      inv.anchor_vertex = d.anchor_vertex;
      inv.removed = d.added;
      inv.added = d.removed;
      VertexMask span(h.n());
      for (const auto& e : d.removed) span.or_with(detail::mask_of_1based(h.n(), e));
      inv.target_set = detail::verts_1based(span);
      break;
    }
    case SwitchOp::displacement: {
      inv.op = SwitchOp::replacement;
      inv.anchor_edge = d.anchor_edge;
      inv.removed = d.added;
      inv.added = {*d.anchor_edge};
      break;
    }
    case SwitchOp::replacement: {
      inv.op = SwitchOp::displacement;
      inv.anchor_edge = d.anchor_edge;
      inv.removed = {*d.anchor_edge};
      inv.added = d.removed;
      break;
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Double-counting audit

struct AuditReport {
  BigCount forward_total = 0;
  BigCount reverse_total = 0;
  bool equal = false;
  BigCount class_a_size = 0;
  BigCount class_b_size = 0;
  BigCount a_min_deg = 0, a_max_deg = 0;
  BigCount b_min_deg = 0, b_max_deg = 0;
  double ratio_lo = 0, ratio_observed = 0, ratio_hi = 0;
  bool sandwich_ok = false;
};

/// Builds the bipartite switching graph between A = {profile P} and
/// B = {P with h_kind decremented} inside H_r(n,m) and checks that the two
/// degree sums agree exactly, plus the min/max-degree ratio sandwich.
inline AuditReport double_count_audit(long n, long r, long m, int kind, ClusterProfile P,
                                      const Budget& budget = {}) {
  detail::kind_of_int(kind);
  int* hp = kind == 1 ? &P.h1 : kind == 2 ? &P.h2 : kind == 3 ? &P.h3 : &P.h4;
  require(*hp >= 1, errc::out_of_range, "profile must have a cluster of the audited kind");
  require(P.other == 0, errc::out_of_range, "audited profiles have no Other clusters");
  ClusterProfile Pdec = P;
  int* hq = kind == 1 ? &Pdec.h1 : kind == 2 ? &Pdec.h2 : kind == 3 ? &Pdec.h3 : &Pdec.h4;
  --*hq;

  BigCount size = count_all(n, r, m);
  require(size <= BigCount(static_cast<unsigned long>(budget.census_cap)), errc::budget_exceeded,
          "audit census size above cap");
  auto table = detail::RSetTable::lex(static_cast<int>(n), static_cast<int>(r),
                                      budget.census_cap);

  detail::SwitchMemo memo;
  AuditReport rep;
  bool a_any = false, b_any = false;

  const int steps = kind == 4 ? 2 : 3;
  const int dels = kind == 4 ? 2 : 3;
  ClusterKind want = detail::kind_of_int(kind);

  smallgrid::for_each_subset(
      table, static_cast<int>(m),
      [&](const std::vector<long>& idx, const std::vector<std::uint64_t>& vm) {
        ClusterProfile prof = smallgrid::profile_of(vm.data(), static_cast<int>(m),
                                                    static_cast<int>(r));
        bool in_a = prof == P;
        bool in_b = prof == Pdec;
        if (!in_a && !in_b) return;

        std::vector<VertexMask> masks(m, VertexMask(static_cast<int>(n)));
        for (long i = 0; i < m; ++i) masks[i].words[0] = vm[i];

        if (in_a) {
          auto cls = clusters_of_masks(static_cast<int>(n), static_cast<int>(r), masks);
          BigCount deg = 0;
          for (const auto& c : cls) {
            if (c.kind != want) continue;
            std::vector<VertexMask> rem;
            for (long i = 0; i < m; ++i)
              if (std::find(c.edge_indices.begin(), c.edge_indices.end(), static_cast<int>(i)) ==
                  c.edge_indices.end())
                rem.push_back(masks[i]);
            deg += detail::count_forward_sequences(static_cast<int>(n), static_cast<int>(r), rem,
                                                   steps, &memo);
          }
          rep.forward_total += deg;
          rep.class_a_size += 1;
          if (!a_any || deg < rep.a_min_deg) rep.a_min_deg = deg;
          if (!a_any || deg > rep.a_max_deg) rep.a_max_deg = deg;
          a_any = true;
        } else {
          // link-free edges among the m masks
          std::vector<int> lf;
          for (long i = 0; i < m; ++i) {
            bool free = true;
            for (long j = 0; j < m && free; ++j)
              if (j != i && __builtin_popcountll(vm[i] & vm[j]) >= 2) free = false;
            if (free) lf.push_back(static_cast<int>(i));
          }
          BigCount deg = 0;
          if (static_cast<int>(lf.size()) >= dels) {
            BigCount orderings = dels == 2 ? 2 : 6;
            std::vector<int> pick;
            std::function<void(std::size_t)> rec = [&](std::size_t from) {
              if (static_cast<int>(pick.size()) == dels) {
                std::vector<VertexMask> rem;
                for (long i = 0; i < m; ++i)
                  if (std::find(pick.begin(), pick.end(), static_cast<int>(i)) == pick.end())
                    rem.push_back(masks[i]);
                deg += orderings * detail::reverse_target_factor(static_cast<int>(n),
                                                                 static_cast<int>(r), rem, kind,
                                                                 &memo);
                return;
              }
              for (std::size_t q = from; q < lf.size(); ++q) {
                pick.push_back(lf[q]);
                rec(q + 1);
                pick.pop_back();
              }
            };
            rec(0);
          }
          rep.reverse_total += deg;
          rep.class_b_size += 1;
          if (!b_any || deg < rep.b_min_deg) rep.b_min_deg = deg;
          if (!b_any || deg > rep.b_max_deg) rep.b_max_deg = deg;
          b_any = true;
        }
      });

  rep.equal = rep.forward_total == rep.reverse_total;
  if (rep.class_a_size > 0 && rep.class_b_size > 0) {
    rep.ratio_observed = to_double(BigRat(rep.class_a_size, rep.class_b_size));
    rep.ratio_lo = rep.a_max_deg > 0 ? to_double(BigRat(rep.b_min_deg, rep.a_max_deg)) : 0.0;
    rep.ratio_hi = rep.a_min_deg > 0
                       ? to_double(BigRat(rep.b_max_deg, rep.a_min_deg))
                       : std::numeric_limits<double>::infinity();
    // |A|/|B| >= dminB/dmaxA and <= dmaxB/dminA, compared exactly
    bool lo_ok = rep.class_a_size * rep.a_max_deg >= rep.b_min_deg * rep.class_b_size;
    bool hi_ok = rep.class_a_size * rep.a_min_deg <= rep.b_max_deg * rep.class_b_size;
    rep.sandwich_ok = lo_ok && hi_ok;
  } else {
    rep.sandwich_ok = rep.forward_total == 0 && rep.reverse_total == 0;
  }
  return rep;
}

}  // namespace linhyp
