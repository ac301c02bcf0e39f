#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <thread>
#include <tuple>
#include <vector>

#include "linhyp/bigint.hpp"
#include "linhyp/clusters.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/hypergraph.hpp"
#include "linhyp/lognumber.hpp"
#include "linhyp/properties.hpp"

namespace linhyp {

struct Budget {
  std::uint64_t dfs_node_cap = 1000000000ULL;  // 10^9
  std::uint64_t census_cap = 100000000ULL;     // 10^8
};

/// Exact C(C(n,r), m).
inline BigCount count_all(long n, long r, long m) {
  require(n >= 1 && r >= 1 && r <= n, errc::out_of_range, "need 1 <= r <= n");
  BigCount N = big_binomial(n, r);
  require(m >= 0 && BigCount(m) <= N, errc::out_of_range, "need 0 <= m <= C(n,r)");
  BigCount out;
  mpz_bin_ui(out.get_mpz_t(), N.get_mpz_t(), m);
  return out;
}

namespace detail {

// 1-based pair index: (min-1)(2n-min)/2 + (max-min) - 1; fixed so goldens are stable.
inline int pair_index(int n, int a, int b) {  // 1-based a < b
  return (a - 1) * (2 * n - a) / 2 + (b - a) - 1;
}

/// All r-subsets of {1..n} in lexicographic order, with vertex masks and
/// pair-occupancy masks.
struct RSetTable {
  int n = 0, r = 0;
  long count = 0;
  int pair_words = 0;
  std::vector<int> verts;                 // count * r, 1-based
  std::vector<std::uint64_t> vmask;       // count (requires n <= 64)
  std::vector<std::uint64_t> pmask;       // count * pair_words

  static RSetTable lex(int n, int r, std::uint64_t table_cap) {
    require(n <= 64, errc::out_of_range, "exhaustive grids need n <= 64");
    RSetTable t;
    t.n = n;
    t.r = r;
    auto nc = binomial_u64(n, r);
    require(nc && *nc <= table_cap, errc::budget_exceeded,
            "C(n,r) too large for exhaustive enumeration");
    t.count = static_cast<long>(*nc);
    t.pair_words = (n * (n - 1) / 2 + 63) / 64;
    t.verts.reserve(t.count * r);
    t.vmask.reserve(t.count);
    t.pmask.assign(static_cast<std::size_t>(t.count) * t.pair_words, 0);
    std::vector<int> cur(r);
    for (int i = 0; i < r; ++i) cur[i] = i + 1;
    long idx = 0;
    while (true) {
      std::uint64_t vm = 0;
      for (int v : cur) {
        t.verts.push_back(v);
        vm |= std::uint64_t(1) << (v - 1);
      }
      t.vmask.push_back(vm);
      std::uint64_t* pw = &t.pmask[static_cast<std::size_t>(idx) * t.pair_words];
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
          int p = pair_index(n, cur[i], cur[j]);
          pw[p >> 6] |= std::uint64_t(1) << (p & 63);
        }
      ++idx;
      int k = r - 1;
      while (k >= 0 && cur[k] == n - (r - 1 - k)) --k;
      if (k < 0) break;
      ++cur[k];
      for (int j = k + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
    }
    return t;
  }

  const std::uint64_t* pairs(long i) const { return &pmask[static_cast<std::size_t>(i) * pair_words]; }
  const int* verts_of(long i) const { return &verts[static_cast<std::size_t>(i) * r]; }
};

inline bool pairs_disjoint(const std::uint64_t* a, const std::uint64_t* b, int words) {
  for (int w = 0; w < words; ++w)
    if (a[w] & b[w]) return false;
  return true;
}

// Rough node estimate from the main asymptotic exponent; used only to refuse
// clearly infeasible requests before the hard in-flight cap takes over.
inline double estimated_linear_nodes(long n, long r, long m) {
  double total = 0;
  double N = to_double(BigRat(big_binomial(n, r)));
  double rr2 = static_cast<double>(r) * (r - 1);
  for (long j = 0; j <= m; ++j) {
    double lnC = std::lgamma(N + 1) - std::lgamma(j + 1) - std::lgamma(N - j + 1);
    double E = -rr2 * rr2 * j * (j - 1.0) / (4.0 * n * n);
    total += std::exp(std::min(700.0, lnC + E));
    if (total > 1e30) break;
  }
  return total;
}

struct LinearDfs {
  const RSetTable& table;
  std::uint64_t node_cap;
  std::atomic<std::uint64_t> nodes{0};

  LinearDfs(const RSetTable& t, std::uint64_t cap) : table(t), node_cap(cap) {}

  unsigned long long run(std::vector<std::uint64_t>& occ, long from, int left) {
    if (left == 0) return 1;
    unsigned long long total = 0;
    for (long i = from; i <= table.count - left; ++i) {
      if (nodes.fetch_add(1, std::memory_order_relaxed) >= node_cap)
        fail(errc::budget_exceeded, "DFS node cap exceeded");
      const std::uint64_t* pw = table.pairs(i);
      if (!pairs_disjoint(occ.data(), pw, table.pair_words)) continue;
      if (left == 1) {
        ++total;
        continue;
      }
      for (int w = 0; w < table.pair_words; ++w) occ[w] |= pw[w];
      total += run(occ, i + 1, left - 1);
      for (int w = 0; w < table.pair_words; ++w) occ[w] &= ~pw[w];
    }
    return total;
  }
};

}  // namespace detail

/// Exact |L_r(n,m)| by depth-first generation of edge lists in increasing
/// lexicographic order over a pair-occupancy mask. Deterministic for any
/// thread count: per-branch counts are summed in first-edge order.
inline BigCount count_linear(long n, long r, long m, const Budget& budget = {}, int threads = 1) {
  require(n >= 1 && r >= 1 && r <= n, errc::out_of_range, "need 1 <= r <= n");
  BigCount N = big_binomial(n, r);
  require(m >= 0 && BigCount(m) <= N, errc::out_of_range, "need 0 <= m <= C(n,r)");
  if (m == 0) return 1;
  if (m == 1) return N;
  require(detail::estimated_linear_nodes(n, r, m) <= 100.0 * budget.dfs_node_cap,
          errc::budget_exceeded, "estimated node count above cap");

  auto table = detail::RSetTable::lex(static_cast<int>(n), static_cast<int>(r),
                                      budget.dfs_node_cap);
  detail::LinearDfs dfs(table, budget.dfs_node_cap);

  const long first_limit = table.count - (m - 1);
  std::vector<unsigned long long> branch(std::max(first_limit, 0L), 0);
  if (threads <= 1) {
    std::vector<std::uint64_t> occ(table.pair_words, 0);
    for (long i = 0; i < first_limit; ++i) {
      const std::uint64_t* pw = table.pairs(i);
      for (int w = 0; w < table.pair_words; ++w) occ[w] = pw[w];
      branch[i] = dfs.run(occ, i + 1, static_cast<int>(m) - 1);
    }
  } else {
    std::atomic<long> next{0};
    auto worker = [&]() {
      std::vector<std::uint64_t> occ(table.pair_words, 0);
      while (true) {
        long i = next.fetch_add(1);
        if (i >= first_limit) return;
        const std::uint64_t* pw = table.pairs(i);
        for (int w = 0; w < table.pair_words; ++w) occ[w] = pw[w];
        branch[i] = dfs.run(occ, i + 1, static_cast<int>(m) - 1);
      }
    };
    std::vector<std::future<void>> futs;
    for (int t = 0; t < threads; ++t) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
  }
  BigCount total(0);
  for (long i = 0; i < first_limit; ++i) total += big_from_u64(branch[i]);
  return total;
}

/// Exact number of H in L_r(n,m) with K subseteq H: the DFS is seeded with
/// K's pair mask and generates only the m-k non-K edges in increasing order.
inline BigCount count_linear_containing(long n, long r, long m, const Hypergraph& K,
                                        const Budget& budget = {}) {
  require(K.n() == n && K.r() == r, errc::out_of_range, "K must live on the same (n, r)");
  require(K.is_linear(), errc::not_linear_k, "K is not linear");
  const long k = K.m();
  require(k <= m, errc::out_of_range, "need |K| <= m");
  require(detail::estimated_linear_nodes(n, r, m) <= 100.0 * budget.dfs_node_cap,
          errc::budget_exceeded, "estimated node count above cap");
  if (k == m) return 1;

  auto table = detail::RSetTable::lex(static_cast<int>(n), static_cast<int>(r),
                                      budget.dfs_node_cap);
  std::vector<std::uint64_t> occ(table.pair_words, 0);
  std::vector<char> is_k(table.count, 0);
  for (const auto& e : K.edges_1based()) {
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = i + 1; j < e.size(); ++j) {
        int p = detail::pair_index(static_cast<int>(n), e[i], e[j]);
        occ[p >> 6] |= std::uint64_t(1) << (p & 63);
      }
    // locate K's edge index to exclude it from generation
    long lo = 0, hi = table.count - 1, pos = -1;
    while (lo <= hi) {
      long mid = (lo + hi) / 2;
      const int* tv = table.verts_of(mid);
      int cmp = 0;
      for (int q = 0; q < r && !cmp; ++q) cmp = (tv[q] > e[q]) - (tv[q] < e[q]);
      if (cmp == 0) {
        pos = mid;
        break;
      }
      (cmp < 0 ? lo : hi) = (cmp < 0 ? mid + 1 : mid - 1);
    }
    if (pos >= 0) is_k[pos] = 1;
  }

  std::uint64_t nodes = 0;
  std::function<unsigned long long(long, int)> rec = [&](long from, int left) -> unsigned long long {
    if (left == 0) return 1;
    unsigned long long total = 0;
    for (long i = from; i < table.count; ++i) {
      if (is_k[i]) continue;
      if (++nodes >= budget.dfs_node_cap) fail(errc::budget_exceeded, "DFS node cap exceeded");
      const std::uint64_t* pw = table.pairs(i);
      if (!detail::pairs_disjoint(occ.data(), pw, table.pair_words)) continue;
      if (left == 1) {
        ++total;
        continue;
      }
      for (int w = 0; w < table.pair_words; ++w) occ[w] |= pw[w];
      total += rec(i + 1, left - 1);
      for (int w = 0; w < table.pair_words; ++w) occ[w] &= ~pw[w];
    }
    return total;
  };
  return big_from_u64(rec(0, static_cast<int>(m - k)));
}

// ---------------------------------------------------------------------------
// Exhaustive census

struct CensusKey {
  ClusterProfile profile;
  bool in_plus = false;
  bool in_plusplus = false;

  bool operator<(const CensusKey& o) const {
    auto t = std::tie(profile.h1, profile.h2, profile.h3, profile.h4, profile.other, in_plus,
                      in_plusplus);
    auto u = std::tie(o.profile.h1, o.profile.h2, o.profile.h3, o.profile.h4, o.profile.other,
                      o.in_plus, o.in_plusplus);
    return t < u;
  }
};

struct CensusTable {
  std::map<CensusKey, BigCount> buckets;
  BigCount total = 0;

  BigCount count_with_profile(const ClusterProfile& p) const {
    BigCount c = 0;
    for (const auto& [k, v] : buckets)
      if (k.profile == p) c += v;
    return c;
  }
};

namespace smallgrid {

/// Cluster profile over single-word vertex masks (n <= 64). Mirrors
/// clusters(); the equivalence is pinned by tests on random instances.
inline ClusterProfile profile_of(const std::uint64_t* vm, int m, int r) {
  int parent[64];
  for (int i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int inter[64][64];
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      int s = __builtin_popcountll(vm[i] & vm[j]);
      inter[i][j] = inter[j][i] = s;
      if (s >= 2) parent[find(i)] = find(j);
    }
  ClusterProfile p;
  int compsize[64] = {0};
  int members[64][8];
  for (int i = 0; i < m; ++i) {
    int rt = find(i);
    if (compsize[rt] < 8) members[rt][compsize[rt]] = i;
    ++compsize[rt];
  }
  for (int rt = 0; rt < m; ++rt) {
    int sz = compsize[rt];
    if (sz < 2) continue;
    if (sz > 3) {
      ++p.other;
      continue;
    }
    bool big = false;
    for (int x = 0; x < sz && !big; ++x)
      for (int y = x + 1; y < sz; ++y)
        if (inter[members[rt][x]][members[rt][y]] >= 3) big = true;
    if (big) {
      ++p.other;
      continue;
    }
    if (sz == 2) {
      ++p.h4;
      continue;
    }
    int a = members[rt][0], b = members[rt][1], c = members[rt][2];
    std::uint64_t span = vm[a] | vm[b] | vm[c];
    if (__builtin_popcountll(span) != 3 * r - 4) {
      ++p.other;
      continue;
    }
    int sig[3] = {inter[a][b], inter[b][c], inter[a][c]};
    std::sort(sig, sig + 3);
    if (sig[0] == 0 && sig[1] == 2 && sig[2] == 2) {
      ++p.h1;
    } else if (sig[0] == 1 && sig[1] == 2 && sig[2] == 2) {
      ++p.h2;
    } else if (sig[0] == 2) {
      std::uint64_t pab = vm[a] & vm[b], pbc = vm[b] & vm[c];
      if (pab == pbc)
        ++p.h3;
      else
        ++p.other;
    } else {
      ++p.other;
    }
  }
  return p;
}

struct Membership {
  bool in_plus = false;
  bool in_plusplus = false;
};

/// Plus/plusplus membership on single-word masks; mirrors property_report.
inline Membership membership_of(const std::uint64_t* vm, int m, int n, int r, Regime reg,
                                const ThresholdSet& th, const ClusterProfile& prof) {
  Membership out;
  bool a = true;
  for (int i = 0; i < m && a; ++i)
    for (int j = i + 1; j < m; ++j)
      if (__builtin_popcountll(vm[i] & vm[j]) > 2) {
        a = false;
        break;
      }
  if (!a) return out;

  // recompute component spans for the cluster-level checks
  int parent[64];
  for (int i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (__builtin_popcountll(vm[i] & vm[j]) >= 2) parent[find(i)] = find(j);
  std::uint64_t span[64];
  int szs[64] = {0};
  for (int i = 0; i < m; ++i) span[i] = 0;
  for (int i = 0; i < m; ++i) {
    span[find(i)] |= vm[i];
    ++szs[find(i)];
  }
  std::uint64_t cspans[64];
  ClusterKind ckind[64];
  int nc = 0;
  {
    // classify each component again (cheap; m is small on census grids)
    int members[64][8];
    int cnt[64] = {0};
    for (int i = 0; i < m; ++i) {
      int rt = find(i);
      if (cnt[rt] < 8) members[rt][cnt[rt]] = i;
      ++cnt[rt];
    }
    for (int rt = 0; rt < m; ++rt) {
      if (cnt[rt] < 2) continue;
      std::uint64_t one[8];
      for (int x = 0; x < std::min(cnt[rt], 8); ++x) one[x] = vm[members[rt][x]];
      ClusterProfile sub = profile_of(one, std::min(cnt[rt], 8), r);
      ClusterKind k = ClusterKind::other;
      if (cnt[rt] <= 3) {
        if (sub.h1) k = ClusterKind::type1;
        else if (sub.h2) k = ClusterKind::type2;
        else if (sub.h3) k = ClusterKind::type3;
        else if (sub.h4) k = ClusterKind::type4;
      }
      cspans[nc] = span[rt];
      ckind[nc] = k;
      ++nc;
    }
  }

  bool b, c, d, e = true, fcap = true;
  int maxdeg = 0;
  for (int v = 0; v < n; ++v) {
    std::uint64_t bit = std::uint64_t(1) << v;
    int dg = 0;
    for (int i = 0; i < m; ++i) dg += (vm[i] & bit) ? 1 : 0;
    maxdeg = std::max(maxdeg, dg);
  }

  if (reg == Regime::dense) {
    b = prof.other == 0;
    c = true;
    for (int x = 0; x < nc && c; ++x)
      for (int y = x + 1; y < nc; ++y)
        if (__builtin_popcountll(cspans[x] & cspans[y]) > 1) c = false;
    d = true;
    for (int x = 0; x < nc && d; ++x)
      for (int y = x + 1; y < nc && d; ++y)
        for (int z = y + 1; z < nc; ++z) {
          auto is123 = [&](int q) {
            return ckind[q] == ClusterKind::type1 || ckind[q] == ClusterKind::type2 ||
                   ckind[q] == ClusterKind::type3;
          };
          if (!is123(x) || !is123(y) || !is123(z)) continue;
          if (__builtin_popcountll(cspans[x] | cspans[y] | cspans[z]) < 9 * r - 13) {
            d = false;
            break;
          }
        }
    e = true;
    for (int x = 0; x < nc && e; ++x)
      for (int y = x + 1; y < nc && e; ++y)
        for (int z = y + 1; z < nc; ++z) {
          if (ckind[x] != ClusterKind::type4 || ckind[y] != ClusterKind::type4 ||
              ckind[z] != ClusterKind::type4)
            continue;
          if (__builtin_popcountll(cspans[x] | cspans[y] | cspans[z]) < 6 * r - 8) {
            e = false;
            break;
          }
        }
    fcap = prof.h1 <= th.m1 && prof.h2 <= th.m2 && prof.h3 <= th.m3 && prof.h4 <= th.m4;
    out.in_plus = b && c && d && e && fcap && maxdeg <= th.m0_cap;
    out.in_plusplus = b && c && d && e && fcap && maxdeg <= th.m0_star;
  } else {
    b = prof.other == 0 && prof.h1 == 0 && prof.h2 == 0 && prof.h3 == 0;
    c = true;
    for (int x = 0; x < nc && c; ++x)
      for (int y = x + 1; y < nc; ++y)
        if (ckind[x] == ClusterKind::type4 && ckind[y] == ClusterKind::type4 &&
            (cspans[x] & cspans[y]))
          c = false;
    d = prof.h4 <= th.m4;
    if (reg == Regime::mid) {
      out.in_plus = b && c && d && maxdeg <= th.m0_cap;
      out.in_plusplus = b && c && d && maxdeg <= th.m0_star;
    } else {
      out.in_plus = b && c && d;
      out.in_plusplus = out.in_plus;
    }
  }
  return out;
}

/// Iterates every m-subset of the r-set table, calling fn(indices, masks).
template <typename Fn>
inline void for_each_subset(const detail::RSetTable& table, int m, Fn&& fn) {
  std::vector<long> idx(m);
  std::vector<std::uint64_t> vm(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  if (m == 0) {
    fn(idx, vm);
    return;
  }
  if (table.count < m) return;
  while (true) {
    for (int i = 0; i < m; ++i) vm[i] = table.vmask[idx[i]];
    fn(idx, vm);
    int k = m - 1;
    while (k >= 0 && idx[k] == table.count - (m - k)) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace smallgrid

/// Iterates every m-subset of r-sets, tallying exact counts per
/// (profile, in_plus, in_plusplus) bucket.
inline CensusTable profile_census(long n, long r, long m, Regime reg, const ThresholdSet& th,
                                  const Budget& budget = {}) {
  require(th.consistent_with(reg), errc::regime_mismatch, "thresholds inconsistent with regime");
  BigCount size = count_all(n, r, m);
  require(size <= BigCount(static_cast<unsigned long>(budget.census_cap)), errc::budget_exceeded,
          "census size " + to_string(size) + " above cap");
  auto table = detail::RSetTable::lex(static_cast<int>(n), static_cast<int>(r),
                                      budget.census_cap);
  CensusTable out;
  std::map<CensusKey, unsigned long long> raw;
  smallgrid::for_each_subset(table, static_cast<int>(m),
                             [&](const std::vector<long>&, const std::vector<std::uint64_t>& vm) {
                               ClusterProfile p = smallgrid::profile_of(vm.data(),
                                                                        static_cast<int>(m),
                                                                        static_cast<int>(r));
                               auto mem = smallgrid::membership_of(vm.data(), static_cast<int>(m),
                                                                   static_cast<int>(n),
                                                                   static_cast<int>(r), reg, th, p);
                               ++raw[CensusKey{p, mem.in_plus, mem.in_plusplus}];
                             });
  for (const auto& [k, v] : raw) {
    out.buckets[k] = big_from_u64(v);
    out.total += out.buckets[k];
  }
  return out;
}

/// Exact-count evaluation of P[H_r(n,p) linear] = sum_m |L_r(n,m)| p^m q^(N-m).
/// When the full L-vector is unaffordable the sum is truncated and the tail
/// certified by the Chernoff bound.
struct BinomialLinearity {
  double probability = 0;
  bool truncated = false;
  long m_cut = 0;         // largest m included
  double tail_bound = 0;  // certified bound on the omitted mass
};

inline BinomialLinearity exact_binomial_linearity(long n, long r, double p,
                                                  const Budget& budget = {}) {
  require(p >= 0.0 && p <= 1.0, errc::out_of_range, "need 0 <= p <= 1");
  BigCount Nbig = big_binomial(n, r);
  require(Nbig <= BigCount(static_cast<unsigned long>(1) << 62), errc::budget_exceeded,
          "C(n,r) too large");
  long N = static_cast<long>(Nbig.get_si());
  BinomialLinearity out;
  if (p == 0.0) {
    out.probability = 1.0;
    out.m_cut = 0;
    return out;
  }
  double lnp = std::log(p);
  double lnq = p < 1.0 ? std::log1p(-p) : -std::numeric_limits<double>::infinity();

  KahanSum acc;
  long m = 0;
  for (; m <= N; ++m) {
    if (detail::estimated_linear_nodes(n, r, m) > 100.0 * budget.dfs_node_cap) break;
    BigCount L = count_linear(n, r, m, budget);
    if (L == 0) {
      m = N + 1;  // all larger m are zero as well
      break;
    }
    double ln_term = ln_big(L) + m * lnp + (N - m) * (p < 1.0 ? lnq : 0.0);
    if (p == 1.0 && m < N) ln_term = -std::numeric_limits<double>::infinity();
    acc.add(std::exp(ln_term));
  }
  out.probability = acc.value();
  if (m <= N) {
    out.truncated = true;
    out.m_cut = m - 1;
    double Np = N * p;
    double t = static_cast<double>(out.m_cut) - Np;
    require(t > 0 && t <= Np, errc::budget_exceeded,
            "cannot certify truncation tail: m_cut too close to N*p");
    out.tail_bound = 2.0 * std::exp(-t * t / (3.0 * Np));
  } else {
    out.m_cut = m - 1;
  }
  return out;
}

}  // namespace linhyp
