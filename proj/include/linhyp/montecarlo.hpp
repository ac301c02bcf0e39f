#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <thread>
#include <vector>

#include "linhyp/asymptotics.hpp"
#include "linhyp/clusters.hpp"
#include "linhyp/errors.hpp"
#include "linhyp/hypergraph.hpp"
#include "linhyp/properties.hpp"
#include "linhyp/rng.hpp"

namespace linhyp {

/// Monte Carlo point estimate. ci95 is point +/- 1.96 stderr, switching to a
/// Wilson interval when the Bernoulli estimate sits at 0 or 1.
struct Estimate {
  double point = 0;
  double stderr_ = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  long trials = 0;
  long successes = -1;  // -1 when not a Bernoulli estimate
  std::uint64_t seed = 0;
};

inline Estimate bernoulli_estimate(long successes, long trials, std::uint64_t seed) {
  require(trials >= 1, errc::zero_trials, "need trials >= 1");
  Estimate e;
  e.trials = trials;
  e.successes = successes;
  e.seed = seed;
  double p = static_cast<double>(successes) / trials;
  e.point = p;
  e.stderr_ = std::sqrt(p * (1 - p) / trials);
  if (successes == 0 || successes == trials) {
    const double z = 1.96, z2 = z * z;
    double n = trials;
    double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    e.ci_lo = center - half;
    e.ci_hi = center + half;
  } else {
    e.ci_lo = p - 1.96 * e.stderr_;
    e.ci_hi = p + 1.96 * e.stderr_;
  }
  return e;
}

namespace detail {

struct TrialWorkspace {
  ColexUnranker unranker;
  ScratchSet seen;
  std::vector<std::uint64_t> ranks;
  std::vector<int> verts;                 // r ints per edge, 0-based
  std::vector<std::uint32_t> pair_stamp;  // epoch per pair index
  std::uint32_t epoch = 0;
  int n, r;

  TrialWorkspace(int n_, int r_)
      : unranker(n_, r_), seen(1 << 12), n(n_), r(r_) {
    pair_stamp.assign(static_cast<std::size_t>(n) * (n - 1) / 2, 0);
  }

  static int pair_idx(int n, int a0, int b0) {  // 0-based a0 < b0
    return a0 * (2 * n - a0 - 1) / 2 + (b0 - a0) - 1;
  }

  /// Samples m distinct edges; fills verts with m*r 0-based vertices.
  void sample_fixed(long m, CounterRng& rng) {
    sample_distinct_ranks(unranker.count(), m, rng, seen, ranks);
    verts.resize(static_cast<std::size_t>(m) * r);
    for (long i = 0; i < m; ++i) unranker.unrank(ranks[i], &verts[i * r]);
  }

  /// Samples Bin-model edges by geometric skips; returns edge count.
  long sample_binomial(double p, CounterRng& rng) {
    ranks.clear();
    if (p <= 0.0) {
      verts.clear();
      return 0;
    }
    const std::uint64_t N = unranker.count();
    if (p >= 1.0) {
      for (std::uint64_t k = 0; k < N; ++k) ranks.push_back(k);
    } else {
      const double denom = std::log1p(-p);
      double pos = -1;
      for (;;) {
        double u = rng.uniform01();
        double skip = std::floor(std::log1p(-u) / denom);
        pos += 1.0 + skip;
        if (pos >= static_cast<double>(N)) break;
        ranks.push_back(static_cast<std::uint64_t>(pos));
      }
    }
    long m = static_cast<long>(ranks.size());
    verts.resize(static_cast<std::size_t>(m) * r);
    for (long i = 0; i < m; ++i) unranker.unrank(ranks[i], &verts[i * r]);
    return m;
  }

  /// Incremental pair-occupancy linearity check, O(m r^2).
  bool edges_linear(long m) {
    ++epoch;
    for (long i = 0; i < m; ++i) {
      const int* e = &verts[i * r];
      for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b) {
          int p = pair_idx(n, e[a], e[b]);
          if (pair_stamp[p] == epoch) return false;
          pair_stamp[p] = epoch;
        }
    }
    return true;
  }

  Hypergraph to_hypergraph(long m) const {
    std::vector<std::vector<int>> edges(m);
    for (long i = 0; i < m; ++i) {
      edges[i].reserve(r);
      for (int q = 0; q < r; ++q) edges[i].push_back(verts[i * r + q] + 1);
    }
    return Hypergraph::build(n, r, edges);
  }
};

/// Deterministic parallel trial loop: per-trial RNG streams come from
/// (seed, trial index) and per-worker tallies are merged with integer adds.
template <typename Tally, typename PerTrial>
inline Tally run_trials(long trials, std::uint64_t seed, int threads, int n, int r,
                        PerTrial&& per_trial) {
  require(trials >= 1, errc::zero_trials, "need trials >= 1");
  threads = std::max(1, threads);
  if (threads == 1) {
    Tally t{};
    TrialWorkspace ws(n, r);
    for (long i = 0; i < trials; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      per_trial(ws, rng, t);
    }
    return t;
  }
  std::vector<Tally> parts(threads);
  std::atomic<long> next{0};
  const long chunk = 1024;
  auto worker = [&](int w) {
    TrialWorkspace ws(n, r);
    for (;;) {
      long lo = next.fetch_add(chunk);
      if (lo >= trials) return;
      long hi = std::min(trials, lo + chunk);
      for (long i = lo; i < hi; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        per_trial(ws, rng, parts[w]);
      }
    }
  };
  std::vector<std::future<void>> futs;
  for (int w = 0; w < threads; ++w)
    futs.push_back(std::async(std::launch::async, worker, w));
  for (auto& f : futs) f.get();
  Tally total{};
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/// Uniform element of H_r(n,m): Floyd-sampled distinct colex ranks, unranked.
inline Hypergraph sample_fixed(int n, int r, long m, std::uint64_t seed, std::uint64_t stream = 0) {
  detail::TrialWorkspace ws(n, r);
  require(m >= 0 && static_cast<std::uint64_t>(m) <= ws.unranker.count(), errc::out_of_range,
          "need 0 <= m <= C(n,r)");
  CounterRng rng(seed, stream);
  if (m == 0) return Hypergraph::build(n, r, {});
  ws.sample_fixed(m, rng);
  return ws.to_hypergraph(m);
}

/// H_r(n,p): each rank included independently with probability p.
inline Hypergraph sample_binomial(int n, int r, double p, std::uint64_t seed,
                                  std::uint64_t stream = 0) {
  require(p >= 0.0 && p <= 1.0, errc::out_of_range, "need 0 <= p <= 1");
  detail::TrialWorkspace ws(n, r);
  CounterRng rng(seed, stream);
  long m = ws.sample_binomial(p, rng);
  return ws.to_hypergraph(m);
}

namespace detail {

struct CountTally {
  long long hits = 0;
  void merge(const CountTally& o) { hits += o.hits; }
};

}  // namespace detail

/// Bernoulli estimate of P[H_r(n,m) linear].
inline Estimate estimate_linearity_fixed(int n, int r, long m, long trials, std::uint64_t seed,
                                         int threads = 1) {
  detail::TrialWorkspace probe(n, r);
  require(m >= 0 && static_cast<std::uint64_t>(m) <= probe.unranker.count(), errc::out_of_range,
          "need 0 <= m <= C(n,r)");
  auto tally = detail::run_trials<detail::CountTally>(
      trials, seed, threads, n, r, [&](detail::TrialWorkspace& ws, CounterRng& rng, auto& t) {
        if (m <= 1) {
          ++t.hits;
          return;
        }
        ws.sample_fixed(m, rng);
        if (ws.edges_linear(m)) ++t.hits;
      });
  return bernoulli_estimate(tally.hits, trials, seed);
}

/// Bernoulli estimate of P[H_r(n,p) linear].
inline Estimate estimate_linearity_binomial(int n, int r, double p, long trials,
                                            std::uint64_t seed, int threads = 1) {
  require(p >= 0.0 && p <= 1.0, errc::out_of_range, "need 0 <= p <= 1");
  auto tally = detail::run_trials<detail::CountTally>(
      trials, seed, threads, n, r, [&](detail::TrialWorkspace& ws, CounterRng& rng, auto& t) {
        long m = ws.sample_binomial(p, rng);
        if (m <= 1 || ws.edges_linear(m)) ++t.hits;
      });
  return bernoulli_estimate(tally.hits, trials, seed);
}

struct ProfileKey {
  int h1 = 0, h2 = 0, h3 = 0, h4 = 0, other = 0;
  bool operator<(const ProfileKey& o) const {
    return std::tie(h1, h2, h3, h4, other) < std::tie(o.h1, o.h2, o.h3, o.h4, o.other);
  }
};

struct ProfileDistribution {
  std::map<ProfileKey, Estimate> profiles;
  Estimate plus_fraction;
  Estimate plusplus_fraction;
};

/// Empirical distribution of cluster profiles and class-membership fractions
/// for uniform H_r(n,m).
inline ProfileDistribution estimate_profile_distribution(int n, int r, long m, long trials,
                                                         std::uint64_t seed, Regime regime,
                                                         int threads = 1) {
  ThresholdSet th = ThresholdSet::for_regime(regime, n, r, m);
  struct Tally {
    std::map<ProfileKey, long long> counts;
    long long plus = 0, plusplus = 0;
    void merge(const Tally& o) {
      for (const auto& [k, v] : o.counts) counts[k] += v;
      plus += o.plus;
      plusplus += o.plusplus;
    }
  };
  auto tally = detail::run_trials<Tally>(
      trials, seed, threads, n, r, [&](detail::TrialWorkspace& ws, CounterRng& rng, Tally& t) {
        ws.sample_fixed(m, rng);
        Hypergraph h = ws.to_hypergraph(m);
        ClusterProfile p = cluster_profile(h);
        auto rep = property_report(h, regime, th);
        ++t.counts[ProfileKey{p.h1, p.h2, p.h3, p.h4, p.other}];
        t.plus += rep.in_plus ? 1 : 0;
        t.plusplus += rep.in_plusplus ? 1 : 0;
      });
  ProfileDistribution out;
  for (const auto& [k, v] : tally.counts) out.profiles[k] = bernoulli_estimate(v, trials, seed);
  out.plus_fraction = bernoulli_estimate(tally.plus, trials, seed);
  out.plusplus_fraction = bernoulli_estimate(tally.plusplus, trials, seed);
  return out;
}

struct ConditionalMoments {
  Estimate mean;
  Estimate variance;
  double acceptance_rate = 0;
  long accepted = 0;
};

/// Rejection-samples H_r(n,p) keeping linear draws; returns sample moments of
/// the accepted edge counts. Accumulators are exact integers, so results are
/// identical for any worker count.
inline ConditionalMoments estimate_conditional_moments(int n, int r, double p, long trials,
                                                       std::uint64_t seed, int threads = 1,
                                                       double min_predicted_acceptance = 1e-4) {
  auto predicted = theorem13_log_prob(n, r, p);
  require(std::exp(predicted.ln_prob) >= min_predicted_acceptance, errc::acceptance_too_low,
          "predicted linearity probability below guard");
  struct Tally {
    long long accepted = 0;
    unsigned long long sum = 0;
    unsigned long long sum_sq = 0;
    void merge(const Tally& o) {
      accepted += o.accepted;
      sum += o.sum;
      sum_sq += o.sum_sq;
    }
  };
  auto tally = detail::run_trials<Tally>(
      trials, seed, threads, n, r, [&](detail::TrialWorkspace& ws, CounterRng& rng, Tally& t) {
        long m = ws.sample_binomial(p, rng);
        if (m > 1 && !ws.edges_linear(m)) return;
        ++t.accepted;
        t.sum += static_cast<unsigned long long>(m);
        t.sum_sq += static_cast<unsigned long long>(m) * static_cast<unsigned long long>(m);
      });
  require(tally.accepted >= 2, errc::acceptance_too_low, "fewer than two accepted samples");
  ConditionalMoments out;
  out.accepted = tally.accepted;
  out.acceptance_rate = static_cast<double>(tally.accepted) / trials;
  double k = static_cast<double>(tally.accepted);
  double mean = static_cast<double>(tally.sum) / k;
  double var = (static_cast<double>(tally.sum_sq) - k * mean * mean) / (k - 1);
  out.mean.point = mean;
  out.mean.stderr_ = std::sqrt(var / k);
  out.mean.ci_lo = mean - 1.96 * out.mean.stderr_;
  out.mean.ci_hi = mean + 1.96 * out.mean.stderr_;
  out.mean.trials = tally.accepted;
  out.mean.seed = seed;
  out.variance.point = var;
  out.variance.stderr_ = var * std::sqrt(2.0 / (k - 1));
  out.variance.ci_lo = var - 1.96 * out.variance.stderr_;
  out.variance.ci_hi = var + 1.96 * out.variance.stderr_;
  out.variance.trials = tally.accepted;
  out.variance.seed = seed;
  return out;
}

/// Frequency of K subseteq H among linear H_r(n,m) rejection samples.
inline Estimate estimate_containment(int n, int r, long m, const Hypergraph& K, long trials,
                                     std::uint64_t seed, int threads = 1,
                                     double min_predicted_acceptance = 1e-4) {
  require(K.is_linear(), errc::not_linear_k, "K is not linear");
  require(K.n() == n && K.r() == r, errc::out_of_range, "K must live on the same (n, r)");
  auto predicted = theorem11_log_count(n, r, m, CountForm::binomial);
  require(std::exp(predicted.exponent) >= min_predicted_acceptance, errc::acceptance_too_low,
          "predicted linearity probability below guard");
  if (K.m() == 0) {
    Estimate e = bernoulli_estimate(1, 1, seed);
    e.trials = trials;
    e.successes = trials;
    e.point = 1.0;
    e.stderr_ = 0.0;
    e.ci_lo = e.ci_hi = 1.0;
    return e;
  }
  std::vector<std::uint64_t> k_ranks;
  {
    detail::TrialWorkspace probe(n, r);
    std::vector<int> v0(r);
    for (const auto& e : K.edges()) {
      for (int q = 0; q < r; ++q) v0[q] = e.verts[q];
      k_ranks.push_back(probe.unranker.rank(v0.data()));
    }
  }
  struct Tally {
    long long accepted = 0;
    long long contains = 0;
    void merge(const Tally& o) {
      accepted += o.accepted;
      contains += o.contains;
    }
  };
  auto tally = detail::run_trials<Tally>(
      trials, seed, threads, n, r, [&](detail::TrialWorkspace& ws, CounterRng& rng, Tally& t) {
        ws.sample_fixed(m, rng);
        if (m > 1 && !ws.edges_linear(m)) return;
        ++t.accepted;
        for (std::uint64_t kr : k_ranks) {
          bool found = false;
          for (const auto& rk : ws.ranks)
            if (rk == kr) {
              found = true;
              break;
            }
          if (!found) return;
        }
        ++t.contains;
      });
  require(tally.accepted >= 1, errc::acceptance_too_low, "no accepted linear samples");
  Estimate e = bernoulli_estimate(tally.contains, tally.accepted, seed);
  return e;
}

}  // namespace linhyp
