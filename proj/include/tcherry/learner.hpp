#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"
#include "tcherry/junction_tree.hpp"
#include "tcherry/scoring.hpp"

namespace tcherry {

/// One element of the search space: attach `new_vertex` to `base`.
struct Candidate {
  int new_vertex = 0;
  IndexSet base;     // k-1 vertices
  IndexSet cluster;  // base + new_vertex
  double w = 0.0;      // I(cluster) - I(base)
  double omega = 0.0;  // H(cluster) - H(base)
};

enum class Algorithm { weight_greedy, entropy_greedy, chow_liu, exhaustive };

/// Command-line / JSON tag of an algorithm.
inline std::string_view algorithm_tag(Algorithm a) {
  switch (a) {
    case Algorithm::weight_greedy: return "sk";
    case Algorithm::entropy_greedy: return "malvestuto";
    case Algorithm::chow_liu: return "chow_liu";
    case Algorithm::exhaustive: return "exhaustive";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view tag) {
  for (auto a : {Algorithm::weight_greedy, Algorithm::entropy_greedy, Algorithm::chow_liu,
                 Algorithm::exhaustive}) {
    if (algorithm_tag(a) == tag) return a;
  }
  return std::nullopt;
}

struct TraceStep {
  IndexSet cluster;
  std::optional<IndexSet> separator;  // nullopt for the parent cluster
  double w = 0.0;      // I(parent) for the first step
  double omega = 0.0;  // H(parent) for the first step
};

struct FitResult {
  TCherryJunctionTree tree;
  std::vector<TraceStep> trace;
  ScoreBreakdown score;
  Algorithm algorithm = Algorithm::weight_greedy;
  /// Every candidate, in the order the algorithm scans them.
  std::vector<Candidate> candidate_table;
  /// Positions in candidate_table of accepted candidates, ascending.
  std::vector<std::size_t> accepted;
  /// Running total kept by the algorithm itself: I(parent) + sum w for the
  /// weight greedy, H(parent) + sum omega for the entropy greedy, the
  /// optimized weight for the others.
  double running_total = 0.0;
};

// Tie-breaks: lexicographic on (cluster, base, new_vertex).
inline bool tie_less(const Candidate& a, const Candidate& b) {
  if (a.cluster != b.cluster) return a.cluster < b.cluster;
  if (a.base != b.base) return a.base < b.base;
  return a.new_vertex < b.new_vertex;
}

/// Decreasing w.
inline bool weight_order(const Candidate& a, const Candidate& b) {
  if (a.w != b.w) return a.w > b.w;
  return tie_less(a, b);
}

/// Increasing omega.
inline bool entropy_order(const Candidate& a, const Candidate& b) {
  if (a.omega != b.omega) return a.omega < b.omega;
  return tie_less(a, b);
}

namespace detail {

inline void check_order(const JointTable& p, int k) {
  if (k < 2 || k > p.dims()) {
    throw DomainError("order k must satisfy 2 <= k <= d = " + std::to_string(p.dims()) +
                      ", got " + std::to_string(k));
  }
}

}  // namespace detail

/// Every (k-subset, distinguished vertex) pair: C(d,k) * k candidates,
/// ordered by cluster then vertex.
inline std::vector<Candidate> enumerate_candidates(InformationCache& cache, int k) {
  const JointTable& p = cache.table();
  detail::check_order(p, k);
  std::vector<Candidate> out;
  for (const auto& cluster : k_subsets(p.variables(), static_cast<std::size_t>(k))) {
    const double ic = cache.information(cluster);
    const double hc = cache.entropy(cluster);
    for (int v : cluster) {
      IndexSet base = cluster.without(v);
      const double ib = cache.information(base);
      const double hb = cache.entropy(base);
      out.push_back({v, std::move(base), cluster, ic - ib, hc - hb});
    }
  }
  return out;
}

inline std::vector<Candidate> enumerate_candidates(const JointTable& p, int k) {
  InformationCache cache(p);
  return enumerate_candidates(cache, k);
}

struct ParentCluster {
  IndexSet cluster;
  int best_vertex = 0;  // vertex attaining the maximum
  double score = 0.0;   // max over v of I(K) - I(K - v)
};

/// The k-subset K maximizing max_{v in K} I(K) - I(K - v).
inline ParentCluster find_parent_cluster(InformationCache& cache, int k) {
  auto cands = enumerate_candidates(cache, k);
  const auto best = std::min_element(cands.begin(), cands.end(), weight_order);
  return {best->cluster, best->new_vertex, best->w};
}

inline ParentCluster find_parent_cluster(const JointTable& p, int k) {
  InformationCache cache(p);
  return find_parent_cluster(cache, k);
}

namespace detail {

// Greedy growth shared by both greedy learners. `table` is already in scan
// order; each step rescans from the top and takes the first candidate whose
// vertex is new and whose base lies inside an existing cluster.
inline void grow_greedily(const JointTable& p, FitResult& fit) {
  const IndexSet all = p.variables();
  std::vector<bool> live(fit.candidate_table.size(), true);
  while (!fit.tree.covers(all)) {
    bool grown = false;
    for (std::size_t i = 0; i < fit.candidate_table.size(); ++i) {
      if (!live[i]) continue;
      const Candidate& c = fit.candidate_table[i];
      if (fit.tree.covered().contains(c.new_vertex)) {
        live[i] = false;  // never admissible again
        continue;
      }
      if (!fit.tree.host_of(c.base)) continue;
      fit.tree = add_hypercherry(fit.tree, c.new_vertex, c.base);
      fit.trace.push_back({c.cluster, c.base, c.w, c.omega});
      fit.accepted.push_back(i);
      fit.running_total += fit.algorithm == Algorithm::entropy_greedy ? c.omega : c.w;
      live[i] = false;
      grown = true;
      break;
    }
    if (!grown) throw InternalError("greedy search ran out of admissible candidates");
  }
}

}  // namespace detail

/// Information-content greedy: start from the cluster of the
/// highest-weight candidate, then repeatedly attach the highest-weight
/// admissible candidate.
inline FitResult fit_weight_greedy(InformationCache& cache, int k) {
  const JointTable& p = cache.table();
  FitResult fit;
  fit.algorithm = Algorithm::weight_greedy;
  fit.candidate_table = enumerate_candidates(cache, k);
  std::sort(fit.candidate_table.begin(), fit.candidate_table.end(), weight_order);

  const Candidate& first = fit.candidate_table.front();
  fit.tree = new_parent(k, first.cluster);
  const double i_parent = cache.information(first.cluster);
  fit.trace.push_back({first.cluster, std::nullopt, i_parent, cache.entropy(first.cluster)});
  fit.accepted.push_back(0);
  fit.running_total = i_parent;

  detail::grow_greedily(p, fit);
  fit.score = tree_weight(cache, fit.tree);
  return fit;
}

inline FitResult fit_weight_greedy(const JointTable& p, int k) {
  InformationCache cache(p);
  return fit_weight_greedy(cache, k);
}

/// Entropy greedy: start from the k-subset of least joint entropy, then
/// repeatedly attach the admissible candidate of least omega.
inline FitResult fit_entropy_greedy(InformationCache& cache, int k) {
  const JointTable& p = cache.table();
  FitResult fit;
  fit.algorithm = Algorithm::entropy_greedy;
  fit.candidate_table = enumerate_candidates(cache, k);
  std::sort(fit.candidate_table.begin(), fit.candidate_table.end(), entropy_order);

  std::optional<IndexSet> parent;
  double h_parent = 0.0;
  for (const auto& c : k_subsets(p.variables(), static_cast<std::size_t>(k))) {
    const double h = cache.entropy(c);
    if (!parent || h < h_parent) {
      parent = c;
      h_parent = h;
    }
  }
  fit.tree = new_parent(k, *parent);
  fit.trace.push_back({*parent, std::nullopt, cache.information(*parent), h_parent});
  fit.running_total = h_parent;

  detail::grow_greedily(p, fit);
  fit.score = tree_weight(cache, fit.tree);
  return fit;
}

inline FitResult fit_entropy_greedy(const JointTable& p, int k) {
  InformationCache cache(p);
  return fit_entropy_greedy(cache, k);
}

/// Maximum-weight spanning tree over pairwise mutual information (Kruskal),
/// emitted as a second-order t-cherry junction tree.
inline FitResult fit_chow_liu(InformationCache& cache) {
  const JointTable& p = cache.table();
  if (p.dims() < 2) throw DomainError("a spanning tree needs at least two variables");
  const int d = p.dims();

  struct Edge {
    int u, v;
    double mi;
  };
  std::vector<Edge> edges;
  for (int u = 1; u <= d; ++u) {
    for (int v = u + 1; v <= d; ++v) edges.push_back({u, v, cache.information(IndexSet{u, v})});
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.mi > b.mi; });

  std::vector<int> root(static_cast<std::size_t>(d + 1));
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[static_cast<std::size_t>(x)] != x) {
      root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
      x = root[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<Edge> mst;
  for (const auto& e : edges) {
    const int a = find(e.u), b = find(e.v);
    if (a == b) continue;
    root[static_cast<std::size_t>(a)] = b;
    mst.push_back(e);
  }

  FitResult fit;
  fit.algorithm = Algorithm::chow_liu;
  fit.candidate_table = enumerate_candidates(cache, 2);
  std::sort(fit.candidate_table.begin(), fit.candidate_table.end(), weight_order);

  const IndexSet first{mst.front().u, mst.front().v};
  fit.tree = new_parent(2, first);
  fit.trace.push_back({first, std::nullopt, mst.front().mi, cache.entropy(first)});
  fit.running_total = mst.front().mi;
  std::vector<bool> used(mst.size(), false);
  used[0] = true;
  // Attach the remaining edges in Kruskal order, each as soon as it touches the tree.
  for (std::size_t added = 1; added < mst.size(); ++added) {
    for (std::size_t i = 1; i < mst.size(); ++i) {
      if (used[i]) continue;
      const bool has_u = fit.tree.covered().contains(mst[i].u);
      const bool has_v = fit.tree.covered().contains(mst[i].v);
      if (has_u == has_v) continue;
      const int anchor = has_u ? mst[i].u : mst[i].v;
      const int fresh = has_u ? mst[i].v : mst[i].u;
      const IndexSet sep{anchor};
      fit.tree = add_hypercherry(fit.tree, fresh, sep);
      const IndexSet cluster{anchor, fresh};
      fit.trace.push_back({cluster, sep, mst[i].mi, cache.entropy(cluster) - cache.entropy(sep)});
      fit.running_total += mst[i].mi;
      used[i] = true;
      break;
    }
  }
  fit.score = tree_weight(cache, fit.tree);
  return fit;
}

inline FitResult fit_chow_liu(const JointTable& p) {
  InformationCache cache(p);
  return fit_chow_liu(cache);
}

// ---------------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------------

struct ExhaustiveLimits {
  int max_d = 7;
};

/// Upper bound on the number of growth sequences the search may walk:
/// C(d,k) parents times, per step, (uncovered vertices) x (separator pool).
inline double growth_sequence_bound(int d, int k) {
  double n = static_cast<double>(binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k)));
  for (int j = 1; j <= d - k; ++j) {
    n *= static_cast<double>(d - k - j + 1) * static_cast<double>(k + (j - 1) * (k - 1));
  }
  return n;
}

/// Enumerates every k-th order t-cherry junction tree over all variables
/// (deduplicated by cluster set and separator multiset) and returns one of
/// maximum weight; ties go to the lexicographically smallest cluster set.
inline FitResult fit_exhaustive(InformationCache& cache, int k, const ExhaustiveLimits& limits = {}) {
  const JointTable& p = cache.table();
  detail::check_order(p, k);
  const int d = p.dims();
  if (d > limits.max_d) {
    throw ResourceError("exhaustive search with d = " + std::to_string(d) + ", k = " +
                        std::to_string(k) + " may walk about " +
                        std::to_string(static_cast<long double>(growth_sequence_bound(d, k))) +
                        " growth sequences; the limit is d <= " + std::to_string(limits.max_d));
  }

  using Key = std::pair<std::vector<IndexSet>, std::vector<IndexSet>>;
  auto key_of = [](const TCherryJunctionTree& t) {
    Key key{t.clusters(), {}};
    std::sort(key.first.begin(), key.first.end());
    for (const auto& a : t.attachments()) key.second.push_back(a.separator);
    std::sort(key.second.begin(), key.second.end());
    return key;
  };

  std::map<Key, TCherryJunctionTree> level;
  for (const auto& c : k_subsets(p.variables(), static_cast<std::size_t>(k))) {
    auto t = new_parent(k, c);
    level.emplace(key_of(t), std::move(t));
  }
  for (int step = 0; step < d - k; ++step) {
    std::map<Key, TCherryJunctionTree> next;
    for (const auto& [key, t] : level) {
      const auto pool = eligible_separators(t);
      for (int v = 1; v <= d; ++v) {
        if (t.covered().contains(v)) continue;
        for (const auto& s : pool) {
          auto grown = add_hypercherry(t, v, s);
          auto gk = key_of(grown);
          next.try_emplace(std::move(gk), std::move(grown));
        }
      }
    }
    level = std::move(next);
  }

  const TCherryJunctionTree* best = nullptr;
  ScoreBreakdown best_score;
  for (const auto& [key, t] : level) {
    auto s = tree_weight(cache, t);
    if (!best || s.weight > best_score.weight) {
      best = &t;
      best_score = std::move(s);
    }
  }

  FitResult fit;
  fit.algorithm = Algorithm::exhaustive;
  fit.tree = *best;
  fit.candidate_table = enumerate_candidates(cache, k);
  std::sort(fit.candidate_table.begin(), fit.candidate_table.end(), weight_order);
  const auto& cl = fit.tree.clusters();
  fit.trace.push_back({cl[0], std::nullopt, cache.information(cl[0]), cache.entropy(cl[0])});
  for (std::size_t j = 1; j < cl.size(); ++j) {
    const IndexSet& s = fit.tree.attachments()[j - 1].separator;
    fit.trace.push_back({cl[j], s, cache.information(cl[j]) - cache.information(s),
                         cache.entropy(cl[j]) - cache.entropy(s)});
  }
  fit.score = std::move(best_score);
  fit.running_total = fit.score.weight;
  return fit;
}

inline FitResult fit_exhaustive(const JointTable& p, int k, const ExhaustiveLimits& limits = {}) {
  InformationCache cache(p);
  return fit_exhaustive(cache, k, limits);
}

inline FitResult fit(InformationCache& cache, int k, Algorithm a,
                     const ExhaustiveLimits& limits = {}) {
  switch (a) {
    case Algorithm::weight_greedy: return fit_weight_greedy(cache, k);
    case Algorithm::entropy_greedy: return fit_entropy_greedy(cache, k);
    case Algorithm::chow_liu: return fit_chow_liu(cache);
    case Algorithm::exhaustive: return fit_exhaustive(cache, k, limits);
  }
  throw DomainError("unknown algorithm");
}

}  // namespace tcherry
