#pragma once

#include <cmath>
#include <set>
#include <span>
#include <cstddef>
#include <string>
#include <vector>

#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"
#include "tcherry/junction_tree.hpp"

namespace tcherry {

struct ClusterTerm {
  IndexSet set;
  double information = 0.0;
  double entropy = 0.0;
};

struct SeparatorTerm {
  IndexSet set;
  int nu = 1;
  double information = 0.0;
  double entropy = 0.0;
};

/// Information-content decomposition of a junction tree against a table.
///
/// weight = sum_C I(C) - sum_S (nu_S - 1) I(S). total_information is I of the
/// covered vertices, so kl = total_information - weight is the divergence of
/// the tree pd from the marginal of the table on those vertices (the full
/// joint when the tree covers every variable).
struct ScoreBreakdown {
  double weight = 0.0;
  double total_information = 0.0;
  double kl = 0.0;
  std::vector<ClusterTerm> per_cluster;
  std::vector<SeparatorTerm> per_separator;
};

inline ScoreBreakdown tree_weight(InformationCache& cache, const TCherryJunctionTree& t) {
  const JointTable& p = cache.table();
  p.check_subset(t.covered());
  ScoreBreakdown s;
  CompensatedSum w;
  for (const auto& c : t.clusters()) {
    ClusterTerm term{c, cache.information(c), cache.entropy(c)};
    w.add(term.information);
    s.per_cluster.push_back(std::move(term));
  }
  for (const auto& [sep, nu] : t.nu()) {
    SeparatorTerm term{sep, nu, cache.information(sep), cache.entropy(sep)};
    w.add(-static_cast<double>(nu - 1) * term.information);
    s.per_separator.push_back(std::move(term));
  }
  s.weight = w.value();
  s.total_information = cache.information(t.covered());
  s.kl = s.total_information - s.weight;
  return s;
}

inline ScoreBreakdown tree_weight(const JointTable& p, const TCherryJunctionTree& t) {
  InformationCache cache(p);
  return tree_weight(cache, t);
}

namespace detail {

inline void require_full_cover(const JointTable& p, const TCherryJunctionTree& t) {
  p.check_subset(t.covered());
  if (!t.covers(p.variables())) {
    throw DomainError("tree covers " + t.covered().to_string() + " but the table has " +
                      std::to_string(p.dims()) + " variables");
  }
}

}  // namespace detail

/// -H(X) + sum_C H(C) - sum_S (nu_S - 1) H(S), in bits.
inline double kl_entropy_form(InformationCache& cache, const TCherryJunctionTree& t) {
  detail::require_full_cover(cache.table(), t);
  CompensatedSum kl;
  kl.add(-cache.entropy(cache.table().variables()));
  for (const auto& c : t.clusters()) kl.add(cache.entropy(c));
  for (const auto& [sep, nu] : t.nu()) kl.add(-static_cast<double>(nu - 1) * cache.entropy(sep));
  return kl.value();
}

inline double kl_entropy_form(const JointTable& p, const TCherryJunctionTree& t) {
  InformationCache cache(p);
  return kl_entropy_form(cache, t);
}

/// The junction tree pd prod_C P(x_C) / prod_S P(x_S)^(nu_S - 1) built from
/// the marginals of one table. Marginals are computed once at construction.
class TreeDistribution {
 public:
  TreeDistribution(const JointTable& p, const TCherryJunctionTree& t) : dims_(p.dims()) {
    detail::require_full_cover(p, t);
    for (const auto& c : t.clusters()) clusters_.push_back(marginalize(p, c));
    for (const auto& [sep, nu] : t.nu()) {
      separators_.push_back(marginalize(p, sep));
      exponents_.push_back(nu - 1);
    }
    cards_.reserve(static_cast<std::size_t>(dims_));
    for (const auto& v : p.scheme()) cards_.push_back(v.cardinality);
  }

  /// Probability of a full 1-based state vector.
  double operator()(std::span<const int> x) const {
    if (x.size() != static_cast<std::size_t>(dims_)) {
      throw DomainError("state vector has " + std::to_string(x.size()) + " entries, expected " +
                        std::to_string(dims_));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < 1 || x[i] > cards_[i]) {
        throw DomainError("state " + std::to_string(x[i]) + " of variable " +
                          std::to_string(i + 1) + " is out of range");
      }
    }
    double num = 1.0;
    bool cluster_zero = false;
    std::vector<double> cluster_p(clusters_.size());
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
      cluster_p[i] = lookup(clusters_[i], x);
      if (cluster_p[i] == 0.0) cluster_zero = true;
      num *= cluster_p[i];
    }
    double den = 1.0;
    for (std::size_t i = 0; i < separators_.size(); ++i) {
      const double ps = lookup(separators_[i], x);
      if (ps == 0.0) {
        for (std::size_t c = 0; c < clusters_.size(); ++c) {
          if (separators_[i].subset.is_subset_of(clusters_[c].subset) && cluster_p[c] > 0.0) {
            throw InternalError("separator " + separators_[i].subset.to_string() +
                                " has zero mass under a cluster with positive mass");
          }
        }
        continue;
      }
      den *= std::pow(ps, exponents_[i]);
    }
    if (cluster_zero) return 0.0;
    return num / den;
  }

 private:
  static double lookup(const MarginalTable& m, std::span<const int> x) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < m.subset.size(); ++i) {
      off = off * static_cast<std::size_t>(m.cardinalities[i]) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(m.subset[i] - 1)] - 1);
    }
    return m.probs[off];
  }

  int dims_;
  std::vector<int> cards_;
  std::vector<MarginalTable> clusters_;
  std::vector<MarginalTable> separators_;
  std::vector<int> exponents_;
};

inline double evaluate_tree_pd(const JointTable& p, const TCherryJunctionTree& t,
                               std::span<const int> x) {
  return TreeDistribution(p, t)(x);
}

/// sum_x p(x) log2(p(x) / q(x)) by direct summation over the joint.
inline double kl_exact(const JointTable& p, const TCherryJunctionTree& t) {
  const TreeDistribution q(p, t);
  CompensatedSum kl;
  const auto probs = p.probs();
  for (std::size_t cell = 0; cell < probs.size(); ++cell) {
    if (probs[cell] <= 0.0) continue;
    const auto x = p.cell_states(cell);
    const double qx = q(x);
    if (!(qx > 0.0)) {
      throw InternalError("tree pd assigns zero mass to a cell with positive probability");
    }
    kl.add(probs[cell] * std::log2(probs[cell] / qx));
  }
  return kl.value();
}

// ---------------------------------------------------------------------------
// Greedy-recovery conditions on a puzzle numbering
// ---------------------------------------------------------------------------

/// Comparisons closer than this are reported as ties, not decided.
inline constexpr double kConditionTieTolerance = 1e-12;

/// One evaluated inequality
///   H(X_later) - H(X_later | S) < H(X_earlier) - H(X_earlier | S_earlier).
struct ConditionComparison {
  int earlier = 0;       // i_r
  int later = 0;         // i_s, numbered after i_r
  IndexSet separator;    // S from the pool available when i_r was attached
  IndexSet earlier_separator;  // S_{i_r}
  double later_gain = 0.0;
  double earlier_gain = 0.0;
};

struct ConditionReport {
  IndexSet parent;
  std::size_t comparisons = 0;
  std::vector<ConditionComparison> violations;
  std::vector<ConditionComparison> ties;

  bool holds() const { return violations.empty() && ties.empty(); }
};

/// Evaluates, for every pair of non-parent positions r < s of the numbering
/// and every separator S in the pool at the moment i_r is attached (all
/// (k-1)-subsets of clusters already numbered), whether attaching i_r
/// through its own separator gains strictly more than attaching i_s
/// through S. When all comparisons hold and the numbering starts from the
/// best-scoring cluster, the weight-greedy learner rebuilds the tree.
inline ConditionReport check_recovery_conditions(InformationCache& cache,
                                                 const TCherryJunctionTree& t,
                                                 const PuzzleNumbering& n) {
  if (auto defect = puzzle_numbering_defect(t, n)) {
    throw DomainError("numbering is inconsistent with the tree: " + *defect);
  }
  cache.table().check_subset(t.covered());
  const auto k = static_cast<std::size_t>(t.order());
  const std::size_t d = n.order.size();

  auto gain = [&](int v, const IndexSet& s) {
    // H(v) - H(v | S) = H(v) + H(S) - H(S + v)
    return cache.entropy(IndexSet{v}) + cache.entropy(s) - cache.entropy(s.with(v));
  };

  ConditionReport report;
  report.parent = IndexSet(std::vector<int>(n.order.begin(), n.order.begin() + static_cast<std::ptrdiff_t>(k)));

  std::set<IndexSet> pool;
  for (auto& s : k_subsets(report.parent, k - 1)) pool.insert(std::move(s));

  for (std::size_t r = k; r < d; ++r) {
    const int earlier = n.order[r];
    const IndexSet& own = *n.attachment[r];
    const double earlier_gain = gain(earlier, own);
    for (std::size_t s = r + 1; s < d; ++s) {
      const int later = n.order[s];
      for (const auto& sep : pool) {
        ConditionComparison c{earlier, later, sep, own, gain(later, sep), earlier_gain};
        ++report.comparisons;
        const double diff = c.later_gain - c.earlier_gain;
        if (std::abs(diff) <= kConditionTieTolerance) {
          report.ties.push_back(std::move(c));
        } else if (diff > 0.0) {
          report.violations.push_back(std::move(c));
        }
      }
    }
    for (auto& s : k_subsets(own.with(earlier), k - 1)) pool.insert(std::move(s));
  }
  return report;
}

inline ConditionReport check_recovery_conditions(const JointTable& p,
                                                 const TCherryJunctionTree& t,
                                                 const PuzzleNumbering& n) {
  InformationCache cache(p);
  return check_recovery_conditions(cache, t, n);
}

}  // namespace tcherry
