#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"
#include "tcherry/junction_tree.hpp"

namespace tcherry {

/// Link strength of the j-th factor (j = 0 is the parent cluster):
/// initial * decay^j. Strength 0 makes a factor uniform.
struct StrengthSchedule {
  double initial = 2.0;
  double decay = 1.0;

  double at(std::size_t j) const { return initial * std::pow(decay, static_cast<double>(j)); }
};

struct SyntheticModel {
  JointTable table;
  TCherryJunctionTree tree;
};

namespace detail {

// Softmax of strength * (uniform(-1,1) logits).
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double strength) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = strength * u(rng);
  const double top = *std::max_element(out.begin(), out.end());
  double z = 0.0;
  for (auto& x : out) {
    x = std::exp(x - top);
    z += x;
  }
  for (auto& x : out) x /= z;
  return out;
}

}  // namespace detail

/// Draws a random k-th order t-cherry junction tree over d variables and a
/// joint distribution that factorizes exactly over it: a random parent
/// cluster marginal times, for each later cluster, a random conditional of
/// the new vertex given its separator.
inline SyntheticModel generate_tcherry_distribution(std::uint64_t seed, int d, int k,
                                                    std::vector<int> cardinalities,
                                                    const StrengthSchedule& strength,
                                                    std::uint64_t cap = kDefaultCellCap) {
  if (k < 2 || k > d) {
    throw DomainError("order k must satisfy 2 <= k <= d, got k = " + std::to_string(k) +
                      ", d = " + std::to_string(d));
  }
  if (cardinalities.size() == 1) cardinalities.assign(static_cast<std::size_t>(d), cardinalities[0]);
  if (cardinalities.size() != static_cast<std::size_t>(d)) {
    throw DomainError("expected 1 or " + std::to_string(d) + " cardinalities");
  }
  if (strength.initial < 0.0 || strength.decay < 0.0) {
    throw DomainError("link strengths must be non-negative");
  }
  Scheme scheme = make_scheme(cardinalities);
  validate_scheme(scheme, cap);

  std::mt19937_64 rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto tree = new_parent(k, IndexSet(std::vector<int>(perm.begin(), perm.begin() + k)));
  for (std::size_t j = static_cast<std::size_t>(k); j < perm.size(); ++j) {
    std::uniform_int_distribution<std::size_t> pick_cluster(0, tree.clusters().size() - 1);
    const IndexSet& host = tree.clusters()[pick_cluster(rng)];
    std::uniform_int_distribution<std::size_t> pick_drop(0, host.size() - 1);
    const IndexSet sep = host.without(host[pick_drop(rng)]);
    tree = add_hypercherry(tree, perm[j], sep);
  }

  // Factor tables over the product space of their ordered vertex sets.
  auto card_of = [&](int v) { return cardinalities[static_cast<std::size_t>(v - 1)]; };
  auto size_of = [&](const IndexSet& s) {
    std::size_t n = 1;
    for (int v : s) n *= static_cast<std::size_t>(card_of(v));
    return n;
  };

  const IndexSet& parent = tree.parent();
  const auto parent_probs = detail::random_simplex(rng, size_of(parent), strength.at(0));

  struct Conditional {
    IndexSet sep;
    int vertex;
    std::vector<double> probs;  // [sep state][vertex state]
  };
  std::vector<Conditional> conds;
  for (std::size_t j = 0; j < tree.attachments().size(); ++j) {
    const auto& a = tree.attachments()[j];
    const std::size_t rows = size_of(a.separator);
    const std::size_t cols = static_cast<std::size_t>(card_of(a.new_vertex));
    Conditional c{a.separator, a.new_vertex, {}};
    c.probs.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = detail::random_simplex(rng, cols, strength.at(j + 1));
      c.probs.insert(c.probs.end(), row.begin(), row.end());
    }
    conds.push_back(std::move(c));
  }

  auto offset = [&](const IndexSet& s, const std::vector<int>& x) {
    std::size_t off = 0;
    for (int v : s) {
      off = off * static_cast<std::size_t>(card_of(v)) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(v - 1)] - 1);
    }
    return off;
  };

  std::size_t cells = 1;
  for (int c : cardinalities) cells *= static_cast<std::size_t>(c);
  std::vector<double> probs(cells);
  std::vector<int> x(static_cast<std::size_t>(d), 1);
  CompensatedSum mass;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double q = parent_probs[offset(parent, x)];
    for (const auto& c : conds) {
      q *= c.probs[offset(c.sep, x) * static_cast<std::size_t>(card_of(c.vertex)) +
                   static_cast<std::size_t>(x[static_cast<std::size_t>(c.vertex - 1)] - 1)];
    }
    probs[cell] = q;
    mass.add(q);
    for (std::size_t a = x.size(); a-- > 0;) {
      if (++x[a] <= cardinalities[a]) break;
      x[a] = 1;
    }
  }
  const double total = mass.value();
  for (auto& q : probs) q /= total;
  return {JointTable(std::move(scheme), std::move(probs), std::nullopt, cap), std::move(tree)};
}

}  // namespace tcherry
