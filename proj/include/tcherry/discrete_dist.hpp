#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"

namespace tcherry {

/// Default guard on the number of cells of a dense joint table.
inline constexpr std::uint64_t kDefaultCellCap = 100'000'000;

/// Tolerance on the total mass of a probability table.
inline constexpr double kMassTolerance = 1e-12;

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct VariableSpec {
  int index = 0;  // 1-based
  int cardinality = 0;
  std::string name;
};

using Scheme = std::vector<VariableSpec>;

/// Scheme with `cardinalities.size()` variables named x1..xd.
inline Scheme make_scheme(std::span<const int> cardinalities) {
  Scheme s;
  s.reserve(cardinalities.size());
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    const int idx = static_cast<int>(i) + 1;
    s.push_back({idx, cardinalities[i], "x" + std::to_string(idx)});
  }
  return s;
}

inline Scheme make_scheme(std::initializer_list<int> cardinalities) {
  return make_scheme(std::span<const int>(cardinalities.begin(), cardinalities.size()));
}

/// Product of cardinalities, or nullopt when it does not fit in 64 bits.
inline std::optional<std::uint64_t> state_space_size(std::span<const int> cardinalities) {
  std::uint64_t n = 1;
  for (int c : cardinalities) {
    const auto cu = static_cast<std::uint64_t>(c);
    if (cu != 0 && n > UINT64_MAX / cu) return std::nullopt;
    n *= cu;
  }
  return n;
}

inline void validate_scheme(const Scheme& scheme, std::uint64_t cap) {
  if (scheme.empty()) throw DomainError("scheme has no variables");
  std::vector<int> cards;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (scheme[i].index != static_cast<int>(i) + 1) {
      throw DomainError("scheme indices must be exactly 1..d in order; position " +
                        std::to_string(i + 1) + " has index " +
                        std::to_string(scheme[i].index));
    }
    if (scheme[i].cardinality < 2) {
      throw DomainError("variable " + std::to_string(scheme[i].index) +
                        " has cardinality " + std::to_string(scheme[i].cardinality) +
                        "; at least 2 states are required");
    }
    cards.push_back(scheme[i].cardinality);
  }
  const auto n = state_space_size(cards);
  if (!n || *n > cap) {
    throw ResourceError("joint state space has " +
                        (n ? std::to_string(*n) : std::string("more than 2^64")) +
                        " cells, above the dense cap of " + std::to_string(cap));
  }
}

/// Dense probability table over the product state space of a scheme.
///
/// Cells are laid out row-major in scheme order (the last variable varies
/// fastest). States are 1-based at the API and 0-based in the layout.
class JointTable {
 public:
  JointTable(Scheme scheme, std::vector<double> probs,
             std::optional<double> total_count = std::nullopt,
             std::uint64_t cap = kDefaultCellCap)
      : scheme_(std::move(scheme)), probs_(std::move(probs)), total_count_(total_count) {
    validate_scheme(scheme_, cap);
    strides_.assign(scheme_.size(), 1);
    for (std::size_t i = scheme_.size(); i-- > 1;) {
      strides_[i - 1] = strides_[i] * static_cast<std::size_t>(scheme_[i].cardinality);
    }
    const std::size_t cells = strides_[0] * static_cast<std::size_t>(scheme_[0].cardinality);
    if (probs_.size() != cells) {
      throw DomainError("probability array has " + std::to_string(probs_.size()) +
                        " entries but the scheme has " + std::to_string(cells) + " cells");
    }
    CompensatedSum mass;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("negative or non-finite probability");
      mass.add(p);
    }
    if (std::abs(mass.value() - 1.0) > kMassTolerance) {
      throw DomainError("probabilities sum to " + std::to_string(mass.value()) + ", not 1");
    }
  }

  int dims() const noexcept { return static_cast<int>(scheme_.size()); }
  const Scheme& scheme() const noexcept { return scheme_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::optional<double> total_count() const noexcept { return total_count_; }
  std::size_t cell_count() const noexcept { return probs_.size(); }
  std::span<const std::size_t> strides() const noexcept { return strides_; }
  int cardinality(int index) const { return scheme_.at(static_cast<std::size_t>(index - 1)).cardinality; }
  IndexSet variables() const { return full_index_set(dims()); }

  /// Flat offset of a 1-based state vector.
  std::size_t cell_index(std::span<const int> states) const {
    if (states.size() != scheme_.size()) {
      throw DomainError("state vector has " + std::to_string(states.size()) +
                        " entries, expected " + std::to_string(scheme_.size()));
    }
    std::size_t off = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] < 1 || states[i] > scheme_[i].cardinality) {
        throw DomainError("state " + std::to_string(states[i]) + " of variable " +
                          std::to_string(i + 1) + " is outside 1.." +
                          std::to_string(scheme_[i].cardinality));
      }
      off += static_cast<std::size_t>(states[i] - 1) * strides_[i];
    }
    return off;
  }

  /// 1-based state vector of a flat offset.
  std::vector<int> cell_states(std::size_t offset) const {
    std::vector<int> s(scheme_.size());
    for (std::size_t i = 0; i < scheme_.size(); ++i) {
      s[i] = static_cast<int>(offset / strides_[i]) + 1;
      offset %= strides_[i];
    }
    return s;
  }

  double operator()(std::span<const int> states) const { return probs_[cell_index(states)]; }

  /// Throws DomainError unless `subset` is a non-empty subset of 1..d.
  void check_subset(const IndexSet& subset) const {
    if (subset.empty()) throw DomainError("empty variable subset");
    if (subset.front() < 1 || subset.back() > dims()) {
      throw DomainError("subset " + subset.to_string() + " is not inside {1.." +
                        std::to_string(dims()) + "}");
    }
  }

 private:
  Scheme scheme_;
  std::vector<double> probs_;
  std::optional<double> total_count_;
  std::vector<std::size_t> strides_;
};

/// Marginal of a JointTable; axes in ascending index order, row-major.
struct MarginalTable {
  IndexSet subset;
  std::vector<int> cardinalities;
  std::vector<double> probs;

  std::size_t index_of(std::span<const int> states) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      off = off * static_cast<std::size_t>(cardinalities[i]) + static_cast<std::size_t>(states[i] - 1);
    }
    return off;
  }
};

struct CountCell {
  std::vector<int> states;  // 1-based
  std::uint64_t count = 0;
};

struct WeightCell {
  std::vector<int> states;  // 1-based
  double weight = 0.0;
};

struct TableOptions {
  double smoothing = 0.0;  // additive pseudo-count per cell
  std::uint64_t cap = kDefaultCellCap;
};

namespace detail {

inline std::string describe_cell(std::span<const int> states) {
  std::string s = "(";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(states[i]);
  }
  return s + ")";
}

inline std::size_t checked_offset(const Scheme& scheme, std::span<const std::size_t> strides,
                                  std::span<const int> states) {
  if (states.size() != scheme.size()) {
    throw DomainError("cell " + describe_cell(states) + " has " + std::to_string(states.size()) +
                      " states, expected " + std::to_string(scheme.size()));
  }
  std::size_t off = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] < 1 || states[i] > scheme[i].cardinality) {
      throw DomainError("cell " + describe_cell(states) + " is out of range: variable " +
                        std::to_string(i + 1) + " has " +
                        std::to_string(scheme[i].cardinality) + " states");
    }
    off += static_cast<std::size_t>(states[i] - 1) * strides[i];
  }
  return off;
}

inline std::vector<std::size_t> strides_of(const Scheme& scheme) {
  std::vector<std::size_t> strides(scheme.size(), 1);
  for (std::size_t i = scheme.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * static_cast<std::size_t>(scheme[i].cardinality);
  }
  return strides;
}

inline JointTable normalize_weights(Scheme scheme, std::vector<double> raw, double total,
                                    const TableOptions& opt) {
  if (opt.smoothing < 0.0 || !std::isfinite(opt.smoothing)) {
    throw DomainError("smoothing must be a finite non-negative number");
  }
  const double denom = total + opt.smoothing * static_cast<double>(raw.size());
  if (!(denom > 0.0)) throw EmptyDataError("all counts are zero");
  for (double& w : raw) w = (w + opt.smoothing) / denom;
  return JointTable(std::move(scheme), std::move(raw), total, opt.cap);
}

}  // namespace detail

/// Empirical distribution of a contingency table. Unlisted cells are zero;
/// repeated cells accumulate.
inline JointTable from_counts(std::span<const CountCell> cells, Scheme scheme,
                              const TableOptions& opt = {}) {
  validate_scheme(scheme, opt.cap);
  const auto strides = detail::strides_of(scheme);
  std::vector<double> raw(strides[0] * static_cast<std::size_t>(scheme[0].cardinality), 0.0);
  std::uint64_t n = 0;
  for (const auto& c : cells) {
    raw[detail::checked_offset(scheme, strides, c.states)] += static_cast<double>(c.count);
    n += c.count;
  }
  if (n == 0) throw EmptyDataError("all counts are zero");
  return detail::normalize_weights(std::move(scheme), std::move(raw), static_cast<double>(n), opt);
}

/// Like from_counts but with non-negative real weights (exact-probability
/// files, already-scaled frequencies).
inline JointTable from_weights(std::span<const WeightCell> cells, Scheme scheme,
                               const TableOptions& opt = {}) {
  validate_scheme(scheme, opt.cap);
  const auto strides = detail::strides_of(scheme);
  std::vector<double> raw(strides[0] * static_cast<std::size_t>(scheme[0].cardinality), 0.0);
  CompensatedSum total;
  for (const auto& c : cells) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw DomainError("cell " + detail::describe_cell(c.states) +
                        " has a negative or non-finite weight");
    }
    raw[detail::checked_offset(scheme, strides, c.states)] += c.weight;
    total.add(c.weight);
  }
  if (!(total.value() > 0.0)) throw EmptyDataError("all counts are zero");
  return detail::normalize_weights(std::move(scheme), std::move(raw), total.value(), opt);
}

/// Sums `p` over every variable outside `subset`.
inline MarginalTable marginalize(const JointTable& p, const IndexSet& subset) {
  p.check_subset(subset);
  MarginalTable m;
  m.subset = subset;
  const auto d = static_cast<std::size_t>(p.dims());
  std::vector<std::size_t> mstride(d, 0);  // stride in the marginal per joint axis, 0 if summed
  std::size_t msize = 1;
  for (std::size_t i = subset.size(); i-- > 0;) {
    const auto axis = static_cast<std::size_t>(subset[i] - 1);
    mstride[axis] = msize;
    msize *= static_cast<std::size_t>(p.scheme()[axis].cardinality);
  }
  for (int v : subset) m.cardinalities.push_back(p.cardinality(v));
  m.probs.assign(msize, 0.0);

  // Odometer over the joint layout, tracking the marginal offset incrementally.
  std::vector<int> state(d, 0);
  std::size_t moff = 0;
  const auto probs = p.probs();
  for (std::size_t cell = 0; cell < probs.size(); ++cell) {
    m.probs[moff] += probs[cell];
    for (std::size_t a = d; a-- > 0;) {
      const int card = p.scheme()[a].cardinality;
      if (++state[a] < card) {
        moff += mstride[a];
        break;
      }
      state[a] = 0;
      moff -= mstride[a] * static_cast<std::size_t>(card - 1);
    }
  }
  return m;
}

/// Shannon entropy in bits; 0 log 0 = 0.
inline double entropy(std::span<const double> probs) {
  CompensatedSum h;
  for (double q : probs) {
    if (q > 0.0) h.add(-q * std::log2(q));
  }
  return h.value();
}

inline double entropy(const MarginalTable& m) { return entropy(m.probs); }
inline double entropy(const JointTable& p) { return entropy(p.probs()); }

inline double entropy(const JointTable& p, const IndexSet& subset) {
  return entropy(marginalize(p, subset));
}

/// I(X_A) = sum_{i in A} H(X_i) - H(X_A); zero for singletons.
inline double information_content(const JointTable& p, const IndexSet& subset) {
  p.check_subset(subset);
  if (subset.size() == 1) return 0.0;
  CompensatedSum s;
  for (int v : subset) s.add(entropy(p, IndexSet{v}));
  s.add(-entropy(p, subset));
  return s.value();
}

/// H(X_target | X_given) = H(X_{given + target}) - H(X_given).
inline double conditional_entropy(const JointTable& p, int target, const IndexSet& given) {
  if (given.contains(target)) {
    throw DomainError("target " + std::to_string(target) + " is part of the conditioning set " +
                      given.to_string());
  }
  const double joint = entropy(p, given.with(target));
  if (given.empty()) return joint;
  return joint - entropy(p, given);
}

/// Memoized entropies and information contents of one table, keyed by
/// canonical subset. Not thread-safe; give each thread its own cache.
class InformationCache {
 public:
  explicit InformationCache(const JointTable& p) : p_(&p) {}

  const JointTable& table() const { return *p_; }

  double entropy(const IndexSet& subset) {
    if (auto it = h_.find(subset); it != h_.end()) return it->second;
    const double h = tcherry::entropy(*p_, subset);
    h_.emplace(subset, h);
    return h;
  }

  double information(const IndexSet& subset) {
    p_->check_subset(subset);
    if (subset.size() == 1) return 0.0;
    CompensatedSum s;
    for (int v : subset) s.add(entropy(IndexSet{v}));
    s.add(-entropy(subset));
    return s.value();
  }

 private:
  const JointTable* p_;
  std::map<IndexSet, double> h_;
};

}  // namespace tcherry
