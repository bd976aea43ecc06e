#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

namespace tcherry {

/// Sorted, duplicate-free set of 1-based variable indices.
///
/// Every subset that crosses an API boundary is canonicalized here, so two
/// IndexSets compare equal exactly when they hold the same variables.
/// Ordering is lexicographic on the sorted contents, which is the tie-break
/// order used throughout the learner.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> values) : values_(values) { canonicalize(); }
  explicit IndexSet(std::vector<int> values) : values_(std::move(values)) { canonicalize(); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  int operator[](std::size_t i) const { return values_[i]; }
  int front() const { return values_.front(); }
  int back() const { return values_.back(); }
  const std::vector<int>& values() const noexcept { return values_; }

  bool contains(int v) const { return std::binary_search(values_.begin(), values_.end(), v); }

  bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.values_.begin(), other.values_.end(), values_.begin(),
                         values_.end());
  }

  IndexSet with(int v) const {
    IndexSet out = *this;
    auto it = std::lower_bound(out.values_.begin(), out.values_.end(), v);
    if (it == out.values_.end() || *it != v) out.values_.insert(it, v);
    return out;
  }

  IndexSet without(int v) const {
    IndexSet out = *this;
    auto it = std::lower_bound(out.values_.begin(), out.values_.end(), v);
    if (it != out.values_.end() && *it == v) out.values_.erase(it);
    return out;
  }

  friend IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.values_));
    return out;
  }

  friend IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out.values_));
    return out;
  }

  friend IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.values_));
    return out;
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  friend auto operator<=>(const IndexSet& a, const IndexSet& b) { return a.values_ <=> b.values_; }

  /// "{1,3,4,5}"
  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(values_[i]);
    }
    return s + "}";
  }

  /// "1 3 4 5", the layout of the published candidate tables.
  std::string to_spaced() const {
    std::string s;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(values_[i]);
    }
    return s;
  }

 private:
  void canonicalize() {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  }

  std::vector<int> values_;
};

/// {1, ..., d}
inline IndexSet full_index_set(int d) {
  std::vector<int> v(static_cast<std::size_t>(std::max(d, 0)));
  for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  return IndexSet(std::move(v));
}

/// All size-`k` subsets of `s`, in lexicographic order.
inline std::vector<IndexSet> k_subsets(const IndexSet& s, std::size_t k) {
  std::vector<IndexSet> out;
  if (k > s.size()) return out;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  const std::size_t n = s.size();
  while (true) {
    std::vector<int> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = s[pick[i]];
    out.emplace_back(std::move(v));
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace tcherry
