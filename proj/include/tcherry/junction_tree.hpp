#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"

namespace tcherry {

// ---------------------------------------------------------------------------
// Hypergraphs and Graham reduction
// ---------------------------------------------------------------------------

/// A hypergraph whose edges are non-empty and pairwise non-nested.
class Hypergraph {
 public:
  /// Vertex set is the union of the edges.
  static Hypergraph make(std::vector<IndexSet> edges) {
    IndexSet vertices;
    for (const auto& e : edges) vertices = set_union(vertices, e);
    return make(std::move(vertices), std::move(edges));
  }

  static Hypergraph make(IndexSet vertices, std::vector<IndexSet> edges) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].empty()) throw DomainError("hyperedge " + std::to_string(i) + " is empty");
      if (!edges[i].is_subset_of(vertices)) {
        throw DomainError("hyperedge " + edges[i].to_string() + " is not inside the vertex set");
      }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (i != j && edges[i].is_subset_of(edges[j])) {
          throw DomainError("hyperedge " + edges[i].to_string() + " is contained in " +
                            edges[j].to_string());
        }
      }
    }
    Hypergraph h;
    h.vertices_ = std::move(vertices);
    h.edges_ = std::move(edges);
    return h;
  }

  const IndexSet& vertices() const noexcept { return vertices_; }
  const std::vector<IndexSet>& edges() const noexcept { return edges_; }

 private:
  IndexSet vertices_;
  std::vector<IndexSet> edges_;
};

struct ReductionStep {
  enum class Kind { node_removal, edge_removal };
  Kind kind;
  int vertex = 0;               // node_removal: the removed vertex
  std::size_t edge = 0;         // index into the original edge list
  std::size_t absorbed_by = 0;  // edge_removal: surviving superset edge (== edge if it was empty)
};

struct GrahamReduction {
  Hypergraph reduced;  // what is left at the fixpoint
  std::vector<std::size_t> surviving_edges;  // original indices of reduced.edges()
  bool is_acyclic = false;
  std::vector<ReductionStep> trace;
};

/// Applies node removal (a vertex in exactly one edge) and edge removal (an
/// edge contained in another, or empty) until neither applies. The input is
/// acyclic iff everything disappears.
inline GrahamReduction graham_reduce(const Hypergraph& h) {
  std::vector<IndexSet> edges = h.edges();
  std::vector<bool> alive(edges.size(), true);
  GrahamReduction out;

  bool changed = true;
  while (changed) {
    changed = false;

    std::map<int, std::size_t> occurrences;
    std::map<int, std::size_t> owner;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      for (int v : edges[i]) {
        ++occurrences[v];
        owner[v] = i;
      }
    }
    for (const auto& [v, n] : occurrences) {
      if (n == 1) {
        const std::size_t e = owner[v];
        edges[e] = edges[e].without(v);
        out.trace.push_back({ReductionStep::Kind::node_removal, v, e, e});
        changed = true;
      }
    }

    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      if (edges[i].empty()) {
        alive[i] = false;
        out.trace.push_back({ReductionStep::Kind::edge_removal, 0, i, i});
        changed = true;
        continue;
      }
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (j == i || !alive[j]) continue;
        // Equal edges: drop the later one.
        const bool nested = edges[i].is_subset_of(edges[j]) && (edges[i] != edges[j] || i > j);
        if (nested) {
          alive[i] = false;
          out.trace.push_back({ReductionStep::Kind::edge_removal, 0, i, j});
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<IndexSet> left;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!alive[i]) continue;
    left.push_back(edges[i]);
    out.surviving_edges.push_back(i);
  }
  out.is_acyclic = left.empty();
  // At the fixpoint no edge is empty or nested, so this is a valid hypergraph.
  out.reduced = Hypergraph::make(std::move(left));
  return out;
}

/// True iff every cluster after the first meets the union of its
/// predecessors inside a single earlier cluster.
inline bool check_running_intersection(const std::vector<IndexSet>& clusters,
                                       std::size_t* violating = nullptr) {
  IndexSet seen;
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (j > 0) {
      const IndexSet meet = set_intersection(clusters[j], seen);
      bool ok = false;
      for (std::size_t i = 0; i < j && !ok; ++i) ok = meet.is_subset_of(clusters[i]);
      if (!ok) {
        if (violating) *violating = j;
        return false;
      }
    }
    seen = set_union(seen, clusters[j]);
  }
  return true;
}

// ---------------------------------------------------------------------------
// t-cherry junction trees
// ---------------------------------------------------------------------------

/// Edge of the junction tree created when a cluster is attached.
struct Attachment {
  IndexSet separator;      // k-1 vertices shared with an earlier cluster
  std::size_t attach_to;   // index of the earliest earlier cluster containing the separator
  int new_vertex;          // cluster minus separator
};

/// A k-th order t-cherry junction tree in construction order.
///
/// clusters()[0] is the parent cluster; cluster j > 0 was created by
/// attaching attachments()[j-1].new_vertex to attachments()[j-1].separator.
/// Values are immutable; growing returns a new tree.
class TCherryJunctionTree {
 public:
  int order() const noexcept { return k_; }
  const std::vector<IndexSet>& clusters() const noexcept { return clusters_; }
  const std::vector<Attachment>& attachments() const noexcept { return attachments_; }
  const IndexSet& parent() const { return clusters_.front(); }
  const IndexSet& covered() const noexcept { return covered_; }

  /// nu_S = 1 + number of tree edges labelled S, per distinct separator.
  const std::map<IndexSet, int>& nu() const noexcept { return nu_; }

  bool covers(const IndexSet& v) const { return covered_ == v; }

  bool has_cluster(const IndexSet& c) const {
    return std::find(clusters_.begin(), clusters_.end(), c) != clusters_.end();
  }

  /// Earliest cluster that contains `s`, if any.
  std::optional<std::size_t> host_of(const IndexSet& s) const {
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
      if (s.is_subset_of(clusters_[i])) return i;
    }
    return std::nullopt;
  }

  friend TCherryJunctionTree new_parent(int k, const IndexSet& vertices);
  friend TCherryJunctionTree add_hypercherry(const TCherryJunctionTree& t, int new_vertex,
                                             const IndexSet& separator);

 private:
  int k_ = 0;
  std::vector<IndexSet> clusters_;
  std::vector<Attachment> attachments_;
  std::map<IndexSet, int> nu_;
  IndexSet covered_;
};

/// Single-cluster tree.
inline TCherryJunctionTree new_parent(int k, const IndexSet& vertices) {
  if (k < 2) throw DomainError("order k must be at least 2, got " + std::to_string(k));
  if (vertices.size() != static_cast<std::size_t>(k)) {
    throw DomainError("parent cluster " + vertices.to_string() + " must have exactly " +
                      std::to_string(k) + " vertices");
  }
  if (vertices.front() < 1) throw DomainError("vertex indices are 1-based");
  TCherryJunctionTree t;
  t.k_ = k;
  t.clusters_.push_back(vertices);
  t.covered_ = vertices;
  return t;
}

/// Connects `new_vertex` to every vertex of `separator`, which must lie in an
/// existing cluster. This is the admissibility test of the greedy learners.
inline TCherryJunctionTree add_hypercherry(const TCherryJunctionTree& t, int new_vertex,
                                           const IndexSet& separator) {
  if (t.clusters_.empty()) throw StructureError("cannot grow an empty tree");
  if (new_vertex < 1) throw DomainError("vertex indices are 1-based");
  if (t.covered_.contains(new_vertex)) {
    throw StructureError("vertex " + std::to_string(new_vertex) + " is already covered");
  }
  if (separator.size() != static_cast<std::size_t>(t.k_ - 1)) {
    throw StructureError("separator " + separator.to_string() + " must have " +
                         std::to_string(t.k_ - 1) + " vertices");
  }
  const auto host = t.host_of(separator);
  if (!host) {
    throw StructureError("separator " + separator.to_string() + " is not inside any cluster");
  }
  TCherryJunctionTree out = t;
  out.clusters_.push_back(separator.with(new_vertex));
  out.attachments_.push_back({separator, *host, new_vertex});
  auto [it, inserted] = out.nu_.try_emplace(separator, 1);
  ++it->second;
  out.covered_ = out.covered_.with(new_vertex);
  return out;
}

/// Every (k-1)-subset of every cluster.
inline std::vector<IndexSet> eligible_separators(const TCherryJunctionTree& t) {
  std::set<IndexSet> pool;
  for (const auto& c : t.clusters()) {
    for (auto& s : k_subsets(c, static_cast<std::size_t>(t.order() - 1))) pool.insert(std::move(s));
  }
  return {pool.begin(), pool.end()};
}

/// Rebuilds a tree from clusters in construction order plus the separator
/// of every cluster after the first.
inline TCherryJunctionTree build_tree(int k, const std::vector<IndexSet>& clusters,
                                      const std::vector<IndexSet>& separators) {
  if (clusters.empty()) throw StructureError("a tree needs at least one cluster");
  if (separators.size() + 1 != clusters.size()) {
    throw StructureError("expected " + std::to_string(clusters.size() - 1) +
                         " separators, got " + std::to_string(separators.size()));
  }
  TCherryJunctionTree t = new_parent(k, clusters[0]);
  for (std::size_t j = 1; j < clusters.size(); ++j) {
    const IndexSet& s = separators[j - 1];
    if (!s.is_subset_of(clusters[j])) {
      throw StructureError("separator " + s.to_string() + " is not inside cluster " +
                           clusters[j].to_string());
    }
    const IndexSet fresh = set_difference(clusters[j], s);
    if (fresh.size() != 1 || clusters[j].size() != static_cast<std::size_t>(k)) {
      throw StructureError("cluster " + clusters[j].to_string() +
                           " must add exactly one vertex to its separator");
    }
    t = add_hypercherry(t, fresh.front(), s);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Puzzle numbering
// ---------------------------------------------------------------------------

struct PuzzleNumbering {
  std::vector<int> order;  // i_1, ..., i_d
  // separator through which order[r] was attached; nullopt for the parent's vertices
  std::vector<std::optional<IndexSet>> attachment;
};

/// Numbers the parent's vertices (ascending), then repeatedly takes a
/// remaining cluster that contains a (k-1)-subset of an already numbered
/// cluster and numbers its one new vertex. Ties: smallest new vertex, then
/// earliest cluster.
inline PuzzleNumbering puzzle_numbering(const TCherryJunctionTree& t, const IndexSet& parent) {
  const auto& clusters = t.clusters();
  const auto parent_it = std::find(clusters.begin(), clusters.end(), parent);
  if (parent_it == clusters.end()) {
    throw DomainError("parent " + parent.to_string() + " is not a cluster of the tree");
  }
  const std::size_t k = static_cast<std::size_t>(t.order());

  PuzzleNumbering n;
  IndexSet numbered = parent;
  std::set<IndexSet> pool;
  auto absorb = [&](const IndexSet& c) {
    for (auto& s : k_subsets(c, k - 1)) pool.insert(std::move(s));
  };
  for (int v : parent) {
    n.order.push_back(v);
    n.attachment.emplace_back(std::nullopt);
  }
  absorb(parent);

  std::vector<bool> done(clusters.size(), false);
  done[static_cast<std::size_t>(parent_it - clusters.begin())] = true;
  std::size_t remaining = clusters.size() - 1;

  while (remaining > 0) {
    std::optional<std::size_t> best;
    int best_vertex = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (done[i]) continue;
      const IndexSet fresh = set_difference(clusters[i], numbered);
      if (fresh.size() != 1) {
        if (fresh.empty()) {
          throw StructureError("cluster " + clusters[i].to_string() + " adds no new vertex");
        }
        continue;
      }
      if (!pool.contains(clusters[i].without(fresh.front()))) continue;
      if (!best || fresh.front() < best_vertex) {
        best = i;
        best_vertex = fresh.front();
      }
    }
    if (!best) throw StructureError("tree is not connected from parent " + parent.to_string());
    const IndexSet& c = clusters[*best];
    n.order.push_back(best_vertex);
    n.attachment.emplace_back(c.without(best_vertex));
    numbered = numbered.with(best_vertex);
    absorb(c);
    done[*best] = true;
    --remaining;
  }
  return n;
}

/// Describes the first broken PuzzleNumbering invariant, or nullopt.
inline std::optional<std::string> puzzle_numbering_defect(const TCherryJunctionTree& t,
                                                          const PuzzleNumbering& n) {
  const auto k = static_cast<std::size_t>(t.order());
  if (n.order.size() != n.attachment.size()) return "order and attachment lengths differ";
  if (IndexSet(n.order) != t.covered() || n.order.size() != t.covered().size()) {
    return "order is not a permutation of the covered vertices";
  }
  if (n.order.size() < k) return "fewer vertices than the order k";
  const IndexSet head(std::vector<int>(n.order.begin(), n.order.begin() + static_cast<std::ptrdiff_t>(k)));
  if (!t.has_cluster(head)) return "first k vertices are not a cluster";
  for (std::size_t r = 0; r < k; ++r) {
    if (n.attachment[r]) return "a parent vertex carries an attachment separator";
  }
  std::vector<IndexSet> done{head};
  for (std::size_t r = k; r < n.order.size(); ++r) {
    if (!n.attachment[r]) return "vertex " + std::to_string(n.order[r]) + " has no separator";
    const IndexSet& s = *n.attachment[r];
    if (s.size() != k - 1) return "separator " + s.to_string() + " has the wrong size";
    const IndexSet c = s.with(n.order[r]);
    if (!t.has_cluster(c)) return c.to_string() + " is not a cluster";
    bool hosted = false;
    for (const auto& d : done) hosted = hosted || s.is_subset_of(d);
    if (!hosted) return "separator " + s.to_string() + " is not inside an earlier cluster";
    done.push_back(c);
  }
  return std::nullopt;
}

}  // namespace tcherry
