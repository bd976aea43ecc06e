#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"
#include "tcherry/junction_tree.hpp"
#include "tcherry/learner.hpp"
#include "tcherry/scoring.hpp"

namespace tcherry {

using Json = nlohmann::ordered_json;

inline Json to_json(const IndexSet& s) { return Json(s.values()); }

// Tree JSON:
// {"k": 4, "clusters": [[1,3,4,5],[1,2,4,5]],
//  "separators": [{"set": [1,4,5], "attach_to": 0}], "parent": [1,3,4,5]}
// attach_to is the 0-based position in "clusters" of the earlier cluster the
// separator hangs from; separators[j] belongs to clusters[j + 1].
inline Json tree_to_json(const TCherryJunctionTree& t) {
  Json j;
  j["k"] = t.order();
  Json clusters = Json::array();
  for (const auto& c : t.clusters()) clusters.push_back(to_json(c));
  j["clusters"] = std::move(clusters);
  Json seps = Json::array();
  for (const auto& a : t.attachments()) {
    Json s;
    s["set"] = to_json(a.separator);
    s["attach_to"] = a.attach_to;
    seps.push_back(std::move(s));
  }
  j["separators"] = std::move(seps);
  j["parent"] = to_json(t.parent());
  return j;
}

/// Tree JSON as written, before any structural validation.
struct TreeDocument {
  int k = 0;
  std::vector<IndexSet> clusters;
  std::vector<IndexSet> separators;
  std::vector<std::size_t> attach_to;
  IndexSet parent;
};

namespace detail {

inline IndexSet index_set_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array of integers", 1, 1);
  std::vector<int> v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ParseError(what + " must be an array of integers", 1, 1);
    v.push_back(x.get<int>());
  }
  const std::size_t raw = v.size();
  IndexSet s(std::move(v));
  if (s.size() != raw) throw ParseError(what + " repeats a vertex", 1, 1);
  if (!s.empty() && s.front() < 1) throw ParseError(what + " has a vertex below 1", 1, 1);
  return s;
}

}  // namespace detail

inline TreeDocument parse_tree_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("tree JSON: ") + e.what(), 1, e.byte);
  }
  if (!j.is_object() || !j.contains("k") || !j["k"].is_number_integer()) {
    throw ParseError("tree JSON needs an integer \"k\"", 1, 1);
  }
  if (!j.contains("clusters") || !j["clusters"].is_array()) {
    throw ParseError("tree JSON needs a \"clusters\" array", 1, 1);
  }
  TreeDocument doc;
  doc.k = j["k"].get<int>();
  for (std::size_t i = 0; i < j["clusters"].size(); ++i) {
    doc.clusters.push_back(
        detail::index_set_from_json(j["clusters"][i], "clusters[" + std::to_string(i) + "]"));
  }
  if (j.contains("separators")) {
    if (!j["separators"].is_array()) throw ParseError("\"separators\" must be an array", 1, 1);
    for (std::size_t i = 0; i < j["separators"].size(); ++i) {
      const auto& s = j["separators"][i];
      const std::string name = "separators[" + std::to_string(i) + "]";
      if (!s.is_object() || !s.contains("set")) throw ParseError(name + " needs a \"set\"", 1, 1);
      doc.separators.push_back(detail::index_set_from_json(s["set"], name + ".set"));
      if (s.contains("attach_to")) {
        if (!s["attach_to"].is_number_unsigned()) {
          throw ParseError(name + ".attach_to must be a non-negative integer", 1, 1);
        }
        doc.attach_to.push_back(s["attach_to"].get<std::size_t>());
      }
    }
  }
  if (j.contains("parent")) {
    doc.parent = detail::index_set_from_json(j["parent"], "parent");
  } else if (!doc.clusters.empty()) {
    doc.parent = doc.clusters.front();
  }
  return doc;
}

/// Validated tree; throws StructureError when the document is not a
/// t-cherry junction tree in construction order.
inline TCherryJunctionTree tree_from_document(const TreeDocument& doc) {
  if (!doc.clusters.empty() && doc.parent != doc.clusters.front()) {
    throw StructureError("\"parent\" must equal the first cluster");
  }
  auto t = build_tree(doc.k, doc.clusters, doc.separators);
  if (!doc.attach_to.empty()) {
    if (doc.attach_to.size() != doc.separators.size()) {
      throw StructureError("attach_to must be given for every separator or for none");
    }
    for (std::size_t j = 0; j < doc.attach_to.size(); ++j) {
      const std::size_t a = doc.attach_to[j];
      if (a > j || !doc.separators[j].is_subset_of(doc.clusters[a])) {
        throw StructureError("separator " + std::to_string(j) + " cannot attach to cluster " +
                             std::to_string(a));
      }
    }
  }
  return t;
}

inline TCherryJunctionTree parse_tree(std::string_view text) {
  return tree_from_document(parse_tree_json(text));
}

// Score JSON: {"weight", "kl", "i_total", "clusters": [{"set","i"}],
// "separators": [{"set","nu","i"}]}
inline Json score_to_json(const ScoreBreakdown& s) {
  Json j;
  j["weight"] = s.weight;
  j["kl"] = s.kl;
  j["i_total"] = s.total_information;
  Json cl = Json::array();
  for (const auto& c : s.per_cluster) {
    Json e;
    e["set"] = to_json(c.set);
    e["i"] = c.information;
    cl.push_back(std::move(e));
  }
  j["clusters"] = std::move(cl);
  Json sp = Json::array();
  for (const auto& c : s.per_separator) {
    Json e;
    e["set"] = to_json(c.set);
    e["nu"] = c.nu;
    e["i"] = c.information;
    sp.push_back(std::move(e));
  }
  j["separators"] = std::move(sp);
  return j;
}

inline Json candidate_to_json(const Candidate& c) {
  Json j;
  j["cluster"] = to_json(c.cluster);
  j["separator"] = to_json(c.base);
  j["new_vertex"] = c.new_vertex;
  j["w"] = c.w;
  j["omega"] = c.omega;
  return j;
}

/// Tree fields, then score fields, then "algorithm", "trace", "candidates".
inline Json fit_to_json(const FitResult& f) {
  Json j = tree_to_json(f.tree);
  const Json score = score_to_json(f.score);
  for (const auto& [key, value] : score.items()) {
    // score "clusters"/"separators" would collide with the tree's
    if (key == "clusters" || key == "separators") continue;
    j[key] = value;
  }
  j["cluster_terms"] = score["clusters"];
  j["separator_terms"] = score["separators"];
  j["algorithm"] = std::string(algorithm_tag(f.algorithm));
  Json trace = Json::array();
  for (const auto& s : f.trace) {
    Json e;
    e["cluster"] = to_json(s.cluster);
    e["separator"] = s.separator ? to_json(*s.separator) : Json(nullptr);
    e["w"] = s.w;
    e["omega"] = s.omega;
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  Json cands = Json::array();
  for (const auto& c : f.candidate_table) cands.push_back(candidate_to_json(c));
  j["candidates"] = std::move(cands);
  return j;
}

}  // namespace tcherry
