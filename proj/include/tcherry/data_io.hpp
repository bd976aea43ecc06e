#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"

namespace tcherry {

// Contingency CSV: header "x1,...,xd,count", one row per non-empty cell.
// Raw-sample CSV:  header "x1,...,xd", one row per observation.
// States are 1-based integers in both.

enum class InputKind { automatic, counts, samples };

struct LoadOptions {
  InputKind kind = InputKind::automatic;
  std::optional<Scheme> scheme;  // from a sidecar; otherwise inferred
  TableOptions table;
};

namespace detail {

struct CsvField {
  std::string_view text;
  std::size_t column;  // 1-based character column
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<CsvField> split_csv_line(std::string_view line) {
  std::vector<CsvField> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view raw = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    out.push_back({trim(raw), start + lead + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline int parse_state(const CsvField& f, std::size_t line) {
  int v = 0;
  const auto* end = f.text.data() + f.text.size();
  const auto [ptr, ec] = std::from_chars(f.text.data(), end, v);
  if (ec != std::errc() || ptr != end || f.text.empty()) {
    throw ParseError("expected an integer state, got '" + std::string(f.text) + "'", line, f.column);
  }
  if (v < 1) throw ParseError("states are 1-based; got " + std::to_string(v), line, f.column);
  return v;
}

inline double parse_weight(const CsvField& f, std::size_t line) {
  // std::from_chars for double is not available on every toolchain we build on.
  const std::string s(f.text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw ParseError("expected a count, got '" + s + "'", line, f.column);
  }
  if (v < 0.0) throw ParseError("negative count " + s, line, f.column);
  return v;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Parses a contingency or raw-sample CSV into a JointTable.
inline JointTable parse_csv(std::string_view text, const LoadOptions& opt = {}) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }

  std::size_t header_line = 0;
  while (header_line < lines.size() && detail::trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw ParseError("input is empty", 1, 1);

  const auto header = detail::split_csv_line(lines[header_line]);
  bool counts = false;
  switch (opt.kind) {
    case InputKind::counts: counts = true; break;
    case InputKind::samples: counts = false; break;
    case InputKind::automatic: counts = detail::lower(header.back().text) == "count"; break;
  }
  const std::size_t d = header.size() - (counts ? 1 : 0);
  if (d == 0) throw ParseError("header names no variables", header_line + 1, 1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].text.empty()) throw ParseError("empty header field", header_line + 1, header[i].column);
  }

  std::vector<WeightCell> cells;
  bool integral = true;
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const std::size_t lineno = li + 1;
    const auto fields = detail::split_csv_line(lines[li]);
    if (fields.size() != header.size()) {
      const std::size_t col = fields.size() > header.size()
                                  ? fields[header.size()].column
                                  : lines[li].size() + 1;
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno, col);
    }
    WeightCell c;
    c.states.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      c.states.push_back(detail::parse_state(fields[i], lineno));
      if (opt.scheme && i < opt.scheme->size() && c.states.back() > (*opt.scheme)[i].cardinality) {
        throw ParseError("state " + std::to_string(c.states.back()) + " exceeds the " +
                             std::to_string((*opt.scheme)[i].cardinality) +
                             " states declared for variable " + std::to_string(i + 1),
                         lineno, fields[i].column);
      }
    }
    c.weight = counts ? detail::parse_weight(fields[d], lineno) : 1.0;
    if (c.weight != std::floor(c.weight)) integral = false;
    cells.push_back(std::move(c));
  }

  Scheme scheme;
  if (opt.scheme) {
    scheme = *opt.scheme;
    if (scheme.size() != d) {
      throw DomainError("scheme declares " + std::to_string(scheme.size()) +
                        " variables but the data has " + std::to_string(d));
    }
  } else {
    std::vector<int> cards(d, 2);
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < d; ++i) cards[i] = std::max(cards[i], c.states[i]);
    }
    scheme = make_scheme(cards);
    for (std::size_t i = 0; i < d; ++i) scheme[i].name = std::string(header[i].text);
  }

  if (integral) {
    std::vector<CountCell> ints;
    ints.reserve(cells.size());
    for (auto& c : cells) ints.push_back({std::move(c.states), static_cast<std::uint64_t>(c.weight)});
    return from_counts(ints, std::move(scheme), opt.table);
  }
  return from_weights(cells, std::move(scheme), opt.table);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline JointTable load_csv(const std::string& path, const LoadOptions& opt = {}) {
  return parse_csv(read_file(path), opt);
}

/// Sidecar: {"variables": [{"name": "height", "cardinality": 2}, ...]}
inline Scheme parse_scheme_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scheme JSON: ") + e.what(), 1, e.byte);
  }
  if (!j.contains("variables") || !j["variables"].is_array()) {
    throw ParseError("scheme JSON needs a \"variables\" array", 1, 1);
  }
  Scheme s;
  int idx = 1;
  for (const auto& v : j["variables"]) {
    if (!v.contains("cardinality") || !v["cardinality"].is_number_integer()) {
      throw ParseError("variable " + std::to_string(idx) + " lacks an integer cardinality", 1, 1);
    }
    s.push_back({idx, v["cardinality"].get<int>(),
                 v.contains("name") ? v["name"].get<std::string>() : "x" + std::to_string(idx)});
    ++idx;
  }
  return s;
}

/// Contingency CSV of a table. With `n > 0` cell counts are p * n rounded by
/// largest remainder so they sum to exactly n; with `n == 0` the count
/// column holds the probabilities themselves.
inline std::string write_counts_csv(const JointTable& p, std::uint64_t n) {
  std::ostringstream out;
  for (const auto& v : p.scheme()) out << "x" << v.index << ',';
  out << "count\n";

  const auto probs = p.probs();
  std::vector<std::uint64_t> counts(probs.size(), 0);
  if (n > 0) {
    std::vector<std::pair<double, std::size_t>> rest;
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double exact = probs[i] * static_cast<double>(n);
      counts[i] = static_cast<std::uint64_t>(std::floor(exact));
      assigned += counts[i];
      rest.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n && i < rest.size(); ++i, ++assigned) ++counts[rest[i].second];
  }

  for (std::size_t cell = 0; cell < probs.size(); ++cell) {
    if (n > 0 ? counts[cell] == 0 : probs[cell] == 0.0) continue;
    for (int s : p.cell_states(cell)) out << s << ',';
    if (n > 0) {
      out << counts[cell];
    } else {
      out << std::setprecision(17) << probs[cell];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace tcherry
