#pragma once

// Command-line front end. Everything writes through the streams it is
// given so tests can drive it in-process.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "tcherry/data_io.hpp"
#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"
#include "tcherry/junction_tree.hpp"
#include "tcherry/learner.hpp"
#include "tcherry/scoring.hpp"
#include "tcherry/serialization.hpp"
#include "tcherry/synthetic.hpp"

namespace tcherry::cli {

enum ExitCode : int { ok = 0, check_failed = 1, input_error = 2, resource_guard = 3 };

enum class Format { text, json };
enum class RowView { scan, admissible, all };

struct RunConfig {
  std::string input;
  InputKind kind = InputKind::automatic;
  std::string scheme_path;
  int k = 3;
  std::string algorithm = "sk";
  double smoothing = 0.0;
  Format format = Format::text;
  std::uint64_t cap = kDefaultCellCap;
  int max_exhaustive_d = ExhaustiveLimits{}.max_d;
  bool nats = false;
  RowView rows = RowView::scan;

  // check / score
  std::string tree_path;
  std::string data_path;

  // synth
  std::uint64_t seed = 1;
  int d = 6;
  std::vector<int> cardinalities{2};
  std::string strength = "2";
  std::uint64_t n = 0;
  std::string out_prefix = "synth";
};

inline std::string fmt_set(const IndexSet& s) { return s.to_string(); }

inline double kl_units(const RunConfig& cfg, double bits) {
  return cfg.nats ? bits * std::log(2.0) : bits;
}

inline JointTable load_table(const RunConfig& cfg, const std::string& path) {
  LoadOptions opt;
  opt.kind = cfg.kind;
  opt.table.smoothing = cfg.smoothing;
  opt.table.cap = cfg.cap;
  if (!cfg.scheme_path.empty()) opt.scheme = parse_scheme_json(read_file(cfg.scheme_path));
  return load_csv(path, opt);
}

inline StrengthSchedule parse_strength(const std::string& spec) {
  StrengthSchedule s;
  const auto colon = spec.find(':');
  try {
    s.initial = std::stod(spec.substr(0, colon));
    if (colon != std::string::npos) s.decay = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw DomainError("--strength expects S or S:DECAY, got '" + spec + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

inline void print_fit_text(std::ostream& out, const RunConfig& cfg, const FitResult& f) {
  const char* unit = cfg.nats ? "nats" : "bits";
  fmt::print(out, "algorithm: {}\n", algorithm_tag(f.algorithm));
  fmt::print(out, "k: {}\n", f.tree.order());
  std::string cl;
  for (const auto& c : f.tree.clusters()) cl += (cl.empty() ? "" : " ") + fmt_set(c);
  fmt::print(out, "clusters: {}\n", cl);
  std::string sp;
  for (const auto& a : f.tree.attachments()) {
    sp += (sp.empty() ? "" : " ") + fmt_set(a.separator) + "@" + std::to_string(a.attach_to);
  }
  fmt::print(out, "separators: {}\n", sp.empty() ? "-" : sp);
  fmt::print(out, "weight: {:.6f}\n", f.score.weight);
  fmt::print(out, "I(X): {:.6f}\n", f.score.total_information);
  fmt::print(out, "KL: {:.6g} {}\n", kl_units(cfg, f.score.kl), unit);
  fmt::print(out, "trace:\n");
  for (const auto& s : f.trace) {
    fmt::print(out, "  {} | {} | w {:.6f} | omega {:.6f}\n", s.cluster.to_spaced(),
               s.separator ? s.separator->to_spaced() : "-", s.w, s.omega);
  }
}

inline std::vector<Algorithm> algorithms_for(const RunConfig& cfg, const JointTable& p,
                                             std::ostream& out) {
  if (cfg.algorithm != "all") {
    const auto a = parse_algorithm(cfg.algorithm);
    if (!a) throw DomainError("unknown algorithm '" + cfg.algorithm + "'");
    return {*a};
  }
  std::vector<Algorithm> as{Algorithm::weight_greedy, Algorithm::entropy_greedy};
  if (cfg.k == 2) as.push_back(Algorithm::chow_liu);
  if (p.dims() <= cfg.max_exhaustive_d) {
    as.push_back(Algorithm::exhaustive);
  } else if (cfg.format == Format::text) {
    fmt::print(out, "# exhaustive skipped: d = {} exceeds {}\n", p.dims(), cfg.max_exhaustive_d);
  }
  return as;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const JointTable p = load_table(cfg, cfg.input);
  InformationCache cache(p);
  const auto algorithms = algorithms_for(cfg, p, out);
  std::vector<FitResult> fits;
  for (auto a : algorithms) {
    const int k = a == Algorithm::chow_liu ? 2 : cfg.k;
    fits.push_back(fit(cache, k, a, ExhaustiveLimits{cfg.max_exhaustive_d}));
  }

  if (cfg.format == Format::json) {
    if (fits.size() == 1) {
      out << fit_to_json(fits.front()).dump(2) << '\n';
    } else {
      Json j;
      j["results"] = Json::array();
      Json cmp;
      for (const auto& f : fits) {
        j["results"].push_back(fit_to_json(f));
        cmp[std::string(algorithm_tag(f.algorithm))] = f.score.kl;
      }
      j["comparison"] = std::move(cmp);
      out << j.dump(2) << '\n';
    }
    return ok;
  }

  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (i) out << '\n';
    print_fit_text(out, cfg, fits[i]);
  }
  if (fits.size() > 1) {
    std::string line;
    const FitResult* best = &fits.front();
    for (const auto& f : fits) {
      line += fmt::format("{}{}={:.6g}", line.empty() ? "" : " ", algorithm_tag(f.algorithm),
                          kl_units(cfg, f.score.kl));
      if (f.score.kl < best->score.kl) best = &f;
    }
    fmt::print(out, "\ncomparison (KL): {} best={}\n", line, algorithm_tag(best->algorithm));
  }
  return ok;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Candidate table in the layout of the published illustrations: cluster,
/// separator, the two I (or H) values and their difference. Accepted rows
/// end in " *".
inline std::vector<std::string> report_lines(InformationCache& cache, const FitResult& f,
                                             RowView view) {
  const bool by_entropy = f.algorithm == Algorithm::entropy_greedy;
  auto cell = [&](const IndexSet& s) { return by_entropy ? cache.entropy(s) : cache.information(s); };

  std::vector<std::string> lines;
  lines.push_back(by_entropy ? "cluster | separator | H(C) | H(S) | H(C)-H(S)"
                             : "cluster | separator | I(C) | I(S) | I(C)-I(S)");

  std::vector<bool> accepted(f.candidate_table.size(), false);
  if (!f.accepted.empty()) {
    for (auto i : f.accepted) accepted[i] = true;
  } else {
    for (std::size_t i = 0; i < f.candidate_table.size(); ++i) {
      const auto& c = f.candidate_table[i];
      for (const auto& s : f.trace) {
        if (s.separator && *s.separator == c.base && s.cluster == c.cluster) accepted[i] = true;
      }
    }
  }

  auto candidate_line = [&](std::size_t i) {
    const Candidate& c = f.candidate_table[i];
    return fmt::format("{} | {} | {:.6f} | {:.6f} | {:.6f}{}", c.cluster.to_spaced(),
                       c.base.to_spaced(), cell(c.cluster), cell(c.base),
                       by_entropy ? c.omega : c.w, accepted[i] ? " *" : "");
  };
  auto parent_line = [&]() {
    const IndexSet& p = f.trace.front().cluster;
    return fmt::format("{} | - | {:.6f} | - | - *", p.to_spaced(), cell(p));
  };
  // The entropy greedy picks its parent by H(cluster), outside the candidate order.
  const bool parent_row = by_entropy || f.accepted.empty();

  switch (view) {
    case RowView::all: {
      if (parent_row) lines.push_back(parent_line());
      for (std::size_t i = 0; i < f.candidate_table.size(); ++i) lines.push_back(candidate_line(i));
      break;
    }
    case RowView::scan: {
      if (parent_row) lines.push_back(parent_line());
      std::size_t last = f.candidate_table.size();
      if (!f.accepted.empty()) last = f.accepted.back() + 1;
      for (std::size_t i = 0; i < last; ++i) lines.push_back(candidate_line(i));
      break;
    }
    case RowView::admissible: {
      lines.push_back(parent_line());
      TCherryJunctionTree t = new_parent(f.tree.order(), f.trace.front().cluster);
      for (std::size_t step = 1; step < f.trace.size(); ++step) {
        lines.push_back(fmt::format("# step {}", step));
        for (std::size_t i = 0; i < f.candidate_table.size(); ++i) {
          const auto& c = f.candidate_table[i];
          if (t.covered().contains(c.new_vertex) || !t.host_of(c.base)) continue;
          lines.push_back(candidate_line(i));
        }
        t = add_hypercherry(t, f.tree.attachments()[step - 1].new_vertex,
                            f.tree.attachments()[step - 1].separator);
      }
      break;
    }
  }
  return lines;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const JointTable p = load_table(cfg, cfg.input);
  InformationCache cache(p);
  const auto algorithms = algorithms_for(cfg, p, out);
  bool first = true;
  for (auto a : algorithms) {
    const int k = a == Algorithm::chow_liu ? 2 : cfg.k;
    const FitResult f = fit(cache, k, a, ExhaustiveLimits{cfg.max_exhaustive_d});
    if (cfg.format == Format::json) {
      Json j;
      j["algorithm"] = std::string(algorithm_tag(a));
      j["candidates"] = Json::array();
      for (const auto& c : f.candidate_table) j["candidates"].push_back(candidate_to_json(c));
      out << j.dump(2) << '\n';
      continue;
    }
    if (!first) out << '\n';
    first = false;
    fmt::print(out, "# {} k={}\n", algorithm_tag(a), k);
    for (const auto& line : report_lines(cache, f, cfg.rows)) out << line << '\n';
  }
  return ok;
}

// ---------------------------------------------------------------------------
// check / score
// ---------------------------------------------------------------------------

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const TreeDocument doc = parse_tree_json(read_file(cfg.tree_path));
  bool pass = true;
  fmt::print(out, "clusters: {}\n", doc.clusters.size());

  try {
    const auto h = Hypergraph::make(doc.clusters);
    const auto g = graham_reduce(h);
    if (g.is_acyclic) {
      fmt::print(out, "graham reduction: acyclic ({} steps)\n", g.trace.size());
    } else {
      std::string left;
      for (const auto& e : g.reduced.edges()) left += " " + fmt_set(e);
      fmt::print(out, "graham reduction: NOT acyclic; stuck at{}\n", left);
      pass = false;
    }
  } catch (const DomainError& e) {
    fmt::print(out, "graham reduction: invalid hypergraph: {}\n", e.what());
    pass = false;
  }

  std::size_t bad = 0;
  if (doc.clusters.empty()) {
    fmt::print(out, "running intersection: no clusters\n");
    pass = false;
  } else if (check_running_intersection(doc.clusters, &bad)) {
    fmt::print(out, "running intersection: holds\n");
  } else {
    fmt::print(out, "running intersection: violated at j={} {}\n", bad + 1,
               fmt_set(doc.clusters[bad]));
    pass = false;
  }

  std::optional<TCherryJunctionTree> tree;
  try {
    tree = tree_from_document(doc);
    fmt::print(out, "t-cherry structure: valid (k={}, {} vertices)\n", tree->order(),
               tree->covered().size());
  } catch (const Error& e) {
    fmt::print(out, "t-cherry structure: invalid: {}\n", e.what());
    pass = false;
  }

  std::optional<PuzzleNumbering> numbering;
  if (tree) {
    try {
      numbering = puzzle_numbering(*tree, tree->parent());
      std::string order;
      for (int v : numbering->order) order += (order.empty() ? "" : " ") + std::to_string(v);
      fmt::print(out, "puzzle numbering from {}: {}\n", fmt_set(tree->parent()), order);
      for (std::size_t r = 0; r < numbering->order.size(); ++r) {
        if (numbering->attachment[r]) {
          fmt::print(out, "  {} via {}\n", numbering->order[r], fmt_set(*numbering->attachment[r]));
        }
      }
    } catch (const Error& e) {
      fmt::print(out, "puzzle numbering: failed: {}\n", e.what());
      pass = false;
    }
  }

  if (!cfg.data_path.empty() && tree && numbering) {
    const JointTable p = load_table(cfg, cfg.data_path);
    InformationCache cache(p);
    const auto report = check_recovery_conditions(cache, *tree, *numbering);
    fmt::print(out, "recovery conditions: {} comparisons, {} violations, {} ties\n",
               report.comparisons, report.violations.size(), report.ties.size());
    for (const auto& v : report.violations) {
      fmt::print(out, "  violation: {} via {} gains {:.6f} >= {} via {} gains {:.6f}\n", v.later,
                 fmt_set(v.separator), v.later_gain, v.earlier, fmt_set(v.earlier_separator),
                 v.earlier_gain);
    }
    for (const auto& v : report.ties) {
      fmt::print(out, "  tie: {} via {} and {} via {} both gain {:.6f}\n", v.later,
                 fmt_set(v.separator), v.earlier, fmt_set(v.earlier_separator), v.earlier_gain);
    }
    if (p.dims() >= tree->order()) {
      const auto best = find_parent_cluster(cache, tree->order());
      fmt::print(out, "best-scoring cluster {} (score {:.6f}) is {}a cluster of this tree\n",
                 fmt_set(best.cluster), best.score, tree->has_cluster(best.cluster) ? "" : "not ");
    }
  }

  fmt::print(out, "{}\n", pass ? "structure: OK" : "structure: FAILED");
  return pass ? ok : check_failed;
}

inline int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const auto tree = parse_tree(read_file(cfg.tree_path));
  const JointTable p = load_table(cfg, cfg.input);
  InformationCache cache(p);
  const auto s = tree_weight(cache, tree);
  if (cfg.format == Format::json) {
    out << score_to_json(s).dump(2) << '\n';
    return ok;
  }
  const char* unit = cfg.nats ? "nats" : "bits";
  fmt::print(out, "weight: {:.6f}\n", s.weight);
  fmt::print(out, "I(X): {:.6f}\n", s.total_information);
  fmt::print(out, "KL: {:.6g} {}\n", kl_units(cfg, s.kl), unit);
  if (tree.covers(p.variables())) {
    fmt::print(out, "KL (entropy form): {:.6g} {}\n", kl_units(cfg, kl_entropy_form(cache, tree)), unit);
    fmt::print(out, "KL (direct sum): {:.6g} {}\n", kl_units(cfg, kl_exact(p, tree)), unit);
  }
  for (const auto& c : s.per_cluster) fmt::print(out, "  C {} I={:.6f} H={:.6f}\n", c.set.to_spaced(), c.information, c.entropy);
  for (const auto& c : s.per_separator) {
    fmt::print(out, "  S {} nu={} I={:.6f} H={:.6f}\n", c.set.to_spaced(), c.nu, c.information, c.entropy);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto model = generate_tcherry_distribution(cfg.seed, cfg.d, cfg.k, cfg.cardinalities,
                                                   parse_strength(cfg.strength), cfg.cap);
  const std::string csv_path = cfg.out_prefix + ".csv";
  const std::string tree_path = cfg.out_prefix + ".tree.json";
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw Error("cannot write " + csv_path);
    f << write_counts_csv(model.table, cfg.n);
  }
  {
    std::ofstream f(tree_path, std::ios::binary);
    if (!f) throw Error("cannot write " + tree_path);
    f << tree_to_json(model.tree).dump(2) << '\n';
  }
  std::string cl;
  for (const auto& c : model.tree.clusters()) cl += (cl.empty() ? "" : " ") + fmt_set(c);
  fmt::print(out, "wrote {} and {}\n", csv_path, tree_path);
  fmt::print(out, "ground truth (seed {}): {}\n", cfg.seed, cl);
  return ok;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn and check t-cherry junction tree approximations of discrete distributions"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "text";
  std::string kind = "auto";
  std::string rows = "scan";
  std::string units = "bits";

  auto data_flags = [&](CLI::App* sub) {
    sub->add_option("--kind", kind, "Input kind")->check(CLI::IsMember({"auto", "counts", "samples"}));
    sub->add_option("--scheme", cfg.scheme_path, "Scheme sidecar JSON (names, cardinalities)");
    sub->add_option("--smoothing", cfg.smoothing, "Additive pseudo-count per cell")->check(CLI::NonNegativeNumber);
    sub->add_option("--cap", cfg.cap, "Maximum number of dense cells")->check(CLI::PositiveNumber);
  };
  auto output_flags = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--units", units, "Units for KL in text output")->check(CLI::IsMember({"bits", "nats"}));
  };

  auto* fit_cmd = app.add_subcommand("fit", "Learn a junction tree from data");
  fit_cmd->add_option("input", cfg.input, "Counts or samples CSV")->required();
  fit_cmd->add_option("--k", cfg.k, "Cluster size")->check(CLI::Range(2, 1 << 20));
  fit_cmd->add_option("--algorithm", cfg.algorithm, "sk | malvestuto | chow_liu | exhaustive | all");
  fit_cmd->add_option("--max-d", cfg.max_exhaustive_d, "Largest d for exhaustive search");
  data_flags(fit_cmd);
  output_flags(fit_cmd);

  auto* report_cmd = app.add_subcommand("report", "Print the scored candidate table");
  report_cmd->add_option("input", cfg.input, "Counts or samples CSV")->required();
  report_cmd->add_option("--k", cfg.k, "Cluster size")->check(CLI::Range(2, 1 << 20));
  report_cmd->add_option("--algorithm", cfg.algorithm, "sk | malvestuto | chow_liu | exhaustive | all");
  report_cmd->add_option("--rows", rows, "scan | admissible | all")
      ->check(CLI::IsMember({"scan", "admissible", "all"}));
  report_cmd->add_option("--max-d", cfg.max_exhaustive_d, "Largest d for exhaustive search");
  data_flags(report_cmd);
  output_flags(report_cmd);

  auto* check_cmd = app.add_subcommand("check", "Verify a tree JSON structurally (and against data)");
  check_cmd->add_option("tree", cfg.tree_path, "Tree JSON")->required();
  check_cmd->add_option("data", cfg.data_path, "Optional counts or samples CSV");
  data_flags(check_cmd);

  auto* score_cmd = app.add_subcommand("score", "Score a tree JSON against data");
  score_cmd->add_option("tree", cfg.tree_path, "Tree JSON")->required();
  score_cmd->add_option("input", cfg.input, "Counts or samples CSV")->required();
  data_flags(score_cmd);
  output_flags(score_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Write a distribution that factorizes over a random t-cherry tree");
  synth_cmd->add_option("--seed", cfg.seed, "RNG seed");
  synth_cmd->add_option("--d", cfg.d, "Number of variables")->check(CLI::Range(2, 64));
  synth_cmd->add_option("--k", cfg.k, "Cluster size")->check(CLI::Range(2, 64));
  synth_cmd->add_option("--card", cfg.cardinalities, "Cardinality (one value, or one per variable)")
      ->delimiter(',');
  synth_cmd->add_option("--strength", cfg.strength, "Link strength S or S:DECAY per attached vertex");
  synth_cmd->add_option("--n", cfg.n, "Sample size for integer counts; 0 writes exact probabilities");
  synth_cmd->add_option("--cap", cfg.cap, "Maximum number of dense cells")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", cfg.out_prefix, "Output prefix (<prefix>.csv, <prefix>.tree.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return input_error;
  }

  cfg.format = format == "json" ? Format::json : Format::text;
  cfg.kind = kind == "counts" ? InputKind::counts : kind == "samples" ? InputKind::samples : InputKind::automatic;
  cfg.rows = rows == "admissible" ? RowView::admissible : rows == "all" ? RowView::all : RowView::scan;
  cfg.nats = units == "nats";

  try {
    if (*fit_cmd) return cmd_fit(cfg, out);
    if (*report_cmd) return cmd_report(cfg, out);
    if (*check_cmd) return cmd_check(cfg, out);
    if (*score_cmd) return cmd_score(cfg, out);
    if (*synth_cmd) return cmd_synth(cfg, out);
  } catch (const ResourceError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return resource_guard;
  } catch (const StructureError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return check_failed;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return input_error;
  }
  return input_error;
}

}  // namespace tcherry::cli
