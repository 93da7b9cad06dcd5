#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pclf/error.hpp"
#include "pclf/experiments.hpp"
#include "pclf/graph.hpp"
#include "pclf/lifts.hpp"
#include "pclf/lmi.hpp"

namespace pclf {

using json = nlohmann::ordered_json;

inline json to_json(const Matrix& m) { return m.rows(); }

inline Matrix matrix_from_json(const json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n) throw InvalidInput(what + ": expected " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != n) throw InvalidInput(what + ": expected rows of length " + std::to_string(n));
    std::vector<double> row;
    for (const auto& x : r) {
      if (!x.is_number()) throw InvalidInput(what + ": expected a number");
      row.push_back(x.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

/// {"n": int, "matrices": {"<label>": [[row], ...]}}; labels must match `sigma`.
inline MatrixSet matrix_set_from_json(const json& j, const Alphabet& sigma) {
  if (!j.is_object() || !j.contains("n") || !j.contains("matrices"))
    throw InvalidInput("matrix document needs fields \"n\" and \"matrices\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) throw InvalidInput("\"n\" must be a positive integer");
  const auto n = j["n"].get<std::size_t>();
  std::map<std::string, Matrix> by;
  for (const auto& [label, m] : j["matrices"].items()) by.emplace(label, matrix_from_json(m, n, "matrix '" + label + "'"));
  return MatrixSet::from_labels(sigma, by);
}

inline json to_json(const MatrixSet& m) {
  json mats = json::object();
  for (Label l = 0; l < m.size(); ++l) mats[m.alphabet()[l]] = to_json(m[l]);
  return {{"n", m.dim()}, {"matrices", mats}};
}

inline MatrixSet parse_matrix_set(const std::string& text, const Alphabet& sigma, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, std::string("expected a JSON document: ") + e.what());
  }
  return matrix_set_from_json(j, sigma);
}

inline json to_json(const LabeledDigraph& g) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : g.nodes()) nodes.push_back(n.str());
  for (const auto& e : g.labeled_edges()) edges.push_back({e.src.str(), e.dst.str(), e.label});
  return {{"alphabet", g.alphabet().letters()}, {"nodes", nodes}, {"edges", edges}};
}

inline json certificate_json(const LabeledDigraph& g, const QuadCertificate& c) {
  json nodes = json::object();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) nodes[g.node(i).str()] = to_json(c.p.at(i).matrix());
  return {{"n", c.p.empty() ? 0 : c.p.front().n()}, {"nodes", nodes}};
}

inline json to_json(const LabeledDigraph& g, const JsrResult& r) {
  return {{"r_lower", r.r_lower},       {"r_upper", r.r_upper},   {"iterations", r.bisection_iters},
          {"tol", r.tol},               {"beta_active", r.beta_active}, {"warnings", r.warnings},
          {"certificate", certificate_json(g, r.certificate)}};
}

/// Loads a graph from a reference string ("gallery:<name>", a path, or "-").
using GraphLoader = std::function<LabeledDigraph(const std::string&)>;

/// A graph reference in an experiment config: either a string, or
/// {"graph": <reference>, "lift": "fwd"|"bwd"|"sum"|"union"|"trans", "t": k}.
inline LabeledDigraph resolve_graph(const json& ref, const GraphLoader& load) {
  if (ref.is_string()) return load(ref.get<std::string>());
  if (!ref.is_object() || !ref.contains("graph")) throw InvalidInput("graph reference needs a \"graph\" field");
  LabeledDigraph g = resolve_graph(ref["graph"], load);
  if (!ref.contains("lift")) return g;
  const auto kind = ref["lift"].get<std::string>();
  const auto t = ref.value("t", std::size_t{1});
  if (kind == "fwd") return fwd_comp_lift(g, t);
  if (kind == "bwd") return bwd_comp_lift(g, t);
  if (kind == "sum") return sum_lift(g, t);
  if (kind == "union") return comp_lift_union(g, t);
  if (kind == "trans") return transitive_comp_lift(g, t).graph;
  throw InvalidInput("unknown lift '" + kind + "'");
}

inline ExperimentConfig experiment_config_from_json(const json& j, const GraphLoader& load) {
  if (!j.is_object() || !j.contains("graph_pairs")) throw InvalidInput("experiment config needs \"graph_pairs\"");
  ExperimentConfig c;
  for (const auto& p : j["graph_pairs"]) {
    if (!p.contains("base") || !p.contains("comparison")) throw InvalidInput("each pair needs \"base\" and \"comparison\"");
    c.graph_pairs.push_back({p.value("name", "pair " + std::to_string(c.graph_pairs.size())), resolve_graph(p["base"], load),
                             resolve_graph(p["comparison"], load)});
  }
  c.n = j.value("n", c.n);
  c.samples = j.value("samples", c.samples);
  c.seed = j.value("seed", c.seed);
  c.tol = j.value("tol", c.tol);
  c.strict_margin = j.value("strict_margin", c.strict_margin);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

inline json to_json(const ExperimentStats& s, const ExperimentConfig& c) {
  json pairs = json::array();
  for (std::size_t p = 0; p < s.pairs.size(); ++p) {
    const auto& ps = s.pairs[p];
    pairs.push_back({{"name", ps.name},
                     {"counted", ps.counted},
                     {"improved", ps.improved},
                     {"improved_fraction", ps.improved_fraction},
                     {"mean_gap_when_improved", ps.mean_gap_when_improved},
                     {"min_gap", ps.min_gap},
                     {"max_gap", ps.max_gap}});
  }
  std::size_t rejections = 0;
  for (const auto& r : s.records) rejections += r.rejections;
  return {{"n", c.n},
          {"samples", c.samples},
          {"seed", c.seed},
          {"tol", c.tol},
          {"strict_margin", c.strict_margin},
          {"generator", RngStream::generator_id},
          {"pairs", pairs},
          {"excluded", s.excluded},
          {"excluded_fraction", s.excluded_fraction},
          {"healthy", s.healthy},
          {"rejections", rejections}};
}

/// Columns: index, seed-stream, one r column per distinct graph, then gap and
/// improved per pair, then rejections.
inline std::string records_csv(const ExperimentStats& s, const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "index,stream";
  for (std::size_t g = 0; g < s.graphs.size(); ++g) out << ",r_g" << g;
  for (std::size_t p = 0; p < s.pairs.size(); ++p) out << ",gap_" << p << ",improved_" << p;
  out << ",rejections,excluded\n";
  for (const auto& r : s.records) {
    out << r.index << ',' << c.seed << ':' << r.index;
    for (double x : r.r) out << ',' << x;
    for (std::size_t p = 0; p < r.gap.size(); ++p) out << ',' << r.gap[p] << ',' << (r.improved[p] ? 1 : 0);
    out << ',' << r.rejections << ',' << (r.excluded ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace pclf
