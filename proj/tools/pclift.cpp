#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pclf/json_io.hpp"
#include "pclf/pclf.hpp"

namespace {

using namespace pclf;

enum Exit { kYes = 0, kNo = 1, kUnknown = 2, kUsage = 3, kBudget = 4 };

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

LabeledDigraph load_graph(const std::string& ref) {
  constexpr std::string_view scheme = "gallery:";
  if (ref.starts_with(scheme)) {
    const auto name = ref.substr(scheme.size());
    if (auto g = gallery::find(name)) return *g;
    throw InvalidInput("no gallery graph named '" + name + "'");
  }
  return parse_graph(read_text(ref), ref == "-" ? "<stdin>" : ref);
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

struct Output {
  bool as_json = false;
  void emit(const json& j, const std::string& text) const {
    if (as_json) {
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << text;
    }
  }
};

int cmd_check(const std::string& ref, const Output& out) {
  auto g = load_graph(ref);
  auto pc = is_path_complete(g);
  json j{{"path_complete", pc.complete},
         {"strongly_connected", is_strongly_connected(g)},
         {"weakly_connected", is_weakly_connected(g)},
         {"sink_free", is_sink_free(g)},
         {"source_free", is_source_free(g)}};
  std::ostringstream s;
  s << "path-complete: " << yes_no(pc.complete);
  if (pc.witness) {
    const auto w = g.alphabet().render(*pc.witness);
    s << " (unreadable word: " << (w.empty() ? "<empty>" : w) << ")";
    j["unreadable_word"] = w;
  }
  s << "\nstrongly-connected: " << yes_no(j["strongly_connected"]) << "\nweakly-connected: "
    << yes_no(j["weakly_connected"]) << "\nsink-free: " << yes_no(j["sink_free"])
    << "\nsource-free: " << yes_no(j["source_free"]) << "\n";
  if (pc.complete) {
    auto a = satisfies_assumption1(g);
    j["assumption1"] = a.holds;
    s << "assumption1: " << yes_no(a.holds);
    if (a.redundant_edge) {
      const auto& e = *a.redundant_edge;
      j["redundant_edge"] = {e.src.str(), e.dst.str(), e.label};
      s << " (redundant edge " << e.src.str() << " -> " << e.dst.str() << " on " << e.label << ")";
    } else if (!a.strongly_connected) {
      s << " (not strongly connected)";
    }
    s << "\n";
  } else {
    j["assumption1"] = nullptr;
    s << "assumption1: n/a\n";
  }
  out.emit(j, s.str());
  return pc.complete ? kYes : kNo;
}

int cmd_lift(const std::string& ref, const std::string& kind, std::size_t t, const std::string& format) {
  auto g = load_graph(ref);
  LabeledDigraph h = g;
  std::vector<std::pair<std::size_t, std::size_t>> eps;
  if (kind == "fwd") {
    h = fwd_comp_lift(g, t);
  } else if (kind == "bwd") {
    h = bwd_comp_lift(g, t);
  } else if (kind == "sum") {
    h = sum_lift(g, t);
  } else if (kind == "union") {
    h = comp_lift_union(g, t);
  } else {
    auto tl = transitive_comp_lift(g, t);
    eps = tl.epsilon_indices();
    h = tl.graph;
  }
  if (format == "dot") {
    std::cout << to_dot(h, eps);
  } else if (format == "json") {
    std::cout << to_json(h).dump(2) << '\n';
  } else {
    std::cout << render_graph(h);
  }
  return kYes;
}

json witness_json(const SimulationWitness& w) {
  json m = json::object();
  for (const auto& [k, v] : w.mapping()) m[k.str()] = v.str();
  return m;
}

int cmd_simulate(const std::string& r1, const std::string& r2, const std::string& via, std::size_t tmax,
                 const Output& out) {
  auto g1 = load_graph(r1), g2 = load_graph(r2);
  json j{{"via", via}};
  std::ostringstream s;
  if (via == "direct") {
    auto w = find_simulation(g1, g2);
    j["verdict"] = w ? "yes" : "no";
    if (w) {
      j["level"] = 0;
      j["witness"] = witness_json(*w);
      s << "yes\n" << w->str() << "\n";
    } else {
      s << "no: no edge-preserving node map exists\n";
    }
    out.emit(j, s.str());
    return w ? kYes : kNo;
  }
  j["tmax"] = tmax;
  LiftSimVerdict v = via == "comp"  ? simulates_comp_lift(g1, g2, tmax)
                     : via == "bwd" ? simulates_bwd_comp_lift(g1, g2, tmax)
                     : via == "sum" ? simulates_sum_lift(g1, g2, tmax)
                                    : simulates_trans_lift(g1, g2, tmax);
  int code = kUnknown;
  if (const auto* y = std::get_if<SimYes>(&v)) {
    j["verdict"] = "yes";
    j["level"] = y->level;
    j["witness"] = witness_json(y->witness);
    s << "yes at level " << y->level << "\n" << y->witness.str() << "\n";
    code = kYes;
  } else if (const auto* n = std::get_if<SimNo>(&v)) {
    j["verdict"] = "no";
    j["refutation"] = n->refutation;
    s << "no: " << n->refutation << "\n";
    code = kNo;
  } else {
    j["verdict"] = "unknown";
    s << "unknown: no simulation found up to level " << tmax << "\n";
  }
  out.emit(j, s.str());
  return code;
}

int cmd_iso(const std::string& r1, const std::string& r2, const Output& out) {
  auto g1 = load_graph(r1), g2 = load_graph(r2);
  auto m = isomorphism(g1, g2);
  json j{{"isomorphic", m.has_value()}};
  std::ostringstream s;
  s << "isomorphic: " << yes_no(m.has_value()) << "\n";
  if (m) {
    json map = json::object();
    for (std::size_t v = 0; v < g1.num_nodes(); ++v) {
      map[g1.node(v).str()] = g2.node((*m)[v]).str();
      s << "  " << g1.node(v).str() << " -> " << g2.node((*m)[v]).str() << "\n";
    }
    j["mapping"] = map;
  }
  out.emit(j, s.str());
  return m ? kYes : kNo;
}

int cmd_jsr(const std::string& gref, const std::string& mpath, double tol, double gamma, const std::string& cert_path,
            const Output& out) {
  auto g = load_graph(gref);
  auto m = parse_matrix_set(read_text(mpath), g.alphabet(), mpath);
  JsrOptions opt;
  opt.tol = tol;
  opt.gamma = gamma;
  auto r = rho_upper(g, m, opt);
  auto j = to_json(g, r);
  if (!cert_path.empty()) {
    std::ofstream f(cert_path);
    if (!f) throw InvalidInput("cannot write '" + cert_path + "'");
    f << j["certificate"].dump(2) << '\n';
  }
  std::ostringstream s;
  s.precision(10);
  s << "r_lower: " << r.r_lower << "\nr_upper: " << r.r_upper << "\niterations: " << r.bisection_iters << "\n";
  if (r.beta_active) s << "note: certificate eigenvalue cap is active\n";
  if (!out.as_json) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  }
  out.emit(j, s.str());
  return kYes;
}

int cmd_horizon(const std::string& mpath, std::size_t kmax, const Output& out) {
  auto doc = json::parse(read_text(mpath));
  if (!doc.contains("matrices") || !doc["matrices"].is_object()) throw InvalidInput("matrix document needs \"matrices\"");
  std::vector<std::string> labels;
  for (const auto& [l, _] : doc["matrices"].items()) labels.push_back(l);
  auto m = matrix_set_from_json(doc, Alphabet(labels));
  auto k = contraction_horizon(m, kmax);
  json j{{"kmax", kmax}, {"K", k ? json(*k) : json(nullptr)}};
  std::ostringstream s;
  if (!k) {
    s << "no contraction horizon up to " << kmax << "\n";
    out.emit(j, s.str());
    return kNo;
  }
  auto h = horizon_graph(m.alphabet(), *k);
  auto rep = verify_certificate({h, m, 1.0}, horizon_certificate(h, m), 1e-8, Normalization::psd);
  j["nodes"] = h.num_nodes();
  j["edges"] = h.num_edges();
  j["path_complete"] = is_path_complete(h).complete;
  j["certificate_verified"] = rep.ok;
  j["worst_margin"] = rep.worst_margin;
  s << "K: " << *k << "\nhorizon graph: " << h.num_nodes() << " nodes, " << h.num_edges()
    << " edges\npath-complete: " << yes_no(j["path_complete"]) << "\ncertificate verified: " << yes_no(rep.ok)
    << " (worst margin " << rep.worst_margin << ")\n";
  out.emit(j, s.str());
  return rep.ok ? kYes : kNo;
}

int cmd_experiment(const std::string& cfg_path, const std::string& stats_path, const std::string& csv_path,
                   std::optional<std::size_t> threads, std::optional<std::size_t> samples, const Output& out) {
  auto cfg = experiment_config_from_json(json::parse(read_text(cfg_path)), load_graph);
  if (threads) cfg.threads = *threads;
  if (samples) cfg.samples = *samples;
  cfg.validate();
  auto stats = run_comparison(cfg);
  auto j = to_json(stats, cfg);
  if (!stats_path.empty()) {
    std::ofstream f(stats_path);
    if (!f) throw InvalidInput("cannot write '" + stats_path + "'");
    f << j.dump(2) << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw InvalidInput("cannot write '" + csv_path + "'");
    f << records_csv(stats, cfg);
  }
  std::ostringstream s;
  s.precision(4);
  for (const auto& p : stats.pairs) {
    s << p.name << ": improved " << p.improved << "/" << p.counted << " (" << 100 * p.improved_fraction
      << "%), mean gap when improved " << p.mean_gap_when_improved << "\n";
  }
  s << "excluded samples: " << stats.excluded << (stats.healthy ? "" : " (unhealthy run)") << "\n";
  out.emit(j, s.str());
  return stats.healthy ? kYes : kBudget;
}

int cmd_gallery(const std::string& name, const Output& out) {
  if (name.empty()) {
    json j = json::array();
    std::ostringstream s;
    for (const auto& e : gallery::entries()) {
      j.push_back({{"name", e.name}, {"provenance", e.provenance}, {"nodes", e.graph.num_nodes()},
                   {"edges", e.graph.num_edges()}});
      s << e.name << "\t" << e.provenance << "\n";
    }
    out.emit(j, s.str());
    return kYes;
  }
  auto g = gallery::find(name);
  if (!g) throw InvalidInput("no gallery graph named '" + name + "'");
  out.emit(to_json(*g), render_graph(*g));
  return kYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-complete graph lifts, simulations and JSR bounds"};
  app.require_subcommand(1);
  Output out;

  std::string g1, g2, kind = "fwd", format = "text", via = "comp", matrices, cert, config, stats_path, csv_path, name;
  std::size_t t = 1, tmax = 3, kmax = 12;
  double tol = 1e-4, gamma = 1.0;
  std::optional<std::size_t> threads, samples;

  auto* check = app.add_subcommand("check", "path-completeness, connectivity and non-redundancy");
  check->add_option("graph", g1, "graph file, gallery:<name>, or - for stdin")->required();
  check->add_flag("--json", out.as_json);

  auto* lift = app.add_subcommand("lift", "print a lift of a graph");
  lift->add_option("graph", g1)->required();
  lift->add_option("--kind", kind)->check(CLI::IsMember({"fwd", "bwd", "sum", "union", "trans"}));
  lift->add_option("-t,--depth", t);
  lift->add_option("--format", format)->check(CLI::IsMember({"text", "dot", "json"}));

  auto* sim = app.add_subcommand("simulate", "does (a lift of) the first graph simulate the second");
  sim->add_option("simulating", g1)->required();
  sim->add_option("simulated", g2)->required();
  sim->add_option("--via", via)->check(CLI::IsMember({"direct", "comp", "bwd", "sum", "trans"}));
  sim->add_option("--tmax", tmax);
  sim->add_flag("--json", out.as_json);

  auto* iso = app.add_subcommand("iso", "graph isomorphism");
  iso->add_option("first", g1)->required();
  iso->add_option("second", g2)->required();
  iso->add_flag("--json", out.as_json);

  auto* jsr = app.add_subcommand("jsr", "certified upper bound on the joint spectral radius");
  jsr->add_option("--graph", g1)->required();
  jsr->add_option("--matrices", matrices)->required();
  jsr->add_option("--tol", tol);
  jsr->add_option("--gamma", gamma);
  jsr->add_option("--certificate", cert, "write the certificate JSON here");
  jsr->add_flag("--json", out.as_json);

  auto* hor = app.add_subcommand("horizon", "contraction horizon and its expanded-form certificate");
  hor->add_option("--matrices", matrices)->required();
  hor->add_option("--kmax", kmax);
  hor->add_flag("--json", out.as_json);

  auto* exp = app.add_subcommand("experiment", "randomized comparison of graphs");
  exp->add_option("--config", config)->required();
  exp->add_option("--out", stats_path, "stats JSON output");
  exp->add_option("--csv", csv_path, "per-sample CSV output");
  exp->add_option("--threads", threads);
  exp->add_option("--samples", samples);
  exp->add_flag("--json", out.as_json);

  auto* gal = app.add_subcommand("gallery", "list bundled graphs or print one");
  gal->add_option("name", name);
  gal->add_flag("--json", out.as_json);

  auto* dot = app.add_subcommand("export-dot", "Graphviz rendering of a graph");
  dot->add_option("graph", g1)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*check) return cmd_check(g1, out);
    if (*lift) return cmd_lift(g1, kind, t, format);
    if (*sim) return cmd_simulate(g1, g2, via, tmax, out);
    if (*iso) return cmd_iso(g1, g2, out);
    if (*jsr) return cmd_jsr(g1, matrices, tol, gamma, cert, out);
    if (*hor) return cmd_horizon(matrices, kmax, out);
    if (*exp) return cmd_experiment(config, stats_path, csv_path, threads, samples, out);
    if (*gal) return cmd_gallery(name, out);
    if (*dot) {
      std::cout << to_dot(load_graph(g1));
      return kYes;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  }
  return kUsage;
}
