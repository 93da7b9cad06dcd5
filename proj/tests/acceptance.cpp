// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance              run every criterion
//   acceptance --criterion k

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "pclf/pclf.hpp"
#include "test_support.hpp"

namespace {

using namespace pclf;
using namespace pclf::gallery;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

const Alphabet kSigma = Alphabet::numbered(2);

MatrixSet sampled(std::uint64_t seed, std::uint64_t k) {
  RngStream r(seed, k);
  return MatrixSet(kSigma, sample_stable_invertible_pair(3, r).matrices);
}

double word_radius_bound(const MatrixSet& m, std::size_t max_len) {
  double best = 0;
  std::vector<Matrix> level{Matrix::identity(m.dim())};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Matrix> next;
    for (const auto& p : level)
      for (Label l = 0; l < m.size(); ++l) {
        next.push_back(p * m[l]);
        best = std::max(best, std::pow(spectral_radius(next.back()), 1.0 / static_cast<double>(len)));
      }
    level = std::move(next);
  }
  return best;
}

std::vector<LabeledDigraph> random_corpus(std::size_t count, bool sink_free, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledDigraph> out;
  while (out.size() < count) {
    auto g = testing::random_graph(rng, 1 + rng() % 5, 2, 0.25);
    if (!is_weakly_connected(g) || !is_path_complete(g)) continue;
    if (sink_free ? !is_sink_free(g) : !is_source_free(g)) continue;
    out.push_back(std::move(g));
  }
  return out;
}

Outcome criterion1() {
  Outcome o;
  o.require(isomorphic(fwd_comp_lift(g0(), 1), g2()), "fwd lift of G0 is G2");
  o.require(isomorphic(bwd_comp_lift(g0(), 1), g1()), "bwd lift of G0 is G1");
  o.require(!find_simulation(g1(), g2()) && !find_simulation(g2(), g1()), "G1, G2 mutually non-simulating");
  o.require(find_simulation(fwd_comp_lift(g1(), 1), g2()).has_value(), "fwd lift of G1 simulates G2");
  o.require(find_simulation(bwd_comp_lift(g2(), 1), g1()).has_value(), "bwd lift of G2 simulates G1");
  o.require(isomorphic(sum_lift(g_alpha(), 2), disjoint_union(g_alpha(), g0())), "sum lift of G_alpha splits");
  o.detail << "lift identities and simulations hold";
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (LiftLevel t = 1; t <= 4; ++t) {
    auto s = sum_lift(g1(), t);
    o.require(!find_simulation(s, g2()), "sum lift of G1 at t=" + std::to_string(t) + " must not simulate G2");
    o.detail << "t=" << t << " (" << s.num_nodes() << " nodes) no; ";
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  o.require(satisfies_assumption1(g_phi()).holds, "G_phi non-redundant");
  o.require(satisfies_assumption1(g_psi()).holds, "G_psi non-redundant");
  o.require(!find_simulation(g_phi(), g_psi()), "no direct simulation");
  auto v = simulates_comp_lift(g_phi(), g_psi(), 3);
  const auto* no = std::get_if<SimNo>(&v);
  o.require(no != nullptr, "comp lift verdict is No");
  if (no) {
    o.require(no->refutation.find("single-letter") != std::string::npos, "structural single-label refutation");
    o.detail << "refutation: " << no->refutation;
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto lifted = transitive_comp_lift(g_phi(), 1).graph;
  auto v = simulates_trans_lift(g_phi(), g_psi(), 1);
  const auto* yes = std::get_if<SimYes>(&v);
  o.require(yes != nullptr, "transitive lift simulates G_psi");
  if (!yes) return o;
  const auto& w = yes->witness;
  const auto a = NodeId::base("a"), a2 = NodeId::base("a'"), b2 = NodeId::base("b'");
  o.require(w(a2) == a, "a' maps to a");
  o.require(w(b2) == NodeId::word(a, {"2"}), "b' maps to (a,2)");
  std::set<std::tuple<NodeId, NodeId, std::string>> have;
  for (const auto& e : lifted.labeled_edges()) have.emplace(e.src, e.dst, e.label);
  std::size_t checked = 0;
  for (const auto& e : g_psi().labeled_edges()) {
    o.require(have.count({w(e.src), w(e.dst), e.label}) == 1, "edge " + e.src.str() + "->" + e.dst.str() + " preserved");
    ++checked;
  }
  o.detail << w.str() << "; " << checked << " edges re-verified";
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::size_t graphs = 0;
  for (const auto& g : random_corpus(100, true, 2024)) {
    ++graphs;
    for (LiftLevel t = 0; t <= 3; ++t)
      o.require(is_weakly_connected(fwd_comp_lift(g, t)), "fwd lift connected:\n" + render_graph(g));
  }
  for (const auto& g : random_corpus(100, false, 4048)) {
    ++graphs;
    for (LiftLevel t = 0; t <= 3; ++t)
      o.require(is_weakly_connected(bwd_comp_lift(g, t)), "bwd lift connected:\n" + render_graph(g));
    for (LiftLevel t = 0; t <= 3; ++t)
      o.require(bwd_comp_lift(g, t) == transpose(fwd_comp_lift(transpose(g), t)), "transpose identity");
  }
  o.detail << graphs << " graphs, t <= 3";
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst_gap = 1e300;
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto m = sampled(606, k);
    auto r = rho_upper(g0(), m);
    o.require(verify_certificate({g0(), m, r.r_upper}, r.certificate, 1e-6).ok, "certificate verifies, sample " + std::to_string(k));
    const double gap = r.r_upper - word_radius_bound(m, 6);
    worst_gap = std::min(worst_gap, gap);
    o.require(gap >= -1e-6, "r_upper above product radii, sample " + std::to_string(k));
  }
  auto pair = [](const Matrix& a) { return MatrixSet(kSigma, std::vector<Matrix>{a, a}); };
  const double c = std::cos(0.7), s = std::sin(0.7);
  const std::vector<std::pair<Matrix, double>> single{{Matrix::diag({0.5, 0.25, -0.1}), 0.5},
                                                      {Matrix{{0.8 * c, -0.8 * s}, {0.8 * s, 0.8 * c}}, 0.8},
                                                      {Matrix{{0.6, 1}, {0, 0.6}}, 0.6}};
  for (const auto& [a, rho] : single) {
    auto r = rho_upper(g0(), pair(a));
    o.require(std::abs(r.r_upper - rho) <= 1e-3, "single matrix bracket collapses to " + std::to_string(rho));
  }
  o.detail << "50 samples verified; min r_upper - product radius bound = " << worst_gap;
  return o;
}

Outcome criterion7() {
  Outcome o;
  const JsrOptions opt;
  double worst_fwd = -1e300, worst_sum = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto m = sampled(707, k);
    for (const auto& g : {g0(), g_alpha()}) {
      const double base = rho_upper(g, m, opt).r_upper;
      const double fwd = rho_upper(fwd_comp_lift(g, 1), m, opt).r_upper - base;
      const double sum = std::abs(rho_upper(sum_lift(g, 2), m, opt).r_upper - base);
      worst_fwd = std::max(worst_fwd, fwd);
      worst_sum = std::max(worst_sum, sum);
      o.require(fwd <= 2 * opt.tol, "comp lift never worse, sample " + std::to_string(k));
      o.require(sum <= 2 * opt.tol, "sum lift unchanged, sample " + std::to_string(k));
    }
  }
  o.detail << "max fwd excess " << worst_fwd << ", max sum deviation " << worst_sum;
  return o;
}

Outcome criterion8() {
  Outcome o;
  ExperimentConfig c;
  c.graph_pairs = {{"G_alpha vs fwd1", g_alpha(), fwd_comp_lift(g_alpha(), 1)},
                   {"G0 vs fwd1", g0(), fwd_comp_lift(g0(), 1)},
                   {"fwd1 vs fwd2", fwd_comp_lift(g0(), 1), fwd_comp_lift(g0(), 2)}};
  c.n = 3;
  c.samples = 1000;
  c.seed = 42;
  const auto t0 = std::chrono::steady_clock::now();
  auto s = run_comparison(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double frac_lo[] = {0.06, 0.06, 0.02}, frac_hi[] = {0.20, 0.20, 0.10};
  o.detail.precision(3);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& ps = s.pairs[p];
    o.detail << ps.name << ": " << 100 * ps.improved_fraction << "% gap " << ps.mean_gap_when_improved << "; ";
    o.require(ps.improved_fraction >= frac_lo[p] && ps.improved_fraction <= frac_hi[p], ps.name + " fraction in bracket");
    o.require(ps.mean_gap_when_improved >= 0.20 && ps.mean_gap_when_improved <= 0.70, ps.name + " mean gap in bracket");
  }
  o.require(s.healthy, "excluded fraction below 2%");
  o.detail << "excluded " << s.excluded << ", " << secs << " s";
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::size_t found = 0, drawn = 0, worst_k = 0;
  double worst_margin = 1e300;
  for (std::uint64_t k = 0; found < 20 && k < 2000; ++k) {
    auto m = sampled(909, k);
    ++drawn;
    const double r = rho_upper(g0(), m).r_upper;
    if (r >= 1) continue;
    ++found;
    auto kk = contraction_horizon(m, 12);
    o.require(kk.has_value(), "no horizon K <= 12 for sample " + std::to_string(k) + " with r_upper " + std::to_string(r));
    if (!kk) continue;
    worst_k = std::max(worst_k, *kk);
    auto h = horizon_graph(kSigma, *kk);
    o.require(is_path_complete(h).complete, "horizon graph path-complete");
    auto rep = verify_certificate({h, m, 1.0}, horizon_certificate(h, m), 1e-8, Normalization::psd);
    worst_margin = std::min(worst_margin, rep.worst_margin);
    o.require(rep.worst_margin >= -1e-8, "explicit certificate margin, sample " + std::to_string(k));
  }
  o.require(found == 20, "20 pairs with rho_upper(G0) < 1");
  o.detail << found << " pairs (of " << drawn << " drawn), max K " << worst_k << ", min margin " << worst_margin;
  return o;
}

Outcome criterion10() {
  Outcome o;
  ExperimentConfig c;
  c.samples = 100;
  c.seed = 1010;
  const std::vector<std::tuple<std::string, LabeledDigraph, LabeledDigraph, WitnessKind>> pairs{
      {"G1 <= G2", g1(), g2(), WitnessKind::comp_lift},
      {"G2 <= G1", g2(), g1(), WitnessKind::bwd_comp_lift},
      {"G_phi <= G_psi", g_phi(), g_psi(), WitnessKind::trans_lift}};
  for (const auto& [name, a, b, kind] : pairs) {
    auto rep = preorder_spotcheck(a, b, kind, c);
    o.require(rep.pass(), name + " (" + rep.certificate + ")");
    o.detail << name << " via " << to_string(kind) << ": " << rep.violations << " violations, max excess "
             << rep.max_excess << "; ";
  }
  return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {"gallery lift identities", criterion1},
    {"sum lifts never simulate G2", criterion2},
    {"counterexample suite", criterion3},
    {"transitive lift witness", criterion4},
    {"lift connectivity and transpose duality", criterion5},
    {"upper bound soundness", criterion6},
    {"lift-order properties", criterion7},
    {"randomized lift comparison", criterion8},
    {"contraction horizon certificates", criterion9},
    {"preorder spot checks", criterion10},
};

bool run(std::size_t k) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = kCriteria[k - 1].second();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %zu %s: %s (%.1f s) %s\n", k, o.pass ? "PASS" : "FAIL", kCriteria[k - 1].first, secs,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const auto k = std::strtoul(argv[2], nullptr, 10);
    if (k < 1 || k > kCriteria.size()) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", kCriteria.size());
      return 2;
    }
    return run(k) ? 0 : 1;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion k]\n", argv[0]);
    return 2;
  }
  bool all = true;
  for (std::size_t k = 1; k <= kCriteria.size(); ++k) all &= run(k);
  return all ? 0 : 1;
}
