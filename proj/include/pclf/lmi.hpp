#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/graph.hpp"
#include "pclf/graph_ops.hpp"
#include "pclf/numerics.hpp"

namespace pclf {

/// One matrix per alphabet letter, all of the same dimension.
class MatrixSet {
 public:
  MatrixSet(Alphabet alphabet, std::vector<Matrix> matrices) : alphabet_(std::move(alphabet)), m_(std::move(matrices)) {
    if (m_.size() != alphabet_.size())
      throw InvalidInput("expected " + std::to_string(alphabet_.size()) + " matrices, got " + std::to_string(m_.size()));
    for (const auto& a : m_) {
      if (a.n() != m_.front().n()) throw InvalidInput("matrices must share one dimension");
      a.check_finite();
    }
  }
  static MatrixSet from_labels(Alphabet alphabet, const std::map<std::string, Matrix>& by_label) {
    if (by_label.size() != alphabet.size()) throw InvalidInput("matrix labels must match the alphabet exactly");
    std::vector<Matrix> v;
    for (const auto& l : alphabet.letters()) {
      auto it = by_label.find(l);
      if (it == by_label.end()) throw InvalidInput("no matrix for label '" + l + "'");
      v.push_back(it->second);
    }
    return MatrixSet(std::move(alphabet), std::move(v));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t dim() const { return m_.front().n(); }
  std::size_t size() const { return m_.size(); }
  const Matrix& operator[](Label l) const { return m_.at(l); }
  const std::vector<Matrix>& matrices() const { return m_; }

  double max_spectral_radius() const {
    double r = 0;
    for (const auto& a : m_) r = std::max(r, spectral_radius(a));
    return r;
  }
  double max_operator_norm() const {
    double r = 0;
    for (const auto& a : m_) r = std::max(r, operator_norm(a));
    return r;
  }

  /// A_w = A_{w1} A_{w2} ... A_{wm}; identity for the empty word.
  Matrix product(const std::vector<Label>& word) const {
    Matrix p = Matrix::identity(dim());
    for (Label l : word) p = p * m_.at(l);
    return p;
  }

 private:
  Alphabet alphabet_;
  std::vector<Matrix> m_;
};

struct LmiProblem {
  LabeledDigraph graph;
  MatrixSet matrices;
  double r = 1.0;
  double gamma = 1.0;

  void validate() const {
    if (!(graph.alphabet() == matrices.alphabet())) throw InvalidInput("matrix labels do not match the graph alphabet");
    if (!(r > 0) || !std::isfinite(r)) throw InvalidInput("r must be positive");
    if (!(gamma > 0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be positive");
  }
};

/// Per-node Gram matrices, aligned with graph.nodes().
struct QuadCertificate {
  std::vector<SymMatrix> p;
};

/// weight · mapᵀ P_node map
struct LmiTerm {
  std::size_t node;
  Matrix map;
  double weight;
};

/// Σ terms + offset ⪰ 0. Edge constraints carry the slack in the feasibility oracle.
struct LmiConstraint {
  enum class Kind { edge, normalization };
  Kind kind;
  std::vector<LmiTerm> terms;
  Matrix offset;
  std::optional<Edge> edge;
  std::size_t node = 0;

  SymMatrix evaluate(const QuadCertificate& c) const {
    Matrix v = offset;
    for (const auto& t : terms) v += t.weight * (t.map.transposed() * c.p.at(t.node).matrix() * t.map);
    return SymMatrix(v);
  }
  /// Entry magnitude of the largest single term, used to scale tolerances.
  double scale(const QuadCertificate& c) const {
    double s = offset.max_abs();
    for (const auto& t : terms) s = std::max(s, std::abs(t.weight) * congruence(t.map, c.p.at(t.node)).matrix().max_abs());
    return s;
  }
};

inline std::vector<LmiConstraint> assemble_lmi(const LmiProblem& p) {
  p.validate();
  const std::size_t n = p.matrices.dim();
  const Matrix id = Matrix::identity(n);
  std::vector<LmiConstraint> out;
  for (const auto& e : p.graph.edges()) {
    out.push_back({LmiConstraint::Kind::edge,
                   {{e.src, id, p.r * p.r}, {e.dst, p.matrices[e.label], -p.gamma}},
                   Matrix(n),
                   e,
                   e.src});
  }
  for (std::size_t s = 0; s < p.graph.num_nodes(); ++s) {
    out.push_back({LmiConstraint::Kind::normalization, {{s, id, 1.0}}, -1.0 * id, std::nullopt, s});
  }
  return out;
}

enum class Normalization { identity, psd };

struct VerifyReport {
  bool ok = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_constraint;
  explicit operator bool() const { return ok; }
};

inline std::string describe(const LabeledDigraph& g, const LmiConstraint& c) {
  if (c.edge) {
    return "edge (" + g.node(c.edge->src).str() + ", " + g.node(c.edge->dst).str() + ", " +
           g.alphabet()[c.edge->label] + ")";
  }
  return "node " + g.node(c.node).str();
}

/// Direct eigenvalue check of every constraint. A constraint passes when its
/// smallest eigenvalue is at least -tol·max(1, term scale).
inline VerifyReport verify_certificate(const LmiProblem& p, const QuadCertificate& cert, double tol,
                                       Normalization norm = Normalization::identity) {
  p.validate();
  if (cert.p.size() != p.graph.num_nodes()) throw InvalidInput("certificate does not cover every node");
  for (const auto& m : cert.p)
    if (m.n() != p.matrices.dim()) throw InvalidInput("certificate dimension mismatch");
  VerifyReport rep;
  rep.ok = true;
  auto constraints = assemble_lmi(p);
  for (auto& c : constraints) {
    if (c.kind == LmiConstraint::Kind::normalization && norm == Normalization::psd) c.offset = Matrix(p.matrices.dim());
    const double m = min_eigval(c.evaluate(cert));
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      rep.worst_constraint = describe(p.graph, c);
    }
    if (m < -tol * std::max(1.0, c.scale(cert))) rep.ok = false;
  }
  return rep;
}

struct SdpOptions {
  std::size_t max_newton_steps = 2000;
  double eps = 1e-8;
  double beta = 1e6;
  double mu = 8.0;
  double centering_tol = 1e-6;
  std::size_t max_centering_steps = 50;
};

struct SdpResult {
  std::optional<QuadCertificate> certificate;
  bool budget_exhausted = false;
  double slack = 0;  // best t reached
  std::size_t newton_steps = 0;
  explicit operator bool() const { return certificate.has_value(); }
};

namespace detail {

struct SdpBlock {
  Matrix g0;
  std::vector<std::size_t> vars;
  std::vector<Matrix> f;
};

/// Accumulates weight·mapᵀ E_ij map for every symmetric basis element E_ij of one node.
inline void add_term(std::map<std::size_t, Matrix>& acc, std::size_t base, const Matrix& map,
                     double weight) {
  const std::size_t n = map.n();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++k) {
      Matrix f(n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          double v = map(i, r) * map(j, c);
          if (i != j) v += map(j, r) * map(i, c);
          f(r, c) = weight * v;
        }
      auto it = acc.find(base + k);
      if (it == acc.end()) {
        acc.emplace(base + k, f);
      } else {
        it->second += f;
      }
    }
  }
}

inline std::optional<Matrix> inverse_pd(const Matrix& g) {
  auto l = cholesky(SymMatrix(g));
  if (!l) return std::nullopt;
  const std::size_t n = g.n();
  Matrix inv(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    cholesky_solve(*l, e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = e[r];
  }
  return inv;
}

inline std::optional<double> logdet_pd(const Matrix& g) {
  auto l = cholesky(SymMatrix(g));
  if (!l) return std::nullopt;
  double s = 0;
  for (std::size_t i = 0; i < g.n(); ++i) s += 2 * std::log((*l)(i, i));
  return s;
}

}  // namespace detail

/// Semidefinite feasibility oracle: minimizes the slack t in
/// {edge constraints + tI ⪰ 0, normalization constraints ⪰ 0, P_s ⪯ βI}
/// with a log-det barrier path-following method. A certificate is returned
/// once t < -eps; an infeasible verdict once the barrier duality bound shows
/// t cannot go below -eps.
inline SdpResult sdp_feasible(const std::vector<LmiConstraint>& constraints, std::size_t num_nodes, std::size_t n,
                              const SdpOptions& opt = {}) {
  const std::size_t per = n * (n + 1) / 2;
  const std::size_t nv = num_nodes * per + 1;
  const std::size_t tvar = nv - 1;
  std::vector<detail::SdpBlock> blocks;
  for (const auto& c : constraints) {
    detail::SdpBlock b{c.offset, {}, {}};
    std::map<std::size_t, Matrix> acc;
    for (const auto& t : c.terms) {
      if (t.node >= num_nodes || t.map.n() != n) throw InvalidInput("constraint term out of range");
      detail::add_term(acc, t.node * per, t.map, t.weight);
    }
    if (c.kind == LmiConstraint::Kind::edge) acc.emplace(tvar, Matrix::identity(n));
    for (auto& [v, f] : acc) {
      b.vars.push_back(v);
      b.f.push_back(std::move(f));
    }
    blocks.push_back(std::move(b));
  }
  for (std::size_t s = 0; s < num_nodes; ++s) {
    detail::SdpBlock b{opt.beta * Matrix::identity(n), {}, {}};
    std::map<std::size_t, Matrix> acc;
    detail::add_term(acc, s * per, Matrix::identity(n), -1.0);
    for (auto& [v, f] : acc) {
      b.vars.push_back(v);
      b.f.push_back(std::move(f));
    }
    blocks.push_back(std::move(b));
  }
  const double theta = static_cast<double>(blocks.size() * n);

  auto block_value = [&](const detail::SdpBlock& b, const std::vector<double>& x) {
    Matrix g = b.g0;
    for (std::size_t k = 0; k < b.vars.size(); ++k) {
      const double xv = x[b.vars[k]];
      if (xv == 0.0) continue;
      g += xv * b.f[k];
    }
    return g;
  };
  auto unpack = [&](const std::vector<double>& x) {
    QuadCertificate c;
    for (std::size_t s = 0; s < num_nodes; ++s) {
      Matrix m(n);
      std::size_t k = s * per;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j, ++k) m(i, j) = m(j, i) = x[k];
      c.p.emplace_back(m);
    }
    return c;
  };

  // Start at P_s = 2I with t above the largest violation.
  std::vector<double> x(nv, 0.0);
  for (std::size_t s = 0; s < num_nodes; ++s) {
    std::size_t k = s * per;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j, ++k) x[k] = (i == j) ? 2.0 : 0.0;
  }
  double worst = 0;
  for (const auto& b : blocks) {
    auto g = block_value(b, x);
    worst = std::max(worst, -min_eigval(SymMatrix(g)));
  }
  x[tvar] = worst + 1.0;

  SdpResult res;
  auto barrier = [&](const std::vector<double>& y, double tau) -> std::optional<double> {
    double f = tau * y[tvar];
    for (const auto& b : blocks) {
      auto ld = detail::logdet_pd(block_value(b, y));
      if (!ld) return std::nullopt;
      f -= *ld;
    }
    return f;
  };

  for (const auto& b : blocks) {
    if (!detail::logdet_pd(block_value(b, x))) throw InvalidInput("no strictly feasible starting point for the barrier");
  }

  double tau = 1.0;
  for (;;) {
    // Centering, inexact: capped at max_centering_steps Newton steps.
    for (std::size_t inner = 0; inner < opt.max_centering_steps; ++inner) {
      if (x[tvar] < -opt.eps) {
        res.certificate = unpack(x);
        res.slack = x[tvar];
        return res;
      }
      if (res.newton_steps >= opt.max_newton_steps) {
        res.budget_exhausted = true;
        res.slack = x[tvar];
        return res;
      }
      ++res.newton_steps;
      std::vector<double> grad(nv, 0.0);
      Matrix hess(nv);
      grad[tvar] = tau;
      for (const auto& b : blocks) {
        auto w = detail::inverse_pd(block_value(b, x));
        if (!w) throw InvalidInput("barrier iterate left the feasible region");
        std::vector<Matrix> wf;
        wf.reserve(b.vars.size());
        for (std::size_t k = 0; k < b.vars.size(); ++k) {
          wf.push_back(*w * b.f[k]);
          double tr = 0;
          for (std::size_t i = 0; i < n; ++i) tr += wf.back()(i, i);
          grad[b.vars[k]] -= tr;
        }
        for (std::size_t k = 0; k < b.vars.size(); ++k) {
          for (std::size_t l = k; l < b.vars.size(); ++l) {
            double tr = 0;
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j) tr += wf[k](i, j) * wf[l](j, i);
            hess(b.vars[k], b.vars[l]) += tr;
            if (l != k) hess(b.vars[l], b.vars[k]) += tr;
          }
        }
      }
      double ridge = 0;
      std::optional<Matrix> lh;
      for (int attempt = 0; attempt < 20 && !lh; ++attempt) {
        Matrix h = hess;
        for (std::size_t i = 0; i < nv; ++i) h(i, i) += ridge;
        lh = cholesky(SymMatrix(h));
        ridge = ridge == 0 ? 1e-12 * std::max(1.0, hess.max_abs()) : ridge * 100;
      }
      if (!lh) {
        res.budget_exhausted = true;
        res.slack = x[tvar];
        return res;
      }
      std::vector<double> dx(nv);
      for (std::size_t i = 0; i < nv; ++i) dx[i] = -grad[i];
      cholesky_solve(*lh, dx);
      double dec = 0;
      for (std::size_t i = 0; i < nv; ++i) dec -= grad[i] * dx[i];
      if (dec / 2 <= opt.centering_tol) break;

      const double f0 = *barrier(x, tau);
      double step = 1.0;
      std::vector<double> y(nv);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        for (std::size_t i = 0; i < nv; ++i) y[i] = x[i] + step * dx[i];
        auto f = barrier(y, tau);
        if (f && *f <= f0 - 0.25 * step * dec) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      x = y;
    }
    res.slack = x[tvar];
    if (x[tvar] - theta / tau > -opt.eps) return res;
    tau *= opt.mu;
  }
}

/// Smallest r at which `cert` satisfies every edge constraint:
/// max over edges of sqrt(γ·λmax(L_a⁻¹ A_iᵀP_bA_i L_a⁻ᵀ)) with P_a = L_aL_aᵀ.
inline std::optional<double> certified_radius(const LabeledDigraph& g, const MatrixSet& m, const QuadCertificate& cert,
                                              double gamma = 1.0) {
  const std::size_t n = m.dim();
  double r2 = 0;
  for (const auto& e : g.edges()) {
    auto l = cholesky(cert.p.at(e.src));
    if (!l) return std::nullopt;
    Matrix x = congruence(m[e.label], cert.p.at(e.dst)).matrix();
    // x <- L⁻¹ x L⁻ᵀ
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        double v = x(i, c);
        for (std::size_t k = 0; k < i; ++k) v -= (*l)(i, k) * x(k, c);
        x(i, c) = v / (*l)(i, i);
      }
    }
    x = x.transposed();
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        double v = x(i, c);
        for (std::size_t k = 0; k < i; ++k) v -= (*l)(i, k) * x(k, c);
        x(i, c) = v / (*l)(i, i);
      }
    }
    r2 = std::max(r2, gamma * max_eigval(SymMatrix(x)));
  }
  return std::sqrt(std::max(0.0, r2));
}

struct JsrOptions {
  double tol = 1e-4;
  double gamma = 1.0;
  std::size_t max_iters = 60;
  double verify_tol = 1e-6;
  SdpOptions sdp{};
};

struct JsrResult {
  double r_upper = 0;
  double r_lower = 0;
  QuadCertificate certificate;
  std::size_t bisection_iters = 0;
  double tol = 0;
  bool beta_active = false;
  std::vector<std::string> warnings;
};

/// Verified bisection for the quadratic-template bound on the joint spectral radius.
inline JsrResult rho_upper(const LabeledDigraph& g, const MatrixSet& m, const JsrOptions& opt = {}) {
  if (!(opt.tol > 0)) throw InvalidInput("tol must be positive");
  JsrResult res;
  res.tol = opt.tol;
  if (!is_path_complete(g)) res.warnings.push_back("graph is not path-complete; the bound is not a JSR bound");
  const std::size_t n = m.dim();
  res.r_lower = m.max_spectral_radius();

  double hi = m.max_operator_norm();
  res.certificate.p.assign(g.num_nodes(), SymMatrix::identity(n));
  if (hi == 0.0) {
    res.r_upper = 0.0;
    return res;
  }
  // P = I is exact at the largest operator norm; nudge for rounding.
  for (int k = 0; !verify_certificate({g, m, hi, opt.gamma}, res.certificate, opt.verify_tol); ++k) {
    if (k > 50) throw BudgetError("identity certificate failed to verify");
    hi *= 1 + 1e-12 * (1 << std::min(k, 30));
  }
  double lo = std::min(res.r_lower, hi);

  while (hi - lo > opt.tol && res.bisection_iters < opt.max_iters) {
    ++res.bisection_iters;
    const double mid = 0.5 * (lo + hi);
    LmiProblem p{g, m, mid, opt.gamma};
    auto sdp = sdp_feasible(assemble_lmi(p), g.num_nodes(), n, opt.sdp);
    if (sdp.budget_exhausted) throw BudgetError("feasibility oracle exhausted its Newton budget at r = " + std::to_string(mid));
    if (sdp && verify_certificate(p, *sdp.certificate, opt.verify_tol)) {
      double r = mid;
      if (auto rc = certified_radius(g, m, *sdp.certificate, opt.gamma); rc && *rc < mid) {
        if (verify_certificate({g, m, *rc, opt.gamma}, *sdp.certificate, opt.verify_tol)) r = *rc;
      }
      hi = r;
      res.certificate = std::move(*sdp.certificate);
      lo = std::min(lo, hi);
    } else {
      lo = mid;
    }
  }
  res.r_upper = hi;
  for (const auto& p : res.certificate.p)
    if (max_eigval(p) >= opt.sdp.beta * (1 - 1e-3)) res.beta_active = true;
  return res;
}

/// Smallest K ≤ kmax such that every length-K product is a strict contraction.
inline std::optional<std::size_t> contraction_horizon(const MatrixSet& m, std::size_t kmax,
                                                      const Tolerances& tol = default_tolerances()) {
  if (kmax == 0) throw InvalidInput("kmax must be at least 1");
  const std::size_t k = m.size();
  double count = std::pow(static_cast<double>(k), static_cast<double>(kmax));
  if (count > static_cast<double>(tol.enumeration_cap))
    throw BudgetError(std::to_string(k) + "^" + std::to_string(kmax) + " products exceed the enumeration cap");
  if (m.max_spectral_radius() >= 1.0) return std::nullopt;
  const double bound = 1.0 - tol.contraction_margin;
  for (std::size_t len = 1; len <= kmax; ++len) {
    // Depth-first over words of length `len`, stopping at the first non-contraction.
    std::vector<Matrix> stack{Matrix::identity(m.dim())};
    std::vector<Label> word;
    bool all = true;
    std::vector<Label> next{0};
    while (!next.empty() && all) {
      if (next.back() == k) {
        next.pop_back();
        stack.pop_back();
        continue;
      }
      const Label l = next.back()++;
      Matrix p = stack.back() * m[l];
      if (next.size() == len) {
        if (operator_norm(p) >= bound) all = false;
      } else {
        stack.push_back(std::move(p));
        next.push_back(0);
      }
    }
    if (all) return len;
  }
  return std::nullopt;
}

/// Expanded-form graph of the K-step contraction argument: root "q" plus one
/// node per word of length 1..K-1.
inline LabeledDigraph horizon_graph(const Alphabet& sigma, std::size_t k,
                                    const Tolerances& tol = default_tolerances()) {
  if (k == 0) throw InvalidInput("K must be at least 1");
  if (std::pow(static_cast<double>(sigma.size()), static_cast<double>(k)) > static_cast<double>(tol.enumeration_cap))
    throw BudgetError("horizon graph exceeds the enumeration cap");
  const NodeId root = NodeId::base("q");
  std::vector<std::vector<std::string>> words{{}};
  std::vector<NodeId> nodes{root};
  std::vector<LabeledEdge> edges;
  auto id = [&](const std::vector<std::string>& w) { return w.empty() ? root : NodeId::word(root, w); };
  for (std::size_t len = 1; len < k; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& u : words) {
      if (u.size() != len - 1) continue;
      for (const auto& l : sigma.letters()) {
        auto w = u;
        w.push_back(l);
        nodes.push_back(id(w));
        edges.push_back({id(w), id(u), l});
        next.push_back(std::move(w));
      }
    }
    words.insert(words.end(), next.begin(), next.end());
  }
  for (const auto& u : words) {
    if (u.size() != k - 1) continue;
    for (const auto& l : sigma.letters()) edges.push_back({root, id(u), l});
  }
  return LabeledDigraph(sigma, std::move(nodes), std::move(edges));
}

/// P_w = A_wᵀA_w on the horizon graph, with P = I at the root.
inline QuadCertificate horizon_certificate(const LabeledDigraph& h, const MatrixSet& m) {
  QuadCertificate c;
  for (const auto& node : h.nodes()) {
    if (!node.is_word()) {
      c.p.push_back(SymMatrix::identity(m.dim()));
      continue;
    }
    std::vector<Label> w;
    for (const auto& l : node.letters()) w.push_back(m.alphabet().at(l));
    Matrix a = m.product(w);
    c.p.emplace_back(a.transposed() * a);
  }
  return c;
}

}  // namespace pclf
