#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/graph_ops.hpp"
#include "pclf/lifts.hpp"
#include "pclf/lmi.hpp"
#include "pclf/numerics.hpp"
#include "pclf/simulation.hpp"

namespace pclf {

struct GraphPair {
  std::string name;
  LabeledDigraph base;
  LabeledDigraph comparison;
};

struct ExperimentConfig {
  std::vector<GraphPair> graph_pairs;
  std::size_t n = 3;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  double strict_margin = 1e-3;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (samples < 1) throw InvalidInput("samples must be at least 1");
    if (n < 1) throw InvalidInput("n must be at least 1");
    if (!(tol > 0)) throw InvalidInput("tol must be positive");
    if (!(strict_margin > 2 * tol)) throw InvalidInput("strict_margin must exceed 2·tol");
    for (const auto& p : graph_pairs) {
      if (!(p.base.alphabet() == p.comparison.alphabet()))
        throw InvalidInput("pair '" + p.name + "' mixes alphabets");
      if (!(p.base.alphabet() == graph_pairs.front().base.alphabet()))
        throw InvalidInput("all pairs must share one alphabet");
      if (!is_path_complete(p.base) || !is_path_complete(p.comparison))
        throw InvalidInput("pair '" + p.name + "' contains a graph that is not path-complete");
    }
  }

  JsrOptions jsr() const {
    JsrOptions o;
    o.tol = tol;
    return o;
  }
};

struct SampleRecord {
  std::size_t index = 0;
  std::vector<double> r;         // per distinct graph
  std::vector<double> gap;       // per pair: r_base − r_comparison
  std::vector<bool> improved;    // per pair
  std::size_t rejections = 0;
  bool excluded = false;
  std::string error;
};

struct PairStats {
  std::string name;
  std::size_t counted = 0;
  std::size_t improved = 0;
  double improved_fraction = 0;
  double mean_gap_when_improved = 0;
  double max_gap = 0;
  double min_gap = 0;
};

struct ExperimentStats {
  std::vector<LabeledDigraph> graphs;  // distinct graphs, indexes into SampleRecord::r
  std::vector<std::pair<std::size_t, std::size_t>> pair_graphs;
  std::vector<PairStats> pairs;
  std::vector<SampleRecord> records;
  std::size_t excluded = 0;
  double excluded_fraction = 0;
  bool healthy = true;  // excluded fraction below 2%
};

namespace detail {

/// Runs body(k) for k in [0, count) on a pool of workers; results are keyed by k.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

inline std::size_t intern(std::vector<LabeledDigraph>& graphs, const LabeledDigraph& g) {
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (graphs[i] == g) return i;
  graphs.push_back(g);
  return graphs.size() - 1;
}

}  // namespace detail

/// Per-pair statistics; records are first put in index order so the result
/// does not depend on completion order.
inline void aggregate(ExperimentStats& stats, const ExperimentConfig& config) {
  std::sort(stats.records.begin(), stats.records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.index < b.index; });
  stats.pairs.clear();
  stats.excluded = 0;
  for (std::size_t p = 0; p < config.graph_pairs.size(); ++p) {
    PairStats ps;
    ps.name = config.graph_pairs[p].name;
    double sum = 0;
    bool first = true;
    for (const auto& rec : stats.records) {
      if (rec.excluded) continue;
      ++ps.counted;
      const double g = rec.gap[p];
      ps.max_gap = first ? g : std::max(ps.max_gap, g);
      ps.min_gap = first ? g : std::min(ps.min_gap, g);
      first = false;
      if (rec.improved[p]) {
        ++ps.improved;
        sum += g;
      }
    }
    ps.improved_fraction = ps.counted ? static_cast<double>(ps.improved) / static_cast<double>(ps.counted) : 0.0;
    ps.mean_gap_when_improved = ps.improved ? sum / static_cast<double>(ps.improved) : 0.0;
    stats.pairs.push_back(ps);
  }
  for (const auto& rec : stats.records) stats.excluded += rec.excluded;
  stats.excluded_fraction = static_cast<double>(stats.excluded) / static_cast<double>(stats.records.size());
  stats.healthy = stats.excluded_fraction < 0.02;
}

/// Randomized comparison of each base graph against its comparison graph.
/// Sample k draws its matrices from RngStream(seed, k).
inline ExperimentStats run_comparison(const ExperimentConfig& config) {
  config.validate();
  ExperimentStats stats;
  for (const auto& p : config.graph_pairs) {
    stats.pair_graphs.emplace_back(detail::intern(stats.graphs, p.base), detail::intern(stats.graphs, p.comparison));
  }
  stats.records.resize(config.samples);
  const Alphabet sigma = config.graph_pairs.empty() ? Alphabet::numbered(2) : config.graph_pairs.front().base.alphabet();
  const JsrOptions jsr = config.jsr();

  detail::parallel_for(config.samples, config.threads, [&](std::size_t k) {
    SampleRecord rec;
    rec.index = k;
    RngStream rng(config.seed, k);
    try {
      auto sample = sample_stable_invertible(config.n, sigma.size(), rng);
      rec.rejections = sample.rejections;
      MatrixSet m(sigma, std::move(sample.matrices));
      for (const auto& g : stats.graphs) rec.r.push_back(rho_upper(g, m, jsr).r_upper);
      for (const auto& [b, c] : stats.pair_graphs) {
        rec.gap.push_back(rec.r[b] - rec.r[c]);
        rec.improved.push_back(rec.gap.back() > config.strict_margin);
      }
    } catch (const BudgetError& e) {
      rec.excluded = true;
      rec.error = e.what();
      rec.r.assign(stats.graphs.size(), std::nan(""));
      rec.gap.assign(stats.pair_graphs.size(), std::nan(""));
      rec.improved.assign(stats.pair_graphs.size(), false);
    }
    stats.records[k] = std::move(rec);
  });
  aggregate(stats, config);
  return stats;
}

enum class WitnessKind { direct, comp_lift, bwd_comp_lift, trans_lift };

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::direct: return "direct";
    case WitnessKind::comp_lift: return "comp";
    case WitnessKind::bwd_comp_lift: return "bwd";
    case WitnessKind::trans_lift: return "trans";
  }
  return "?";
}

struct SpotcheckReport {
  bool certified = false;
  std::string certificate;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t excluded = 0;
  double max_excess = -std::numeric_limits<double>::infinity();  // max of r2 − r1 over samples
  std::vector<std::pair<double, double>> r;                      // (r1, r2) per sample
  bool pass() const { return certified && violations == 0 && excluded == 0; }
};

/// Certifies g1 ≤ g2 by the requested simulation, then checks
/// rho_upper(g2) ≤ rho_upper(g1) + 2·tol on sampled systems.
inline SpotcheckReport preorder_spotcheck(const LabeledDigraph& g1, const LabeledDigraph& g2, WitnessKind kind,
                                          const ExperimentConfig& config, LiftLevel tmax = 3) {
  SpotcheckReport rep;
  rep.samples = config.samples;
  auto describe_yes = [&](const LiftSimVerdict& v) {
    if (const auto* y = std::get_if<SimYes>(&v)) {
      rep.certified = true;
      rep.certificate = std::string(to_string(kind)) + " lift at level " + std::to_string(y->level) + ": " + y->witness.str();
    } else if (const auto* n = std::get_if<SimNo>(&v)) {
      rep.certificate = "refuted: " + n->refutation;
    } else {
      rep.certificate = "no simulation found up to level " + std::to_string(tmax);
    }
  };
  switch (kind) {
    case WitnessKind::direct:
      if (auto w = find_simulation(g1, g2)) {
        rep.certified = true;
        rep.certificate = "direct: " + w->str();
      } else {
        rep.certificate = "no direct simulation";
      }
      break;
    case WitnessKind::comp_lift: describe_yes(simulates_comp_lift(g1, g2, tmax)); break;
    case WitnessKind::bwd_comp_lift: describe_yes(simulates_bwd_comp_lift(g1, g2, tmax)); break;
    case WitnessKind::trans_lift: describe_yes(simulates_trans_lift(g1, g2, tmax)); break;
  }
  if (!rep.certified) return rep;

  const JsrOptions jsr = config.jsr();
  rep.r.assign(config.samples, {std::nan(""), std::nan("")});
  std::vector<char> excluded(config.samples, 0);
  detail::parallel_for(config.samples, config.threads, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    try {
      MatrixSet m(g1.alphabet(), sample_stable_invertible(config.n, g1.alphabet().size(), rng).matrices);
      rep.r[k] = {rho_upper(g1, m, jsr).r_upper, rho_upper(g2, m, jsr).r_upper};
    } catch (const BudgetError&) {
      excluded[k] = 1;
    }
  });
  for (std::size_t k = 0; k < config.samples; ++k) {
    if (excluded[k]) {
      ++rep.excluded;
      continue;
    }
    const double excess = rep.r[k].second - rep.r[k].first;
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 2 * config.tol) ++rep.violations;
  }
  return rep;
}

}  // namespace pclf
