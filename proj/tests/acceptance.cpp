// Acceptance suite: one PASS/WARN/FAIL line per criterion. WARN marks a
// stochastic ordering check that missed without crossing its hard limit.
// Exit status is nonzero iff some criterion FAILs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "dense_oracle.hpp"
#include "qaoaplus/ansatz.hpp"
#include "qaoaplus/error.hpp"
#include "qaoaplus/experiments.hpp"
#include "qaoaplus/optimizer.hpp"
#include "qaoaplus/simulator.hpp"

using namespace qaoaplus;
using std::numbers::pi;

namespace {

// Published reference values and pinned tolerances.
constexpr double kP1Cubic8 = 0.783, kPlusCubic8 = 0.838, kP2Cubic8 = 0.870;
constexpr double kP1Tol8 = 0.010, kPlusTol8 = 0.015, kP2Tol8 = 0.010;
constexpr double kP1Cubic10 = 0.793, kPlusCubic10 = 0.833, kP2Cubic10 = 0.868;
constexpr double kTol10 = 0.02;
constexpr double kDominanceHardMargin = 0.01;
constexpr double kOracleTol = 1e-10;
constexpr double kK2Tol = 1e-6;
constexpr double kEmbedSlack = 1e-9;
constexpr double kNormTol = 1e-10;
constexpr double kGradientTol = 1e-6;
constexpr std::uint64_t kMasterSeed = 2022;

enum class Status { pass, warn, fail };

struct Tally {
  int fails = 0;
  int warns = 0;
};

void report(Tally& t, int id, Status s, const std::string& msg) {
  const char* tag = s == Status::pass ? "PASS" : s == Status::warn ? "WARN" : "FAIL";
  if (s == Status::fail) ++t.fails;
  if (s == Status::warn) ++t.warns;
  std::printf("[%s] criterion %2d: %s\n", tag, id, msg.c_str());
  std::fflush(stdout);
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

ExperimentConfig config(std::vector<int> nodes, std::vector<int> degrees, unsigned threads = 1) {
  ExperimentConfig cfg;
  cfg.nodes = std::move(nodes);
  cfg.degrees = std::move(degrees);
  cfg.seed = kMasterSeed;
  cfg.threads = threads;
  return cfg;
}

Graph random_small_graph(Rng& rng) {
  const int n = 2 + static_cast<int>(uniform_index(rng, 3));
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (uniform01(rng) < 0.6) e.push_back({u, v});
  if (e.empty()) e.push_back({0, n - 1});
  return Graph(n, e);
}

AnsatzSpec random_spec(const Graph& g, Rng& rng) {
  const int n = g.num_nodes();
  const int m = g.num_edges();
  switch (uniform_index(rng, 4)) {
    case 0: return build_standard_qaoa(g, 1);
    case 1: return build_standard_qaoa(g, 2);
    case 2:
      return build_qaoa_plus(g, 1 + static_cast<int>(uniform_index(rng, n - 1)),
                             1 + static_cast<int>(uniform_index(rng, n)));
    default:
      return build_ma_qaoa(g, 1 + static_cast<int>(uniform_index(rng, m)),
                           1 + static_cast<int>(uniform_index(rng, n)));
  }
}

std::vector<double> random_params(int k, Rng& rng) {
  std::vector<double> p(k);
  for (double& v : p) v = 2 * pi * uniform01(rng) - pi;
  return p;
}

void table_criterion(Tally& t, int id, ExperimentRunner& runner, int n, double p1_ref,
                     double plus_ref, double p2_ref, double p1_tol, double plus_tol, double p2_tol) {
  const auto runs = runner.optimize(n, 3,
                                    {{AnsatzKind::standard, 1, 0},
                                     {AnsatzKind::qaoa_plus, n - 1, n},
                                     {AnsatzKind::standard, 2, 0}});
  const double p1 = runs[0]->mean_ar();
  const double plus = runs[1]->mean_ar();
  const double p2 = runs[2]->mean_ar();
  const bool ok = within(p1, p1_ref, p1_tol) && within(plus, plus_ref, plus_tol) &&
                  within(p2, p2_ref, p2_tol);
  report(t, id, ok ? Status::pass : Status::fail,
         "(n=" + std::to_string(n) + ", d=3, " + std::to_string(runner.ensemble(n, 3).graphs.size()) +
             " graphs) p1 " + f4(p1) + " [" + f4(p1_ref) + "+-" + f4(p1_tol) + "], qaoa-plus " +
             f4(plus) + " [" + f4(plus_ref) + "+-" + f4(plus_tol) + "], p2 " + f4(p2) + " [" +
             f4(p2_ref) + "+-" + f4(p2_tol) + "]");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  Tally tally;

  ExperimentRunner cubic(config({8, 10}, {3}));

  try {
    table_criterion(tally, 1, cubic, 8, kP1Cubic8, kPlusCubic8, kP2Cubic8, kP1Tol8, kPlusTol8,
                    kP2Tol8);
  } catch (const std::exception& e) {
    report(tally, 1, Status::fail, e.what());
  }

  try {
    table_criterion(tally, 2, cubic, 10, kP1Cubic10, kPlusCubic10, kP2Cubic10, kTol10, kTol10,
                    kTol10);
  } catch (const std::exception& e) {
    report(tally, 2, Status::fail, e.what());
  }

  try {
    const Graph& g = cubic.ensemble(8, 3).graphs.front();
    const int plus = build_qaoa_plus(g, 7, 8).param_count();
    const int ma = build_ma_qaoa(g, 12, 8).param_count();
    report(tally, 3, plus == 17 && ma == 20 ? Status::pass : Status::fail,
           "full qaoa-plus " + std::to_string(plus) + " params [17], full ma-qaoa " +
               std::to_string(ma) + " params [20]");
  } catch (const std::exception& e) {
    report(tally, 3, Status::fail, e.what());
  }

  try {
    bool ok = true;
    std::string detail;
    for (const Graph& g : cubic.ensemble(8, 3).graphs) {
      const int a = build_standard_qaoa(g, 1).two_qubit_gate_count();
      const int b = build_qaoa_plus(g, 7, 8).two_qubit_gate_count();
      const int c = build_standard_qaoa(g, 2).two_qubit_gate_count();
      ok = ok && a == 12 && b == 19 && c == 24;
      detail = std::to_string(a) + "/" + std::to_string(b) + "/" + std::to_string(c);
    }
    report(tally, 4, ok ? Status::pass : Status::fail,
           "two-qubit gates p1/qaoa-plus/p2 = " + detail + " [12/19/24] on every 8-node cubic graph");
  } catch (const std::exception& e) {
    report(tally, 4, Status::fail, e.what());
  }

  try {
    auto cfg = config({8}, {3});
    cfg.kind = ExperimentKind::sweep;
    ExperimentRunner runner(cfg);
    const auto sweep = runner.run_sweep();
    std::map<int, double> ma, plus;
    for (const auto& r : sweep.records) {
      if (r.ansatz.rfind("ma-qaoa(total=", 0) == 0) ma[r.param_count] = r.mean_ar;
      if (r.ansatz.rfind("qaoa-plus(total=", 0) == 0) plus[r.param_count] = r.mean_ar;
    }
    double worst = -1.0;
    int worst_t = 0;
    int strict = 0;
    for (int t = 4; t <= 17; ++t) {
      const double gap = ma.at(t) - plus.at(t);
      if (gap < 0) ++strict;
      if (gap > worst) {
        worst = gap;
        worst_t = t;
      }
    }
    const double small_gap = ma.at(14) - plus.at(4);
    const bool hard = worst > kDominanceHardMargin || small_gap > kDominanceHardMargin;
    const bool all_strict = strict == 14 && small_gap < 0;
    report(tally, 5, hard ? Status::fail : all_strict ? Status::pass : Status::warn,
           "qaoa-plus above ma-qaoa at " + std::to_string(strict) +
               "/14 totals in 4..17 (largest ma-qaoa lead " + f4(std::max(worst, 0.0)) + " at t=" +
               std::to_string(worst_t) + "); qaoa-plus(4) " + f4(plus.at(4)) + " vs ma-qaoa(14) " +
               f4(ma.at(14)) + "; hard limit " + f4(kDominanceHardMargin));
  } catch (const std::exception& e) {
    report(tally, 5, Status::fail, e.what());
  }

  try {
    Rng rng(6006);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Graph g = random_small_graph(rng);
      const AnsatzSpec spec = random_spec(g, rng);
      const auto params = random_params(spec.param_count(), rng);
      worst = std::max(worst, std::abs(evaluate(spec, g, params) - oracle::expectation(spec, g, params)));
    }
    report(tally, 6, worst <= kOracleTol ? Status::pass : Status::fail,
           "20 random specs on n<=4 graphs, max |statevector - dense| = " + sci(worst) +
               " [<= 1e-10]");
  } catch (const std::exception& e) {
    report(tally, 6, Status::fail, e.what());
  }

  try {
    const Graph k2(2, {{0, 1}});
    MultistartOptions opt;
    opt.seed = kMasterSeed;
    const auto r = multistart_optimize(build_standard_qaoa(k2, 1), k2, opt);
    // Independent closed form <C> = 1/2 + sin(4 beta) sin(gamma) / 2.
    const double closed = 0.5 + 0.5 * std::sin(4 * r.best_params[1]) * std::sin(r.best_params[0]);
    const bool ok = std::abs(r.approximation_ratio - 1.0) <= kK2Tol &&
                    std::abs(closed - r.best_expectation) <= kK2Tol;
    report(tally, 7, ok ? Status::pass : Status::fail,
           "K2 p1 AR = " + f4(r.approximation_ratio) + " (1 - AR = " + sci(1.0 - r.approximation_ratio) +
               "), closed form at optimum " + f4(closed) + " [1 +- 1e-6]");
  } catch (const std::exception& e) {
    report(tally, 7, Status::fail, e.what());
  }

  try {
    int checked = 0;
    int violations = 0;
    double worst = 0.0;
    for (int n : {8, 10}) {
      const Ensemble& ens = cubic.ensemble(n, 3);
      const auto runs = cubic.optimize(n, 3,
                                       {{AnsatzKind::standard, 1, 0},
                                        {AnsatzKind::qaoa_plus, n - 1, n},
                                        {AnsatzKind::ma_qaoa, static_cast<int>(ens.graphs.front().num_edges()), n}});
      for (std::size_t gi = 0; gi < ens.graphs.size(); ++gi) {
        const double p1 = runs[0]->results.at(gi).value().approximation_ratio;
        for (int k : {1, 2}) {
          const double v = runs[k]->results.at(gi).value().approximation_ratio;
          ++checked;
          worst = std::max(worst, p1 - v);
          if (v < p1 - kEmbedSlack) ++violations;
        }
      }
    }
    report(tally, 8, violations == 0 ? Status::pass : Status::fail,
           std::to_string(checked) + " per-graph comparisons (qaoa-plus, full ma-qaoa vs p1), " +
               std::to_string(violations) + " below p1 - 1e-9; max shortfall " + sci(worst));
  } catch (const std::exception& e) {
    report(tally, 8, Status::fail, e.what());
  }

  try {
    Rng rng(kMasterSeed);
    const auto graphs = collect_nonisomorphic(8, 3, 10, rng);
    report(tally, 9, graphs.size() == 5 ? Status::pass : Status::fail,
           "collect_nonisomorphic(8, 3, 10) returned " + std::to_string(graphs.size()) + " [5]");
  } catch (const std::exception& e) {
    report(tally, 9, Status::fail, e.what());
  }

  try {
    // Norm after long random gate sequences.
    Rng rng(1010);
    double norm_err = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3 + static_cast<int>(uniform_index(rng, 8));
      auto s = uniform_superposition(n);
      for (int step = 0; step < 100; ++step) {
        const double angle = 4 * pi * uniform01(rng) - 2 * pi;
        const int j = static_cast<int>(uniform_index(rng, n));
        if (uniform_index(rng, 2) == 0) {
          apply_rx(s, j, angle);
        } else {
          const int k = (j + 1 + static_cast<int>(uniform_index(rng, n - 1))) % n;
          apply_edge_phase(s, j, k, angle);
        }
      }
      norm_err = std::max(norm_err, std::abs(s.norm_squared() - 1.0));
    }

    // Library gradients against central differences of the dense oracle.
    double grad_err = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = random_small_graph(rng);
      const AnsatzSpec spec = random_spec(g, rng);
      const auto x = random_params(spec.param_count(), rng);
      const CircuitEvaluator ev(spec, g);
      const auto fd = finite_difference_gradient(
          [&](std::span<const double> p) { return ev.expectation(p); }, x);
      std::vector<double> adj(x.size());
      ev.expectation_and_gradient(x, adj);
      const double h = 1e-5;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double ref =
            (oracle::expectation(spec, g, xp) - oracle::expectation(spec, g, xm)) / (2 * h);
        grad_err = std::max({grad_err, std::abs(fd[i] - ref), std::abs(adj[i] - ref)});
      }
    }

    // The same run at 1 and 4 threads.
    auto cfg = config({8}, {3}, 1);
    const auto one = records_to_csv(ExperimentRunner(cfg).run_table1().records);
    cfg.threads = 4;
    const auto four = records_to_csv(ExperimentRunner(cfg).run_table1().records);
    MultistartOptions opt;
    opt.seed = 99;
    const Graph& g = cubic.ensemble(8, 3).graphs.back();
    const auto spec = build_ma_qaoa(g, 6, 4);
    const auto a = multistart_optimize(spec, g, opt);
    opt.threads = 4;
    const auto b = multistart_optimize(spec, g, opt);
    const bool bitwise = one == four && a.best_params == b.best_params &&
                         a.best_expectation == b.best_expectation;

    const bool ok = norm_err <= kNormTol && grad_err <= kGradientTol && bitwise;
    report(tally, 10, ok ? Status::pass : Status::fail,
           "norm drift " + sci(norm_err) + " [<= 1e-10]; gradient vs dense oracle " +
               sci(grad_err) + " [<= 1e-6]; outputs at 1 vs 4 threads " +
               (bitwise ? "bitwise identical" : "DIFFER"));
  } catch (const std::exception& e) {
    report(tally, 10, Status::fail, e.what());
  }

  try {
    auto cfg = config({8, 10}, {3, 4, 5});
    cfg.kind = ExperimentKind::threshold;
    const auto res = ExperimentRunner(cfg).run_threshold();
    std::map<std::pair<int, int>, const ThresholdResult*> by;
    for (const auto& th : res.thresholds) by[{th.n, th.d}] = &th;
    auto value = [](const ThresholdResult* th) {
      return th->threshold.value_or(th->max_total + 1);
    };
    auto text = [](const ThresholdResult* th) {
      return th->threshold ? std::to_string(*th->threshold) : std::string("not reached");
    };
    bool rising = true;
    bool bounds = true;
    std::string detail;
    for (int d : {3, 4, 5}) {
      const auto* a = by.at({8, d});
      const auto* b = by.at({10, d});
      rising = rising && value(b) >= value(a);
      for (const auto* th : {a, b})
        if (th->threshold) bounds = bounds && *th->threshold >= 2 && *th->threshold <= th->max_total;
      detail += " d=" + std::to_string(d) + ": " + text(a) + " -> " + text(b) + ";";
    }
    report(tally, 11, !bounds ? Status::fail : rising ? Status::pass : Status::warn,
           "ma-qaoa parameters needed to beat qaoa-plus(4), n=8 -> n=10:" + detail);
  } catch (const std::exception& e) {
    report(tally, 11, Status::fail, e.what());
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("summary: %d failed, %d warned, %.1f s\n", tally.fails, tally.warns, secs);
  return tally.fails == 0 ? 0 : 1;
}
