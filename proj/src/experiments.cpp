#include "qaoaplus/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "qaoaplus/error.hpp"
#include "qaoaplus/parallel.hpp"
#include "qaoaplus/random.hpp"
#include "qaoaplus/simulator.hpp"

namespace qaoaplus {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string family_label(int n, int d) {
  return "n=" + std::to_string(n) + " d=" + std::to_string(d);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::table1: return "table1";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::grid: return "grid";
    case ExperimentKind::threshold: return "threshold";
    case ExperimentKind::single: return "single";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::table1, ExperimentKind::sweep, ExperimentKind::grid,
                 ExperimentKind::threshold, ExperimentKind::single}) {
    if (to_string(k) == s) return k;
  }
  throw InputError("unknown experiment kind '" + s + "'");
}

ExperimentConfig ExperimentConfig::defaults_for(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::table1:
      cfg.nodes = {8, 10};
      cfg.degrees = {3, 4, 5};
      break;
    case ExperimentKind::threshold:
      cfg.nodes = {8, 10};
      cfg.degrees = {3, 4, 5};
      break;
    default:
      cfg.nodes = {8};
      cfg.degrees = {3};
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (nodes.empty() || degrees.empty()) throw InputError("config needs node counts and degrees");
  if (graphs_per_family < 1) throw InputError("graphs_per_family must be positive");
  if (restarts < 1) throw InputError("restarts must be positive");
  if (draw_budget < 1) throw InputError("draw_budget must be positive");
  if (threads < 1) throw InputError("threads must be positive");
  if (bfgs.max_iter < 1 || !(bfgs.grad_tol > 0.0)) throw InputError("invalid BFGS settings");
  for (int n : nodes) {
    if (n < 2 || n > kMaxQubits) {
      throw InputError("node count " + std::to_string(n) + " outside [2, " +
                       std::to_string(kMaxQubits) + "]");
    }
    for (int d : degrees) {
      if (d < 1 || d >= n) {
        throw InputError("degree " + std::to_string(d) + " invalid for " + std::to_string(n) +
                         " nodes");
      }
      if ((n * d) % 2 != 0) throw InputError("n*d must be even (" + family_label(n, d) + ")");
    }
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {
      {"experiment", to_string(cfg.kind)},
      {"nodes", cfg.nodes},
      {"degrees", cfg.degrees},
      {"graphs_per_family", cfg.graphs_per_family},
      {"restarts", cfg.restarts},
      {"seed", cfg.seed},
      {"out_dir", cfg.out_dir.string()},
      {"warm_start", cfg.warm_start},
      {"gradient", cfg.gradient == GradientMethod::adjoint ? "adjoint" : "finite-difference"},
      {"grad_tol", cfg.bfgs.grad_tol},
      {"max_iter", cfg.bfgs.max_iter},
      {"draw_budget", cfg.draw_budget},
      {"threads", cfg.threads},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> known{
      "experiment", "nodes",    "degrees",  "graphs_per_family", "restarts",
      "seed",       "out_dir",  "warm_start", "gradient",        "grad_tol",
      "max_iter",   "draw_budget", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InputError("unknown config field '" + key + "'");
  }
  if (j.contains("experiment"))
    cfg.kind = experiment_kind_from_string(get_field<std::string>(j, "experiment"));
  if (j.contains("nodes")) cfg.nodes = get_field<std::vector<int>>(j, "nodes");
  if (j.contains("degrees")) cfg.degrees = get_field<std::vector<int>>(j, "degrees");
  if (j.contains("graphs_per_family"))
    cfg.graphs_per_family = get_field<int>(j, "graphs_per_family");
  if (j.contains("restarts")) cfg.restarts = get_field<int>(j, "restarts");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("out_dir")) cfg.out_dir = get_field<std::string>(j, "out_dir");
  if (j.contains("warm_start")) cfg.warm_start = get_field<bool>(j, "warm_start");
  if (j.contains("gradient")) {
    const auto g = get_field<std::string>(j, "gradient");
    if (g == "adjoint") {
      cfg.gradient = GradientMethod::adjoint;
    } else if (g == "finite-difference") {
      cfg.gradient = GradientMethod::finite_difference;
    } else {
      throw InputError("unknown gradient method '" + g + "'");
    }
  }
  if (j.contains("grad_tol")) cfg.bfgs.grad_tol = get_field<double>(j, "grad_tol");
  if (j.contains("max_iter")) cfg.bfgs.max_iter = get_field<int>(j, "max_iter");
  if (j.contains("draw_budget")) cfg.draw_budget = get_field<int>(j, "draw_budget");
  if (j.contains("threads")) cfg.threads = get_field<unsigned>(j, "threads");
  return cfg;
}

AnsatzSpec AnsatzRequest::build(const Graph& g) const {
  switch (kind) {
    case AnsatzKind::standard: return build_standard_qaoa(g, a);
    case AnsatzKind::qaoa_plus: return build_qaoa_plus(g, a, b);
    case AnsatzKind::ma_qaoa: return build_ma_qaoa(g, a, b);
  }
  throw InputError("unknown ansatz kind");
}

std::string AnsatzRequest::key() const {
  switch (kind) {
    case AnsatzKind::standard: return "standard-p" + std::to_string(a);
    case AnsatzKind::qaoa_plus:
      return "qaoa-plus(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case AnsatzKind::ma_qaoa:
      return "ma-qaoa(" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
  return "unknown";
}

std::vector<double> FamilyRun::ars() const {
  std::vector<double> out;
  for (const auto& r : results)
    if (r) out.push_back(r->approximation_ratio);
  return out;
}

double FamilyRun::mean_ar() const { return mean_of(ars()); }

ExperimentRunner::ExperimentRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

const Ensemble& ExperimentRunner::ensemble(int n, int d) {
  const FamilyKey key{n, d};
  if (auto it = ensembles_.find(key); it != ensembles_.end()) return it->second;
  Ensemble ens;
  ens.n = n;
  ens.d = d;
  Rng rng(derive_seed(cfg_.seed, "ensemble|" + std::to_string(n) + "," + std::to_string(d)));
  try {
    ens.graphs = collect_nonisomorphic(n, d, cfg_.graphs_per_family, rng, cfg_.draw_budget);
  } catch (const GenerationError& e) {
    ens.failures.push_back(std::string("graph generation failed: ") + e.what());
  }
  ens.cmax.resize(ens.graphs.size());
  parallel_for(ens.graphs.size(), cfg_.threads,
               [&](std::size_t i) { ens.cmax[i] = max_cut_bruteforce(ens.graphs[i]).cmax; });
  return ensembles_.emplace(key, std::move(ens)).first->second;
}

void ExperimentRunner::ensure_p1(int n, int d) { optimize(n, d, AnsatzRequest{}); }

const FamilyRun& ExperimentRunner::optimize(int n, int d, const AnsatzRequest& request) {
  return *optimize(n, d, std::vector<AnsatzRequest>{request}).front();
}

std::vector<const FamilyRun*> ExperimentRunner::optimize(
    int n, int d, const std::vector<AnsatzRequest>& requests) {
  const Ensemble& ens = ensemble(n, d);
  const AnsatzRequest p1_request{};

  std::vector<AnsatzRequest> missing;
  for (const auto& r : requests) {
    if (!runs_.contains({n, d, r}) && std::find(missing.begin(), missing.end(), r) == missing.end())
      missing.push_back(r);
  }
  // Every other parameterization starts from the p=1 optimum, so p=1 runs
  // first as its own batch.
  const FamilyRun* p1 = nullptr;
  if (cfg_.warm_start && !missing.empty()) {
    const bool only_p1 = missing.size() == 1 && missing.front() == p1_request;
    if (!only_p1) {
      p1 = &optimize(n, d, p1_request);
      std::erase(missing, p1_request);
    }
  }

  if (!missing.empty()) {
    // Build every spec up front so construction errors surface as InputError
    // before any work starts.
    std::vector<std::vector<AnsatzSpec>> specs(missing.size());
    for (std::size_t r = 0; r < missing.size(); ++r)
      for (const auto& g : ens.graphs) specs[r].push_back(missing[r].build(g));

    const std::size_t graphs = ens.graphs.size();
    const std::size_t items = missing.size() * graphs;
    std::vector<std::optional<OptResult>> out(items);
    std::vector<std::string> errors(items);
    parallel_for(items, cfg_.threads, [&](std::size_t i) {
      const std::size_t r = i / graphs;
      const std::size_t gi = i % graphs;
      const Graph& g = ens.graphs[gi];
      const AnsatzSpec& spec = specs[r][gi];
      MultistartOptions opt;
      opt.restarts = cfg_.restarts;
      opt.seed = derive_seed(cfg_.seed, "optimize|" + g.id() + "|" + spec.structure_key());
      opt.warm_start = cfg_.warm_start;
      opt.gradient = cfg_.gradient;
      opt.bfgs = cfg_.bfgs;
      if (p1 && p1->results[gi]) {
        const auto& x = p1->results[gi]->best_params;
        opt.warm_params = embed_p1_parameters(spec, x[0], x[1]);
      }
      try {
        const CircuitEvaluator ev(spec, g);
        out[i] = multistart_optimize(ev, ens.cmax[gi], opt);
      } catch (const OptimizationError& e) {
        errors[i] = e.what();
      } catch (const NumericalError& e) {
        errors[i] = e.what();
      }
    });

    for (std::size_t r = 0; r < missing.size(); ++r) {
      FamilyRun run;
      run.request = missing[r];
      run.descriptor = missing[r].key();
      if (graphs > 0) {
        run.param_count = specs[r][0].param_count();
        run.two_qubit_gates = specs[r][0].two_qubit_gate_count();
      }
      for (std::size_t gi = 0; gi < graphs; ++gi) {
        const std::size_t i = r * graphs + gi;
        run.results.push_back(std::move(out[i]));
        if (!errors[i].empty())
          run.failures.push_back("graph " + ens.graphs[gi].id() + ": " + errors[i]);
      }
      runs_.emplace(std::tuple{n, d, missing[r]}, std::move(run));
    }
  }

  std::vector<const FamilyRun*> result;
  for (const auto& r : requests) result.push_back(&runs_.at({n, d, r}));
  return result;
}

ExperimentRecord ExperimentRunner::make_record(const Ensemble& ens, const FamilyRun& run) const {
  ExperimentRecord rec;
  rec.n = ens.n;
  rec.d = ens.d;
  rec.ansatz = run.descriptor;
  rec.param_count = run.param_count;
  rec.two_qubit_gates = run.two_qubit_gates;
  for (std::size_t gi = 0; gi < run.results.size(); ++gi) {
    if (!run.results[gi]) continue;
    rec.ar_list.push_back(run.results[gi]->approximation_ratio);
    rec.graph_ids.push_back(ens.graphs[gi].id());
  }
  rec.mean_ar = mean_of(rec.ar_list);
  rec.n_graphs = static_cast<int>(rec.ar_list.size());
  rec.seed = cfg_.seed;
  rec.failures = ens.failures;
  rec.failures.insert(rec.failures.end(), run.failures.begin(), run.failures.end());
  return rec;
}

ExperimentReport ExperimentRunner::empty_report() const {
  ExperimentReport report;
  report.config = cfg_;
  return report;
}

namespace {

void attach_ensembles(ExperimentReport& report, ExperimentRunner& runner) {
  for (int n : report.config.nodes)
    for (int d : report.config.degrees) {
      const Ensemble& ens = runner.ensemble(n, d);
      report.ensembles.push_back(ens);
      for (const auto& f : ens.failures) report.notes.push_back("FAIL " + family_label(n, d) + ": " + f);
    }
}

void note_failures(ExperimentReport& report, const ExperimentRecord& rec) {
  for (const auto& f : rec.failures)
    if (f.rfind("graph generation", 0) != 0)
      report.notes.push_back("FAIL " + family_label(rec.n, rec.d) + " " + rec.ansatz + ": " + f);
}

// Mean over all layer splits of a total; per graph, the split average.
ExperimentRecord split_average(const Ensemble& ens, const std::vector<const FamilyRun*>& runs,
                               const std::string& name, int total, std::uint64_t seed) {
  ExperimentRecord rec;
  rec.n = ens.n;
  rec.d = ens.d;
  rec.ansatz = name;
  rec.param_count = total;
  rec.two_qubit_gates = runs.empty() ? 0 : runs.front()->two_qubit_gates;
  rec.seed = seed;
  rec.failures = ens.failures;
  for (const FamilyRun* run : runs)
    rec.failures.insert(rec.failures.end(), run->failures.begin(), run->failures.end());
  for (std::size_t gi = 0; gi < ens.graphs.size(); ++gi) {
    double sum = 0.0;
    bool ok = true;
    for (const FamilyRun* run : runs) {
      if (!run->results[gi]) {
        ok = false;
        break;
      }
      sum += run->results[gi]->approximation_ratio;
    }
    if (!ok || runs.empty()) continue;
    rec.ar_list.push_back(sum / static_cast<double>(runs.size()));
    rec.graph_ids.push_back(ens.graphs[gi].id());
  }
  rec.mean_ar = mean_of(rec.ar_list);
  rec.n_graphs = static_cast<int>(rec.ar_list.size());
  return rec;
}

std::vector<AnsatzRequest> splits_of(AnsatzKind kind, int total, int max_a, int max_b) {
  std::vector<AnsatzRequest> out;
  for (const auto& [a, b] : enumerate_split_pairs(total, max_a, max_b)) out.push_back({kind, a, b});
  return out;
}

}  // namespace

ExperimentReport ExperimentRunner::run_table1() {
  ExperimentReport report = empty_report();
  attach_ensembles(report, *this);
  for (int n : cfg_.nodes) {
    for (int d : cfg_.degrees) {
      const Ensemble& ens = ensemble(n, d);
      const std::vector<AnsatzRequest> requests{
          {AnsatzKind::standard, 1, 0},
          {AnsatzKind::qaoa_plus, n - 1, n},
          {AnsatzKind::standard, 2, 0},
      };
      const auto runs = optimize(n, d, requests);
      std::vector<double> means;
      for (const FamilyRun* run : runs) {
        report.records.push_back(make_record(ens, *run));
        note_failures(report, report.records.back());
        means.push_back(report.records.back().mean_ar);
      }
      if (ens.graphs.empty()) continue;
      const bool ordered = means[0] <= means[1] && means[1] <= means[2];
      report.notes.push_back(std::string(ordered ? "PASS" : "WARN") + " ordering " +
                             family_label(n, d) + ": p1 " + fixed4(means[0]) + " <= qaoa-plus " +
                             fixed4(means[1]) + " <= p2 " + fixed4(means[2]));
    }
  }
  return report;
}

ExperimentReport ExperimentRunner::run_sweep() {
  ExperimentReport report = empty_report();
  attach_ensembles(report, *this);
  for (int n : cfg_.nodes) {
    for (int d : cfg_.degrees) {
      const Ensemble& ens = ensemble(n, d);
      if (ens.graphs.empty()) continue;
      const int edges = ens.graphs.front().num_edges();

      for (int p : {1, 2}) {
        report.records.push_back(make_record(ens, optimize(n, d, {AnsatzKind::standard, p, 0})));
        note_failures(report, report.records.back());
      }
      std::map<int, double> ma_mean;
      std::map<int, double> plus_mean;
      for (int t = 2; t <= edges + n; ++t) {
        const auto runs = optimize(n, d, splits_of(AnsatzKind::ma_qaoa, t, edges, n));
        report.records.push_back(split_average(ens, runs, "ma-qaoa(total=" + std::to_string(t) + ")",
                                               t, cfg_.seed));
        note_failures(report, report.records.back());
        ma_mean[t] = report.records.back().mean_ar;
      }
      // QAOA+ totals count the two shared angles of its p=1 block.
      for (int t = 4; t <= 2 * n + 1; ++t) {
        const auto runs = optimize(n, d, splits_of(AnsatzKind::qaoa_plus, t - 2, n - 1, n));
        report.records.push_back(split_average(
            ens, runs, "qaoa-plus(total=" + std::to_string(t) + ")", t, cfg_.seed));
        note_failures(report, report.records.back());
        plus_mean[t] = report.records.back().mean_ar;
      }

      int losses = 0;
      std::string detail;
      for (const auto& [t, plus] : plus_mean) {
        if (!ma_mean.contains(t)) continue;
        if (!(plus > ma_mean[t])) {
          ++losses;
          detail += " t=" + std::to_string(t) + "(" + fixed4(plus) + " vs " + fixed4(ma_mean[t]) + ")";
        }
      }
      report.notes.push_back(std::string(losses == 0 ? "PASS" : "WARN") + " equal-count dominance " +
                             family_label(n, d) + ": qaoa-plus above ma-qaoa at every shared total" +
                             (losses == 0 ? "" : "; not at" + detail));
      if (plus_mean.contains(4) && ma_mean.contains(14)) {
        const bool ok = plus_mean[4] > ma_mean[14];
        report.notes.push_back(std::string(ok ? "PASS" : "WARN") + " " + family_label(n, d) +
                               ": qaoa-plus(total=4) " + fixed4(plus_mean[4]) + " vs ma-qaoa(total=14) " +
                               fixed4(ma_mean[14]));
      }
    }
  }
  return report;
}

ExperimentReport ExperimentRunner::run_grid() {
  ExperimentReport report = empty_report();
  attach_ensembles(report, *this);
  for (int n : cfg_.nodes) {
    for (int d : cfg_.degrees) {
      const Ensemble& ens = ensemble(n, d);
      if (ens.graphs.empty()) continue;
      const int edges = ens.graphs.front().num_edges();
      for (const auto& [kind, rows] : {std::pair{AnsatzKind::ma_qaoa, edges},
                                       std::pair{AnsatzKind::qaoa_plus, n - 1}}) {
        std::vector<AnsatzRequest> cells;
        for (int a = 1; a <= rows; ++a)
          for (int b = 1; b <= n; ++b) cells.push_back({kind, a, b});
        const auto runs = optimize(n, d, cells);
        GridResult grid;
        grid.n = n;
        grid.d = d;
        grid.ansatz = kind == AnsatzKind::ma_qaoa ? "ma-qaoa" : "qaoa-plus";
        grid.rows = rows;
        grid.cols = n;
        for (const FamilyRun* run : runs) {
          report.records.push_back(make_record(ens, *run));
          note_failures(report, report.records.back());
          grid.mean_ar.push_back(report.records.back().mean_ar);
        }
        report.grids.push_back(std::move(grid));
      }
    }
  }
  return report;
}

ExperimentReport ExperimentRunner::run_threshold() {
  ExperimentReport report = empty_report();
  attach_ensembles(report, *this);
  for (int n : cfg_.nodes) {
    for (int d : cfg_.degrees) {
      const Ensemble& ens = ensemble(n, d);
      if (ens.graphs.empty()) continue;
      const int edges = ens.graphs.front().num_edges();
      ThresholdResult th;
      th.n = n;
      th.d = d;
      th.max_total = edges + n;
      const ExperimentRecord plus = make_record(ens, optimize(n, d, {AnsatzKind::qaoa_plus, 1, 1}));
      report.records.push_back(plus);
      note_failures(report, plus);
      th.n_graphs = plus.n_graphs;
      th.qaoa_plus4_mean_ar = plus.mean_ar;
      for (int t = 2; t <= th.max_total; ++t) {
        const auto [a, b] = threshold_split(t, edges, n);
        report.records.push_back(make_record(ens, optimize(n, d, {AnsatzKind::ma_qaoa, a, b})));
        note_failures(report, report.records.back());
        th.ma_mean_ar.push_back(report.records.back().mean_ar);
        if (report.records.back().mean_ar > th.qaoa_plus4_mean_ar) {
          th.threshold = t;
          break;
        }
      }
      report.thresholds.push_back(std::move(th));
    }
  }
  // Thresholds are expected to rise with the node count at fixed degree.
  for (int d : cfg_.degrees) {
    for (std::size_t i = 0; i + 1 < cfg_.nodes.size(); ++i) {
      const int n0 = cfg_.nodes[i];
      const int n1 = cfg_.nodes[i + 1];
      const ThresholdResult* a = nullptr;
      const ThresholdResult* b = nullptr;
      for (const auto& th : report.thresholds) {
        if (th.d == d && th.n == n0) a = &th;
        if (th.d == d && th.n == n1) b = &th;
      }
      if (!a || !b || n1 <= n0) continue;
      // "Not reached" ranks above every reached value.
      const int ta = a->threshold.value_or(a->max_total + 1);
      const int tb = b->threshold.value_or(b->max_total + 1);
      report.notes.push_back(std::string(tb >= ta ? "PASS" : "WARN") + " threshold rise d=" +
                             std::to_string(d) + ": n=" + std::to_string(n0) + " -> " +
                             std::to_string(ta) + ", n=" + std::to_string(n1) + " -> " +
                             std::to_string(tb));
    }
  }
  return report;
}

ExperimentReport ExperimentRunner::run() {
  switch (cfg_.kind) {
    case ExperimentKind::table1: return run_table1();
    case ExperimentKind::sweep: return run_sweep();
    case ExperimentKind::grid: return run_grid();
    case ExperimentKind::threshold: return run_threshold();
    case ExperimentKind::single: break;
  }
  throw InputError("experiment kind 'single' runs through the optimize command");
}

std::vector<ExperimentRecord> run_table1(const ExperimentConfig& cfg) {
  return ExperimentRunner(cfg).run_table1().records;
}

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg) {
  return ExperimentRunner(cfg).run_sweep().records;
}

std::vector<GridResult> run_grid(const ExperimentConfig& cfg) {
  return ExperimentRunner(cfg).run_grid().grids;
}

std::vector<ThresholdResult> run_threshold(const ExperimentConfig& cfg) {
  return ExperimentRunner(cfg).run_threshold().thresholds;
}

}  // namespace qaoaplus
