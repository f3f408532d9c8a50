#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qaoaplus/ansatz.hpp"
#include "qaoaplus/error.hpp"
#include "qaoaplus/experiments.hpp"
#include "qaoaplus/parallel.hpp"
#include "qaoaplus/random.hpp"

using namespace qaoaplus;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string format = "csv";
  std::string out = "results";
  std::vector<int> nodes;
  std::vector<int> degrees;
  int graphs = 10;
  int restarts = 10;
  std::uint64_t seed = 2022;
  bool no_warm_start = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool families) {
  cmd->add_option("--config", f.config_path, "JSON config; its fields override flags")
      ->check(CLI::ExistingFile);
  cmd->add_option("--format", f.format, "Results format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--restarts", f.restarts, "BFGS restarts per optimization");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_flag("--no-warm-start", f.no_warm_start, "Start every restart from a random point");
  cmd->add_option("--threads", f.threads, "Worker threads (default: all cores)");
  if (families) {
    cmd->add_option("--nodes", f.nodes, "Node counts");
    cmd->add_option("--degrees", f.degrees, "Degrees");
    cmd->add_option("--graphs", f.graphs, "Non-isomorphic graphs per family (cap)");
  }
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

ExperimentConfig make_config(ExperimentKind kind, const CommonFlags& f) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(kind);
  if (!f.nodes.empty()) cfg.nodes = f.nodes;
  if (!f.degrees.empty()) cfg.degrees = f.degrees;
  cfg.graphs_per_family = f.graphs;
  cfg.restarts = f.restarts;
  cfg.seed = f.seed;
  cfg.out_dir = f.out;
  cfg.warm_start = !f.no_warm_start;
  cfg.threads = f.threads > 0 ? f.threads : default_thread_count();
  if (!f.config_path.empty()) cfg = config_from_json(load_json(f.config_path), cfg);
  cfg.kind = kind;
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentReport& report) {
  for (const auto& r : report.records) {
    std::printf("n=%-3d d=%-2d %-22s params=%-3d gates=%-3d graphs=%-2d mean_ar=%.6f\n", r.n, r.d,
                r.ansatz.c_str(), r.param_count, r.two_qubit_gates, r.n_graphs, r.mean_ar);
  }
  for (const auto& t : report.thresholds) {
    std::printf("threshold n=%d d=%d: qaoa-plus(4) mean_ar=%.6f, ma-qaoa needs %s\n", t.n, t.d,
                t.qaoa_plus4_mean_ar,
                t.threshold ? std::to_string(*t.threshold).c_str() : "more than the maximum");
  }
  for (const auto& note : report.notes) std::fprintf(stderr, "%s\n", note.c_str());
}

int run_experiment(ExperimentKind kind, const CommonFlags& f) {
  const ExperimentConfig cfg = make_config(kind, f);
  ExperimentRunner runner(cfg);
  const ExperimentReport report = runner.run();
  write_report(report, output_format_from_string(f.format));
  print_summary(report);
  return 0;
}

struct GenFlags {
  int n = 8;
  int d = 3;
  int count = 10;
  std::uint64_t seed = 2022;
  std::string out;
  std::string config_path;
};

int run_gen_graphs(const GenFlags& f) {
  int n = f.n, d = f.d, count = f.count;
  std::uint64_t seed = f.seed;
  if (!f.config_path.empty()) {
    const auto j = load_json(f.config_path);
    try {
      n = j.value("n", n);
      d = j.value("d", d);
      count = j.value("count", count);
      seed = j.value("seed", seed);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(f.config_path + ": " + e.what());
    }
  }
  if (count < 1) throw InputError("--count must be positive");
  Rng rng(seed);
  const auto graphs = collect_nonisomorphic(n, d, count, rng);
  if (f.out.empty()) {
    std::cout << ensemble_to_json(graphs).dump() << '\n';
  } else {
    std::filesystem::path path = f.out;
    if (path.extension() != ".json") {
      std::filesystem::create_directories(path);
      path /= "graphs_n" + std::to_string(n) + "_d" + std::to_string(d) + ".json";
    } else if (path.has_parent_path()) {
      std::filesystem::create_directories(path.parent_path());
    }
    write_graphs(path, graphs);
    std::fprintf(stderr, "wrote %zu graphs to %s\n", graphs.size(), path.string().c_str());
  }
  return 0;
}

struct OptimizeFlags {
  CommonFlags common;
  std::string graphs_path;
  std::string ansatz = "standard";
  int p = 1;
  int n_gamma = 0;
  int n_beta = 0;
};

AnsatzSpec build_requested(const OptimizeFlags& f, const Graph& g) {
  if (f.ansatz == "standard") return build_standard_qaoa(g, f.p);
  if (f.ansatz == "qaoa-plus")
    return build_qaoa_plus(g, f.n_gamma > 0 ? f.n_gamma : g.num_nodes() - 1,
                           f.n_beta > 0 ? f.n_beta : g.num_nodes());
  return build_ma_qaoa(g, f.n_gamma > 0 ? f.n_gamma : g.num_edges(),
                       f.n_beta > 0 ? f.n_beta : g.num_nodes());
}

int run_optimize(const OptimizeFlags& f) {
  ExperimentConfig cfg = make_config(ExperimentKind::single, f.common);
  const auto graphs = read_graphs(f.graphs_path);
  if (graphs.empty()) throw InputError(f.graphs_path + " holds no graphs");

  std::vector<AnsatzSpec> specs;
  for (const auto& g : graphs) specs.push_back(build_requested(f, g));
  std::vector<OptResult> results(graphs.size());
  parallel_for(graphs.size(), cfg.threads, [&](std::size_t i) {
    const Graph& g = graphs[i];
    const AnsatzSpec& spec = specs[i];
    const int cmax = max_cut_bruteforce(g).cmax;
    MultistartOptions opt;
    opt.restarts = cfg.restarts;
    opt.warm_start = cfg.warm_start;
    opt.gradient = cfg.gradient;
    opt.bfgs = cfg.bfgs;
    const bool is_p1 = spec.kind == AnsatzKind::standard && spec.depth == 1;
    if (cfg.warm_start && !is_p1) {
      const AnsatzSpec p1 = build_standard_qaoa(g, 1);
      opt.seed = derive_seed(cfg.seed, "optimize|" + g.id() + "|" + p1.structure_key());
      const auto base = multistart_optimize(CircuitEvaluator(p1, g), cmax, opt);
      opt.warm_params = embed_p1_parameters(spec, base.best_params[0], base.best_params[1]);
    }
    opt.seed = derive_seed(cfg.seed, "optimize|" + g.id() + "|" + spec.structure_key());
    results[i] = multistart_optimize(CircuitEvaluator(spec, g), cmax, opt);
  });

  ExperimentRecord rec;
  rec.n = graphs.front().num_nodes();
  // d = -1 marks a file that is not a single regular family.
  rec.d = graphs.front().degrees().front();
  for (const auto& g : graphs)
    if (g.num_nodes() != rec.n || !g.is_regular(rec.d)) rec.d = -1;
  const bool uniform = std::all_of(specs.begin(), specs.end(), [&](const AnsatzSpec& s) {
    return s.descriptor() == specs.front().descriptor();
  });
  rec.ansatz = uniform ? specs.front().descriptor() : f.ansatz;
  rec.param_count = specs.front().param_count();
  rec.two_qubit_gates = specs.front().two_qubit_gate_count();
  double sum = 0.0;
  nlohmann::json details = nlohmann::json::array();
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    rec.ar_list.push_back(results[i].approximation_ratio);
    rec.graph_ids.push_back(graphs[i].id());
    sum += results[i].approximation_ratio;
    details.push_back({{"graph", graph_to_json(graphs[i])},
                       {"spec", ansatz_to_json(specs[i])},
                       {"result", opt_result_to_json(results[i])}});
  }
  rec.n_graphs = static_cast<int>(graphs.size());
  rec.mean_ar = sum / static_cast<double>(graphs.size());
  rec.seed = cfg.seed;

  const auto format = output_format_from_string(f.common.format);
  const auto dir = cfg.out_dir;
  emit_results({rec}, format, dir / (format == OutputFormat::csv ? "results.csv" : "results.json"),
               cfg);
  std::ofstream out(dir / "optimize_details.json");
  if (!out) throw IoError("cannot open " + (dir / "optimize_details.json").string());
  out << details.dump(2) << '\n';
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::printf("%s %s cmax=%d <C>=%.9f ar=%.9f\n", graphs[i].id().c_str(),
                specs[i].descriptor().c_str(), results[i].cmax, results[i].best_expectation,
                results[i].approximation_ratio);
  }
  std::printf("mean_ar=%.9f over %d graphs\n", rec.mean_ar, rec.n_graphs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QAOA+, standard QAOA and ma-QAOA on MaxCut: statevector evaluation and experiments"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-graphs", "Sample non-isomorphic random regular graphs");
  gen_cmd->add_option("--n", gen.n, "Node count");
  gen_cmd->add_option("--d", gen.d, "Degree");
  gen_cmd->add_option("--count", gen.count, "Number of non-isomorphic graphs (cap)");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output .json file or directory (default: stdout)");
  gen_cmd->add_option("--config", gen.config_path, "JSON with n, d, count, seed")
      ->check(CLI::ExistingFile);
  std::string gen_format = "json";
  gen_cmd->add_option("--format", gen_format, "Graph files are always JSON")
      ->check(CLI::IsMember({"json"}));

  OptimizeFlags opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Optimize one ansatz on every graph of a file");
  opt_cmd->add_option("--graphs", opt.graphs_path, "Graph ensemble JSON")
      ->required()
      ->check(CLI::ExistingFile);
  opt_cmd->add_option("--ansatz", opt.ansatz, "Ansatz family")
      ->check(CLI::IsMember({"standard", "qaoa-plus", "ma-qaoa"}));
  opt_cmd->add_option("--p", opt.p, "Depth of standard QAOA (1 or 2)");
  opt_cmd->add_option("--n-gamma", opt.n_gamma,
                      "ma-QAOA cost parameters, or QAOA+ ZZ-line parameters (default: all)");
  opt_cmd->add_option("--n-beta", opt.n_beta,
                      "ma-QAOA mixer parameters, or QAOA+ second-mixer parameters (default: all)");
  add_common(opt_cmd, opt.common, false);

  std::vector<std::pair<CLI::App*, ExperimentKind>> experiments;
  std::vector<CommonFlags> flags(4);
  const std::pair<const char*, const char*> names[] = {
      {"table1", "p=1, full QAOA+ and p=2 on each family"},
      {"sweep", "Mean AR against total parameter count, averaged over layer splits"},
      {"grid", "Mean AR over every (first layer, second layer) parameter split"},
      {"threshold", "Smallest ma-QAOA parameter count that beats QAOA+ with 4 parameters"},
  };
  for (int i = 0; i < 4; ++i) {
    auto* cmd = app.add_subcommand(names[i].first, names[i].second);
    add_common(cmd, flags[i], true);
    experiments.emplace_back(cmd, experiment_kind_from_string(names[i].first));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return run_gen_graphs(gen);
    if (*opt_cmd) return run_optimize(opt);
    for (std::size_t i = 0; i < experiments.size(); ++i)
      if (*experiments[i].first) return run_experiment(experiments[i].second, flags[i]);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
