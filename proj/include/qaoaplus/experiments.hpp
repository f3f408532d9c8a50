#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qaoaplus/ansatz.hpp"
#include "qaoaplus/graph.hpp"
#include "qaoaplus/optimizer.hpp"

namespace qaoaplus {

inline constexpr const char* kSoftwareVersion = "qaoaplus 1.0.0";

enum class ExperimentKind { table1, sweep, grid, threshold, single };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::table1;
  std::vector<int> nodes{8};
  std::vector<int> degrees{3};
  int graphs_per_family = 10;
  int restarts = 10;
  std::uint64_t seed = 2022;
  std::filesystem::path out_dir = "results";
  bool warm_start = true;
  GradientMethod gradient = GradientMethod::adjoint;
  BfgsOptions bfgs;
  int draw_budget = kNonisomorphicDrawBudget;
  unsigned threads = 1;

  // Families studied by default for each experiment.
  static ExperimentConfig defaults_for(ExperimentKind kind);

  // Throws InputError on non-positive counts or an odd n*d family.
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Fields present in `j` override those of `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

// One row of a results table.
struct ExperimentRecord {
  int n = 0;
  int d = 0;
  std::string ansatz;
  int param_count = 0;
  int two_qubit_gates = 0;
  std::vector<double> ar_list;  // per graph, in ensemble order
  double mean_ar = 0.0;
  int n_graphs = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> graph_ids;
  std::vector<std::string> failures;

  bool operator==(const ExperimentRecord&) const = default;
};

// Non-isomorphic graphs of one (n, d) family with their exact max cuts.
struct Ensemble {
  int n = 0;
  int d = 0;
  std::vector<Graph> graphs;
  std::vector<int> cmax;
  std::vector<std::string> failures;
};

// Which ansatz to build on every graph of a family. For standard QAOA `a` is
// p; for QAOA+ (a, b) are the ZZ-line and second-mixer parameter counts; for
// ma-QAOA they are the cost and mixer parameter counts.
struct AnsatzRequest {
  AnsatzKind kind = AnsatzKind::standard;
  int a = 1;
  int b = 0;

  AnsatzSpec build(const Graph& g) const;
  // Same text as AnsatzSpec::descriptor() of the built spec.
  std::string key() const;
  auto operator<=>(const AnsatzRequest&) const = default;
};

// Multistart results of one request over a whole ensemble.
struct FamilyRun {
  AnsatzRequest request;
  std::string descriptor;
  int param_count = 0;
  int two_qubit_gates = 0;
  // One entry per graph; empty optional where optimization failed.
  std::vector<std::optional<OptResult>> results;
  std::vector<std::string> failures;

  // Per-graph ARs of the successful graphs.
  std::vector<double> ars() const;
  double mean_ar() const;
};

// Dense (rows x cols) matrix of mean ARs; cell (r, c) holds the ansatz with
// r+1 parameters in its first adjustable layer and c+1 in its second.
struct GridResult {
  int n = 0;
  int d = 0;
  std::string ansatz;  // "ma-qaoa" or "qaoa-plus"
  int rows = 0;
  int cols = 0;
  std::vector<double> mean_ar;  // row-major

  double at(int r, int c) const { return mean_ar[static_cast<std::size_t>(r) * cols + c]; }
};

struct ThresholdResult {
  int n = 0;
  int d = 0;
  int n_graphs = 0;
  double qaoa_plus4_mean_ar = 0.0;
  // Smallest ma-QAOA parameter count whose mean AR strictly exceeds QAOA+(4).
  std::optional<int> threshold;
  int max_total = 0;
  std::vector<double> ma_mean_ar;  // index t - 2 for t = 2 .. last evaluated
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentRecord> records;
  std::vector<GridResult> grids;
  std::vector<ThresholdResult> thresholds;
  std::vector<Ensemble> ensembles;
  // Soft-check outcomes ("PASS ..."/"WARN ...") and failure annotations.
  std::vector<std::string> notes;
};

// Owns the graph ensembles and a cache of optimized families for one run,
// so every experiment within the run reuses identical instances and
// identical optimization results for identical parameterizations.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }

  const Ensemble& ensemble(int n, int d);

  // Optimizes every request on every graph of the family. Work items are
  // (request, graph) pairs with seeds derived from the master seed, the graph
  // id and the circuit structure, so results do not depend on thread count
  // or on which other requests are in the batch.
  std::vector<const FamilyRun*> optimize(int n, int d, const std::vector<AnsatzRequest>& requests);
  const FamilyRun& optimize(int n, int d, const AnsatzRequest& request);

  ExperimentReport run_table1();
  ExperimentReport run_sweep();
  ExperimentReport run_grid();
  ExperimentReport run_threshold();
  ExperimentReport run();

  // Record for one family run.
  ExperimentRecord make_record(const Ensemble& ens, const FamilyRun& run) const;

 private:
  using FamilyKey = std::pair<int, int>;

  void ensure_p1(int n, int d);
  ExperimentReport empty_report() const;

  ExperimentConfig cfg_;
  std::map<FamilyKey, Ensemble> ensembles_;
  std::map<std::tuple<int, int, AnsatzRequest>, FamilyRun> runs_;
};

std::vector<ExperimentRecord> run_table1(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg);
std::vector<GridResult> run_grid(const ExperimentConfig& cfg);
std::vector<ThresholdResult> run_threshold(const ExperimentConfig& cfg);

// Output files.

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(const std::string& s);

inline constexpr const char* kResultsCsvHeader =
    "n,d,ansatz,param_count,two_qubit_gates,n_graphs,mean_ar,ar_list,seed";

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
nlohmann::json record_to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const nlohmann::json& j);
nlohmann::json records_to_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j);

std::string grid_to_csv(const GridResult& grid);
std::string thresholds_to_csv(const std::vector<ThresholdResult>& thresholds);

// Writes `path` as CSV (header plus one line per record) or as JSON (records
// plus config echo and notes), and a sidecar manifest.json next to it.
void emit_results(const std::vector<ExperimentRecord>& records, OutputFormat format,
                  const std::filesystem::path& path, const ExperimentConfig& cfg,
                  const std::vector<std::string>& notes = {});

// Writes every artifact of a report under cfg.out_dir: results.{csv,json},
// manifest.json, grid and threshold tables, and the graph ensembles.
void write_report(const ExperimentReport& report, OutputFormat format);

nlohmann::json manifest_json(const ExperimentConfig& cfg);

}  // namespace qaoaplus
