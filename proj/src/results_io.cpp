#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qaoaplus/error.hpp"
#include "qaoaplus/experiments.hpp"

namespace qaoaplus {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void ensure_dir(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

nlohmann::json nullable(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InputError("unknown output format '" + s + "' (expected csv or json)");
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = std::string(kResultsCsvHeader) + "\n";
  for (const auto& r : records) {
    std::string ars;
    for (std::size_t i = 0; i < r.ar_list.size(); ++i) {
      if (i > 0) ars += ';';
      ars += fmt_double(r.ar_list[i]);
    }
    out += std::to_string(r.n) + "," + std::to_string(r.d) + "," + csv_field(r.ansatz) + "," +
           std::to_string(r.param_count) + "," + std::to_string(r.two_qubit_gates) + "," +
           std::to_string(r.n_graphs) + "," + fmt_double(r.mean_ar) + "," + ars + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

nlohmann::json record_to_json(const ExperimentRecord& r) {
  nlohmann::json ars = nlohmann::json::array();
  for (double v : r.ar_list) ars.push_back(nullable(v));
  return {
      {"n", r.n},
      {"d", r.d},
      {"ansatz", r.ansatz},
      {"param_count", r.param_count},
      {"two_qubit_gates", r.two_qubit_gates},
      {"n_graphs", r.n_graphs},
      {"mean_ar", nullable(r.mean_ar)},
      {"ar_list", ars},
      {"seed", r.seed},
      {"graph_ids", r.graph_ids},
      {"failures", r.failures},
  };
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  auto number = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  try {
    ExperimentRecord r;
    r.n = j.at("n").get<int>();
    r.d = j.at("d").get<int>();
    r.ansatz = j.at("ansatz").get<std::string>();
    r.param_count = j.at("param_count").get<int>();
    r.two_qubit_gates = j.at("two_qubit_gates").get<int>();
    r.n_graphs = j.at("n_graphs").get<int>();
    r.mean_ar = number(j.at("mean_ar"));
    for (const auto& v : j.at("ar_list")) r.ar_list.push_back(number(v));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.graph_ids = j.value("graph_ids", std::vector<std::string>{});
    r.failures = j.value("failures", std::vector<std::string>{});
    if (static_cast<std::size_t>(r.n_graphs) != r.ar_list.size())
      throw InputError("record n_graphs does not match ar_list length");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed record: ") + e.what());
  }
}

nlohmann::json records_to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  return arr;
}

std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() && j.contains("records") ? j.at("records") : j;
  if (!arr.is_array()) throw InputError("expected a JSON array of records");
  std::vector<ExperimentRecord> out;
  for (const auto& item : arr) out.push_back(record_from_json(item));
  return out;
}

std::string grid_to_csv(const GridResult& grid) {
  std::string out = grid.ansatz == "ma-qaoa" ? "n_gamma\\n_beta" : "n_zz\\n_mix";
  for (int c = 1; c <= grid.cols; ++c) out += "," + std::to_string(c);
  out += "\n";
  for (int r = 0; r < grid.rows; ++r) {
    out += std::to_string(r + 1);
    for (int c = 0; c < grid.cols; ++c) out += "," + fmt_double(grid.at(r, c));
    out += "\n";
  }
  return out;
}

std::string thresholds_to_csv(const std::vector<ThresholdResult>& thresholds) {
  std::string out = "n,d,n_graphs,qaoa_plus4_mean_ar,threshold,max_total\n";
  for (const auto& t : thresholds) {
    out += std::to_string(t.n) + "," + std::to_string(t.d) + "," + std::to_string(t.n_graphs) +
           "," + fmt_double(t.qaoa_plus4_mean_ar) + "," +
           (t.threshold ? std::to_string(*t.threshold) : std::string("not_reached")) + "," +
           std::to_string(t.max_total) + "\n";
  }
  return out;
}

nlohmann::json manifest_json(const ExperimentConfig& cfg) {
  return {
      {"software_version", kSoftwareVersion},
      {"master_seed", cfg.seed},
      {"experiment", to_string(cfg.kind)},
      {"restarts", cfg.restarts},
      {"graphs_per_family", cfg.graphs_per_family},
      {"warm_start", cfg.warm_start},
      {"gradient", cfg.gradient == GradientMethod::adjoint ? "adjoint" : "finite-difference"},
      {"tolerances",
       {
           {"bfgs_grad_tol", cfg.bfgs.grad_tol},
           {"bfgs_max_iter", cfg.bfgs.max_iter},
           {"wolfe_c1", cfg.bfgs.c1},
           {"wolfe_c2", cfg.bfgs.c2},
           {"ar_bound_slack", 1e-9},
           {"fd_step", MultistartOptions{}.fd_step},
       }},
  };
}

void emit_results(const std::vector<ExperimentRecord>& records, OutputFormat format,
                  const std::filesystem::path& path, const ExperimentConfig& cfg,
                  const std::vector<std::string>& notes) {
  ensure_dir(path.parent_path());
  if (format == OutputFormat::csv) {
    write_text(path, records_to_csv(records));
  } else {
    const nlohmann::json doc{
        {"config", config_to_json(cfg)},
        {"records", records_to_json(records)},
        {"notes", notes},
    };
    write_text(path, doc.dump(2) + "\n");
  }
  write_text(path.parent_path() / "manifest.json", manifest_json(cfg).dump(2) + "\n");
}

void write_report(const ExperimentReport& report, OutputFormat format) {
  const auto& dir = report.config.out_dir;
  ensure_dir(dir);
  const auto results = dir / (format == OutputFormat::csv ? "results.csv" : "results.json");
  emit_results(report.records, format, results, report.config, report.notes);
  if (format == OutputFormat::csv) {
    std::string text;
    for (const auto& note : report.notes) text += note + "\n";
    write_text(dir / "notes.txt", text);
  }
  for (const auto& ens : report.ensembles) {
    write_graphs(dir / ("graphs_n" + std::to_string(ens.n) + "_d" + std::to_string(ens.d) + ".json"),
                 ens.graphs);
  }
  for (const auto& grid : report.grids) {
    write_text(dir / ("grid_" + grid.ansatz + "_n" + std::to_string(grid.n) + "_d" +
                      std::to_string(grid.d) + ".csv"),
               grid_to_csv(grid));
  }
  if (!report.thresholds.empty()) write_text(dir / "thresholds.csv", thresholds_to_csv(report.thresholds));
}

}  // namespace qaoaplus
