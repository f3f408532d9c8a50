#include "qaoaplus/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qaoaplus/error.hpp"

namespace qaoaplus {

std::string to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::standard: return "standard";
    case AnsatzKind::qaoa_plus: return "qaoa_plus";
    case AnsatzKind::ma_qaoa: return "ma_qaoa";
  }
  return "unknown";
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::cost: return "cost";
    case LayerKind::line_zz: return "line_zz";
    case LayerKind::mixer: return "mixer";
  }
  return "unknown";
}

namespace {

AnsatzKind ansatz_kind_from_string(const std::string& s) {
  if (s == "standard") return AnsatzKind::standard;
  if (s == "qaoa_plus") return AnsatzKind::qaoa_plus;
  if (s == "ma_qaoa") return AnsatzKind::ma_qaoa;
  throw InputError("unknown ansatz kind \"" + s + "\"");
}

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "cost") return LayerKind::cost;
  if (s == "line_zz") return LayerKind::line_zz;
  if (s == "mixer") return LayerKind::mixer;
  throw InputError("unknown layer type \"" + s + "\"");
}

void require_range(const char* what, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw InputError(std::string(what) + " must be in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "], got " + std::to_string(value));
  }
}

Layer cost_layer(const Graph& g, int groups) {
  return {LayerKind::cost, g.edges(),
          SlotGrouping::balanced(static_cast<int>(g.num_edges()), groups)};
}

Layer mixer_layer(int n, int groups) {
  return {LayerKind::mixer, {}, SlotGrouping::balanced(n, groups)};
}

Layer line_layer(int n, int groups) {
  std::vector<Edge> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
  return {LayerKind::line_zz, std::move(pairs), SlotGrouping::balanced(n - 1, groups)};
}

bool is_diagonal(LayerKind kind) { return kind != LayerKind::mixer; }

}  // namespace

SlotGrouping SlotGrouping::balanced(int slots, int groups) {
  if (slots < 1) throw InputError("layer has no slots to group");
  require_range("group count", groups, 1, slots);
  SlotGrouping out;
  out.slots = slots;
  out.starts.reserve(groups);
  for (int g = 0; g < groups; ++g) {
    out.starts.push_back(static_cast<int>(static_cast<long long>(g) * slots / groups));
  }
  return out;
}

int AnsatzSpec::param_count() const {
  int total = 0;
  for (const auto& layer : layers) total += layer.grouping.group_count();
  return total;
}

int AnsatzSpec::two_qubit_gate_count() const {
  int total = 0;
  for (const auto& layer : layers) {
    if (is_diagonal(layer.kind)) total += static_cast<int>(layer.pairs.size());
  }
  return total;
}

std::string AnsatzSpec::descriptor() const {
  switch (kind) {
    case AnsatzKind::standard:
      return "standard-p" + std::to_string(depth);
    case AnsatzKind::qaoa_plus:
      return "qaoa-plus(" + std::to_string(layers.at(2).grouping.group_count()) + "," +
             std::to_string(layers.at(3).grouping.group_count()) + ")";
    case AnsatzKind::ma_qaoa:
      return "ma-qaoa(" + std::to_string(layers.at(0).grouping.group_count()) + "," +
             std::to_string(layers.at(1).grouping.group_count()) + ")";
  }
  return "unknown";
}

std::string AnsatzSpec::structure_key() const {
  std::string key;
  for (const auto& layer : layers) {
    if (!key.empty()) key += '|';
    key += to_string(layer.kind) + ":" + std::to_string(layer.grouping.slots) + ":";
    for (std::size_t i = 0; i < layer.grouping.starts.size(); ++i) {
      if (i > 0) key += ',';
      key += std::to_string(layer.grouping.starts[i]);
    }
  }
  return key;
}

AnsatzSpec build_standard_qaoa(const Graph& g, int p) {
  require_range("standard QAOA depth p", p, 1, 2);
  if (g.num_edges() == 0) throw InputError("graph has no edges");
  AnsatzSpec spec{AnsatzKind::standard, p, g.id(), g.num_nodes(), {}};
  for (int i = 0; i < p; ++i) {
    spec.layers.push_back(cost_layer(g, 1));
    spec.layers.push_back(mixer_layer(g.num_nodes(), 1));
  }
  return spec;
}

AnsatzSpec build_qaoa_plus(const Graph& g, int zz_groups, int mixer_groups) {
  const int n = g.num_nodes();
  if (n < 2) throw InputError("QAOA+ needs at least two qubits");
  if (g.num_edges() == 0) throw InputError("graph has no edges");
  require_range("ZZ-line parameter count", zz_groups, 1, n - 1);
  require_range("second mixer parameter count", mixer_groups, 1, n);
  AnsatzSpec spec{AnsatzKind::qaoa_plus, 1, g.id(), n, {}};
  spec.layers.push_back(cost_layer(g, 1));
  spec.layers.push_back(mixer_layer(n, 1));
  spec.layers.push_back(line_layer(n, zz_groups));
  spec.layers.push_back(mixer_layer(n, mixer_groups));
  return spec;
}

AnsatzSpec build_ma_qaoa(const Graph& g, int gamma_groups, int beta_groups) {
  if (g.num_edges() == 0) throw InputError("graph has no edges");
  require_range("cost-layer parameter count", gamma_groups, 1,
                static_cast<int>(g.num_edges()));
  require_range("mixer parameter count", beta_groups, 1, g.num_nodes());
  AnsatzSpec spec{AnsatzKind::ma_qaoa, 1, g.id(), g.num_nodes(), {}};
  spec.layers.push_back(cost_layer(g, gamma_groups));
  spec.layers.push_back(mixer_layer(g.num_nodes(), beta_groups));
  return spec;
}

std::vector<std::pair<int, int>> enumerate_split_pairs(int total, int max_a, int max_b) {
  if (total < 2) throw InputError("total parameter count must be at least 2");
  std::vector<std::pair<int, int>> out;
  for (int a = 1; a <= max_a && a < total; ++a) {
    const int b = total - a;
    if (b >= 1 && b <= max_b) out.emplace_back(a, b);
  }
  return out;
}

std::pair<int, int> threshold_split(int total, int max_gamma, int max_beta) {
  if (max_gamma < 1 || max_beta < 1) throw InputError("layer maxima must be positive");
  require_range("ma-QAOA parameter count", total, 2, max_gamma + max_beta);
  int gamma = (total + 1) / 2;
  int beta = total / 2;
  if (gamma > max_gamma) {
    beta += gamma - max_gamma;
    gamma = max_gamma;
  }
  if (beta > max_beta) {
    gamma += beta - max_beta;
    beta = max_beta;
  }
  return {gamma, beta};
}

std::vector<double> embed_p1_parameters(const AnsatzSpec& spec, double gamma, double beta) {
  std::vector<double> params;
  params.reserve(spec.param_count());
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const double value = i == 0 ? gamma : i == 1 ? beta : 0.0;
    params.insert(params.end(), spec.layers[i].grouping.group_count(), value);
  }
  return params;
}

CircuitEvaluator::CircuitEvaluator(AnsatzSpec spec, const Graph& g)
    : spec_(std::move(spec)), cut_(qaoaplus::cut_table(g)) {
  if (spec_.graph_id != g.id() || spec_.num_qubits != g.num_nodes()) {
    throw InputError("ansatz was built for graph " + spec_.graph_id + ", not " + g.id());
  }
  const std::size_t dim = cut_.size();
  for (const auto& layer : spec_.layers) {
    CompiledLayer c{layer.kind, param_count_, layer.grouping.group_count(), {}, {}};
    if (is_diagonal(layer.kind)) {
      c.counts.assign(static_cast<std::size_t>(c.groups) * dim, 0);
      for (int grp = 0; grp < c.groups; ++grp) {
        auto* row = c.counts.data() + static_cast<std::size_t>(grp) * dim;
        for (int slot = layer.grouping.group_begin(grp); slot < layer.grouping.group_end(grp);
             ++slot) {
          const Edge e = layer.pairs[slot];
          for (std::size_t x = 0; x < dim; ++x) {
            row[x] += static_cast<std::uint16_t>(((x >> e.u) ^ (x >> e.v)) & 1U);
          }
        }
      }
    } else {
      c.qubit_group.resize(spec_.num_qubits);
      for (int grp = 0; grp < c.groups; ++grp) {
        for (int q = layer.grouping.group_begin(grp); q < layer.grouping.group_end(grp); ++q) {
          c.qubit_group[q] = grp;
        }
      }
    }
    param_count_ += c.groups;
    compiled_.push_back(std::move(c));
  }
}

void CircuitEvaluator::check_params(std::span<const double> params) const {
  if (params.size() != static_cast<std::size_t>(param_count_)) {
    throw InputError(spec_.descriptor() + " takes " + std::to_string(param_count_) +
                     " parameters, got " + std::to_string(params.size()));
  }
}

void CircuitEvaluator::apply(Statevector& s, const CompiledLayer& layer,
                             std::span<const double> params, double sign) const {
  const auto theta = params.subspan(layer.first_param, layer.groups);
  if (layer.kind == LayerKind::mixer) {
    for (int q = 0; q < spec_.num_qubits; ++q) {
      apply_rx(s, q, sign * theta[layer.qubit_group[q]]);
    }
    return;
  }
  const std::size_t dim = s.dimension();
  std::vector<double> phase(dim, 0.0);
  for (int grp = 0; grp < layer.groups; ++grp) {
    const double angle = sign * theta[grp];
    const auto* row = layer.counts.data() + static_cast<std::size_t>(grp) * dim;
    for (std::size_t x = 0; x < dim; ++x) phase[x] += angle * row[x];
  }
  apply_diagonal_phase(s, phase);
}

Statevector CircuitEvaluator::prepare(std::span<const double> params) const {
  check_params(params);
  Statevector s = Statevector::uniform(spec_.num_qubits);
  for (const auto& layer : compiled_) apply(s, layer, params, 1.0);
  return s;
}

double CircuitEvaluator::expectation(std::span<const double> params) const {
  return expectation_cut(prepare(params), cut_);
}

double CircuitEvaluator::expectation_and_gradient(std::span<const double> params,
                                                  std::span<double> gradient) const {
  if (gradient.size() != static_cast<std::size_t>(param_count_)) {
    throw InputError("gradient buffer has the wrong length");
  }
  Statevector psi = prepare(params);
  const double value = expectation_cut(psi, cut_);

  // Adjoint sweep: with `psi` the state right after a layer and `costate`
  // the cost operator applied to the final state and pulled back to the same
  // point, a layer exp(-i*theta*G) contributes 2*Im<costate|G|psi>.
  Statevector costate = psi;
  {
    auto amps = costate.amplitudes();
    for (std::size_t x = 0; x < amps.size(); ++x) amps[x] *= static_cast<double>(cut_[x]);
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);
  const std::size_t dim = psi.dimension();
  std::vector<double> overlap(dim);

  for (std::size_t li = compiled_.size(); li-- > 0;) {
    const auto& layer = compiled_[li];
    const auto a = costate.amplitudes();
    const auto b = psi.amplitudes();
    if (layer.kind == LayerKind::mixer) {
      for (int q = 0; q < spec_.num_qubits; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        double acc = 0.0;
        for (std::size_t x = 0; x < dim; ++x) acc += (std::conj(a[x]) * b[x ^ bit]).imag();
        gradient[layer.first_param + layer.qubit_group[q]] += 2.0 * acc;
      }
    } else {
      for (std::size_t x = 0; x < dim; ++x) overlap[x] = (std::conj(a[x]) * b[x]).imag();
      for (int grp = 0; grp < layer.groups; ++grp) {
        const auto* row = layer.counts.data() + static_cast<std::size_t>(grp) * dim;
        double acc = 0.0;
        for (std::size_t x = 0; x < dim; ++x) acc += row[x] * overlap[x];
        gradient[layer.first_param + grp] += 2.0 * acc;
      }
    }
    if (li > 0) {
      apply(psi, layer, params, -1.0);
      apply(costate, layer, params, -1.0);
    }
  }
  return value;
}

double evaluate(const AnsatzSpec& spec, const Graph& g, std::span<const double> params) {
  return CircuitEvaluator(spec, g).expectation(params);
}

nlohmann::json ansatz_to_json(const AnsatzSpec& spec) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : spec.layers) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& e : layer.pairs) pairs.push_back({e.u, e.v});
    layers.push_back({{"type", to_string(layer.kind)},
                      {"slots", layer.grouping.slots},
                      {"group_starts", layer.grouping.starts},
                      {"pairs", std::move(pairs)}});
  }
  return {{"kind", to_string(spec.kind)},
          {"depth", spec.depth},
          {"graph_id", spec.graph_id},
          {"num_qubits", spec.num_qubits},
          {"param_count", spec.param_count()},
          {"layers", std::move(layers)}};
}

AnsatzSpec ansatz_from_json(const nlohmann::json& j) {
  AnsatzSpec spec;
  try {
    spec.kind = ansatz_kind_from_string(j.at("kind").get<std::string>());
    spec.depth = j.at("depth").get<int>();
    spec.graph_id = j.at("graph_id").get<std::string>();
    spec.num_qubits = j.at("num_qubits").get<int>();
    for (const auto& jl : j.at("layers")) {
      Layer layer;
      layer.kind = layer_kind_from_string(jl.at("type").get<std::string>());
      layer.grouping.slots = jl.at("slots").get<int>();
      layer.grouping.starts = jl.at("group_starts").get<std::vector<int>>();
      for (const auto& p : jl.at("pairs")) {
        layer.pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      }
      spec.layers.push_back(std::move(layer));
    }
    if (j.at("param_count").get<int>() != spec.param_count()) {
      throw InputError("param_count does not match the layer groupings");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed ansatz JSON: ") + e.what());
  }
  for (const auto& layer : spec.layers) {
    const auto& gr = layer.grouping;
    const int expected_slots =
        is_diagonal(layer.kind) ? static_cast<int>(layer.pairs.size()) : spec.num_qubits;
    if (gr.slots != expected_slots || gr.starts.empty() || gr.starts.front() != 0 ||
        std::adjacent_find(gr.starts.begin(), gr.starts.end(), std::greater_equal<>()) !=
            gr.starts.end() ||
        gr.starts.back() >= gr.slots) {
      throw InputError("invalid group boundaries in " + to_string(layer.kind) + " layer");
    }
    for (const auto& e : layer.pairs) {
      if (e.u < 0 || e.v >= spec.num_qubits || e.u >= e.v) {
        throw InputError("invalid qubit pair in " + to_string(layer.kind) + " layer");
      }
    }
  }
  return spec;
}

}  // namespace qaoaplus
