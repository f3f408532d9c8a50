#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qaoaplus/graph.hpp"
#include "qaoaplus/simulator.hpp"

namespace qaoaplus {

enum class AnsatzKind { standard, qaoa_plus, ma_qaoa };
enum class LayerKind { cost, line_zz, mixer };

std::string to_string(AnsatzKind kind);
std::string to_string(LayerKind kind);

// Partition of a layer's slots into contiguous groups. Group g covers
// slots [starts[g], starts[g+1]) with the last group ending at `slots`.
struct SlotGrouping {
  int slots = 0;
  std::vector<int> starts;

  // `groups` blocks whose sizes differ by at most one.
  static SlotGrouping balanced(int slots, int groups);

  int group_count() const { return static_cast<int>(starts.size()); }
  int group_begin(int g) const { return starts[g]; }
  int group_end(int g) const {
    return g + 1 < group_count() ? starts[g + 1] : slots;
  }
  bool operator==(const SlotGrouping&) const = default;
};

// One circuit layer. Cost and line_zz layers hold one two-qubit phase gate
// per pair; a mixer layer holds one RX per qubit.
struct Layer {
  LayerKind kind = LayerKind::cost;
  std::vector<Edge> pairs;
  SlotGrouping grouping;
  bool operator==(const Layer&) const = default;
};

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::standard;
  int depth = 1;  // p for standard QAOA, 1 otherwise
  std::string graph_id;
  int num_qubits = 0;
  std::vector<Layer> layers;

  int param_count() const;
  int two_qubit_gate_count() const;

  // Human-readable name: "standard-p1", "qaoa-plus(7,8)", "ma-qaoa(12,8)".
  std::string descriptor() const;

  // Identifies the parameterized function the spec computes: layer kinds and
  // group boundaries. Standard p=1 and ma-QAOA(1,1) share a key.
  std::string structure_key() const;

  bool operator==(const AnsatzSpec&) const = default;
};

// p alternations of a shared-angle cost layer and a shared-angle mixer.
// Only p in {1, 2} is supported.
AnsatzSpec build_standard_qaoa(const Graph& g, int p);

// Standard p=1 layer followed by a ZZ line (0,1),...,(n-2,n-1) split into
// `zz_groups` angles and a second mixer split into `mixer_groups` angles.
AnsatzSpec build_qaoa_plus(const Graph& g, int zz_groups, int mixer_groups);

// p=1 QAOA whose edge gates use `gamma_groups` angles and whose mixer uses
// `beta_groups` angles.
AnsatzSpec build_ma_qaoa(const Graph& g, int gamma_groups, int beta_groups);

// Every (a, b) with a + b == total, 1 <= a <= max_a, 1 <= b <= max_b, in
// increasing a. Empty when none exists.
std::vector<std::pair<int, int>> enumerate_split_pairs(int total, int max_a, int max_b);

// Near-even (gamma, beta) split of `total`, the cost layer taking the extra
// parameter for odd totals; overflow past either maximum moves to the other
// layer. Throws InputError when total < 2 or total > max_gamma + max_beta.
std::pair<int, int> threshold_split(int total, int max_gamma, int max_beta);

// Parameter vector placing (gamma, beta) in every group of the first cost
// and first mixer layer and 0 everywhere else. For every ansatz here this
// reproduces the standard p=1 circuit at (gamma, beta).
std::vector<double> embed_p1_parameters(const AnsatzSpec& spec, double gamma, double beta);

// Precompiled evaluator for <C> of one (spec, graph) pair. Immutable after
// construction; each call allocates its own statevectors, so concurrent
// calls are safe.
class CircuitEvaluator {
 public:
  CircuitEvaluator(AnsatzSpec spec, const Graph& g);

  const AnsatzSpec& spec() const { return spec_; }
  const CutTable& cut_table() const { return cut_; }
  int param_count() const { return param_count_; }

  // Final state of the circuit for `params`.
  Statevector prepare(std::span<const double> params) const;

  double expectation(std::span<const double> params) const;

  // Returns <C> and writes d<C>/d(params) into `gradient` using one forward
  // and one backward (adjoint) sweep.
  double expectation_and_gradient(std::span<const double> params,
                                  std::span<double> gradient) const;

 private:
  struct CompiledLayer {
    LayerKind kind;
    int first_param;
    int groups;
    // Diagonal layers: counts[g * dim + x] is the number of gates in group g
    // acting nontrivially on basis state x.
    std::vector<std::uint16_t> counts;
    // Mixer layers: parameter group of each qubit.
    std::vector<int> qubit_group;
  };

  void check_params(std::span<const double> params) const;
  void apply(Statevector& s, const CompiledLayer& layer, std::span<const double> params,
             double sign) const;

  AnsatzSpec spec_;
  CutTable cut_;
  int param_count_ = 0;
  std::vector<CompiledLayer> compiled_;
};

// <C> for `params` on `g`. Throws InputError on a parameter-count mismatch
// or when g is not the graph the spec was built for.
double evaluate(const AnsatzSpec& spec, const Graph& g, std::span<const double> params);

inline int two_qubit_gate_count(const AnsatzSpec& spec) {
  return spec.two_qubit_gate_count();
}

nlohmann::json ansatz_to_json(const AnsatzSpec& spec);
AnsatzSpec ansatz_from_json(const nlohmann::json& j);

}  // namespace qaoaplus
