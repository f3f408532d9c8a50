#include "qaoaplus/simulator.hpp"

#include <cmath>
#include <string>

#include "qaoaplus/error.hpp"

namespace qaoaplus {

namespace {

void require_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw CapacityError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                        "], got " + std::to_string(n));
  }
}

void require_qubit(const Statevector& s, int j) {
  if (j < 0 || j >= s.num_qubits()) {
    throw InputError("qubit index " + std::to_string(j) + " out of range for " +
                     std::to_string(s.num_qubits()) + " qubits");
  }
}

void require_table(const Statevector& s, std::size_t size) {
  if (size != s.dimension()) {
    throw InputError("diagonal of length " + std::to_string(size) +
                     " does not match state dimension " + std::to_string(s.dimension()));
  }
}

}  // namespace

Statevector::Statevector(int num_qubits, std::vector<Amplitude> amplitudes)
    : n_(num_qubits), amps_(std::move(amplitudes)) {
  require_qubit_count(n_);
  if (amps_.size() != (std::size_t{1} << n_)) {
    throw InputError("amplitude vector must have length 2^n");
  }
}

Statevector Statevector::uniform(int num_qubits) {
  require_qubit_count(num_qubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  const double a = std::pow(2.0, -0.5 * num_qubits);
  return Statevector(num_qubits, std::vector<Amplitude>(dim, Amplitude(a, 0.0)));
}

Statevector Statevector::basis(int num_qubits, std::uint64_t index) {
  require_qubit_count(num_qubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw InputError("basis index out of range");
  std::vector<Amplitude> amps(dim);
  amps[index] = 1.0;
  return Statevector(num_qubits, std::move(amps));
}

double Statevector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

void apply_edge_phase(Statevector& s, int j, int k, double angle) {
  require_qubit(s, j);
  require_qubit(s, k);
  if (j == k) throw InputError("edge phase needs two distinct qubits");
  const Amplitude phase = std::polar(1.0, -angle);
  auto amps = s.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) {
    if (((x >> j) ^ (x >> k)) & 1U) amps[x] *= phase;
  }
}

void apply_cost_phase(Statevector& s, const CutTable& table, double gamma) {
  require_table(s, table.size());
  // Cut values are small integers; precompute one phase per distinct value.
  std::uint16_t max_cut = 0;
  for (auto c : table) max_cut = std::max(max_cut, c);
  std::vector<Amplitude> phase(max_cut + 1);
  for (std::size_t c = 0; c < phase.size(); ++c) {
    phase[c] = std::polar(1.0, -gamma * static_cast<double>(c));
  }
  auto amps = s.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) amps[x] *= phase[table[x]];
}

void apply_diagonal_phase(Statevector& s, std::span<const double> phases) {
  require_table(s, phases.size());
  auto amps = s.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) {
    amps[x] *= Amplitude(std::cos(phases[x]), -std::sin(phases[x]));
  }
}

void apply_rx(Statevector& s, int j, double beta) {
  require_qubit(s, j);
  const double c = std::cos(beta);
  const double sn = std::sin(beta);
  const Amplitude off(0.0, -sn);
  auto amps = s.amplitudes();
  const std::size_t stride = std::size_t{1} << j;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t x = base; x < base + stride; ++x) {
      const Amplitude a0 = amps[x];
      const Amplitude a1 = amps[x + stride];
      amps[x] = c * a0 + off * a1;
      amps[x + stride] = off * a0 + c * a1;
    }
  }
}

void apply_mixer_layer(Statevector& s, std::span<const double> betas) {
  if (betas.size() != static_cast<std::size_t>(s.num_qubits())) {
    throw InputError("mixer layer needs one angle per qubit: got " +
                     std::to_string(betas.size()) + " for " +
                     std::to_string(s.num_qubits()) + " qubits");
  }
  for (int j = 0; j < s.num_qubits(); ++j) apply_rx(s, j, betas[j]);
}

double expectation_cut(const Statevector& s, const CutTable& table) {
  require_table(s, table.size());
  double total = 0.0;
  const auto amps = s.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) total += std::norm(amps[x]) * table[x];
  return total;
}

}  // namespace qaoaplus
