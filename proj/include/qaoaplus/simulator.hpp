#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qaoaplus/graph.hpp"

namespace qaoaplus {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 24;

// Dense n-qubit state. Basis index x encodes qubit j in bit j.
class Statevector {
 public:
  Statevector(int num_qubits, std::vector<Amplitude> amplitudes);

  // |+>^n, every amplitude 2^(-n/2).
  static Statevector uniform(int num_qubits);
  // Computational basis state |index>.
  static Statevector basis(int num_qubits, std::uint64_t index);

  int num_qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  const Amplitude& operator[](std::size_t x) const { return amps_[x]; }

  double norm_squared() const;

 private:
  int n_;
  std::vector<Amplitude> amps_;
};

inline Statevector uniform_superposition(int num_qubits) {
  return Statevector::uniform(num_qubits);
}

// Gate kernels update the state in place.

// exp(-i*angle*(I - Z_j Z_k)/2): phase e^{-i*angle} where bits j and k differ.
void apply_edge_phase(Statevector& s, int j, int k, double angle);

// exp(-i*gamma*C) for the diagonal C given by `table`.
void apply_cost_phase(Statevector& s, const CutTable& table, double gamma);

// amps[x] *= exp(-i*phases[x]).
void apply_diagonal_phase(Statevector& s, std::span<const double> phases);

// exp(-i*beta*X_j).
void apply_rx(Statevector& s, int j, double beta);

// exp(-i*betas[j]*X_j) on every qubit j.
void apply_mixer_layer(Statevector& s, std::span<const double> betas);

// Sum over x of |amps[x]|^2 * table[x], reduced in index order.
double expectation_cut(const Statevector& s, const CutTable& table);

}  // namespace qaoaplus
