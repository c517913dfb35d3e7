// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qpkick/circuit.hpp"
#include "qpkick/noise.hpp"
#include "qpkick/rng.hpp"

namespace qpkick {

/// Measured bitstrings, row-major: bits[shot * num_qubits + q] in {0, 1}.
struct SampleSet {
  int num_qubits = 0;
  std::vector<std::uint8_t> bits;

  std::size_t shots() const { return num_qubits == 0 ? 0 : bits.size() / static_cast<std::size_t>(num_qubits); }
  std::uint8_t bit(std::size_t shot, int q) const { return bits[shot * static_cast<std::size_t>(num_qubits) + static_cast<std::size_t>(q)]; }
};

/// Dense 2^N amplitude vector, little-endian: qubit j is bit j of the index.
class StateVector {
 public:
  /// 2^26 amplitudes (1 GiB); larger states need an explicit budget.
  static constexpr std::size_t kDefaultMaxAmplitudes = std::size_t{1} << 26;

  StateVector() = default;

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }

  double norm_squared() const;
  void apply(const Gate &gate);

  friend StateVector init_all_up(int n, std::size_t max_amplitudes);
  friend StateVector load_checkpoint(std::istream &in, std::size_t max_amplitudes);

 private:
  StateVector(int n, std::vector<cplx> amps) : num_qubits_(n), amps_(std::move(amps)) {}

  int num_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Bytes needed for an n-qubit state.
std::size_t state_vector_bytes(int n);

/// |0...0>. Throws CapacityError (with the required byte count) beyond the budget.
StateVector init_all_up(int n, std::size_t max_amplitudes = StateVector::kDefaultMaxAmplitudes);

/// Throws std::out_of_range for a qubit index >= N.
void apply_gate(StateVector &state, const Gate &gate);

/// Called at every cycle boundary: (cycles completed in this run, state,
/// global-depolarizing attenuation accumulated in this run).
using SvCycleObserver = std::function<void(std::size_t, const StateVector &, double)>;

/// Applies every layer in order. Throws InvariantError when the norm drifts
/// by more than `norm_tolerance` at a cycle boundary.
void run_circuit(StateVector &state, const Circuit &circuit, const NoiseSpec &noise, Rng &rng,
                 const SvCycleObserver &observer = {}, double norm_tolerance = 1e-8);

double expect_z(const StateVector &state, int qubit);
std::vector<double> expect_z_all(const StateVector &state);

/// First two moments of M = sum_i Z_i in the computational basis.
struct MagnetizationMoments {
  double mean = 0.0;
  double mean_sq = 0.0;
};
MagnetizationMoments magnetization_moments(const StateVector &state);

/// i.i.d. Born-rule samples; identical (seed, stream) give identical output.
SampleSet sample_bitstrings(const StateVector &state, std::size_t shots, std::uint64_t seed,
                            std::uint64_t stream = 0);

/// Von Neumann entropy (natural log) of qubits [0, cut).
double half_cut_entropy(const StateVector &state, int cut);

/// Binary checkpoint: "QPKSVCK1", uint32 N, uint32 0x01020304 endianness tag,
/// then 2^N (re, im) IEEE doubles in native byte order.
void save_checkpoint(const StateVector &state, std::ostream &out);
StateVector load_checkpoint(std::istream &in, std::size_t max_amplitudes = StateVector::kDefaultMaxAmplitudes);

}  // namespace qpkick
