// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "qpkick/circuit.hpp"
#include "qpkick/rng.hpp"

namespace qpkick {

enum class NoiseMode : std::uint8_t { None, GlobalDepolarizing, PauliTrajectory };

std::string_view to_string(NoiseMode m);
NoiseMode noise_mode_from_string(std::string_view s);

/// Phenomenological noise.
///  - GlobalDepolarizing: every layer maps rho -> lambda rho + (1 - lambda) I / D;
///    evolution stays noiseless and observables carry lambda^layers.
///  - PauliTrajectory: after every gate, with probability p1 (one-qubit gate)
///    or p2 (two-qubit gate), a uniformly random non-identity Pauli acts on the
///    gate's support. Averaging trajectories reproduces the depolarizing channel.
struct NoiseSpec {
  NoiseMode mode = NoiseMode::None;
  double lambda = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
  int trajectories = 1;
  std::uint64_t seed = 0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec global_depolarizing(double lambda);
  static NoiseSpec pauli_trajectory(double p1, double p2, int trajectories, std::uint64_t seed);

  void validate() const;
  /// lambda^layers for GlobalDepolarizing, 1 otherwise.
  double attenuation(std::size_t layers) const;
  int num_trajectories() const { return mode == NoiseMode::PauliTrajectory ? trajectories : 1; }
};

/// Draws the post-gate Pauli error for `gate` and hands the resulting gates
/// (X, and RZ(pi) standing in for Z up to phase) to `apply`.
template <class ApplyFn>
void inject_pauli_error(const Gate &gate, const NoiseSpec &noise, Rng &rng, ApplyFn &&apply) {
  if (noise.mode != NoiseMode::PauliTrajectory) return;
  auto apply_pauli = [&](int q, std::uint64_t which) {
    // 1 = X, 2 = Y (= XZ up to phase), 3 = Z
    if (which == 3 || which == 2) apply(Gate::rz(q, std::numbers::pi));
    if (which == 1 || which == 2) apply(Gate::x(q));
  };
  if (gate.arity() == 1) {
    if (rng.uniform() < noise.p1) apply_pauli(gate.qubits[0], 1 + rng.below(3));
  } else {
    if (rng.uniform() < noise.p2) {
      const std::uint64_t k = 1 + rng.below(15);
      apply_pauli(gate.qubits[0], k & 3);
      apply_pauli(gate.qubits[1], k >> 2);
    }
  }
}

}  // namespace qpkick
