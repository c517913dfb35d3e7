// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/noise.hpp"

#include <string>

#include "qpkick/errors.hpp"

namespace qpkick {

std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::None: return "none";
    case NoiseMode::GlobalDepolarizing: return "global";
    case NoiseMode::PauliTrajectory: return "pauli";
  }
  return "?";
}

NoiseMode noise_mode_from_string(std::string_view s) {
  for (NoiseMode m : {NoiseMode::None, NoiseMode::GlobalDepolarizing, NoiseMode::PauliTrajectory}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown noise mode '" + std::string(s) + "' (expected none, global or pauli)");
}

NoiseSpec NoiseSpec::global_depolarizing(double lambda) {
  NoiseSpec n;
  n.mode = NoiseMode::GlobalDepolarizing;
  n.lambda = lambda;
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::pauli_trajectory(double p1, double p2, int trajectories, std::uint64_t seed) {
  NoiseSpec n;
  n.mode = NoiseMode::PauliTrajectory;
  n.p1 = p1;
  n.p2 = p2;
  n.trajectories = trajectories;
  n.seed = seed;
  n.validate();
  return n;
}

void NoiseSpec::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("depolarizing lambda must lie in (0, 1]");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("p1 must lie in [0, 1]");
  if (!(p2 >= 0.0 && p2 <= 1.0)) throw ConfigError("p2 must lie in [0, 1]");
  if (trajectories < 1) throw ConfigError("trajectory count must be at least 1");
}

double NoiseSpec::attenuation(std::size_t layers) const {
  if (mode != NoiseMode::GlobalDepolarizing) return 1.0;
  return std::pow(lambda, static_cast<double>(layers));
}

}  // namespace qpkick
