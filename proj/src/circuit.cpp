// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "qpkick/errors.hpp"

namespace qpkick {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};
}  // namespace

std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::RZZ: return "RZZ";
    case GateKind::CZ: return "CZ";
    case GateKind::SX: return "SX";
    case GateKind::X: return "X";
  }
  return "?";
}

GateKind gate_kind_from_string(std::string_view s) {
  for (GateKind k : {GateKind::RX, GateKind::RZ, GateKind::RZZ, GateKind::CZ, GateKind::SX, GateKind::X}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown gate kind '" + std::string(s) + "'");
}

double normalize_angle(double theta) {
  double r = std::fmod(theta, 4.0 * kPi);  // (-4pi, 4pi)
  if (r > 2.0 * kPi) r -= 4.0 * kPi;
  if (r <= -2.0 * kPi) r += 4.0 * kPi;
  return r;
}

Gate Gate::rx(int q, double theta) { return {GateKind::RX, {q, -1}, normalize_angle(theta)}; }
Gate Gate::rz(int q, double theta) { return {GateKind::RZ, {q, -1}, normalize_angle(theta)}; }
Gate Gate::rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, normalize_angle(theta)}; }
Gate Gate::cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0}; }
Gate Gate::sx(int q) { return {GateKind::SX, {q, -1}, 0.0}; }
Gate Gate::x(int q) { return {GateKind::X, {q, -1}, 0.0}; }

GateMatrix gate_unitary(const Gate &gate) {
  GateMatrix g;
  const double half = 0.5 * gate.angle;
  switch (gate.kind) {
    case GateKind::RZ:
      g(0, 0) = std::exp(-kI * half);
      g(1, 1) = std::exp(kI * half);
      break;
    case GateKind::RX:
      g(0, 0) = g(1, 1) = std::cos(half);
      g(0, 1) = g(1, 0) = -kI * std::sin(half);
      break;
    case GateKind::SX:
      g(0, 0) = g(1, 1) = cplx(0.5, 0.5);
      g(0, 1) = g(1, 0) = cplx(0.5, -0.5);
      break;
    case GateKind::X:
      g(0, 1) = g(1, 0) = 1.0;
      break;
    case GateKind::RZZ:
      g.dim = 4;
      for (int k = 0; k < 4; ++k) {
        const bool odd = ((k & 1) ^ (k >> 1)) != 0;
        g(k, k) = std::exp((odd ? kI : -kI) * half);
      }
      break;
    case GateKind::CZ:
      g.dim = 4;
      g(0, 0) = g(1, 1) = g(2, 2) = 1.0;
      g(3, 3) = -1.0;
      break;
  }
  return g;
}

FloquetParams FloquetParams::from_w(double W, bool hardware_faithful) {
  return custom(W, 1.0 / W, 1.0 / W, hardware_faithful);
}

FloquetParams FloquetParams::custom(double W, double J, double h_x, bool hardware_faithful) {
  FloquetParams p;
  p.W = W;
  p.J = J;
  p.h_x = h_x;
  p.hardware_faithful = hardware_faithful;
  p.validate();
  return p;
}

void FloquetParams::validate() const {
  if (!(W > 0.0) || !std::isfinite(W)) throw ConfigError("W must be positive and finite");
  if (!std::isfinite(J) || !std::isfinite(h_x)) throw ConfigError("couplings must be finite");
  if (hardware_faithful) {
    const double theta = rzz_angle();
    if (!(theta > 0.0) || theta > 0.5 * kPi * (1.0 + 1e-12)) {
      throw ConfigError("RZZ angle " + std::to_string(theta) +
                        " outside the fractional window (0, pi/2]; hardware-faithful runs need W >= 4/pi");
    }
  }
}

std::size_t Circuit::gate_count() const {
  std::size_t n = 0;
  for (const auto &layer : layers) n += layer.size();
  return n;
}

std::size_t Circuit::count(GateKind k) const {
  std::size_t n = 0;
  for (const auto &layer : layers) {
    n += static_cast<std::size_t>(std::count_if(layer.begin(), layer.end(), [k](const Gate &g) { return g.kind == k; }));
  }
  return n;
}

void Circuit::check_layers() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::set<int> used;
    for (const auto &g : layers[l]) {
      for (int i = 0; i < g.arity(); ++i) {
        const int q = g.qubits[static_cast<std::size_t>(i)];
        if (q < 0 || q >= num_qubits) {
          throw InvariantError("layer " + std::to_string(l) + " has a gate on out-of-range qubit " +
                               std::to_string(q));
        }
        if (!used.insert(q).second) {
          throw InvariantError("layer " + std::to_string(l) + " uses qubit " + std::to_string(q) + " twice");
        }
      }
    }
  }
}

Circuit build_floquet_cycle(const LatticeSpec &lattice, const FloquetParams &params) {
  params.validate();
  if (!lattice.has_fields()) throw ConfigError("lattice has no assigned quasiperiodic fields");
  Circuit c;
  c.num_qubits = lattice.num_qubits;
  for (Color color : lattice.field_colors()) {
    Layer layer;
    for (const auto &[key, h] : lattice.fields_z) {
      if (key.second == color) layer.push_back(Gate::rz(key.first, 2.0 * h));
    }
    if (!layer.empty()) c.layers.push_back(std::move(layer));
  }
  for (Color color : lattice.bond_colors()) {
    Layer layer;
    for (const auto &e : lattice.edges_of(color)) layer.push_back(Gate::rzz(e.a, e.b, params.rzz_angle()));
    c.layers.push_back(std::move(layer));
  }
  Layer kick;
  for (int q = 0; q < lattice.num_qubits; ++q) kick.push_back(Gate::rx(q, params.rx_angle()));
  c.layers.push_back(std::move(kick));
  c.cycle_boundaries.push_back(c.layers.size());
  return c;
}

Circuit repeat_cycles(const Circuit &cycle, std::size_t t) {
  Circuit out;
  out.num_qubits = cycle.num_qubits;
  out.layers.reserve(cycle.layers.size() * t);
  for (std::size_t i = 0; i < t; ++i) {
    out.layers.insert(out.layers.end(), cycle.layers.begin(), cycle.layers.end());
    out.cycle_boundaries.push_back(out.layers.size());
  }
  return out;
}

namespace {

// Time-ordered replacement steps for one gate; step k of every gate in a
// layer lands in the k-th output sub-layer.
std::vector<std::vector<Gate>> expand(const Gate &g) {
  auto hadamard = [](int q) {
    return std::vector<std::vector<Gate>>{{Gate::rz(q, kPi / 2)}, {Gate::sx(q)}, {Gate::rz(q, kPi / 2)}};
  };
  auto rx = [](int q, double theta) {
    return std::vector<std::vector<Gate>>{{Gate::rz(q, 2.5 * kPi)}, {Gate::sx(q)}, {Gate::rz(q, theta + kPi)},
                                          {Gate::sx(q)},           {Gate::rz(q, kPi / 2)}};
  };
  switch (g.kind) {
    case GateKind::RX: return rx(g.qubits[0], g.angle);
    case GateKind::RZZ: {
      const int a = g.qubits[0];
      const int b = g.qubits[1];
      std::vector<std::vector<Gate>> steps = hadamard(b);
      steps.push_back({Gate::cz(a, b)});
      for (auto &s : rx(b, g.angle)) steps.push_back(std::move(s));
      steps.push_back({Gate::cz(a, b)});
      for (auto &s : hadamard(b)) steps.push_back(std::move(s));
      return steps;
    }
    case GateKind::RZ:
    case GateKind::CZ:
    case GateKind::SX:
    case GateKind::X:
      return {{g}};
  }
  return {{g}};
}

}  // namespace

Circuit transpile_to_clifford_set(const Circuit &circuit) {
  Circuit out;
  out.num_qubits = circuit.num_qubits;
  std::size_t cycle = 0;
  for (std::size_t l = 0; l < circuit.layers.size(); ++l) {
    std::vector<Layer> sub;
    for (const auto &g : circuit.layers[l]) {
      if (g.kind != GateKind::RX && g.kind != GateKind::RZ && g.kind != GateKind::RZZ) {
        throw ConfigError("transpiler input must use only RX/RZ/RZZ, found " + std::string(to_string(g.kind)));
      }
      const auto steps = expand(g);
      if (sub.size() < steps.size()) sub.resize(steps.size());
      for (std::size_t k = 0; k < steps.size(); ++k) {
        sub[k].insert(sub[k].end(), steps[k].begin(), steps[k].end());
      }
    }
    for (auto &s : sub) out.layers.push_back(std::move(s));
    while (cycle < circuit.cycle_boundaries.size() && circuit.cycle_boundaries[cycle] == l + 1) {
      out.cycle_boundaries.push_back(out.layers.size());
      ++cycle;
    }
  }
  return out;
}

}  // namespace qpkick
