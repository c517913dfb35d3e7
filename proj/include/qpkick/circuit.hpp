// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "qpkick/lattice.hpp"

namespace qpkick {

using cplx = std::complex<double>;

enum class GateKind : std::uint8_t { RX, RZ, RZZ, CZ, SX, X };

std::string_view to_string(GateKind k);
GateKind gate_kind_from_string(std::string_view s);

/// One- or two-qubit gate. Conventions:
///   RZ(t)  = diag(e^{-it/2}, e^{it/2})
///   RX(t)  = exp(-i t X / 2)
///   RZZ(t) = exp(-i t Z(x)Z / 2)
///   SX     = sqrt(X) = ((1+i, 1-i), (1-i, 1+i)) / 2
/// Two-qubit matrices are indexed by bit(q0) + 2 * bit(q1).
struct Gate {
  GateKind kind = GateKind::RZ;
  std::array<int, 2> qubits{0, -1};
  double angle = 0.0;

  int arity() const { return kind == GateKind::RZZ || kind == GateKind::CZ ? 2 : 1; }
  bool is_diagonal() const { return kind == GateKind::RZ || kind == GateKind::RZZ || kind == GateKind::CZ; }

  static Gate rx(int q, double theta);
  static Gate rz(int q, double theta);
  static Gate rzz(int a, int b, double theta);
  static Gate cz(int a, int b);
  static Gate sx(int q);
  static Gate x(int q);

  friend bool operator==(const Gate &, const Gate &) = default;
};

/// Reduces an angle modulo 4 pi into (-2 pi, 2 pi]. Rotation gates have period
/// 4 pi, so this never changes a unitary.
double normalize_angle(double theta);

/// Row-major dense matrix of a gate: 2x2 or 4x4.
struct GateMatrix {
  int dim = 2;
  std::array<cplx, 16> m{};
  cplx operator()(int r, int c) const { return m[static_cast<std::size_t>(r * dim + c)]; }
  cplx &operator()(int r, int c) { return m[static_cast<std::size_t>(r * dim + c)]; }
};

GateMatrix gate_unitary(const Gate &gate);

/// Parameters of one Floquet cycle. from_w() applies J = h_x = 1/W.
struct FloquetParams {
  double W = 1.0;
  double J = 1.0;
  double h_x = 1.0;
  bool hardware_faithful = false;

  static FloquetParams from_w(double W, bool hardware_faithful = false);
  /// Explicit couplings, e.g. J = h_x = 0 for the bond-decoupling limit.
  static FloquetParams custom(double W, double J, double h_x, bool hardware_faithful = false);

  double rzz_angle() const { return 2.0 * J; }
  double rx_angle() const { return 2.0 * h_x; }

  /// Throws ConfigError for W <= 0 or, when hardware_faithful, for an RZZ
  /// angle outside (0, pi/2].
  void validate() const;
};

/// Smallest W admitted by the fractional RZZ window: 4 / pi.
inline constexpr double kMinHardwareW = 1.2732395447351626862;

using Layer = std::vector<Gate>;

/// Ordered gate layers; every layer acts on pairwise-disjoint qubits.
/// cycle_boundaries[k] is the number of layers in the first k+1 cycles.
struct Circuit {
  int num_qubits = 0;
  std::vector<Layer> layers;
  std::vector<std::size_t> cycle_boundaries;

  std::size_t num_cycles() const { return cycle_boundaries.size(); }
  std::size_t gate_count() const;
  std::size_t count(GateKind k) const;

  /// Throws InvariantError if a layer reuses a qubit or a gate is out of range.
  void check_layers() const;
};

/// One Floquet cycle: RZ layers per field color, RZZ layers per bond color,
/// then the global RX layer. Chain -> 4 layers, heavy-hex -> 7 layers.
Circuit build_floquet_cycle(const LatticeSpec &lattice, const FloquetParams &params);

/// t copies of a one-cycle circuit (t = 0 gives the empty circuit).
Circuit repeat_cycles(const Circuit &cycle, std::size_t t);

/// Rewrites RX and RZZ into {RZ, SX, CZ}: 2 CZ + 4 SX per RZZ and
/// RZ-SX-RZ-SX-RZ per RX. Equal to the input up to global phase.
Circuit transpile_to_clifford_set(const Circuit &circuit);

}  // namespace qpkick
