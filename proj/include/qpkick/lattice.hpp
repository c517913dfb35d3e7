// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qpkick {

/// Bond / stripe color. Chains use Even/Odd bonds and a single `Line` field
/// direction; heavy-hex lattices use Red/Green/Blue for both.
enum class Color : std::uint8_t { Line, Even, Odd, Red, Green, Blue };

std::string_view to_string(Color c);
Color color_from_string(std::string_view s);

enum class LatticeKind : std::uint8_t { Chain, HeavyHex, Custom };

std::string_view to_string(LatticeKind k);
LatticeKind lattice_kind_from_string(std::string_view s);

struct Edge {
  int a = 0;  // a < b
  int b = 0;
  Color color = Color::Even;

  friend bool operator==(const Edge &, const Edge &) = default;
};

using Stripe = std::vector<int>;

/// Qubit geometry plus the colored layer structure the Floquet circuit needs.
///
/// Invariants (checked by validate()):
///  - edges are simple and each appears in exactly one color class;
///  - no two edges of one color share a qubit;
///  - every stripe is a simple path in the lattice graph and stripes of one
///    color are pairwise disjoint.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::Chain;
  int num_qubits = 0;
  std::vector<Edge> edges;
  std::map<Color, std::vector<Stripe>> stripes;
  /// h^z for (qubit, field color). Empty until assign_qp_fields().
  std::map<std::pair<int, Color>, double> fields_z;
  /// Set when stripes could not be derived and fell back to singletons.
  bool stripes_degenerate = false;

  /// Edge colors present, in layer order.
  std::vector<Color> bond_colors() const;
  /// Stripe (field) colors present, in layer order.
  std::vector<Color> field_colors() const;
  std::vector<Edge> edges_of(Color c) const;
  bool has_fields() const { return !fields_z.empty(); }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// Parameters of the quasiperiodic longitudinal field along a stripe.
struct QpFieldParams {
  static constexpr double kInverseGoldenRatio = 0.6180339887498948482;  // (sqrt(5)-1)/2

  double W = 1.0;
  double beta = kInverseGoldenRatio;
  double omega0 = 0.0;

  /// (W/2) cos(2 pi beta p + omega0) at intra-stripe position p.
  double field_at(int position) const;
};

/// Open chain 0-1-...-(n-1); bond (j, j+1) is Even for even j, Odd otherwise.
LatticeSpec build_chain(int n);

/// Heavy-hexagonal patch of rows x cols hexagons in a brick-wall arrangement,
/// with a bridge qubit on every honeycomb edge. Qubits are numbered row-major
/// on the underlying grid. build_heavy_hex(7, 3) is the 144-qubit,
/// 164-bond (54 R / 55 G / 55 B) configuration.
LatticeSpec build_heavy_hex(int rows, int cols);

using EdgeColoring = std::map<std::pair<int, int>, Color>;

/// Imports an arbitrary coupling map. Without a coloring, a greedy matching
/// decomposition into Red/Green/Blue is computed. Stripes follow the
/// heavy-hex construction when the colored graph admits it, otherwise every
/// qubit becomes its own stripe and `stripes_degenerate` is set.
LatticeSpec load_coupling_map(const std::vector<std::pair<int, int>> &edge_list,
                              const std::optional<EdgeColoring> &coloring = std::nullopt,
                              std::optional<int> num_qubits = std::nullopt);

/// Assigns h^z along every stripe. The same parameters are used for every color.
LatticeSpec assign_qp_fields(LatticeSpec lattice, const QpFieldParams &params);
/// Per-color variant; colors without an entry receive no field.
LatticeSpec assign_qp_fields(LatticeSpec lattice, const std::map<Color, QpFieldParams> &params);

/// Derives stripes from a colored heavy-hex-like graph. Returns nullopt when
/// the graph does not decompose into corner/bridge zigzag paths.
std::optional<std::map<Color, std::vector<Stripe>>> derive_heavy_hex_stripes(int num_qubits,
                                                                          const std::vector<Edge> &edges);

}  // namespace qpkick
