// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "qpkick/circuit.hpp"
#include "qpkick/noise.hpp"
#include "qpkick/rng.hpp"
#include "qpkick/state_vector.hpp"

namespace qpkick {

/// Open-boundary MPS in mixed canonical form. sites[j][s] is the
/// (left bond x right bond) matrix for physical state s; sites left of
/// `center` are left-canonical, sites right of it right-canonical.
struct MpsState {
  int num_qubits = 0;
  int chi = 1;
  std::vector<std::array<Eigen::MatrixXcd, 2>> sites;
  /// Schmidt values of bond j (between sites j and j+1), descending, unit norm.
  std::vector<Eigen::VectorXd> schmidt;
  int center = 0;
  double discarded_weight = 0.0;

  int bond_dim(int bond) const { return static_cast<int>(sites[static_cast<std::size_t>(bond)][0].cols()); }
  int max_bond() const;
  double norm_squared() const;
};

/// Singular values below this fraction of the largest are always dropped.
inline constexpr double kSvdRelativeCutoff = 1e-12;

MpsState mps_init_all_up(int n, int chi);

void mps_apply_one_site(MpsState &state, const Gate &gate);
/// Throws ConfigError unless the two qubits are neighbours.
void mps_apply_two_site(MpsState &state, const Gate &gate);
void mps_apply(MpsState &state, const Gate &gate);

/// Moves the orthogonality center with QR / LQ steps.
void mps_move_center(MpsState &state, int site);

struct MpsCycleDiagnostics {
  std::size_t cycle = 0;
  int max_bond = 0;
  double discarded_weight_cum = 0.0;
  double wall_time = 0.0;  // seconds spent in this cycle
};

using MpsCycleObserver = std::function<void(const MpsState &, const MpsCycleDiagnostics &, double attenuation)>;

struct MpsRunOptions {
  /// Stop after the first cycle whose cumulative discarded weight exceeds this.
  double stop_discarded_weight = std::numeric_limits<double>::infinity();
  double norm_tolerance = 1e-8;
};

/// Applies the circuit layer by layer, sweeping each layer in the direction
/// that keeps center moves short. Returns the number of cycles completed.
std::size_t mps_run_circuit(MpsState &state, const Circuit &circuit, const NoiseSpec &noise, Rng &rng,
                            const MpsCycleObserver &observer = {}, const MpsRunOptions &options = {});

double mps_expect_z(const MpsState &state, int qubit);
std::vector<double> mps_expect_z_all(const MpsState &state);
MagnetizationMoments mps_magnetization_moments(const MpsState &state);

/// -sum l^2 ln l^2 over the stored spectrum of `bond` (0 <= bond < N-1).
double mps_bond_entropy(const MpsState &state, int bond);

SampleSet mps_sample_bitstrings(const MpsState &state, std::size_t shots, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// Dense amplitudes of a small MPS (N <= 26), little-endian.
std::vector<cplx> mps_to_dense(const MpsState &state);

/// Binary checkpoint: "QPKMPSC1", uint32 N, uint32 0x01020304 tag, int32 chi,
/// int32 center, double discarded weight, then per site (int32 Dl, int32 Dr,
/// two Dl x Dr column-major complex blocks) and per bond (int32 k, k doubles).
void save_checkpoint(const MpsState &state, std::ostream &out);
MpsState load_mps_checkpoint(std::istream &in);

}  // namespace qpkick
