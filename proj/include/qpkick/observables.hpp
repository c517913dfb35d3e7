// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qpkick/rng.hpp"
#include "qpkick/state_vector.hpp"

namespace qpkick {

/// Product initial state |sigma_0 ... sigma_{N-1}>; all zeros is the all-up state.
struct InitialPattern {
  std::vector<std::uint8_t> bits;

  static InitialPattern all_up(int n) { return {std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)}; }
  int size() const { return static_cast<int>(bits.size()); }
};

/// (1/N) sum_i (1 - 2 sigma_i) <Z_i>. Throws ConfigError on a length mismatch.
double autocorrelation(std::span<const double> z, const InitialPattern &pattern);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Shot average of (1/N) sum_i (1 - 2 sigma_i)(1 - 2 b_i) with its standard error.
Estimate autocorrelation_from_samples(const SampleSet &samples, const InitialPattern &pattern);

/// 4 (<M^2> - <M>^2), M = sum_i Z_i.
double qfi_from_moments(const MagnetizationMoments &m);
double qfi_exact(const StateVector &state);

/// QFI of lambda-attenuated moments: off-diagonal <Z_i Z_j> and <Z_i> both
/// scale by f while the diagonal Z_i^2 = 1 terms stay.
double qfi_global_depolarized(const MagnetizationMoments &m, int num_qubits, double f);

/// 4 x unbiased variance of m = N - 2 popcount over shots; error is the
/// bootstrap standard deviation over `resamples` seeded resamples.
/// Throws ConfigError for fewer than two shots.
Estimate qfi_from_samples(const SampleSet &samples, int resamples = 200, std::uint64_t seed = 0);

/// Replaces each shot with a uniform bitstring with probability 1 - f.
void depolarize_samples(SampleSet &samples, double f, Rng &rng);

struct HaarBaseline {
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
  double mean_per_qubit = 0.0;
  double std_per_qubit = 0.0;
  int num_samples = 0;
};

/// QFI statistics of Haar-random states (normalized complex Gaussians), n <= 14.
HaarBaseline haar_qfi_baseline(int n, int num_samples, std::uint64_t seed);

enum class FitModel : std::uint8_t { PowerLawInW, LogInT };
std::string_view to_string(FitModel m);

/// PowerLawInW: A = c W^a, coeffs = {c, a}. LogInT: F = a + b ln t, coeffs = {a, b}.
/// residual is the 2-norm of the residuals in the fitted (linearized) variables.
struct FitResult {
  FitModel model = FitModel::PowerLawInW;
  std::array<double, 2> coeffs{};
  double residual = 0.0;
  double r2 = 0.0;
  std::pair<double, double> window{};  // range of the independent variable
  std::size_t num_points = 0;
};

/// Least squares on (ln W, ln A). Needs >= 3 points with W, A > 0.
FitResult fit_power_law_in_w(std::span<const std::pair<double, double>> points);
/// Least squares of F against ln t. Needs >= 3 points with t >= 1.
FitResult fit_log_in_t(std::span<const std::pair<double, double>> points);

/// Mean of the values with t > (1 - fraction) t_max and t >= t_min; falls
/// back to the last point when that window is empty.
double late_time_mean(std::span<const std::pair<double, double>> series, double fraction = 0.2, double t_min = 0.0);

}  // namespace qpkick
