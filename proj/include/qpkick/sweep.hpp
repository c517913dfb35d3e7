// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpkick/io.hpp"
#include "qpkick/lattice.hpp"
#include "qpkick/noise.hpp"
#include "qpkick/observables.hpp"

namespace qpkick {

/// Version tag written as the first line of every series file.
inline constexpr const char *kSeriesVersion = "# qpkick-series v1";
inline constexpr const char *kSeriesHeader =
    "run_id,model,N,W,t,trajectory,A,A_err,FQ,FQ_err,FQ_per_qubit,S_half,backend,chi,max_bond,discarded_weight,shots,"
    "seed";

/// Recording schedule: every cycle up to dense_until, then `per_decade`
/// log-spaced cycles per decade up to max_cycles (which is always included).
struct CycleSchedule {
  std::size_t max_cycles = 100;
  std::size_t dense_until = 100;
  int per_decade = 20;
  /// Explicit list; overrides the generated schedule when non-empty.
  std::vector<std::size_t> explicit_times;

  /// Strictly increasing, starting at t = 0.
  std::vector<std::size_t> times() const;
};

struct SweepConfig {
  std::string model = "chain";  // chain | heavyhex | coupling_map
  int num_qubits = 12;
  int rows = 1;
  int cols = 1;
  std::string coupling_map;  // path, for model = coupling_map
  std::vector<double> w_values{2.0};
  /// J = h_x override (J = h_x = 1/W when unset); 0 gives the bond-decoupling limit.
  std::optional<double> coupling;
  double beta = QpFieldParams::kInverseGoldenRatio;
  double omega0 = 0.0;
  bool hardware_faithful = false;
  bool transpile = false;
  CycleSchedule schedule;
  std::string backend = "sv";  // sv | mps
  int chi = 64;
  std::size_t shots = 0;       // 0 = exact observables
  int bootstrap = 200;
  NoiseSpec noise;
  std::uint64_t seed = 1;
  std::size_t max_amplitudes = std::size_t{1} << 26;
  int jobs = 1;

  std::string output_dir = ".";
  std::string prefix = "qpkick";
  std::size_t checkpoint_every = 0;  // cycles; 0 disables
  bool resume = false;
  /// Abandons every task after this many cycles, as an interruption would.
  std::optional<std::size_t> halt_after;
  bool diagnostics = false;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  /// Parameters that determine results (excludes paths and execution knobs).
  json physics_json() const;
};

/// Parses the documented config schema; unknown keys are rejected.
SweepConfig sweep_config_from_json(const json &j);
json sweep_config_to_json(const SweepConfig &config);

LatticeSpec build_lattice(const SweepConfig &config, double w);

struct SeriesRow {
  std::string run_id;
  std::string model;
  int num_qubits = 0;
  double w = 0.0;
  std::size_t t = 0;
  int trajectory = 0;
  double a = 0.0, a_err = 0.0;
  double fq = 0.0, fq_err = 0.0, fq_per_qubit = 0.0;
  double s_half = 0.0;
  std::string backend;
  int chi = 0;
  int max_bond = 0;
  double discarded_weight = 0.0;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
};

std::string format_row(const SeriesRow &row);
SeriesRow parse_row(const std::string &line);
/// Reads a series file, checking the version line and header.
std::vector<SeriesRow> read_series(const std::string &path);

struct SweepOutcome {
  bool complete = true;
  std::string series_path;
  std::string aggregate_path;
  std::string meta_path;
  std::size_t rows = 0;
};

/// Runs every (W, trajectory) task and writes <prefix>_series.csv,
/// <prefix>_aggregate.csv and <prefix>_meta.json under output_dir.
/// Completed rows are flushed before an exception propagates.
SweepOutcome run_sweep(const SweepConfig &config);

struct FitSpec {
  bool power_law = true;
  bool log_growth = true;
  /// Power law: late-time window (t > (1 - fraction) t_max, t >= late_t_min), W <= w_max.
  double late_fraction = 0.2;
  double late_t_min = 1000.0;
  double w_max = 4.0;
  /// Log fit of FQ over [log_t_min, log_t_max], one fit per W.
  double log_t_min = 10.0;
  double log_t_max = 1000.0;
};

/// Applies the fits to a series file (trajectory-averaged per (W, t)).
json run_fits(const std::string &series_path, const FitSpec &spec);

struct CompareConfig {
  int num_qubits = 10;
  std::vector<double> w_values{2.0, 8.0};
  std::size_t cycles = 50;
  int chi = 256;
  std::size_t max_amplitudes = std::size_t{1} << 26;
  double beta = QpFieldParams::kInverseGoldenRatio;
  double omega0 = 0.0;
  /// Convergence: discarded weight <= this and |A(chi) - A(chi/2)| < a_tolerance.
  double discarded_tolerance = 1e-6;
  double a_tolerance = 1e-4;
};

struct ComparePoint {
  double w = 0.0;
  bool sv_skipped = false;
  std::string skip_reason;
  double max_abs_da = 0.0;
  double max_abs_dz = 0.0;
  /// Last cycle up to which every recorded cycle is converged (0 if none).
  std::size_t horizon = 0;
  bool converged = false;  // horizon reaches `cycles`
  int max_bond = 0;
  double discarded_weight = 0.0;
};

std::vector<ComparePoint> compare_backends(const CompareConfig &config);
json compare_report_json(const CompareConfig &config, const std::vector<ComparePoint> &points);

}  // namespace qpkick
