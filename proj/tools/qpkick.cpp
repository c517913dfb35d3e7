// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: sweep, fit, compare, lattice export, circuit export.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpkick/circuit.hpp"
#include "qpkick/errors.hpp"
#include "qpkick/io.hpp"
#include "qpkick/sweep.hpp"

namespace {

using namespace qpkick;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kCapacity = 3, kInvariant = 4 };

// Every option is optional; a value given on the command line replaces the
// one from the config file.
struct SweepFlags {
  std::string config;
  std::optional<std::string> model, coupling_map, backend, noise_mode, output_dir, prefix;
  std::optional<int> n, rows, cols, chi, bootstrap, trajectories, jobs, per_decade;
  std::optional<std::vector<double>> w;
  std::optional<std::vector<std::size_t>> times;
  std::optional<double> coupling, beta, omega0, lambda, p1, p2;
  std::optional<std::size_t> max_cycles, dense_until, shots, max_amplitudes, checkpoint_every, halt_after;
  std::optional<std::uint64_t> seed, noise_seed;
  bool hardware_faithful = false, transpile = false, resume = false, diagnostics = false;
};

void add_lattice_options(CLI::App *cmd, SweepFlags &f) {
  cmd->add_option("--model", f.model, "chain, heavyhex or coupling_map");
  cmd->add_option("-N,--num-qubits", f.n, "chain length");
  cmd->add_option("--rows", f.rows, "heavy-hex rows of hexagons");
  cmd->add_option("--cols", f.cols, "heavy-hex columns of hexagons");
  cmd->add_option("--coupling-map", f.coupling_map, "coupling-map JSON file");
  cmd->add_option("--beta", f.beta, "field wave number");
  cmd->add_option("--omega0", f.omega0, "field phase offset");
}

void add_sweep_options(CLI::App *cmd, SweepFlags &f) {
  cmd->add_option("-c,--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  add_lattice_options(cmd, f);
  cmd->add_option("-W,--W", f.w, "disorder strengths")->delimiter(',');
  cmd->add_option("--coupling", f.coupling, "override J = h_x (default 1/W)");
  cmd->add_flag("--hardware-faithful", f.hardware_faithful, "reject W below 4/pi");
  cmd->add_flag("--transpile", f.transpile, "decompose RZZ into CZ/SX/RZ");
  cmd->add_option("--max-cycles", f.max_cycles, "last recorded cycle");
  cmd->add_option("--dense-until", f.dense_until, "record every cycle up to here");
  cmd->add_option("--per-decade", f.per_decade, "log-spaced records per decade afterwards");
  cmd->add_option("--times", f.times, "explicit record cycles")->delimiter(',');
  cmd->add_option("--backend", f.backend, "sv or mps");
  cmd->add_option("--chi", f.chi, "MPS bond dimension");
  cmd->add_option("--shots", f.shots, "bitstrings per record (0 = exact)");
  cmd->add_option("--bootstrap", f.bootstrap, "bootstrap resamples");
  cmd->add_option("--noise", f.noise_mode, "none, global or pauli");
  cmd->add_option("--lambda", f.lambda, "global depolarizing fidelity per layer");
  cmd->add_option("--p1", f.p1, "one-qubit Pauli error probability");
  cmd->add_option("--p2", f.p2, "two-qubit Pauli error probability");
  cmd->add_option("--trajectories", f.trajectories, "Pauli trajectories");
  cmd->add_option("--noise-seed", f.noise_seed, "Pauli trajectory seed");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--max-amplitudes", f.max_amplitudes, "state-vector memory budget");
  cmd->add_option("-j,--jobs", f.jobs, "parallel tasks");
  cmd->add_option("-o,--output-dir", f.output_dir, "output directory (default $QPKICK_OUTPUT_DIR or .)");
  cmd->add_option("--prefix", f.prefix, "output file stem");
  cmd->add_option("--checkpoint-every", f.checkpoint_every, "checkpoint interval in cycles");
  cmd->add_flag("--resume", f.resume, "continue from checkpoints");
  cmd->add_option("--halt-after", f.halt_after, "stop every task after this cycle");
  cmd->add_flag("--diagnostics", f.diagnostics, "write MPS diagnostics");
}

template <class T, class U>
void override(const std::optional<T> &flag, U &into) {
  if (flag) into = *flag;
}

SweepConfig resolve(const SweepFlags &f) {
  SweepConfig c;
  if (const char *env = std::getenv("QPKICK_OUTPUT_DIR"); env && *env) c.output_dir = env;
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(read_text_file(f.config));
    } catch (const json::parse_error &e) {
      throw ConfigError("cannot parse '" + f.config + "': " + e.what());
    }
    const std::string env_dir = c.output_dir;
    c = sweep_config_from_json(j);
    if (!j.contains("output_dir")) c.output_dir = env_dir;
  }
  override(f.model, c.model);
  override(f.n, c.num_qubits);
  override(f.rows, c.rows);
  override(f.cols, c.cols);
  override(f.coupling_map, c.coupling_map);
  override(f.w, c.w_values);
  if (f.coupling) c.coupling = f.coupling;
  override(f.beta, c.beta);
  override(f.omega0, c.omega0);
  if (f.hardware_faithful) c.hardware_faithful = true;
  if (f.transpile) c.transpile = true;
  override(f.max_cycles, c.schedule.max_cycles);
  override(f.dense_until, c.schedule.dense_until);
  override(f.per_decade, c.schedule.per_decade);
  override(f.times, c.schedule.explicit_times);
  override(f.backend, c.backend);
  override(f.chi, c.chi);
  override(f.shots, c.shots);
  override(f.bootstrap, c.bootstrap);
  if (f.noise_mode) c.noise.mode = noise_mode_from_string(*f.noise_mode);
  override(f.lambda, c.noise.lambda);
  override(f.p1, c.noise.p1);
  override(f.p2, c.noise.p2);
  override(f.trajectories, c.noise.trajectories);
  override(f.noise_seed, c.noise.seed);
  override(f.seed, c.seed);
  override(f.max_amplitudes, c.max_amplitudes);
  override(f.jobs, c.jobs);
  override(f.output_dir, c.output_dir);
  override(f.prefix, c.prefix);
  override(f.checkpoint_every, c.checkpoint_every);
  if (f.resume) c.resume = true;
  if (f.halt_after) c.halt_after = f.halt_after;
  if (f.diagnostics) c.diagnostics = true;
  return c;
}

void emit(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

int run(int argc, char **argv) {
  CLI::App app{"Floquet kicked-Ising simulator"};
  app.require_subcommand(1);

  SweepFlags sweep;
  auto *sweep_cmd = app.add_subcommand("sweep", "run a (W, t) sweep and write CSV/JSON results");
  add_sweep_options(sweep_cmd, sweep);

  std::string series, fit_out;
  FitSpec spec;
  bool no_power = false, no_log = false;
  auto *fit_cmd = app.add_subcommand("fit", "fit a series file");
  fit_cmd->add_option("series", series, "series CSV")->required();
  fit_cmd->add_flag("--no-power-law", no_power, "skip the power law in W");
  fit_cmd->add_flag("--no-log", no_log, "skip the logarithmic QFI fits");
  fit_cmd->add_option("--late-fraction", spec.late_fraction, "late-time window fraction");
  fit_cmd->add_option("--late-t-min", spec.late_t_min, "earliest cycle in the late window");
  fit_cmd->add_option("--w-max", spec.w_max, "largest W in the power law");
  fit_cmd->add_option("--log-t-min", spec.log_t_min, "log fit window start");
  fit_cmd->add_option("--log-t-max", spec.log_t_max, "log fit window end");
  fit_cmd->add_option("-o,--output", fit_out, "result file (default stdout)");

  CompareConfig cmp;
  std::string cmp_out;
  auto *cmp_cmd = app.add_subcommand("compare", "cross-check the sv and mps backends on a chain");
  cmp_cmd->add_option("-N,--num-qubits", cmp.num_qubits, "chain length");
  cmp_cmd->add_option("-W,--W", cmp.w_values, "disorder strengths")->delimiter(',');
  cmp_cmd->add_option("--cycles", cmp.cycles, "cycles to evolve");
  cmp_cmd->add_option("--chi", cmp.chi, "MPS bond dimension");
  cmp_cmd->add_option("--max-amplitudes", cmp.max_amplitudes, "state-vector memory budget");
  cmp_cmd->add_option("--beta", cmp.beta, "field wave number");
  cmp_cmd->add_option("--omega0", cmp.omega0, "field phase offset");
  cmp_cmd->add_option("--dw-tol", cmp.discarded_tolerance, "discarded weight tolerance");
  cmp_cmd->add_option("--a-tol", cmp.a_tolerance, "|A(chi) - A(chi/2)| tolerance");
  cmp_cmd->add_option("-o,--output", cmp_out, "report file (default stdout)");

  SweepFlags lat_flags;
  double lat_w = 0.0;
  std::string lat_out;
  auto *lattice_cmd = app.add_subcommand("lattice", "lattice utilities");
  lattice_cmd->require_subcommand(1);
  auto *lat_export = lattice_cmd->add_subcommand("export", "write the lattice as JSON");
  add_lattice_options(lat_export, lat_flags);
  lat_export->add_option("-W,--W", lat_w, "assign fields for this W (0 = no fields)");
  lat_export->add_option("-o,--output", lat_out, "output file (default stdout)");

  SweepFlags circ_flags;
  double circ_w = 2.0;
  std::size_t circ_cycles = 1;
  std::string circ_out;
  auto *circuit_cmd = app.add_subcommand("circuit", "circuit utilities");
  circuit_cmd->require_subcommand(1);
  auto *circ_export = circuit_cmd->add_subcommand("export", "write the Floquet circuit as JSON");
  add_lattice_options(circ_export, circ_flags);
  circ_export->add_option("-W,--W", circ_w, "disorder strength");
  circ_export->add_option("--coupling", circ_flags.coupling, "override J = h_x");
  circ_export->add_flag("--hardware-faithful", circ_flags.hardware_faithful, "reject W below 4/pi");
  circ_export->add_flag("--transpile", circ_flags.transpile, "decompose RZZ into CZ/SX/RZ");
  circ_export->add_option("--cycles", circ_cycles, "number of cycles")->check(CLI::PositiveNumber);
  circ_export->add_option("-o,--output", circ_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*sweep_cmd) {
    const SweepConfig config = resolve(sweep);
    const SweepOutcome out = run_sweep(config);
    if (!out.complete) {
      std::cout << "halted; checkpoints in " << config.output_dir << "\n";
      return kOk;
    }
    std::cout << out.series_path << "\n" << out.aggregate_path << "\n" << out.meta_path << "\n";
  } else if (*fit_cmd) {
    spec.power_law = !no_power;
    spec.log_growth = !no_log;
    emit(fit_out, run_fits(series, spec).dump(2) + "\n");
  } else if (*cmp_cmd) {
    const auto points = compare_backends(cmp);
    emit(cmp_out, compare_report_json(cmp, points).dump(2) + "\n");
  } else if (*lat_export) {
    const SweepConfig c = resolve(lat_flags);
    LatticeSpec lat = build_lattice(c, lat_w > 0.0 ? lat_w : 1.0);
    if (lat_w <= 0.0) lat.fields_z.clear();
    emit(lat_out, lattice_to_json(lat).dump(2) + "\n");
  } else if (*circ_export) {
    const SweepConfig c = resolve(circ_flags);
    const LatticeSpec lat = build_lattice(c, circ_w);
    const FloquetParams params = c.coupling ? FloquetParams::custom(circ_w, *c.coupling, *c.coupling, c.hardware_faithful)
                                            : FloquetParams::from_w(circ_w, c.hardware_faithful);
    Circuit cycle = build_floquet_cycle(lat, params);
    if (c.transpile) cycle = transpile_to_clifford_set(cycle);
    emit(circ_out, circuit_to_json(repeat_cycles(cycle, circ_cycles)).dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CapacityError &e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const InvariantError &e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
