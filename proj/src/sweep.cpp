// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "qpkick/circuit.hpp"
#include "qpkick/errors.hpp"
#include "qpkick/mps.hpp"
#include "qpkick/state_vector.hpp"

namespace qpkick {

namespace fs = std::filesystem;

std::vector<std::size_t> CycleSchedule::times() const {
  std::vector<std::size_t> out{0};
  if (!explicit_times.empty()) {
    for (std::size_t t : explicit_times) {
      if (t > out.back()) out.push_back(t);
    }
    return out;
  }
  const std::size_t dense = std::min(dense_until, max_cycles);
  for (std::size_t t = 1; t <= dense; ++t) out.push_back(t);
  if (max_cycles > dense && per_decade > 0) {
    const double base = static_cast<double>(std::max<std::size_t>(dense, 1));
    for (int k = 1;; ++k) {
      const auto t = static_cast<std::size_t>(std::llround(base * std::pow(10.0, static_cast<double>(k) / per_decade)));
      if (t >= max_cycles) break;
      if (t > out.back()) out.push_back(t);
    }
  }
  if (out.back() < max_cycles) out.push_back(max_cycles);
  return out;
}

void SweepConfig::validate() const {
  if (model != "chain" && model != "heavyhex" && model != "coupling_map") {
    throw ConfigError("model must be chain, heavyhex or coupling_map, got '" + model + "'");
  }
  if (model == "chain" && num_qubits < 2) throw ConfigError("chain needs N >= 2");
  if (model == "heavyhex" && (rows < 1 || cols < 1)) throw ConfigError("heavyhex needs rows, cols >= 1");
  if (model == "coupling_map" && coupling_map.empty()) throw ConfigError("coupling_map model needs a map file");
  if (w_values.empty()) throw ConfigError("at least one W value is required");
  for (double w : w_values) {
    if (coupling) {
      FloquetParams::custom(w, *coupling, *coupling, hardware_faithful);
    } else {
      FloquetParams::from_w(w, hardware_faithful);
    }
  }
  if (backend != "sv" && backend != "mps") throw ConfigError("backend must be sv or mps, got '" + backend + "'");
  if (backend == "mps" && model != "chain") throw ConfigError("the mps backend supports the chain model only");
  if (chi < 1) throw ConfigError("chi must be at least 1");
  if (bootstrap < 2) throw ConfigError("bootstrap needs at least 2 resamples");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (schedule.explicit_times.empty()) {
    if (schedule.max_cycles < 1) throw ConfigError("schedule needs max_cycles >= 1");
    if (schedule.per_decade < 1) throw ConfigError("schedule needs per_decade >= 1");
  } else {
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t t : schedule.explicit_times) {
      if (!first && t <= prev) throw ConfigError("explicit cycle schedule must be strictly increasing");
      prev = t;
      first = false;
    }
  }
  if (prefix.empty() || prefix.find('/') != std::string::npos) throw ConfigError("prefix must be a plain file stem");
  noise.validate();
}

json sweep_config_to_json(const SweepConfig &c) {
  json j = c.physics_json();
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  j["prefix"] = c.prefix;
  j["checkpoint_every"] = c.checkpoint_every;
  j["resume"] = c.resume;
  j["halt_after"] = c.halt_after ? json(*c.halt_after) : json(nullptr);
  j["diagnostics"] = c.diagnostics;
  return j;
}

json SweepConfig::physics_json() const {
  json j;
  j["model"] = model;
  j["N"] = num_qubits;
  j["rows"] = rows;
  j["cols"] = cols;
  j["coupling_map"] = coupling_map;
  j["W"] = w_values;
  j["coupling"] = coupling ? json(*coupling) : json(nullptr);
  j["beta"] = beta;
  j["omega0"] = omega0;
  j["hardware_faithful"] = hardware_faithful;
  j["transpile"] = transpile;
  json s;
  s["max_cycles"] = schedule.max_cycles;
  s["dense_until"] = schedule.dense_until;
  s["per_decade"] = schedule.per_decade;
  s["times"] = schedule.explicit_times;
  j["schedule"] = s;
  j["backend"] = backend;
  j["chi"] = chi;
  j["shots"] = shots;
  j["bootstrap"] = bootstrap;
  json n;
  n["mode"] = to_string(noise.mode);
  n["lambda"] = noise.lambda;
  n["p1"] = noise.p1;
  n["p2"] = noise.p2;
  n["trajectories"] = noise.trajectories;
  n["seed"] = noise.seed;
  j["noise"] = n;
  j["seed"] = seed;
  j["max_amplitudes"] = max_amplitudes;
  return j;
}

namespace {

void reject_unknown(const json &j, const std::set<std::string> &allowed, const std::string &where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto &[k, _] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void take(const json &j, const char *key, T &into) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

SweepConfig sweep_config_from_json(const json &j) {
  reject_unknown(j,
                 {"model", "N", "rows", "cols", "coupling_map", "W", "coupling", "beta", "omega0", "hardware_faithful",
                  "transpile", "schedule", "backend", "chi", "shots", "bootstrap", "noise", "seed", "max_amplitudes",
                  "jobs", "output_dir", "prefix", "checkpoint_every", "resume", "halt_after", "diagnostics"},
                 "sweep config");
  SweepConfig c;
  take(j, "model", c.model);
  take(j, "N", c.num_qubits);
  take(j, "rows", c.rows);
  take(j, "cols", c.cols);
  take(j, "coupling_map", c.coupling_map);
  take(j, "W", c.w_values);
  if (j.contains("coupling") && !j.at("coupling").is_null()) c.coupling = j.at("coupling").get<double>();
  take(j, "beta", c.beta);
  take(j, "omega0", c.omega0);
  take(j, "hardware_faithful", c.hardware_faithful);
  take(j, "transpile", c.transpile);
  if (j.contains("schedule")) {
    const auto &s = j.at("schedule");
    reject_unknown(s, {"max_cycles", "dense_until", "per_decade", "times"}, "schedule");
    take(s, "max_cycles", c.schedule.max_cycles);
    take(s, "dense_until", c.schedule.dense_until);
    take(s, "per_decade", c.schedule.per_decade);
    take(s, "times", c.schedule.explicit_times);
  }
  take(j, "backend", c.backend);
  take(j, "chi", c.chi);
  take(j, "shots", c.shots);
  take(j, "bootstrap", c.bootstrap);
  if (j.contains("noise")) {
    const auto &n = j.at("noise");
    reject_unknown(n, {"mode", "lambda", "p1", "p2", "trajectories", "seed"}, "noise");
    std::string mode = "none";
    take(n, "mode", mode);
    c.noise.mode = noise_mode_from_string(mode);
    take(n, "lambda", c.noise.lambda);
    take(n, "p1", c.noise.p1);
    take(n, "p2", c.noise.p2);
    take(n, "trajectories", c.noise.trajectories);
    take(n, "seed", c.noise.seed);
  }
  take(j, "seed", c.seed);
  take(j, "max_amplitudes", c.max_amplitudes);
  take(j, "jobs", c.jobs);
  take(j, "output_dir", c.output_dir);
  take(j, "prefix", c.prefix);
  take(j, "checkpoint_every", c.checkpoint_every);
  take(j, "resume", c.resume);
  if (j.contains("halt_after") && !j.at("halt_after").is_null()) c.halt_after = j.at("halt_after").get<std::size_t>();
  take(j, "diagnostics", c.diagnostics);
  return c;
}

LatticeSpec build_lattice(const SweepConfig &config, double w) {
  LatticeSpec lat;
  if (config.model == "chain") {
    lat = build_chain(config.num_qubits);
  } else if (config.model == "heavyhex") {
    lat = build_heavy_hex(config.rows, config.cols);
  } else {
    const json j = json::parse(read_text_file(config.coupling_map));
    if (j.contains("kind")) {
      lat = lattice_from_json(j);
    } else {
      std::vector<std::pair<int, int>> edges;
      std::optional<EdgeColoring> coloring;
      for (const auto &e : j.at("edges")) {
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        if (e.size() == 3) {
          if (!coloring) coloring.emplace();
          (*coloring)[{e.at(0).get<int>(), e.at(1).get<int>()}] = color_from_string(e.at(2).get<std::string>());
        }
      }
      std::optional<int> n;
      if (j.contains("N")) n = j.at("N").get<int>();
      lat = load_coupling_map(edges, coloring, n);
    }
  }
  QpFieldParams p{w, config.beta, config.omega0};
  return assign_qp_fields(std::move(lat), p);
}

// ---- rows ---------------------------------------------------------------

std::string format_row(const SeriesRow &r) {
  std::string s;
  auto add = [&s](const std::string &v) {
    if (!s.empty()) s += ',';
    s += v;
  };
  add(r.run_id);
  add(r.model);
  add(std::to_string(r.num_qubits));
  add(format_double(r.w));
  add(std::to_string(r.t));
  add(std::to_string(r.trajectory));
  add(format_double(r.a));
  add(format_double(r.a_err));
  add(format_double(r.fq));
  add(format_double(r.fq_err));
  add(format_double(r.fq_per_qubit));
  add(format_double(r.s_half));
  add(r.backend);
  add(std::to_string(r.chi));
  add(std::to_string(r.max_bond));
  add(format_double(r.discarded_weight));
  add(std::to_string(r.shots));
  add(std::to_string(r.seed));
  return s;
}

namespace {

template <class T>
T parse_number(const std::string &s, const char *what) {
  T v{};
  if (s == "nan") {
    if constexpr (std::is_floating_point_v<T>) return std::numeric_limits<T>::quiet_NaN();
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(std::string("bad ") + what + " field '" + s + "' in series file");
  }
  return v;
}

}  // namespace

SeriesRow parse_row(const std::string &line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 18) throw ConfigError("series row has " + std::to_string(f.size()) + " fields, expected 18");
  SeriesRow r;
  r.run_id = f[0];
  r.model = f[1];
  r.num_qubits = parse_number<int>(f[2], "N");
  r.w = parse_number<double>(f[3], "W");
  r.t = parse_number<std::size_t>(f[4], "t");
  r.trajectory = parse_number<int>(f[5], "trajectory");
  r.a = parse_number<double>(f[6], "A");
  r.a_err = parse_number<double>(f[7], "A_err");
  r.fq = parse_number<double>(f[8], "FQ");
  r.fq_err = parse_number<double>(f[9], "FQ_err");
  r.fq_per_qubit = parse_number<double>(f[10], "FQ_per_qubit");
  r.s_half = parse_number<double>(f[11], "S_half");
  r.backend = f[12];
  r.chi = parse_number<int>(f[13], "chi");
  r.max_bond = parse_number<int>(f[14], "max_bond");
  r.discarded_weight = parse_number<double>(f[15], "discarded_weight");
  r.shots = parse_number<std::size_t>(f[16], "shots");
  r.seed = parse_number<std::uint64_t>(f[17], "seed");
  return r;
}

std::vector<SeriesRow> read_series(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSeriesVersion) {
    throw ConfigError("'" + path + "' is not a " + std::string(kSeriesVersion + 2) + " file");
  }
  if (!std::getline(in, line) || line != kSeriesHeader) throw ConfigError("'" + path + "' has an unexpected header");
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

// ---- task execution -----------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Task {
  std::size_t index = 0;
  double w = 0.0;
  int trajectory = 0;
  std::string run_id;
};

struct TaskResult {
  std::vector<SeriesRow> rows;
  std::vector<std::string> diagnostics;
  bool halted = false;
};

constexpr char kTaskMagic[8] = {'Q', 'P', 'K', 'T', 'A', 'S', 'K', '1'};

std::string checkpoint_path(const SweepConfig &c, const Task &task) {
  return (fs::path(c.output_dir) / (c.prefix + "_ckpt_" + task.run_id + ".bin")).string();
}

template <class T>
void put(std::ostream &o, const T &v) {
  o.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T>
T get(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated task checkpoint");
  return v;
}

// Backend-neutral evolution of one (W, trajectory) task.
class Runner {
 public:
  Runner(const SweepConfig &c, const LatticeSpec &lattice) : config_(c), n_(lattice.num_qubits) {
    if (c.backend == "sv") {
      sv_ = init_all_up(n_, c.max_amplitudes);
    } else {
      mps_ = mps_init_all_up(n_, c.chi);
    }
  }

  bool is_sv() const { return config_.backend == "sv"; }

  void run_cycle(const Circuit &cycle, const NoiseSpec &noise, Rng &rng, std::vector<std::string> *diag,
                 const std::string &run_id, std::size_t t) {
    if (is_sv()) {
      run_circuit(sv_, cycle, noise, rng);
      return;
    }
    mps_run_circuit(mps_, cycle, noise, rng, [&](const MpsState &, const MpsCycleDiagnostics &d, double) {
      if (diag) {
        diag->push_back(run_id + "," + std::to_string(t) + "," + std::to_string(d.max_bond) + "," +
                        format_double(d.discarded_weight_cum) + "," + format_double(d.wall_time));
      }
    });
  }

  SeriesRow observe(const Task &task, std::size_t t, double f) const {
    const auto pattern = InitialPattern::all_up(n_);
    SeriesRow r;
    r.run_id = task.run_id;
    r.model = config_.model;
    r.num_qubits = n_;
    r.w = task.w;
    r.t = t;
    r.trajectory = task.trajectory;
    r.backend = config_.backend;
    r.shots = config_.shots;
    r.seed = config_.seed;
    if (is_sv()) {
      r.s_half = n_ >= 2 ? half_cut_entropy(sv_, n_ / 2) : 0.0;
    } else {
      r.chi = config_.chi;
      r.max_bond = mps_.max_bond();
      r.discarded_weight = mps_.discarded_weight;
      r.s_half = mps_bond_entropy(mps_, n_ / 2 - 1);
    }
    if (config_.shots == 0) {
      const auto z = is_sv() ? expect_z_all(sv_) : mps_expect_z_all(mps_);
      const auto m = is_sv() ? magnetization_moments(sv_) : mps_magnetization_moments(mps_);
      r.a = f * autocorrelation(z, pattern);
      r.fq = config_.noise.mode == NoiseMode::GlobalDepolarizing ? qfi_global_depolarized(m, n_, f)
                                                                 : qfi_from_moments(m);
    } else {
      const std::uint64_t stream = fnv1a(task.run_id) + t;
      SampleSet s = is_sv() ? sample_bitstrings(sv_, config_.shots, config_.seed, stream)
                            : mps_sample_bitstrings(mps_, config_.shots, config_.seed, stream);
      if (config_.noise.mode == NoiseMode::GlobalDepolarizing) {
        Rng mix(config_.seed ^ 0x5bd1e995ULL, stream);
        depolarize_samples(s, f, mix);
      }
      const auto a = autocorrelation_from_samples(s, pattern);
      const auto q = qfi_from_samples(s, config_.bootstrap, config_.seed ^ stream);
      r.a = a.value;
      r.a_err = a.error;
      r.fq = q.value;
      r.fq_err = q.error;
    }
    r.fq_per_qubit = r.fq / n_;
    return r;
  }

  void save(std::ostream &out) const {
    if (is_sv()) {
      save_checkpoint(sv_, out);
    } else {
      save_checkpoint(mps_, out);
    }
  }

  void load(std::istream &in) {
    if (is_sv()) {
      sv_ = load_checkpoint(in, config_.max_amplitudes);
    } else {
      mps_ = load_mps_checkpoint(in);
    }
  }

 private:
  const SweepConfig &config_;
  int n_;
  StateVector sv_;
  MpsState mps_;
};

void write_task_checkpoint(const std::string &path, std::size_t cycle, const Rng &rng,
                           const std::vector<SeriesRow> &rows, const Runner &runner) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
    out.write(kTaskMagic, sizeof kTaskMagic);
    put(out, static_cast<std::uint64_t>(cycle));
    for (std::uint64_t w : rng.state()) put(out, w);
    put(out, static_cast<std::uint64_t>(rows.size()));
    for (const auto &r : rows) {
      const std::string line = format_row(r);
      put(out, static_cast<std::uint64_t>(line.size()));
      out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    runner.save(out);
    if (!out) throw std::runtime_error("failed writing checkpoint '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

std::size_t read_task_checkpoint(const std::string &path, Rng &rng, std::vector<SeriesRow> &rows, Runner &runner) {
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kTaskMagic, sizeof magic) != 0) {
    throw std::runtime_error("'" + path + "' is not a task checkpoint");
  }
  const auto cycle = get<std::uint64_t>(in);
  Rng::State st;
  for (auto &w : st) w = get<std::uint64_t>(in);
  rng.set_state(st);
  const auto count = get<std::uint64_t>(in);
  rows.clear();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string line(get<std::uint64_t>(in), '\0');
    in.read(line.data(), static_cast<std::streamsize>(line.size()));
    rows.push_back(parse_row(line));
  }
  runner.load(in);
  return static_cast<std::size_t>(cycle);
}

TaskResult run_task(const SweepConfig &config, const Task &task) {
  const LatticeSpec lattice = build_lattice(config, task.w);
  const FloquetParams params = config.coupling
                                   ? FloquetParams::custom(task.w, *config.coupling, *config.coupling,
                                                           config.hardware_faithful)
                                   : FloquetParams::from_w(task.w, config.hardware_faithful);
  Circuit cycle = build_floquet_cycle(lattice, params);
  if (config.transpile) cycle = transpile_to_clifford_set(cycle);
  const std::size_t layers = cycle.layers.size();
  const auto times = config.schedule.times();
  const std::set<std::size_t> record(times.begin(), times.end());

  TaskResult result;
  Runner runner(config, lattice);
  const std::uint64_t noise_seed = config.noise.mode == NoiseMode::PauliTrajectory ? config.noise.seed : config.seed;
  Rng rng(noise_seed, static_cast<std::uint64_t>(task.trajectory));
  std::size_t done = 0;
  const std::string ckpt = checkpoint_path(config, task);
  if (config.resume && fs::exists(ckpt)) {
    done = read_task_checkpoint(ckpt, rng, result.rows, runner);
  } else {
    result.rows.push_back(runner.observe(task, 0, 1.0));
  }
  std::vector<std::string> *diag = config.diagnostics ? &result.diagnostics : nullptr;
  for (std::size_t t = done + 1; t <= times.back(); ++t) {
    runner.run_cycle(cycle, config.noise, rng, diag, task.run_id, t);
    if (record.count(t)) result.rows.push_back(runner.observe(task, t, config.noise.attenuation(t * layers)));
    if (config.checkpoint_every > 0 && t % config.checkpoint_every == 0) {
      write_task_checkpoint(ckpt, t, rng, result.rows, runner);
    }
    if (config.halt_after && t >= *config.halt_after && t < times.back()) {
      result.halted = true;
      return result;
    }
  }
  return result;
}

std::string aggregate_csv(const std::vector<SeriesRow> &rows) {
  struct Acc {
    std::string model, backend;
    int n = 0;
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    std::vector<const SeriesRow *> rows;
  };
  std::map<std::pair<double, std::size_t>, Acc> groups;
  for (const auto &r : rows) {
    auto &g = groups[{r.w, r.t}];
    g.model = r.model;
    g.backend = r.backend;
    g.n = r.num_qubits;
    g.shots = r.shots;
    g.seed = r.seed;
    g.rows.push_back(&r);
  }
  std::string out = "# qpkick-aggregate v1\nmodel,N,W,t,trajectories,A,A_err,FQ,FQ_err,FQ_per_qubit,S_half,backend,shots,seed\n";
  for (const auto &[key, g] : groups) {
    const double k = static_cast<double>(g.rows.size());
    auto stats = [&](auto value, auto error) {
      double mean = 0.0, err2 = 0.0;
      for (const auto *r : g.rows) {
        mean += value(*r);
        err2 += error(*r) * error(*r);
      }
      mean /= k;
      double var = 0.0;
      for (const auto *r : g.rows) var += (value(*r) - mean) * (value(*r) - mean);
      var = g.rows.size() > 1 ? var / (k - 1.0) : 0.0;
      return std::pair<double, double>{mean, std::sqrt(var / k + err2 / (k * k))};
    };
    const auto a = stats([](const SeriesRow &r) { return r.a; }, [](const SeriesRow &r) { return r.a_err; });
    const auto f = stats([](const SeriesRow &r) { return r.fq; }, [](const SeriesRow &r) { return r.fq_err; });
    const auto s = stats([](const SeriesRow &r) { return r.s_half; }, [](const SeriesRow &) { return 0.0; });
    out += g.model + "," + std::to_string(g.n) + "," + format_double(key.first) + "," + std::to_string(key.second) +
           "," + std::to_string(g.rows.size()) + "," + format_double(a.first) + "," + format_double(a.second) + "," +
           format_double(f.first) + "," + format_double(f.second) + "," + format_double(f.first / g.n) + "," +
           format_double(s.first) + "," + g.backend + "," + std::to_string(g.shots) + "," + std::to_string(g.seed) +
           "\n";
  }
  return out;
}

std::string series_csv(const std::vector<TaskResult> &results, const std::vector<bool> &finished) {
  std::string out = std::string(kSeriesVersion) + "\n" + kSeriesHeader + "\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!finished[i]) continue;
    for (const auto &r : results[i].rows) out += format_row(r) + "\n";
  }
  return out;
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig &config) {
  config.validate();
  fs::create_directories(config.output_dir);
  const std::string physics = config.physics_json().dump();

  std::vector<Task> tasks;
  for (double w : config.w_values) {
    for (int k = 0; k < config.noise.num_trajectories(); ++k) {
      Task t;
      t.index = tasks.size();
      t.w = w;
      t.trajectory = k;
      t.run_id = hex16(fnv1a(physics + "|W=" + format_double(w) + "|traj=" + std::to_string(k)));
      tasks.push_back(t);
    }
  }

  std::vector<TaskResult> results(tasks.size());
  std::vector<bool> finished(tasks.size(), false);
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        TaskResult r = run_task(config, tasks[i]);
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(r);
        finished[i] = !results[i].halted;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(config.jobs, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto &th : pool) th.join();
  }

  SweepOutcome outcome;
  const fs::path dir(config.output_dir);
  outcome.series_path = (dir / (config.prefix + "_series.csv")).string();
  outcome.aggregate_path = (dir / (config.prefix + "_aggregate.csv")).string();
  outcome.meta_path = (dir / (config.prefix + "_meta.json")).string();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i]) {
      // Flush whatever finished so a long sweep is not lost, then surface the error.
      write_text_file((dir / (config.prefix + "_series.partial.csv")).string(), series_csv(results, finished));
      std::rethrow_exception(errors[i]);
    }
  }
  if (std::any_of(results.begin(), results.end(), [](const TaskResult &r) { return r.halted; })) {
    outcome.complete = false;
    return outcome;
  }

  std::vector<SeriesRow> all;
  for (const auto &r : results) all.insert(all.end(), r.rows.begin(), r.rows.end());
  outcome.rows = all.size();
  write_text_file(outcome.series_path, series_csv(results, finished));
  write_text_file(outcome.aggregate_path, aggregate_csv(all));

  json meta;
  meta["version"] = 1;
  meta["config"] = config.physics_json();
  json ids = json::array();
  for (const auto &t : tasks) ids.push_back({{"run_id", t.run_id}, {"W", t.w}, {"trajectory", t.trajectory}});
  meta["runs"] = ids;
  const LatticeSpec lat = build_lattice(config, config.w_values.front());
  json lj;
  lj["kind"] = to_string(lat.kind);
  lj["N"] = lat.num_qubits;
  lj["stripes_degenerate"] = lat.stripes_degenerate;
  for (Color c : lat.bond_colors()) lj["bonds"][std::string(to_string(c))] = lat.edges_of(c).size();
  meta["lattice"] = lj;
  if (lat.num_qubits <= 14) {
    const auto h = haar_qfi_baseline(lat.num_qubits, 200, config.seed);
    meta["haar_baseline"] = {{"FQ_mean", h.mean},           {"FQ_std", h.std},
                             {"FQ_stderr", h.stderr_mean},  {"FQ_per_qubit_mean", h.mean_per_qubit},
                             {"samples", h.num_samples}};
  }
  write_text_file(outcome.meta_path, meta.dump(2) + "\n");

  if (config.diagnostics) {
    std::string d = "run_id,cycle,max_bond,discarded_weight_cum,wall_time\n";
    for (const auto &r : results)
      for (const auto &line : r.diagnostics) d += line + "\n";
    write_text_file((dir / (config.prefix + "_diagnostics.csv")).string(), d);
  }
  for (const auto &t : tasks) {
    std::error_code ec;
    fs::remove(checkpoint_path(config, t), ec);
  }
  return outcome;
}

// ---- fits ---------------------------------------------------------------

json run_fits(const std::string &series_path, const FitSpec &spec) {
  if (!fs::exists(series_path)) throw std::runtime_error("series file '" + series_path + "' does not exist");
  const auto rows = read_series(series_path);
  // (W -> t -> (sum A, sum FQ, count))
  std::map<double, std::map<std::size_t, std::array<double, 3>>> by_w;
  for (const auto &r : rows) {
    auto &acc = by_w[r.w][r.t];
    acc[0] += r.a;
    acc[1] += r.fq;
    acc[2] += 1.0;
  }
  json out;
  out["series"] = series_path;
  if (spec.power_law) {
    std::vector<std::pair<double, double>> points;
    for (const auto &[w, series] : by_w) {
      if (w > spec.w_max) continue;
      const double t_max = static_cast<double>(series.rbegin()->first);
      double sum = 0.0;
      int n = 0;
      for (const auto &[t, acc] : series) {
        const double td = static_cast<double>(t);
        if (td > (1.0 - spec.late_fraction) * t_max && td >= spec.late_t_min) {
          sum += acc[0] / acc[2];
          ++n;
        }
      }
      if (n == 0) throw ConfigError("late-time window is empty for W = " + format_double(w));
      points.emplace_back(w, sum / n);
    }
    json pl = fit_to_json(fit_power_law_in_w(points));
    pl["points"] = points;
    out["power_law"] = pl;
  }
  if (spec.log_growth) {
    json fits = json::array();
    for (const auto &[w, series] : by_w) {
      std::vector<std::pair<double, double>> points;
      for (const auto &[t, acc] : series) {
        const double td = static_cast<double>(t);
        if (td >= std::max(1.0, spec.log_t_min) && td <= spec.log_t_max) points.emplace_back(td, acc[1] / acc[2]);
      }
      if (points.empty()) throw ConfigError("log-fit window is empty for W = " + format_double(w));
      json f = fit_to_json(fit_log_in_t(points));
      f["W"] = w;
      f["observable"] = "FQ";
      fits.push_back(f);
    }
    out["log_in_t"] = fits;
  }
  return out;
}

// ---- backend comparison -------------------------------------------------

std::vector<ComparePoint> compare_backends(const CompareConfig &config) {
  if (config.num_qubits < 2) throw ConfigError("compare needs N >= 2");
  if (config.chi < 1) throw ConfigError("chi must be at least 1");
  if (config.cycles < 1) throw ConfigError("compare needs at least one cycle");
  std::vector<ComparePoint> out;
  const auto pattern = InitialPattern::all_up(config.num_qubits);
  for (double w : config.w_values) {
    ComparePoint p;
    p.w = w;
    const auto lat = assign_qp_fields(build_chain(config.num_qubits), QpFieldParams{w, config.beta, config.omega0});
    const Circuit cycle = build_floquet_cycle(lat, FloquetParams::from_w(w));
    const NoiseSpec none;

    std::vector<std::vector<double>> z_sv;
    try {
      StateVector sv = init_all_up(config.num_qubits, config.max_amplitudes);
      Rng rng(0);
      for (std::size_t t = 1; t <= config.cycles; ++t) {
        run_circuit(sv, cycle, none, rng);
        z_sv.push_back(expect_z_all(sv));
      }
    } catch (const CapacityError &e) {
      p.sv_skipped = true;
      p.skip_reason = e.what();
    }

    // Without a state-vector reference the run stops once the horizon is passed.
    std::vector<double> a_chi;
    std::vector<double> dw;
    MpsState mps = mps_init_all_up(config.num_qubits, config.chi);
    Rng rng(0);
    for (std::size_t t = 1; t <= config.cycles; ++t) {
      mps_run_circuit(mps, cycle, none, rng);
      const auto z = mps_expect_z_all(mps);
      a_chi.push_back(autocorrelation(z, pattern));
      dw.push_back(mps.discarded_weight);
      if (!p.sv_skipped) {
        const auto &ref = z_sv[t - 1];
        p.max_abs_da = std::max(p.max_abs_da, std::abs(a_chi.back() - autocorrelation(ref, pattern)));
        for (std::size_t q = 0; q < z.size(); ++q) p.max_abs_dz = std::max(p.max_abs_dz, std::abs(z[q] - ref[q]));
      } else if (mps.discarded_weight > config.discarded_tolerance) {
        break;
      }
    }
    p.max_bond = mps.max_bond();
    p.discarded_weight = mps.discarded_weight;

    std::vector<double> a_half;
    if (config.chi >= 2) {
      MpsState half = mps_init_all_up(config.num_qubits, config.chi / 2);
      Rng r2(0);
      for (std::size_t t = 1; t <= a_chi.size(); ++t) {
        mps_run_circuit(half, cycle, none, r2);
        a_half.push_back(autocorrelation(mps_expect_z_all(half), pattern));
      }
    }
    for (std::size_t t = 1; t <= a_chi.size(); ++t) {
      const bool weight_ok = dw[t - 1] <= config.discarded_tolerance;
      const bool stable = a_half.empty() || std::abs(a_chi[t - 1] - a_half[t - 1]) < config.a_tolerance;
      if (!(weight_ok && stable)) break;
      p.horizon = t;
    }
    p.converged = p.horizon == config.cycles;
    out.push_back(p);
  }
  return out;
}

json compare_report_json(const CompareConfig &config, const std::vector<ComparePoint> &points) {
  json j;
  j["N"] = config.num_qubits;
  j["chi"] = config.chi;
  j["cycles"] = config.cycles;
  j["discarded_tolerance"] = config.discarded_tolerance;
  j["a_tolerance"] = config.a_tolerance;
  json arr = json::array();
  for (const auto &p : points) {
    json e;
    e["W"] = p.w;
    e["sv_skipped"] = p.sv_skipped;
    if (p.sv_skipped) {
      e["skip_reason"] = p.skip_reason;
      e["max_abs_dA"] = nullptr;
      e["max_abs_dZ"] = nullptr;
    } else {
      e["max_abs_dA"] = p.max_abs_da;
      e["max_abs_dZ"] = p.max_abs_dz;
    }
    e["horizon"] = p.horizon;
    e["converged"] = p.converged;
    e["max_bond"] = p.max_bond;
    e["discarded_weight"] = p.discarded_weight;
    arr.push_back(e);
  }
  j["points"] = arr;
  return j;
}

}  // namespace qpkick
