#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qpkick/circuit.hpp"
#include "qpkick/errors.hpp"
#include "qpkick/io.hpp"
#include "qpkick/sweep.hpp"

using namespace qpkick;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("qpkick_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const std::string &path) { return read_text_file(path); }

SweepConfig small_config(const fs::path &dir, const std::string &prefix) {
  SweepConfig c;
  c.num_qubits = 6;
  c.w_values = {1.5, 8.0};
  c.schedule.max_cycles = 120;
  c.schedule.dense_until = 10;
  c.schedule.per_decade = 10;
  c.output_dir = dir.string();
  c.prefix = prefix;
  return c;
}

void write_series(const std::string &path, const std::vector<SeriesRow> &rows) {
  std::string s = std::string(kSeriesVersion) + "\n" + kSeriesHeader + "\n";
  for (const auto &r : rows) s += format_row(r) + "\n";
  write_text_file(path, s);
}

}  // namespace

TEST_CASE("schedule: dense prefix, log tail, max included") {
  CycleSchedule s;
  auto t = s.times();
  CHECK(t.size() == 101);
  CHECK(t.front() == 0);
  CHECK(t.back() == 100);

  s.max_cycles = 5000;
  s.dense_until = 100;
  s.per_decade = 20;
  t = s.times();
  CHECK(t.back() == 5000);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  CHECK(std::find(t.begin(), t.end(), 1000) != t.end());
  CHECK(t.size() < 200);

  s.explicit_times = {0, 3, 7};
  CHECK(s.times() == std::vector<std::size_t>{0, 3, 7});
}

TEST_CASE("config: validation and JSON schema") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  c.hardware_faithful = true;
  c.w_values = {1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.w_values = {4.0 / 3.14159265358979};
  CHECK_NOTHROW(c.validate());

  SweepConfig d;
  d.schedule.explicit_times = {0, 5, 5};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = SweepConfig{};
  d.model = "heavyhex";
  d.backend = "mps";
  CHECK_THROWS_AS(d.validate(), ConfigError);

  SweepConfig e;
  e.w_values = {2.0, 3.5};
  e.coupling = 0.0;
  e.noise = NoiseSpec::pauli_trajectory(0.001, 0.01, 4, 9);
  e.halt_after = 12;
  const SweepConfig back = sweep_config_from_json(sweep_config_to_json(e));
  CHECK(sweep_config_to_json(back) == sweep_config_to_json(e));

  CHECK_THROWS_AS(sweep_config_from_json(json{{"N", 4}, {"Wlist", {1.0}}}), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(json{{"noise", {{"rate", 0.1}}}}), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(json{{"noise", {{"mode", "amplitude"}}}}), ConfigError);
}

TEST_CASE("io: lattice and circuit JSON round trip") {
  const auto lat = assign_qp_fields(build_heavy_hex(1, 1), QpFieldParams{3.0});
  const auto back = lattice_from_json(json::parse(lattice_to_json(lat).dump()));
  CHECK(back.edges == lat.edges);
  CHECK(back.stripes == lat.stripes);
  CHECK(back.fields_z == lat.fields_z);

  const auto cyc = transpile_to_clifford_set(build_floquet_cycle(lat, FloquetParams::from_w(3.0)));
  const auto cback = circuit_from_json(json::parse(circuit_to_json(cyc).dump()));
  CHECK(cback.layers == cyc.layers);
  CHECK(cback.cycle_boundaries == cyc.cycle_boundaries);
}

TEST_CASE("rows: format/parse is exact") {
  SeriesRow r;
  r.run_id = "00ff";
  r.model = "chain";
  r.num_qubits = 12;
  r.w = 1.0 / 3.0;
  r.t = 4321;
  r.a = -0.1234567890123456789;
  r.fq = 1e-300;
  r.s_half = 0.1 + 0.2;
  r.backend = "mps";
  r.chi = 64;
  r.max_bond = 17;
  r.discarded_weight = 3.2e-17;
  r.shots = 16384;
  r.seed = 18446744073709551615ULL;
  const auto back = parse_row(format_row(r));
  CHECK(format_row(back) == format_row(r));
  CHECK(back.a == r.a);
  CHECK(back.s_half == r.s_half);
  CHECK(back.seed == r.seed);
  CHECK_THROWS_AS(parse_row("a,b,c"), ConfigError);
}

TEST_CASE("sweep: deterministic, thread-count independent, resumable") {
  const auto dir = scratch("sweep");
  auto a = small_config(dir, "a");
  const auto out_a = run_sweep(a);
  CHECK(out_a.complete);
  CHECK(out_a.rows == 2 * a.schedule.times().size());

  auto b = small_config(dir, "b");
  b.jobs = 2;
  const auto out_b = run_sweep(b);
  CHECK(slurp(out_a.series_path) == slurp(out_b.series_path));
  CHECK(slurp(out_a.aggregate_path) == slurp(out_b.aggregate_path));
  CHECK(slurp(out_a.meta_path) == slurp(out_b.meta_path));

  auto c = small_config(dir, "c");
  c.checkpoint_every = 13;
  c.halt_after = 40;
  const auto halted = run_sweep(c);
  CHECK_FALSE(halted.complete);
  CHECK_FALSE(fs::exists(dir / "c_series.csv"));
  c.halt_after.reset();
  c.resume = true;
  const auto resumed = run_sweep(c);
  CHECK(resumed.complete);
  CHECK(slurp(out_a.series_path) == slurp(resumed.series_path));
  CHECK(slurp(out_a.aggregate_path) == slurp(resumed.aggregate_path));
  for (const auto &entry : fs::directory_iterator(dir)) {
    CHECK(entry.path().filename().string().find("_ckpt_") == std::string::npos);
  }

  const auto rows = read_series(out_a.series_path);
  CHECK(rows.front().t == 0);
  CHECK(rows.front().a == 1.0);
  CHECK(rows.front().fq == 0.0);
}

TEST_CASE("sweep: sampled and noisy runs are seeded") {
  const auto dir = scratch("sampled");
  auto a = small_config(dir, "a");
  a.w_values = {2.0};
  a.schedule.max_cycles = 8;
  a.shots = 256;
  a.noise = NoiseSpec::pauli_trajectory(0.01, 0.02, 3, 11);
  a.jobs = 3;
  const auto out = run_sweep(a);
  auto b = a;
  b.prefix = "b";
  b.jobs = 1;
  CHECK(slurp(out.series_path) == slurp(run_sweep(b).series_path));
  auto c = a;
  c.prefix = "c";
  c.seed = 2;
  CHECK(slurp(out.series_path) != slurp(run_sweep(c).series_path));
  for (const auto &r : read_series(out.series_path)) {
    if (r.t > 0) CHECK(r.fq_err > 0.0);
  }
}

TEST_CASE("sweep: capacity errors surface and flush partial output") {
  const auto dir = scratch("capacity");
  auto c = small_config(dir, "x");
  c.num_qubits = 20;
  c.max_amplitudes = 1 << 10;
  CHECK_THROWS_AS(run_sweep(c), CapacityError);
  CHECK(fs::exists(dir / "x_series.partial.csv"));
}

TEST_CASE("fits: planted laws, empty windows, missing files") {
  const auto dir = scratch("fits");
  std::vector<SeriesRow> rows;
  for (double w : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0}) {
    for (std::size_t t : {1, 10, 100, 1000, 1500, 2000}) {
      SeriesRow r;
      r.run_id = "r";
      r.model = "chain";
      r.num_qubits = 4;
      r.w = w;
      r.t = t;
      r.a = 0.01 * std::pow(w, 5.4);
      r.fq = 0.7 + 1.3 * std::log(static_cast<double>(t));
      r.backend = "sv";
      rows.push_back(r);
    }
  }
  const std::string path = (dir / "planted.csv").string();
  write_series(path, rows);
  const json fits = run_fits(path, FitSpec{});
  CHECK(fits["power_law"]["coeffs"][1].get<double>() == doctest::Approx(5.4).epsilon(1e-9));
  CHECK(fits["power_law"]["points"].size() == 5);
  CHECK(fits["log_in_t"].size() == 6);
  CHECK(fits["log_in_t"][0]["coeffs"][1].get<double>() == doctest::Approx(1.3).epsilon(1e-9));

  FitSpec late;
  late.late_t_min = 5000;
  CHECK_THROWS_AS(run_fits(path, late), ConfigError);

  try {
    run_fits((dir / "absent.csv").string(), FitSpec{});
    FAIL("expected an error");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()).find("absent.csv") != std::string::npos);
  }
}

TEST_CASE("compare: exact regime agrees, chi = 1 flagged, capacity branch") {
  CompareConfig c;
  c.num_qubits = 6;
  c.cycles = 20;
  c.chi = 16;
  auto pts = compare_backends(c);
  REQUIRE(pts.size() == 2);
  for (const auto &p : pts) {
    CHECK_FALSE(p.sv_skipped);
    CHECK(p.max_abs_da < 1e-10);
    CHECK(p.converged);
  }

  c.chi = 1;
  c.w_values = {2.0};
  pts = compare_backends(c);
  CHECK(pts[0].max_abs_da > 1e-2);
  CHECK_FALSE(pts[0].converged);

  c.num_qubits = 40;
  c.chi = 16;
  c.cycles = 3;
  c.w_values = {8.0};
  pts = compare_backends(c);
  CHECK(pts[0].sv_skipped);
  CHECK(compare_report_json(c, pts)["points"][0]["max_abs_dA"].is_null());
}
