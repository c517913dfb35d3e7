#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "qpkick/errors.hpp"
#include "qpkick/state_vector.hpp"

using namespace qpkick;
using std::numbers::pi;

namespace {

oracle::Vec to_vec(const StateVector &s) {
  oracle::Vec v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) v[static_cast<Eigen::Index>(k)] = s.amplitudes()[k];
  return v;
}

Circuit random_circuit(int n, int depth, std::mt19937_64 &gen) {
  std::uniform_real_distribution<double> ang(-2 * pi, 2 * pi);
  std::uniform_int_distribution<int> kind(0, 5);
  Circuit c;
  c.num_qubits = n;
  for (int d = 0; d < depth; ++d) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) perm[static_cast<std::size_t>(q)] = q;
    std::shuffle(perm.begin(), perm.end(), gen);
    Layer layer;
    for (std::size_t i = 0; i + 1 < perm.size(); i += 2) {
      const int a = perm[i], b = perm[i + 1];
      switch (kind(gen)) {
        case 0: layer.push_back(Gate::rzz(a, b, ang(gen))); break;
        case 1: layer.push_back(Gate::cz(a, b)); break;
        case 2: layer.push_back(Gate::rx(a, ang(gen))); layer.push_back(Gate::sx(b)); break;
        case 3: layer.push_back(Gate::rz(a, ang(gen))); layer.push_back(Gate::x(b)); break;
        default: layer.push_back(Gate::rx(a, ang(gen))); layer.push_back(Gate::rz(b, ang(gen))); break;
      }
    }
    c.layers.push_back(layer);
  }
  c.cycle_boundaries = {c.layers.size()};
  return c;
}

}  // namespace

TEST_CASE("initial states and capacity") {
  auto one = init_all_up(1);
  CHECK(one.size() == 2);
  CHECK(one.amplitudes()[0] == cplx(1.0));
  CHECK(one.amplitudes()[1] == cplx(0.0));
  auto two = init_all_up(2);
  CHECK(two.size() == 4);
  CHECK(two.norm_squared() == 1.0);
  try {
    init_all_up(28);
    FAIL("expected capacity error");
  } catch (const CapacityError &e) {
    CHECK(e.required_bytes() == (std::size_t{1} << 28) * 16);
  }
  CHECK_THROWS_AS(init_all_up(0), ConfigError);
}

TEST_CASE("single gate examples") {
  auto s = init_all_up(1);
  apply_gate(s, Gate::rz(0, 0.7));
  CHECK(std::abs(s.amplitudes()[0] - std::polar(1.0, -0.35)) < 1e-15);
  CHECK(expect_z(s, 0) == doctest::Approx(1.0));
  apply_gate(s, Gate::rx(0, pi));
  CHECK(expect_z(s, 0) == doctest::Approx(-1.0));
  auto t = init_all_up(1);
  apply_gate(t, Gate::rx(0, pi));
  CHECK(std::abs(t.amplitudes()[1] - cplx(0, -1)) < 1e-15);
  CHECK_THROWS_AS(apply_gate(t, Gate::rx(1, 0.1)), std::out_of_range);
}

TEST_CASE("diagonal gates leave magnetization untouched") {
  std::mt19937_64 gen(5);
  auto s = init_all_up(5);
  for (int q = 0; q < 5; ++q) apply_gate(s, Gate::rx(q, 0.3 + q));
  const auto z0 = expect_z_all(s);
  apply_gate(s, Gate::rz(2, 1.1));
  apply_gate(s, Gate::rzz(0, 4, 0.9));
  apply_gate(s, Gate::cz(1, 3));
  const auto z1 = expect_z_all(s);
  for (int q = 0; q < 5; ++q) CHECK(z1[static_cast<std::size_t>(q)] == doctest::Approx(z0[static_cast<std::size_t>(q)]).epsilon(1e-14));
}

TEST_CASE("random circuits match the dense oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5;
    auto c = random_circuit(n, 12, gen);
    auto s = init_all_up(n);
    Rng rng(0);
    run_circuit(s, c, NoiseSpec::none(), rng);
    oracle::Vec ref = oracle::circuit_unitary(c) * oracle::all_up(n);
    CHECK((to_vec(s) - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(1.0 - s.norm_squared()) < 1e-10);
    for (int q = 0; q < n; ++q) CHECK(expect_z(s, q) == doctest::Approx(oracle::z_expect(ref, q)).epsilon(1e-12));
  }
}

TEST_CASE("floquet chain matches the oracle") {
  const int n = 4;
  auto lat = assign_qp_fields(build_chain(n), QpFieldParams{2.0});
  auto c = repeat_cycles(build_floquet_cycle(lat, FloquetParams::from_w(2.0)), 3);
  auto s = init_all_up(n);
  Rng rng(0);
  std::vector<std::size_t> seen;
  run_circuit(s, c, NoiseSpec::none(), rng, [&](std::size_t t, const StateVector &, double f) {
    seen.push_back(t);
    CHECK(f == 1.0);
  });
  CHECK(seen == std::vector<std::size_t>{1, 2, 3});
  oracle::Vec ref = oracle::circuit_unitary(c) * oracle::all_up(n);
  CHECK(expect_z(s, 0) == doctest::Approx(oracle::z_expect(ref, 0)).epsilon(1e-12));
}

TEST_CASE("zero cycles leave the state alone") {
  auto s = init_all_up(3);
  Rng rng(0);
  run_circuit(s, Circuit{3, {}, {}}, NoiseSpec::none(), rng);
  CHECK(s.amplitudes()[0] == cplx(1.0));
  auto bad = init_all_up(2);
  CHECK_THROWS_AS(run_circuit(bad, Circuit{3, {}, {}}, NoiseSpec::none(), rng), ConfigError);
}

TEST_CASE("noise modes") {
  auto lat = assign_qp_fields(build_chain(5), QpFieldParams{3.0});
  auto c = repeat_cycles(build_floquet_cycle(lat, FloquetParams::from_w(3.0)), 4);

  SUBCASE("zero-probability trajectories are bit-exact with the noiseless run") {
    auto a = init_all_up(5), b = init_all_up(5);
    Rng r1(9), r2(9);
    run_circuit(a, c, NoiseSpec::none(), r1);
    run_circuit(b, c, NoiseSpec::pauli_trajectory(0.0, 0.0, 1, 9), r2);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.amplitudes()[k] == b.amplitudes()[k]);
  }
  SUBCASE("global depolarizing attaches lambda^layers") {
    auto s = init_all_up(5);
    Rng rng(0);
    std::vector<double> f;
    run_circuit(s, c, NoiseSpec::global_depolarizing(0.99), rng,
                [&](std::size_t, const StateVector &, double a) { f.push_back(a); });
    REQUIRE(f.size() == 4);
    for (std::size_t t = 0; t < 4; ++t) CHECK(f[t] == doctest::Approx(std::pow(0.99, 4.0 * (t + 1))));
  }
  SUBCASE("trajectory average follows the depolarizing law") {
    const double p = 0.05;
    const int layers = 10;
    const int traj = 4000;
    Circuit idle;
    idle.num_qubits = 1;
    for (int l = 0; l < layers; ++l) idle.layers.push_back({Gate::rz(0, 0.0)});
    idle.cycle_boundaries = {idle.layers.size()};
    double mean = 0.0;
    for (int k = 0; k < traj; ++k) {
      auto s = init_all_up(1);
      Rng rng(77, static_cast<std::uint64_t>(k));
      run_circuit(s, idle, NoiseSpec::pauli_trajectory(p, 0.0, traj, 77), rng);
      mean += expect_z(s, 0);
    }
    mean /= traj;
    const double expect = std::pow(1.0 - 4.0 * p / 3.0, layers);
    const double sigma = std::sqrt((1.0 - expect * expect) / traj);
    CHECK(std::abs(mean - expect) < 5 * sigma);
  }
  CHECK_THROWS_AS(NoiseSpec::global_depolarizing(0.0), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::pauli_trajectory(1.5, 0, 1, 0), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::pauli_trajectory(0.1, 0, 0, 0), ConfigError);
  CHECK(noise_mode_from_string("pauli") == NoiseMode::PauliTrajectory);
  CHECK_THROWS_AS(noise_mode_from_string("kraus"), ConfigError);
}

TEST_CASE("sampling") {
  auto up = init_all_up(4);
  auto s = sample_bitstrings(up, 100, 1);
  CHECK(s.shots() == 100);
  for (auto b : s.bits) CHECK(b == 0);

  auto plus = init_all_up(1);
  apply_gate(plus, Gate::rx(0, pi / 2));
  auto samples = sample_bitstrings(plus, 16384, 42);
  double ones = 0;
  for (auto b : samples.bits) ones += b;
  CHECK(std::abs(ones / 16384 - 0.5) < 5 * std::sqrt(0.25 / 16384));
  CHECK(sample_bitstrings(plus, 64, 42).bits == sample_bitstrings(plus, 64, 42).bits);
  CHECK(sample_bitstrings(plus, 64, 42).bits != sample_bitstrings(plus, 64, 43).bits);

  // Chi-square against the Born distribution of a 3-qubit state.
  auto st = init_all_up(3);
  for (int q = 0; q < 3; ++q) apply_gate(st, Gate::rx(q, 0.4 + 0.5 * q));
  apply_gate(st, Gate::rzz(0, 1, 0.8));
  apply_gate(st, Gate::rx(1, 0.9));
  const std::size_t shots = 50000;
  auto draws = sample_bitstrings(st, shots, 3);
  std::vector<double> counts(8, 0.0);
  for (std::size_t k = 0; k < shots; ++k) counts[draws.bit(k, 0) + 2u * draws.bit(k, 1) + 4u * draws.bit(k, 2)] += 1;
  double chi2 = 0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double e = shots * std::norm(st.amplitudes()[k]);
    if (e > 0) chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  CHECK(chi2 < 24.3);  // 7 dof, p ~ 0.001
  CHECK_THROWS_AS(sample_bitstrings(st, 0, 1), ConfigError);
}

TEST_CASE("half-cut entropy") {
  auto prod = init_all_up(4);
  for (int q = 0; q < 4; ++q) apply_gate(prod, Gate::rx(q, 0.7));
  CHECK(half_cut_entropy(prod, 2) == doctest::Approx(0.0).epsilon(1e-12));

  auto bell = init_all_up(2);
  apply_gate(bell, Gate::rx(0, pi / 2));
  apply_gate(bell, Gate::rzz(0, 1, pi / 2));
  apply_gate(bell, Gate::rx(1, pi / 2));
  // Check against the reduced-density-matrix oracle rather than assuming the state.
  CHECK(half_cut_entropy(bell, 1) == doctest::Approx(oracle::entropy_rdm(to_vec(bell), 2, 1)).epsilon(1e-10));

  auto b2 = init_all_up(2);
  b2.amplitudes()[0] = 1 / std::sqrt(2.0);
  b2.amplitudes()[3] = 1 / std::sqrt(2.0);
  CHECK(half_cut_entropy(b2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = random_circuit(7, 8, gen);
    auto s = init_all_up(7);
    Rng rng(0);
    run_circuit(s, c, NoiseSpec::none(), rng);
    for (int cut = 1; cut < 7; ++cut) {
      const double e = half_cut_entropy(s, cut);
      CHECK(e == doctest::Approx(oracle::entropy_rdm(to_vec(s), 7, cut)).epsilon(1e-9));
      CHECK(e >= -1e-12);
      CHECK(e <= std::min(cut, 7 - cut) * std::log(2.0) + 1e-12);
    }
  }
  CHECK_THROWS_AS(half_cut_entropy(prod, 0), std::out_of_range);
  CHECK_THROWS_AS(half_cut_entropy(prod, 4), std::out_of_range);
}

TEST_CASE("magnetization moments") {
  auto s = init_all_up(3);
  auto m = magnetization_moments(s);
  CHECK(m.mean == 3.0);
  CHECK(m.mean_sq == 9.0);
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 gen(1);
  auto c = random_circuit(5, 6, gen);
  auto s = init_all_up(5);
  Rng rng(0);
  run_circuit(s, c, NoiseSpec::none(), rng);
  std::stringstream buf;
  save_checkpoint(s, buf);
  CHECK(buf.str().size() == 16 + 32 * 16);
  auto r = load_checkpoint(buf);
  CHECK(r.num_qubits() == 5);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(r.amplitudes()[k] == s.amplitudes()[k]);
  std::stringstream junk("not a checkpoint at all");
  CHECK_THROWS(load_checkpoint(junk));
  std::string cut = buf.str().substr(0, 40);
  std::stringstream trunc(cut);
  CHECK_THROWS(load_checkpoint(trunc));
}
