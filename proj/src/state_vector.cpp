// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qpkick/errors.hpp"
#include "qpkick/linalg.hpp"

namespace qpkick {

namespace {

constexpr char kMagic[8] = {'Q', 'P', 'K', 'S', 'V', 'C', 'K', '1'};
constexpr std::uint32_t kEndianTag = 0x01020304u;

void check_qubit(const StateVector &s, int q) {
  if (q < 0 || q >= s.num_qubits()) {
    throw std::out_of_range("qubit " + std::to_string(q) + " out of range for " + std::to_string(s.num_qubits()) +
                            "-qubit state");
  }
}

}  // namespace

std::size_t state_vector_bytes(int n) { return (std::size_t{1} << n) * sizeof(cplx); }

StateVector init_all_up(int n, std::size_t max_amplitudes) {
  if (n < 1) throw ConfigError("state needs at least one qubit");
  if (n > 40 || (std::size_t{1} << n) > max_amplitudes) {
    const std::size_t bytes = n > 60 ? SIZE_MAX : state_vector_bytes(n);
    throw CapacityError("a " + std::to_string(n) + "-qubit state vector needs " + std::to_string(bytes) +
                            " bytes, above the configured budget of " + std::to_string(max_amplitudes) +
                            " amplitudes; raise the budget or use the mps backend",
                        bytes);
  }
  std::vector<cplx> amps(std::size_t{1} << n);
  amps[0] = 1.0;
  return StateVector(n, std::move(amps));
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto &a : amps_) s += std::norm(a);
  return s;
}

void StateVector::apply(const Gate &gate) {
  check_qubit(*this, gate.qubits[0]);
  if (gate.arity() == 2) {
    check_qubit(*this, gate.qubits[1]);
    if (gate.qubits[0] == gate.qubits[1]) throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
  const std::size_t dim = amps_.size();
  cplx *a = amps_.data();
  const std::size_t ma = std::size_t{1} << gate.qubits[0];
  switch (gate.kind) {
    case GateKind::RZ: {
      const cplx p0 = std::polar(1.0, -0.5 * gate.angle);
      const cplx p1 = std::conj(p0);
      for (std::size_t k = 0; k < dim; ++k) a[k] *= (k & ma) ? p1 : p0;
      return;
    }
    case GateKind::RZZ: {
      const std::size_t mb = std::size_t{1} << gate.qubits[1];
      const cplx even = std::polar(1.0, -0.5 * gate.angle);
      const cplx odd = std::conj(even);
      for (std::size_t k = 0; k < dim; ++k) a[k] *= (((k & ma) != 0) != ((k & mb) != 0)) ? odd : even;
      return;
    }
    case GateKind::CZ: {
      const std::size_t both = ma | (std::size_t{1} << gate.qubits[1]);
      for (std::size_t k = 0; k < dim; ++k) {
        if ((k & both) == both) a[k] = -a[k];
      }
      return;
    }
    case GateKind::X:
      for (std::size_t base = 0; base < dim; base += 2 * ma) {
        for (std::size_t k = base; k < base + ma; ++k) std::swap(a[k], a[k + ma]);
      }
      return;
    case GateKind::RX:
    case GateKind::SX: {
      const GateMatrix g = gate_unitary(gate);
      const cplx g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
      for (std::size_t base = 0; base < dim; base += 2 * ma) {
        for (std::size_t k = base; k < base + ma; ++k) {
          const cplx x0 = a[k];
          const cplx x1 = a[k + ma];
          a[k] = g00 * x0 + g01 * x1;
          a[k + ma] = g10 * x0 + g11 * x1;
        }
      }
      return;
    }
  }
}

void apply_gate(StateVector &state, const Gate &gate) { state.apply(gate); }

void run_circuit(StateVector &state, const Circuit &circuit, const NoiseSpec &noise, Rng &rng,
                 const SvCycleObserver &observer, double norm_tolerance) {
  if (circuit.num_qubits != state.num_qubits()) {
    throw ConfigError("circuit acts on " + std::to_string(circuit.num_qubits) + " qubits but the state has " +
                      std::to_string(state.num_qubits()));
  }
  std::size_t next_boundary = 0;
  auto apply = [&state](const Gate &g) { state.apply(g); };
  for (std::size_t l = 0; l < circuit.layers.size(); ++l) {
    for (const auto &g : circuit.layers[l]) {
      state.apply(g);
      inject_pauli_error(g, noise, rng, apply);
    }
    while (next_boundary < circuit.cycle_boundaries.size() && circuit.cycle_boundaries[next_boundary] == l + 1) {
      const double drift = std::abs(1.0 - state.norm_squared());
      if (drift > norm_tolerance) {
        throw InvariantError("state norm drifted by " + std::to_string(drift) + " after cycle " +
                             std::to_string(next_boundary + 1));
      }
      ++next_boundary;
      if (observer) observer(next_boundary, state, noise.attenuation(l + 1));
    }
  }
}

double expect_z(const StateVector &state, int qubit) {
  check_qubit(state, qubit);
  const std::size_t m = std::size_t{1} << qubit;
  const auto amps = state.amplitudes();
  double s = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) s += (k & m) ? -std::norm(amps[k]) : std::norm(amps[k]);
  return s;
}

std::vector<double> expect_z_all(const StateVector &state) {
  const int n = state.num_qubits();
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  const auto amps = state.amplitudes();
  double total = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double p = std::norm(amps[k]);
    total += p;
    for (int q = 0; q < n; ++q) {
      if (k & (std::size_t{1} << q)) z[static_cast<std::size_t>(q)] -= p;
    }
  }
  for (auto &v : z) v = total + 2.0 * v;
  return z;
}

MagnetizationMoments magnetization_moments(const StateVector &state) {
  const int n = state.num_qubits();
  const auto amps = state.amplitudes();
  MagnetizationMoments mm;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double p = std::norm(amps[k]);
    const double m = n - 2.0 * std::popcount(k);
    mm.mean += p * m;
    mm.mean_sq += p * m * m;
  }
  return mm;
}

SampleSet sample_bitstrings(const StateVector &state, std::size_t shots, std::uint64_t seed, std::uint64_t stream) {
  if (shots == 0) throw ConfigError("shots must be positive");
  const auto amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    acc += std::norm(amps[k]);
    cdf[k] = acc;
  }
  Rng rng(seed, stream);
  SampleSet out;
  out.num_qubits = state.num_qubits();
  out.bits.resize(shots * static_cast<std::size_t>(out.num_qubits));
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    if (k >= amps.size()) k = amps.size() - 1;
    for (int q = 0; q < out.num_qubits; ++q) {
      out.bits[s * static_cast<std::size_t>(out.num_qubits) + static_cast<std::size_t>(q)] =
          static_cast<std::uint8_t>((k >> q) & 1u);
    }
  }
  return out;
}

double half_cut_entropy(const StateVector &state, int cut) {
  const int n = state.num_qubits();
  if (cut < 1 || cut >= n) {
    throw std::out_of_range("cut must lie in [1, " + std::to_string(n - 1) + "], got " + std::to_string(cut));
  }
  // Column-major (2^cut x 2^(n-cut)) view: row = low bits, column = high bits.
  const auto amps = state.amplitudes();
  const Eigen::Index rows = Eigen::Index{1} << cut;
  const Eigen::Index cols = Eigen::Index{1} << (n - cut);
  Eigen::Map<const Eigen::MatrixXcd> m(amps.data(), rows, cols);
  Eigen::VectorXd s = linalg::singular_values(m);
  const double norm = std::sqrt(s.squaredNorm());
  if (norm > 0.0) s /= norm;
  return linalg::entropy_from_schmidt(s);
}

void save_checkpoint(const StateVector &state, std::ostream &out) {
  const std::uint32_t n = static_cast<std::uint32_t>(state.num_qubits());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char *>(&n), sizeof n);
  out.write(reinterpret_cast<const char *>(&kEndianTag), sizeof kEndianTag);
  const auto amps = state.amplitudes();
  out.write(reinterpret_cast<const char *>(amps.data()), static_cast<std::streamsize>(amps.size() * sizeof(cplx)));
  if (!out) throw std::runtime_error("failed to write state checkpoint");
}

StateVector load_checkpoint(std::istream &in, std::size_t max_amplitudes) {
  char magic[8];
  std::uint32_t n = 0;
  std::uint32_t tag = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char *>(&n), sizeof n);
  in.read(reinterpret_cast<char *>(&tag), sizeof tag);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not a state checkpoint");
  if (tag != kEndianTag) throw std::runtime_error("checkpoint written with a different byte order");
  StateVector s = init_all_up(static_cast<int>(n), max_amplitudes);
  in.read(reinterpret_cast<char *>(s.amps_.data()), static_cast<std::streamsize>(s.amps_.size() * sizeof(cplx)));
  if (!in) throw std::runtime_error("truncated state checkpoint");
  return s;
}

}  // namespace qpkick
