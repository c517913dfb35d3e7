// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/mps.hpp"

#include <algorithm>
#include <chrono>
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

using Eigen::MatrixXcd;

constexpr char kMagic[8] = {'Q', 'P', 'K', 'M', 'P', 'S', 'C', '1'};
constexpr std::uint32_t kEndianTag = 0x01020304u;

void check_site(const MpsState &s, int q) {
  if (q < 0 || q >= s.num_qubits) {
    throw std::out_of_range("site " + std::to_string(q) + " out of range for " + std::to_string(s.num_qubits) +
                            "-site MPS");
  }
}

// QR of [A^0; A^1]: site becomes left-canonical, R moves into the next site.
void shift_right(MpsState &s, int j) {
  auto &a = s.sites[static_cast<std::size_t>(j)];
  auto &b = s.sites[static_cast<std::size_t>(j + 1)];
  const Eigen::Index dl = a[0].rows(), dr = a[0].cols();
  MatrixXcd m(2 * dl, dr);
  m << a[0], a[1];
  Eigen::HouseholderQR<MatrixXcd> qr(m);
  const Eigen::Index k = std::min(2 * dl, dr);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(2 * dl, k);
  MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  a[0] = q.topRows(dl);
  a[1] = q.bottomRows(dl);
  b[0] = r * b[0];
  b[1] = r * b[1];
}

// LQ of [A^0 A^1] through QR of its adjoint.
void shift_left(MpsState &s, int j) {
  auto &a = s.sites[static_cast<std::size_t>(j)];
  auto &b = s.sites[static_cast<std::size_t>(j - 1)];
  const Eigen::Index dl = a[0].rows(), dr = a[0].cols();
  MatrixXcd m(dl, 2 * dr);
  m << a[0], a[1];
  MatrixXcd mh = m.adjoint();
  Eigen::HouseholderQR<MatrixXcd> qr(mh);
  const Eigen::Index k = std::min(dl, 2 * dr);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(2 * dr, k);
  MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  MatrixXcd qh = q.adjoint();  // k x 2dr
  MatrixXcd l = r.adjoint();   // dl x k
  a[0] = qh.leftCols(dr);
  a[1] = qh.rightCols(dr);
  b[0] = b[0] * l;
  b[1] = b[1] * l;
}

// sum_s o_s A^s^dagger L A^s
MatrixXcd transfer(const std::array<MatrixXcd, 2> &a, const MatrixXcd &l, double o0, double o1) {
  MatrixXcd out = o0 * (a[0].adjoint() * l * a[0]);
  out.noalias() += o1 * (a[1].adjoint() * l * a[1]);
  return out;
}

double real_scalar(const MatrixXcd &m) { return m(0, 0).real(); }

}  // namespace

int MpsState::max_bond() const {
  int m = 1;
  for (int j = 0; j + 1 < num_qubits; ++j) m = std::max(m, bond_dim(j));
  return m;
}

double MpsState::norm_squared() const {
  const auto &c = sites[static_cast<std::size_t>(center)];
  return c[0].squaredNorm() + c[1].squaredNorm();
}

MpsState mps_init_all_up(int n, int chi) {
  if (n < 2) throw ConfigError("MPS needs at least two sites");
  if (chi < 1) throw ConfigError("bond dimension must be at least 1");
  MpsState s;
  s.num_qubits = n;
  s.chi = chi;
  s.sites.resize(static_cast<std::size_t>(n));
  for (auto &site : s.sites) {
    site[0] = MatrixXcd::Ones(1, 1);
    site[1] = MatrixXcd::Zero(1, 1);
  }
  s.schmidt.assign(static_cast<std::size_t>(n - 1), Eigen::VectorXd::Ones(1));
  return s;
}

void mps_move_center(MpsState &state, int site) {
  check_site(state, site);
  while (state.center < site) shift_right(state, state.center++);
  while (state.center > site) shift_left(state, state.center--);
}

void mps_apply_one_site(MpsState &state, const Gate &gate) {
  if (gate.arity() != 1) throw std::invalid_argument("mps_apply_one_site needs a one-qubit gate");
  const int q = gate.qubits[0];
  check_site(state, q);
  auto &a = state.sites[static_cast<std::size_t>(q)];
  const GateMatrix g = gate_unitary(gate);
  if (gate.is_diagonal()) {
    a[0] *= g(0, 0);
    a[1] *= g(1, 1);
    return;
  }
  MatrixXcd n0 = g(0, 0) * a[0] + g(0, 1) * a[1];
  MatrixXcd n1 = g(1, 0) * a[0] + g(1, 1) * a[1];
  a[0].swap(n0);
  a[1].swap(n1);
}

namespace {

// Contracts sites j, j+1 with the gate, splits by SVD and leaves the center
// on j+1 (absorb_right) or on j.
void two_site_update(MpsState &state, const Gate &gate, int j, bool absorb_right) {
  auto &a = state.sites[static_cast<std::size_t>(j)];
  auto &b = state.sites[static_cast<std::size_t>(j + 1)];
  const Eigen::Index dl = a[0].rows(), dr = b[0].cols();
  const bool q0_left = gate.qubits[0] == j;
  const GateMatrix g = gate_unitary(gate);
  // Gate index of (left bit, right bit).
  auto gidx = [q0_left](int sl, int sr) { return q0_left ? sl + 2 * sr : sr + 2 * sl; };

  std::array<MatrixXcd, 4> blocks;  // blocks[sl + 2 sr]
  for (int sl = 0; sl < 2; ++sl)
    for (int sr = 0; sr < 2; ++sr) blocks[static_cast<std::size_t>(sl + 2 * sr)].noalias() = a[sl] * b[sr];

  MatrixXcd theta(2 * dl, 2 * dr);
  for (int sl = 0; sl < 2; ++sl) {
    for (int sr = 0; sr < 2; ++sr) {
      auto out = theta.block(sl * dl, sr * dr, dl, dr);
      const int o = gidx(sl, sr);
      if (gate.is_diagonal()) {
        out = g(o, o) * blocks[static_cast<std::size_t>(sl + 2 * sr)];
        continue;
      }
      out.setZero();
      for (int il = 0; il < 2; ++il) {
        for (int ir = 0; ir < 2; ++ir) {
          const cplx c = g(o, gidx(il, ir));
          if (c != cplx(0.0)) out += c * blocks[static_cast<std::size_t>(il + 2 * ir)];
        }
      }
    }
  }

  linalg::Svd f = linalg::svd(theta);
  const Eigen::Index rank = f.S.size();
  const double total = f.S.squaredNorm();
  Eigen::Index keep = 0;
  const double floor = f.S.size() ? f.S[0] * kSvdRelativeCutoff : 0.0;
  while (keep < rank && keep < state.chi && f.S[keep] > floor) ++keep;
  keep = std::max<Eigen::Index>(keep, 1);
  const double kept = f.S.head(keep).squaredNorm();
  if (total > 0.0) state.discarded_weight += f.S.tail(rank - keep).squaredNorm() / total;

  Eigen::VectorXd s = f.S.head(keep) / std::sqrt(kept);
  state.schmidt[static_cast<std::size_t>(j)] = s;
  MatrixXcd u = f.U.leftCols(keep);
  MatrixXcd vh = f.Vh.topRows(keep);
  if (absorb_right) {
    vh = s.asDiagonal() * vh;
    state.center = j + 1;
  } else {
    u = u * s.asDiagonal();
    state.center = j;
  }
  a[0] = u.topRows(dl);
  a[1] = u.bottomRows(dl);
  b[0] = vh.leftCols(dr);
  b[1] = vh.rightCols(dr);
}

void apply_two_site_directed(MpsState &state, const Gate &gate, bool rightward) {
  const int a = gate.qubits[0], b = gate.qubits[1];
  check_site(state, a);
  check_site(state, b);
  if (std::abs(a - b) != 1) {
    throw ConfigError("MPS backend needs nearest-neighbour gates, got (" + std::to_string(a) + ", " +
                      std::to_string(b) + "); it supports chain lattices only");
  }
  const int j = std::min(a, b);
  mps_move_center(state, rightward ? j : j + 1);
  two_site_update(state, gate, j, rightward);
}

}  // namespace

void mps_apply_two_site(MpsState &state, const Gate &gate) {
  if (gate.arity() != 2) throw std::invalid_argument("mps_apply_two_site needs a two-qubit gate");
  const int j = std::min(gate.qubits[0], gate.qubits[1]);
  apply_two_site_directed(state, gate, state.center <= j);
}

void mps_apply(MpsState &state, const Gate &gate) {
  if (gate.arity() == 1) {
    mps_apply_one_site(state, gate);
  } else {
    mps_apply_two_site(state, gate);
  }
}

std::size_t mps_run_circuit(MpsState &state, const Circuit &circuit, const NoiseSpec &noise, Rng &rng,
                            const MpsCycleObserver &observer, const MpsRunOptions &options) {
  if (circuit.num_qubits != state.num_qubits) {
    throw ConfigError("circuit acts on " + std::to_string(circuit.num_qubits) + " qubits but the MPS has " +
                      std::to_string(state.num_qubits));
  }
  auto apply_noise = [&state](const Gate &g) { mps_apply_one_site(state, g); };
  std::size_t next_boundary = 0;
  auto start = std::chrono::steady_clock::now();
  for (std::size_t l = 0; l < circuit.layers.size(); ++l) {
    const auto &layer = circuit.layers[l];
    std::vector<const Gate *> order;
    order.reserve(layer.size());
    for (const auto &g : layer) order.push_back(&g);
    const bool rightward = 2 * state.center < state.num_qubits;
    auto lo = [](const Gate *g) { return g->arity() == 1 ? g->qubits[0] : std::min(g->qubits[0], g->qubits[1]); };
    std::stable_sort(order.begin(), order.end(),
                     [&](const Gate *x, const Gate *y) { return rightward ? lo(x) < lo(y) : lo(x) > lo(y); });
    for (const Gate *g : order) {
      if (g->arity() == 1) {
        mps_apply_one_site(state, *g);
      } else {
        apply_two_site_directed(state, *g, rightward);
      }
      inject_pauli_error(*g, noise, rng, apply_noise);
    }
    while (next_boundary < circuit.cycle_boundaries.size() && circuit.cycle_boundaries[next_boundary] == l + 1) {
      const double drift = std::abs(1.0 - state.norm_squared());
      if (drift > options.norm_tolerance) {
        throw InvariantError("MPS norm drifted by " + std::to_string(drift) + " after cycle " +
                             std::to_string(next_boundary + 1));
      }
      ++next_boundary;
      const auto now = std::chrono::steady_clock::now();
      MpsCycleDiagnostics d{next_boundary, state.max_bond(), state.discarded_weight,
                            std::chrono::duration<double>(now - start).count()};
      start = now;
      if (observer) observer(state, d, noise.attenuation(l + 1));
      if (state.discarded_weight > options.stop_discarded_weight) return next_boundary;
    }
  }
  return next_boundary;
}

namespace {

std::vector<MatrixXcd> left_envs(const MpsState &s) {
  std::vector<MatrixXcd> e(static_cast<std::size_t>(s.num_qubits + 1));
  e[0] = MatrixXcd::Ones(1, 1);
  for (int j = 0; j < s.num_qubits; ++j) {
    e[static_cast<std::size_t>(j + 1)] = transfer(s.sites[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j)], 1, 1);
  }
  return e;
}

std::vector<MatrixXcd> right_envs(const MpsState &s) {
  std::vector<MatrixXcd> r(static_cast<std::size_t>(s.num_qubits + 1));
  r[static_cast<std::size_t>(s.num_qubits)] = MatrixXcd::Ones(1, 1);
  for (int j = s.num_qubits - 1; j >= 0; --j) {
    const auto &a = s.sites[static_cast<std::size_t>(j)];
    const auto &next = r[static_cast<std::size_t>(j + 1)];
    r[static_cast<std::size_t>(j)] = a[0] * next * a[0].adjoint() + a[1] * next * a[1].adjoint();
  }
  return r;
}

double local_z(const std::array<MatrixXcd, 2> &a, const MatrixXcd &l, const MatrixXcd &r) {
  const double up = (l * a[0] * r * a[0].adjoint()).trace().real();
  const double down = (l * a[1] * r * a[1].adjoint()).trace().real();
  return up - down;
}

}  // namespace

double mps_expect_z(const MpsState &state, int qubit) {
  check_site(state, qubit);
  // In mixed canonical form only the center carries weight, so the
  // environments of everything else are identities.
  if (qubit == state.center) {
    const auto &a = state.sites[static_cast<std::size_t>(qubit)];
    return (a[0].squaredNorm() - a[1].squaredNorm()) / (a[0].squaredNorm() + a[1].squaredNorm());
  }
  const auto l = left_envs(state);
  const auto r = right_envs(state);
  return local_z(state.sites[static_cast<std::size_t>(qubit)], l[static_cast<std::size_t>(qubit)],
                 r[static_cast<std::size_t>(qubit + 1)]) /
         real_scalar(l.back());
}

std::vector<double> mps_expect_z_all(const MpsState &state) {
  const auto l = left_envs(state);
  const auto r = right_envs(state);
  const double norm = real_scalar(l.back());
  std::vector<double> z(static_cast<std::size_t>(state.num_qubits));
  for (int q = 0; q < state.num_qubits; ++q) {
    z[static_cast<std::size_t>(q)] =
        local_z(state.sites[static_cast<std::size_t>(q)], l[static_cast<std::size_t>(q)], r[static_cast<std::size_t>(q + 1)]) / norm;
  }
  return z;
}

MagnetizationMoments mps_magnetization_moments(const MpsState &state) {
  // L1 carries one Z somewhere to the left, L2 two Z at distinct sites.
  MatrixXcd l0 = MatrixXcd::Ones(1, 1);
  MatrixXcd l1 = MatrixXcd::Zero(1, 1);
  MatrixXcd l2 = MatrixXcd::Zero(1, 1);
  for (const auto &a : state.sites) {
    MatrixXcd n2 = transfer(a, l2, 1, 1) + transfer(a, l1, 1, -1);
    MatrixXcd n1 = transfer(a, l1, 1, 1) + transfer(a, l0, 1, -1);
    MatrixXcd n0 = transfer(a, l0, 1, 1);
    l0.swap(n0);
    l1.swap(n1);
    l2.swap(n2);
  }
  const double norm = real_scalar(l0);
  MagnetizationMoments m;
  m.mean = real_scalar(l1) / norm;
  m.mean_sq = state.num_qubits + 2.0 * real_scalar(l2) / norm;
  return m;
}

double mps_bond_entropy(const MpsState &state, int bond) {
  if (bond < 0 || bond >= state.num_qubits - 1) {
    throw std::out_of_range("bond " + std::to_string(bond) + " out of range");
  }
  return linalg::entropy_from_schmidt(state.schmidt[static_cast<std::size_t>(bond)]);
}

SampleSet mps_sample_bitstrings(const MpsState &state, std::size_t shots, std::uint64_t seed, std::uint64_t stream) {
  if (shots == 0) throw ConfigError("shots must be positive");
  MpsState s = state;
  mps_move_center(s, 0);
  Rng rng(seed, stream);
  SampleSet out;
  out.num_qubits = s.num_qubits;
  out.bits.resize(shots * static_cast<std::size_t>(s.num_qubits));
  const double norm = s.norm_squared();
  for (std::size_t shot = 0; shot < shots; ++shot) {
    Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1) / std::sqrt(norm);
    for (int q = 0; q < s.num_qubits; ++q) {
      const auto &a = s.sites[static_cast<std::size_t>(q)];
      Eigen::RowVectorXcd v0 = v * a[0];
      const double p0 = v0.squaredNorm();
      Eigen::RowVectorXcd v1 = v * a[1];
      const double p1 = v1.squaredNorm();
      const bool one = rng.uniform() * (p0 + p1) >= p0;
      out.bits[shot * static_cast<std::size_t>(s.num_qubits) + static_cast<std::size_t>(q)] = one ? 1 : 0;
      v = one ? Eigen::RowVectorXcd(v1 / std::sqrt(p1)) : Eigen::RowVectorXcd(v0 / std::sqrt(p0));
    }
  }
  return out;
}

std::vector<cplx> mps_to_dense(const MpsState &state) {
  if (state.num_qubits > 26) throw CapacityError("dense conversion limited to 26 sites", state_vector_bytes(26));
  // Rows enumerate the left physical indices, little-endian.
  MatrixXcd acc(2, state.sites[0][0].cols());
  acc.row(0) = state.sites[0][0];
  acc.row(1) = state.sites[0][1];
  for (int q = 1; q < state.num_qubits; ++q) {
    const auto &a = state.sites[static_cast<std::size_t>(q)];
    MatrixXcd next(2 * acc.rows(), a[0].cols());
    next.topRows(acc.rows()) = acc * a[0];
    next.bottomRows(acc.rows()) = acc * a[1];
    acc.swap(next);
  }
  std::vector<cplx> out(static_cast<std::size_t>(acc.rows()));
  for (Eigen::Index k = 0; k < acc.rows(); ++k) out[static_cast<std::size_t>(k)] = acc(k, 0);
  return out;
}

namespace {

template <class T>
void put(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T>
T get(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated MPS checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const MpsState &state, std::ostream &out) {
  out.write(kMagic, sizeof kMagic);
  put(out, static_cast<std::uint32_t>(state.num_qubits));
  put(out, kEndianTag);
  put(out, static_cast<std::int32_t>(state.chi));
  put(out, static_cast<std::int32_t>(state.center));
  put(out, state.discarded_weight);
  for (const auto &site : state.sites) {
    put(out, static_cast<std::int32_t>(site[0].rows()));
    put(out, static_cast<std::int32_t>(site[0].cols()));
    for (const auto &m : site) {
      out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
    }
  }
  for (const auto &s : state.schmidt) {
    put(out, static_cast<std::int32_t>(s.size()));
    out.write(reinterpret_cast<const char *>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed to write MPS checkpoint");
}

MpsState load_mps_checkpoint(std::istream &in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not an MPS checkpoint");
  const auto n = get<std::uint32_t>(in);
  if (get<std::uint32_t>(in) != kEndianTag) throw std::runtime_error("checkpoint written with a different byte order");
  MpsState s = mps_init_all_up(static_cast<int>(n), get<std::int32_t>(in));
  s.center = get<std::int32_t>(in);
  s.discarded_weight = get<double>(in);
  for (auto &site : s.sites) {
    const auto dl = get<std::int32_t>(in);
    const auto dr = get<std::int32_t>(in);
    for (auto &m : site) {
      m.resize(dl, dr);
      in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
    }
  }
  for (auto &sv : s.schmidt) {
    sv.resize(get<std::int32_t>(in));
    in.read(reinterpret_cast<char *>(sv.data()), static_cast<std::streamsize>(sv.size() * sizeof(double)));
  }
  if (!in) throw std::runtime_error("truncated MPS checkpoint");
  return s;
}

}  // namespace qpkick
