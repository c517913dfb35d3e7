// Independent reference implementations used only by tests.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <vector>

#include "qpkick/circuit.hpp"
#include "qpkick/lattice.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using qpkick::cplx;

inline Mat pauli_x() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

inline Mat pauli_z() {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

inline Mat kron(const Mat &a, const Mat &b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op acting on qubit q of n; qubit 0 is the rightmost (least significant) factor.
inline Mat embed1(const Mat &op, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = n - 1; k >= 0; --k) out = kron(out, k == q ? op : Mat::Identity(2, 2));
  return out;
}

// Two-qubit op indexed by bit(a) + 2 bit(b), embedded element by element.
inline Mat embed2(const qpkick::GateMatrix &g, int a, int b, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat out = Mat::Zero(dim, dim);
  const Eigen::Index mask = (Eigen::Index{1} << a) | (Eigen::Index{1} << b);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      const int ri = static_cast<int>(((r >> a) & 1) + 2 * ((r >> b) & 1));
      const int ci = static_cast<int>(((c >> a) & 1) + 2 * ((c >> b) & 1));
      out(r, c) = g(ri, ci);
    }
  }
  return out;
}

inline Mat gate_matrix(const qpkick::Gate &g, int n) {
  const auto u = qpkick::gate_unitary(g);
  if (g.arity() == 1) {
    Mat m(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = u(r, c);
    return embed1(m, g.qubits[0], n);
  }
  return embed2(u, g.qubits[0], g.qubits[1], n);
}

inline Mat circuit_unitary(const qpkick::Circuit &c) {
  const Eigen::Index dim = Eigen::Index{1} << c.num_qubits;
  Mat u = Mat::Identity(dim, dim);
  for (const auto &layer : c.layers)
    for (const auto &g : layer) u = gate_matrix(g, c.num_qubits) * u;
  return u;
}

inline Vec all_up(int n) {
  Vec v = Vec::Zero(Eigen::Index{1} << n);
  v[0] = 1.0;
  return v;
}

// exp(-i h_x sum X) exp(-i [J sum_<ij> Z Z + sum_(j,a) h_ja Z_j]) built from
// Hamiltonian matrices, bypassing gates and angles entirely.
inline Mat floquet_by_exponential(const qpkick::LatticeSpec &lat, double J, double hx) {
  const int n = lat.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat hz = Mat::Zero(dim, dim);
  for (const auto &e : lat.edges) hz += J * embed1(pauli_z(), e.a, n) * embed1(pauli_z(), e.b, n);
  for (const auto &[key, h] : lat.fields_z) hz += h * embed1(pauli_z(), key.first, n);
  Mat hxm = Mat::Zero(dim, dim);
  for (int q = 0; q < n; ++q) hxm += hx * embed1(pauli_x(), q, n);
  const cplx mi(0.0, -1.0);
  Mat a = (mi * hxm).exp();
  Mat b = (mi * hz).exp();
  return a * b;
}

// Operator-norm distance after removing the best global phase.
inline double phase_aligned_distance(const Mat &a, const Mat &b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1.0);
  Eigen::JacobiSVD<Mat> svd(a - phase * b);
  return svd.singularValues()[0];
}

inline double z_expect(const Vec &psi, int q) {
  double s = 0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) s += ((k >> q) & 1 ? -1.0 : 1.0) * std::norm(psi[k]);
  return s;
}

// Term by term: 4 sum_ij (<Z_i Z_j> - <Z_i><Z_j>).
inline double qfi_pair_sum(const Vec &psi, int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = z_expect(psi, i);
  double f = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double zz = 0;
      for (Eigen::Index k = 0; k < psi.size(); ++k) {
        const double si = ((k >> i) & 1) ? -1.0 : 1.0;
        const double sj = ((k >> j) & 1) ? -1.0 : 1.0;
        zz += si * sj * std::norm(psi[k]);
      }
      f += zz - z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
    }
  }
  return 4.0 * f;
}

// Entropy of qubits [0, cut) from the eigenvalues of the reduced density matrix.
inline double entropy_rdm(const Vec &psi, int n, int cut) {
  const Eigen::Index da = Eigen::Index{1} << cut;
  const Eigen::Index db = Eigen::Index{1} << (n - cut);
  Mat rho = Mat::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index b = 0; b < db; ++b) rho(i, j) += psi[i + da * b] * std::conj(psi[j + da * b]);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double s = 0;
  for (Eigen::Index i = 0; i < da; ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

}  // namespace oracle
