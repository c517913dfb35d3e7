// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "qpkick/errors.hpp"

namespace qpkick::linalg {

namespace {

lapack_int run_gesdd(char jobz, Eigen::MatrixXcd &work, Svd &out) {
  const lapack_int m = static_cast<lapack_int>(work.rows());
  const lapack_int n = static_cast<lapack_int>(work.cols());
  const lapack_int k = std::min(m, n);
  out.S.resize(k);
  if (jobz == 'N') {
    return LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, reinterpret_cast<lapack_complex_double *>(work.data()), m,
                          out.S.data(), nullptr, 1, nullptr, 1);
  }
  out.U.resize(m, k);
  out.Vh.resize(k, n);
  return LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, reinterpret_cast<lapack_complex_double *>(work.data()), m,
                        out.S.data(), reinterpret_cast<lapack_complex_double *>(out.U.data()), m,
                        reinterpret_cast<lapack_complex_double *>(out.Vh.data()), k);
}

lapack_int run_gesvd(char job, Eigen::MatrixXcd &work, Svd &out) {
  const lapack_int m = static_cast<lapack_int>(work.rows());
  const lapack_int n = static_cast<lapack_int>(work.cols());
  const lapack_int k = std::min(m, n);
  out.S.resize(k);
  Eigen::VectorXd superb(std::max<lapack_int>(k - 1, 1));
  if (job == 'N') {
    return LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, reinterpret_cast<lapack_complex_double *>(work.data()),
                          m, out.S.data(), nullptr, 1, nullptr, 1, superb.data());
  }
  out.U.resize(m, k);
  out.Vh.resize(k, n);
  return LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, reinterpret_cast<lapack_complex_double *>(work.data()),
                        m, out.S.data(), reinterpret_cast<lapack_complex_double *>(out.U.data()), m,
                        reinterpret_cast<lapack_complex_double *>(out.Vh.data()), k, superb.data());
}

Svd decompose(const Eigen::MatrixXcd &a, char mode) {
  Svd out;
  if (a.size() == 0) return out;
  Eigen::MatrixXcd work = a;
  if (run_gesdd(mode, work, out) == 0) return out;
  // gesdd occasionally fails to converge on nearly degenerate spectra.
  work = a;
  const lapack_int info = run_gesvd(mode, work, out);
  if (info != 0) throw InvariantError("SVD failed to converge (info=" + std::to_string(info) + ")");
  return out;
}

}  // namespace

Svd svd(const Eigen::MatrixXcd &a) { return decompose(a, 'S'); }

Eigen::VectorXd singular_values(const Eigen::MatrixXcd &a) { return decompose(a, 'N').S; }

double entropy_from_schmidt(const Eigen::VectorXd &s) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = s[i] * s[i];
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace qpkick::linalg
