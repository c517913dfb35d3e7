// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace qpkick::linalg {

struct Svd {
  Eigen::MatrixXcd U;   // m x k
  Eigen::VectorXd S;    // k, descending
  Eigen::MatrixXcd Vh;  // k x n
};

/// Thin SVD through LAPACK zgesdd (zgesvd as fallback).
Svd svd(const Eigen::MatrixXcd &a);

/// Singular values only, descending.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd &a);

/// -sum s^2 ln s^2 over the nonzero entries of a Schmidt spectrum.
double entropy_from_schmidt(const Eigen::VectorXd &s);

}  // namespace qpkick::linalg
