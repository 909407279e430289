// Copyright 2026 The rqoc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rqoc::detail {

// exp(-i H t) for Hermitian H via spectral decomposition. The 2x2 case uses
// the closed-form eigensolver and stays on the stack.
inline Eigen::Matrix2cd expm_neg_i_herm(const Eigen::Matrix2cd& H, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es;
  es.computeDirect(H);
  Eigen::Vector2cd phases;
  phases << std::polar(1.0, -es.eigenvalues()(0) * t),
      std::polar(1.0, -es.eigenvalues()(1) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::MatrixXcd expm_neg_i_herm(const Eigen::MatrixXcd& H, double t) {
  if (H.rows() == 2) {
    return expm_neg_i_herm(Eigen::Matrix2cd(H), t);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXcd phases(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace rqoc::detail
