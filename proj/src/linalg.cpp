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

#include "rqoc/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "detail/expm.hpp"

namespace rqoc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Golden-section minimization of f on [a, b] down to interval width tol.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

int qubit_count(const Matrix& A) {
  const Eigen::Index d = A.rows();
  if (d != A.cols()) throw std::invalid_argument("matrix is not square");
  for (int n = 1; n <= kMaxQubits; ++n) {
    if (d == (Eigen::Index{1} << n)) return n;
  }
  throw std::invalid_argument("dimension " + std::to_string(d) +
                              " is not 2^n with 1 <= n <= 6");
}

double max_abs(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& A) { return A.allFinite(); }

bool is_hermitian(const Matrix& A, double tol) {
  if (A.rows() != A.cols()) return false;
  return max_abs(A - A.adjoint()) <= tol * max_abs(A);
}

bool is_unitary(const Matrix& U, double tol) {
  if (U.rows() != U.cols()) return false;
  const Matrix gram = U.adjoint() * U;
  return max_abs(gram - Matrix::Identity(U.rows(), U.cols())) <= tol;
}

void require_hermitian(const Matrix& A, const char* what) {
  if (!all_finite(A)) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
  if (!is_hermitian(A)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
  }
}

void require_unitary(const Matrix& U, const char* what) {
  if (!is_unitary(U)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
  }
}

void require_same_dim(const Matrix& A, const Matrix& B, const char* what) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

Matrix expm_neg_i(const Matrix& H, double t) {
  require_hermitian(H, "expm_neg_i");
  if (!std::isfinite(t)) throw std::invalid_argument("expm_neg_i: t not finite");
  return detail::expm_neg_i_herm(H, t);
}

Complex normalized_trace(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("normalized_trace: not square");
  return A.trace() / static_cast<double>(A.rows());
}

double frobenius_norm(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("frobenius_norm: not square");
  const double s = A.squaredNorm() / static_cast<double>(A.rows());
  return std::sqrt(s);
}

double operator_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

double sup_distance(const Matrix& U, const Matrix& V, bool phase_invariant) {
  require_same_dim(U, V, "sup_distance");
  if (!phase_invariant) return max_abs(U - V);

  const auto f = [&](double phi) {
    return max_abs(std::polar(1.0, phi) * U - V);
  };

  const Complex tr = (V.adjoint() * U).trace();
  double center;
  double halfwidth;
  if (std::abs(tr) > 1e-14) {
    center = -std::arg(tr);
    halfwidth = 0.6;
  } else {
    // Degenerate trace: fall back to a coarse scan of the full circle.
    center = 0.0;
    double best = f(0.0);
    for (int i = 1; i < 128; ++i) {
      const double phi = 2.0 * kPi * i / 128.0;
      const double v = f(phi);
      if (v < best) {
        best = v;
        center = phi;
      }
    }
    halfwidth = 2.0 * kPi / 128.0;
  }

  // Pre-scan the bracket so the golden section starts in a unimodal pocket.
  double best_phi = center;
  double best_val = f(center);
  for (int i = -6; i <= 6; ++i) {
    const double phi = center + halfwidth * i / 6.0;
    const double v = f(phi);
    if (v < best_val) {
      best_val = v;
      best_phi = phi;
    }
  }
  const double step = halfwidth / 6.0;
  const double phi_min = golden_min(f, best_phi - step, best_phi + step, 1e-10);
  return std::min(best_val, f(phi_min));
}

GeodesicDistance killing_geodesic_distance(const Matrix& U, const Matrix& V) {
  require_same_dim(U, V, "killing_geodesic_distance");
  require_unitary(U, "killing_geodesic_distance");
  require_unitary(V, "killing_geodesic_distance");
  const Matrix W = U.adjoint() * V;
  Eigen::ComplexEigenSolver<Matrix> es(W, /*computeEigenvectors=*/false);
  GeodesicDistance out;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    const double theta = std::arg(es.eigenvalues()(i));  // in (-pi, pi]
    sum += theta * theta;
    if (std::abs(std::abs(theta) - kPi) <= 1e-9) out.branch_ambiguous = true;
  }
  out.value = std::sqrt(sum / static_cast<double>(W.rows()));
  return out;
}

}  // namespace rqoc
