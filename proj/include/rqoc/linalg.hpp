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

namespace rqoc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dimensions are 2^n with 1 <= n <= 6.
inline constexpr int kMaxQubits = 6;

// Tolerances used by the validation helpers.
inline constexpr double kHermitianTol = 1e-12;  // relative, max-entry
inline constexpr double kUnitaryTol = 1e-9;     // absolute, max-entry

/// Number of qubits n for a d x d matrix with d = 2^n. Throws
/// std::invalid_argument if the matrix is not square with a power-of-two
/// dimension in [2, 2^kMaxQubits].
int qubit_count(const Matrix& A);

double max_abs(const Matrix& A);

bool all_finite(const Matrix& A);

// max-entry |A - A^dag| <= tol * max-entry |A|
bool is_hermitian(const Matrix& A, double tol = kHermitianTol);

// max-entry |U^dag U - I| <= tol
bool is_unitary(const Matrix& U, double tol = kUnitaryTol);

void require_hermitian(const Matrix& A, const char* what);
void require_unitary(const Matrix& U, const char* what);
void require_same_dim(const Matrix& A, const Matrix& B, const char* what);

/// exp(-i H t) for Hermitian H, via spectral decomposition. The result is
/// unitary up to eigensolver error (well below 1e-10 at these sizes).
Matrix expm_neg_i(const Matrix& H, double t);

/// Trace normalized so that the identity has trace 1.
Complex normalized_trace(const Matrix& A);

/// Frobenius norm under the normalized trace: ||I|| = 1.
double frobenius_norm(const Matrix& A);

/// Largest singular value.
double operator_norm(const Matrix& A);

/// Max entrywise modulus of U - V. With phase_invariant the distance is
/// minimized over a global phase: the trace phase phi* = -arg(tr(V^dag U))
/// seeds a local 1-D refinement to phase tolerance 1e-10. A coarse circle
/// scan replaces the trace seed when tr(V^dag U) vanishes.
double sup_distance(const Matrix& U, const Matrix& V, bool phase_invariant);

struct GeodesicDistance {
  double value = 0.0;
  // Set when an eigenphase of U^dag V sits within 1e-9 of +-pi, where the
  // principal log branch is ambiguous. The value is still returned.
  bool branch_ambiguous = false;
};

/// Bi-invariant distance: normalized Frobenius norm of the principal matrix
/// logarithm of U^dag V, eigenphases folded to (-pi, pi].
GeodesicDistance killing_geodesic_distance(const Matrix& U, const Matrix& V);

}  // namespace rqoc
