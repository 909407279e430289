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

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rqoc/linalg.hpp"

namespace rqoc {

/// One generalized Pauli basis element: a tensor product of single-qubit
/// factors from {1, x, y, z}, not all identity.
struct PauliString {
  // One code per qubit, leftmost tensor factor first: 0=I, 1=X, 2=Y, 3=Z.
  std::vector<std::uint8_t> factors;

  int weight() const;
  // Base-4 encoding of the factors, in [1, 4^n - 1].
  std::uint64_t index() const;
  // e.g. "IXZ"
  std::string label() const;
  // Dense 2^n x 2^n realization.
  Matrix matrix() const;
};

/// The 4^n - 1 traceless tensor products spanning the tangent space of
/// SU(2^n), in a deterministic order: ascending weight, then lexicographic
/// in the factor codes (I < X < Y < Z, leftmost factor most significant).
/// Dense matrices are materialized lazily and cached; cache fills are
/// synchronized, so concurrent readers are safe.
class PauliBasis {
 public:
  explicit PauliBasis(int n);

  int qubit_count() const { return n_; }
  int dim() const { return 1 << n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<PauliString>& elements() const { return elements_; }
  const PauliString& element(int pos) const;
  const Matrix& matrix(int pos) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::vector<std::unique_ptr<const Matrix>> slots;
  };

  int n_;
  std::vector<PauliString> elements_;
  std::shared_ptr<Cache> cache_;
};

PauliBasis generate_basis(int n);

/// Number of weight-k elements: C(n, k) * 3^k.
std::int64_t count_weight(int n, int k);

/// Coefficients h_I = normalized_trace(H sigma_I) of a Hermitian H. The
/// traceful part is excluded from the expansion; it is written to
/// identity_coeff when provided, otherwise a non-traceless input (normalized
/// trace above 1e-10 in modulus) is rejected.
Eigen::VectorXd expand(const Matrix& H, const PauliBasis& basis,
                       double* identity_coeff = nullptr);

/// Sum_I coeffs_I sigma_I.
Matrix reconstruct(const Eigen::VectorXd& coeffs, const PauliBasis& basis);

/// Column J holds expand(noisy_set[J]).
Eigen::MatrixXd expansion_matrix(const std::vector<Matrix>& noisy_set,
                                 const PauliBasis& basis);

}  // namespace rqoc
