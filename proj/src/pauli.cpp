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

#include "rqoc/pauli.hpp"

#include <algorithm>
#include <stdexcept>

namespace rqoc {

namespace {

const char kFactorChars[4] = {'I', 'X', 'Y', 'Z'};

Eigen::Matrix2cd single_factor(std::uint8_t code) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (code) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("PauliString: factor code out of range");
  }
  return m;
}

}  // namespace

int PauliString::weight() const {
  return static_cast<int>(
      std::count_if(factors.begin(), factors.end(), [](std::uint8_t f) { return f != 0; }));
}

std::uint64_t PauliString::index() const {
  std::uint64_t idx = 0;
  for (std::uint8_t f : factors) idx = idx * 4 + f;
  return idx;
}

std::string PauliString::label() const {
  std::string s;
  s.reserve(factors.size());
  for (std::uint8_t f : factors) {
    if (f > 3) throw std::invalid_argument("PauliString: factor code out of range");
    s.push_back(kFactorChars[f]);
  }
  return s;
}

Matrix PauliString::matrix() const {
  if (factors.empty()) throw std::invalid_argument("PauliString: empty");
  Matrix m = single_factor(factors[0]);
  for (std::size_t q = 1; q < factors.size(); ++q) {
    const Eigen::Matrix2cd f = single_factor(factors[q]);
    Matrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < 2; ++r) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = f(r, c) * m;
      }
    }
    m.swap(next);
  }
  return m;
}

PauliBasis::PauliBasis(int n) : n_(n), cache_(std::make_shared<Cache>()) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("PauliBasis: qubit count must be in [1, 6]");
  }
  const std::uint64_t total = (std::uint64_t{1} << (2 * n));  // 4^n
  elements_.reserve(total - 1);
  for (std::uint64_t code = 1; code < total; ++code) {
    PauliString p;
    p.factors.resize(n);
    std::uint64_t rest = code;
    for (int q = n - 1; q >= 0; --q) {
      p.factors[q] = static_cast<std::uint8_t>(rest & 3);
      rest >>= 2;
    }
    elements_.push_back(std::move(p));
  }
  std::stable_sort(elements_.begin(), elements_.end(),
                   [](const PauliString& a, const PauliString& b) {
                     const int wa = a.weight();
                     const int wb = b.weight();
                     if (wa != wb) return wa < wb;
                     return a.factors < b.factors;
                   });
  cache_->slots.resize(elements_.size());
}

const PauliString& PauliBasis::element(int pos) const {
  if (pos < 0 || pos >= size()) throw std::out_of_range("PauliBasis: position out of range");
  return elements_[pos];
}

const Matrix& PauliBasis::matrix(int pos) const {
  if (pos < 0 || pos >= size()) throw std::out_of_range("PauliBasis: position out of range");
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& slot = cache_->slots[pos];
  if (!slot) slot = std::make_unique<const Matrix>(elements_[pos].matrix());
  return *slot;
}

PauliBasis generate_basis(int n) { return PauliBasis(n); }

std::int64_t count_weight(int n, int k) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("count_weight: n out of range");
  if (k < 1 || k > n) throw std::invalid_argument("count_weight: k out of range");
  std::int64_t binom = 1;
  for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
  std::int64_t pow3 = 1;
  for (int i = 0; i < k; ++i) pow3 *= 3;
  return binom * pow3;
}

Eigen::VectorXd expand(const Matrix& H, const PauliBasis& basis, double* identity_coeff) {
  if (H.rows() != basis.dim() || H.cols() != basis.dim()) {
    throw std::invalid_argument("expand: dimension mismatch with basis");
  }
  require_hermitian(H, "expand");
  const Complex tr = normalized_trace(H);
  if (identity_coeff != nullptr) {
    *identity_coeff = tr.real();
  } else if (std::abs(tr) > 1e-10) {
    throw std::invalid_argument("expand: input is not traceless");
  }
  Eigen::VectorXd coeffs(basis.size());
  const double inv_d = 1.0 / static_cast<double>(basis.dim());
  for (int i = 0; i < basis.size(); ++i) {
    // normalized_trace(H sigma) as an entrywise sum; sigma is Hermitian.
    const Complex v = (H.transpose().cwiseProduct(basis.matrix(i))).sum() * inv_d;
    coeffs(i) = v.real();
  }
  return coeffs;
}

Matrix reconstruct(const Eigen::VectorXd& coeffs, const PauliBasis& basis) {
  if (coeffs.size() != basis.size()) {
    throw std::invalid_argument("reconstruct: coefficient length mismatch");
  }
  Matrix H = Matrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.size(); ++i) {
    if (coeffs(i) != 0.0) H += coeffs(i) * basis.matrix(i);
  }
  return H;
}

Eigen::MatrixXd expansion_matrix(const std::vector<Matrix>& noisy_set,
                                 const PauliBasis& basis) {
  Eigen::MatrixXd M(basis.size(), static_cast<Eigen::Index>(noisy_set.size()));
  for (std::size_t j = 0; j < noisy_set.size(); ++j) {
    M.col(static_cast<Eigen::Index>(j)) = expand(noisy_set[j], basis);
  }
  return M;
}

}  // namespace rqoc
