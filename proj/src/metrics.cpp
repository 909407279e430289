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

#include "rqoc/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "rqoc/dynamics.hpp"
#include "detail/switching.hpp"

namespace rqoc {

std::string MetricKind::name() const {
  switch (family) {
    case Family::killing: return "killing";
    case Family::cliff: return "cliff";
    case Family::binomial: return "binomial";
    case Family::exponential: return "exponential";
    case Family::single_qubit_zz: return "single_qubit_zz";
    case Family::two_qubit_weight2: return "two_qubit_weight2";
  }
  return "unknown";
}

PenaltyMatrix build_penalty(const MetricKind& kind, const PauliBasis& basis) {
  const int n = basis.qubit_count();
  if (!std::isfinite(kind.param)) {
    throw std::invalid_argument("build_penalty: non-finite parameter");
  }
  PenaltyMatrix penalty;
  penalty.diag.resize(basis.size());
  using Family = MetricKind::Family;
  switch (kind.family) {
    case Family::exponential:
      if (!(kind.param > 1.0)) {
        throw std::invalid_argument("build_penalty: exponential base must exceed 1");
      }
      break;
    case Family::single_qubit_zz:
      if (n != 1) throw std::invalid_argument("build_penalty: single_qubit_zz requires n = 1");
      if (!(kind.param >= 1.0)) {
        throw std::invalid_argument("build_penalty: penalty parameter must be >= 1");
      }
      break;
    case Family::two_qubit_weight2:
      if (n != 2) throw std::invalid_argument("build_penalty: two_qubit_weight2 requires n = 2");
      if (!(kind.param >= 1.0)) {
        throw std::invalid_argument("build_penalty: penalty parameter must be >= 1");
      }
      break;
    default:
      break;
  }
  for (int i = 0; i < basis.size(); ++i) {
    const PauliString& p = basis.element(i);
    const int k = p.weight();
    double value = 1.0;
    switch (kind.family) {
      case Family::killing:
        value = 1.0;
        break;
      case Family::cliff:
        value = (k <= 2) ? 1.0 : static_cast<double>(k);
        break;
      case Family::binomial:
        value = std::pow(static_cast<double>(count_weight(n, k)), kind.param);
        break;
      case Family::exponential:
        value = std::pow(kind.param, 2.0 * k);
        break;
      case Family::single_qubit_zz:
        value = (p.factors[0] == 3) ? kind.param : 1.0;
        break;
      case Family::two_qubit_weight2:
        value = (k == 2) ? kind.param : 1.0;
        break;
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("build_penalty: produced a non-positive penalty");
    }
    penalty.diag(i) = value;
  }
  return penalty;
}

double metric_cost_clean(const Eigen::VectorXd& h, const PenaltyMatrix& penalty) {
  if (h.size() != penalty.diag.size()) {
    throw std::invalid_argument("metric_cost_clean: coefficient length mismatch");
  }
  double cost = 0.0;
  for (Eigen::Index i = 0; i < h.size(); ++i) cost += penalty.diag(i) * h(i) * h(i);
  return cost;
}

double metric_cost_noisy_oracle(const Eigen::VectorXd& h_channels,
                                const std::vector<int>& alpha_channels,
                                const std::vector<Matrix>& clean_set,
                                const std::vector<Matrix>& noisy_set,
                                const PauliBasis& basis, const PenaltyMatrix& penalty) {
  const std::size_t m = clean_set.size();
  if (noisy_set.size() != m || alpha_channels.size() != m ||
      static_cast<std::size_t>(h_channels.size()) != m) {
    throw std::invalid_argument("metric_cost_noisy_oracle: channel count mismatch");
  }
  Matrix H = Matrix::Zero(basis.dim(), basis.dim());
  for (std::size_t j = 0; j < m; ++j) {
    require_hermitian(clean_set[j], "metric_cost_noisy_oracle clean");
    require_hermitian(noisy_set[j], "metric_cost_noisy_oracle noisy");
    const Matrix& Hj = alpha_channels[j] != 0 ? clean_set[j] : noisy_set[j];
    H += h_channels(static_cast<Eigen::Index>(j)) * Hj;
  }
  return metric_cost_clean(expand(H, basis), penalty);
}

NoisyCostComparison metric_cost_noisy_paper(const std::vector<int>& channel_dirs,
                                            const Eigen::VectorXd& h_channels,
                                            const std::vector<int>& alpha_channels,
                                            const Eigen::MatrixXd& M,
                                            const PauliBasis& basis,
                                            const PenaltyMatrix& penalty) {
  const std::size_t m = channel_dirs.size();
  const int B = basis.size();
  if (alpha_channels.size() != m || static_cast<std::size_t>(h_channels.size()) != m) {
    throw std::invalid_argument("metric_cost_noisy_paper: channel count mismatch");
  }
  if (M.rows() != B || M.cols() != static_cast<Eigen::Index>(m)) {
    throw std::invalid_argument("metric_cost_noisy_paper: expansion matrix shape mismatch");
  }
  if (penalty.size() != B) {
    throw std::invalid_argument("metric_cost_noisy_paper: penalty length mismatch");
  }

  // Embed the channel quantities over the full basis index range. Directions
  // without a channel carry h = 0, alpha = 1, and an identity noise column.
  Eigen::VectorXd h = Eigen::VectorXd::Zero(B);
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(B);
  Eigen::MatrixXd Mfull = Eigen::MatrixXd::Identity(B, B);
  std::vector<bool> used(static_cast<std::size_t>(B), false);
  for (std::size_t j = 0; j < m; ++j) {
    const int dir = channel_dirs[j];
    if (dir < 0 || dir >= B) {
      throw std::invalid_argument("metric_cost_noisy_paper: channel direction out of range");
    }
    if (used[static_cast<std::size_t>(dir)]) {
      throw std::invalid_argument("metric_cost_noisy_paper: duplicate channel direction");
    }
    used[static_cast<std::size_t>(dir)] = true;
    h(dir) = h_channels(static_cast<Eigen::Index>(j));
    alpha(dir) = alpha_channels[j] != 0 ? 1.0 : 0.0;
    Mfull.col(dir) = M.col(static_cast<Eigen::Index>(j));
  }

  // The three printed terms, summed exactly as indexed.
  double term1 = 0.0;
  for (int i = 0; i < B; ++i) {
    const double ah = alpha(i) * h(i);
    term1 += penalty.diag(i) * ah * ah;
  }
  double term2 = 0.0;
  for (int i = 0; i < B; ++i) {
    if (alpha(i) == 0.0 || h(i) == 0.0) continue;
    for (int j = 0; j < B; ++j) {
      if (j == i || alpha(j) == 1.0 || h(j) == 0.0) continue;
      term2 += 2.0 * penalty.diag(i) * alpha(i) * (1.0 - alpha(j)) * h(i) * h(j) * Mfull(i, j);
    }
  }
  double term3 = 0.0;
  for (int i = 0; i < B; ++i) {
    if (alpha(i) == 1.0 || h(i) == 0.0) continue;
    for (int j = 0; j < B; ++j) {
      if (alpha(j) == 1.0 || h(j) == 0.0) continue;
      const double hh = (1.0 - alpha(i)) * (1.0 - alpha(j)) * h(i) * h(j);
      for (int k = 0; k < B; ++k) {
        term3 += penalty.diag(i) * hh * Mfull(k, i) * Mfull(k, j);
      }
    }
  }

  // Canonical oracle on the same embedded inputs.
  std::vector<Matrix> clean_set;
  std::vector<Matrix> noisy_set;
  std::vector<int> alpha_bits;
  Eigen::VectorXd h_used(static_cast<Eigen::Index>(m));
  clean_set.reserve(m);
  noisy_set.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const int dir = channel_dirs[j];
    clean_set.push_back(basis.matrix(dir));
    noisy_set.push_back(reconstruct(M.col(static_cast<Eigen::Index>(j)), basis));
    alpha_bits.push_back(alpha_channels[j]);
    h_used(static_cast<Eigen::Index>(j)) = h_channels(static_cast<Eigen::Index>(j));
  }
  NoisyCostComparison out;
  out.paper = term1 + term2 + term3;
  out.oracle = metric_cost_noisy_oracle(h_used, alpha_bits, clean_set, noisy_set, basis, penalty);
  out.discrepancy = out.paper - out.oracle;
  return out;
}

double path_length(const ControlSchedule& schedule, const NoiseRealization* realization,
                   const HamiltonianSet& set, const PauliBasis& basis,
                   const PenaltyMatrix& penalty) {
  schedule.validate();
  set.validate();
  if (set.dim() != basis.dim()) {
    throw std::invalid_argument("path_length: basis dimension mismatch");
  }
  if (penalty.size() != basis.size()) {
    throw std::invalid_argument("path_length: penalty length mismatch");
  }
  if (schedule.channel_count() != set.channel_count()) {
    throw std::invalid_argument("path_length: channel count mismatch");
  }
  double length = 0.0;
  detail::SwitchScratch scratch;
  Eigen::VectorXd h(set.channel_count());
  for (int k = 0; k < schedule.steps(); ++k) {
    h = schedule.values.row(k);
    detail::for_each_switched_piece(
        schedule.dt * k, schedule.dt * (k + 1), realization, set.channel_count(), scratch,
        [&](double a, double b, const std::vector<int>& alpha) {
          const Matrix H = effective_hamiltonian(h, alpha, set);
          const double g = metric_cost_clean(expand(H, basis), penalty);
          length += std::sqrt(g) * (b - a);
        });
  }
  return length;
}

}  // namespace rqoc
