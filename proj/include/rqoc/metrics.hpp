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

#include <string>
#include <vector>

#include "rqoc/pauli.hpp"

namespace rqoc {

struct ControlSchedule;
struct HamiltonianSet;
class NoiseRealization;

/// Weight-dependent penalty families. The single-qubit family penalizes the
/// z direction; the two-qubit family penalizes the weight-2 directions.
struct MetricKind {
  enum class Family {
    killing,
    cliff,
    binomial,           // param = alpha
    exponential,        // param = base x > 1
    single_qubit_zz,    // param = p >= 1, requires n = 1
    two_qubit_weight2,  // param = p >= 1, requires n = 2
  };

  Family family = Family::killing;
  double param = 0.0;

  static MetricKind killing() { return {Family::killing, 0.0}; }
  static MetricKind cliff() { return {Family::cliff, 0.0}; }
  static MetricKind binomial(double alpha) { return {Family::binomial, alpha}; }
  static MetricKind exponential(double x) { return {Family::exponential, x}; }
  static MetricKind single_qubit_zz(double p) { return {Family::single_qubit_zz, p}; }
  static MetricKind two_qubit_weight2(double p) { return {Family::two_qubit_weight2, p}; }

  std::string name() const;
};

/// Diagonal metric coefficients, one per basis element, in basis order.
struct PenaltyMatrix {
  Eigen::VectorXd diag;

  int size() const { return static_cast<int>(diag.size()); }
};

PenaltyMatrix build_penalty(const MetricKind& kind, const PauliBasis& basis);

/// g(H, H) = Sum_I I_II h_I^2 for a coefficient vector in basis order.
double metric_cost_clean(const Eigen::VectorXd& h, const PenaltyMatrix& penalty);

/// Canonical noisy cost: assemble Sum_j h_j (alpha_j clean_j + (1-alpha_j)
/// noisy_j), expand it in the basis, and take the clean cost.
double metric_cost_noisy_oracle(const Eigen::VectorXd& h_channels,
                                const std::vector<int>& alpha_channels,
                                const std::vector<Matrix>& clean_set,
                                const std::vector<Matrix>& noisy_set,
                                const PauliBasis& basis, const PenaltyMatrix& penalty);

struct NoisyCostComparison {
  double paper = 0.0;
  double oracle = 0.0;
  double discrepancy = 0.0;  // paper - oracle
};

/// The printed three-term perturbed cost, evaluated verbatim for controls
/// aligned with Pauli directions (channel j drives sigma at basis position
/// channel_dirs[j]); M has one column per channel, as built by
/// expansion_matrix. The canonical oracle value is returned alongside.
NoisyCostComparison metric_cost_noisy_paper(const std::vector<int>& channel_dirs,
                                            const Eigen::VectorXd& h_channels,
                                            const std::vector<int>& alpha_channels,
                                            const Eigen::MatrixXd& M,
                                            const PauliBasis& basis,
                                            const PenaltyMatrix& penalty);

/// c(H, T) = integral of sqrt(g(H(t), H(t))) dt over the jump-refined grid.
/// The cost on each constant piece is the canonical noisy cost (the clean
/// cost when realization is null).
double path_length(const ControlSchedule& schedule, const NoiseRealization* realization,
                   const HamiltonianSet& set, const PauliBasis& basis,
                   const PenaltyMatrix& penalty);

}  // namespace rqoc
