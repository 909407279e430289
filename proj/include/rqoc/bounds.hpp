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

#include <optional>
#include <vector>

#include "rqoc/metrics.hpp"

namespace rqoc {

struct PruneResult {
  Eigen::VectorXd coeffs;  // h_I kept where I_II < cutoff, zeroed otherwise
  int active_terms = 0;    // retained nonzero coefficients
};

PruneResult prune(const Eigen::VectorXd& h, const PenaltyMatrix& penalty, double cutoff);

/// Sum_k Gamma_k dt / sqrt(cutoff) for per-step path speeds Gamma_k.
double pruning_bound(const std::vector<double>& gammas, double dt, double cutoff);

/// pi sqrt(N) delta^2; valid only for delta < N^{-1/2} (error otherwise).
double averaging_bound(int active_terms, double delta);

/// Leading-order trotterization error: ||(1/2) Sum_I Sum_{J<I} [H_I, H_J]||_F
/// * delta^2. Higher orders are not estimated.
double trotter_leading(const std::vector<Matrix>& terms, double delta);

struct BoundStepCheck {
  double length = 0.0;  // inner-product length of the step
  double averaging_empirical = 0.0;
  std::optional<double> averaging_bound;  // absent when delta >= N^{-1/2}
  double trotter_empirical = 0.0;
  double trotter_leading = 0.0;
};

struct BoundCheckReport {
  double cutoff = 0.0;
  int step_count = 0;
  int active_terms = 0;      // N: retained nonzero Pauli directions
  double step_length = 0.0;  // delta, killing length per step

  double pruning_empirical = 0.0;
  double pruning_bound = 0.0;
  bool pruning_within_bound = false;

  double averaging_empirical_total = 0.0;
  std::optional<double> averaging_bound_total;
  bool averaging_precondition_ok = false;
  bool averaging_within_bound = false;  // per-step checks, where valid

  double trotter_empirical_total = 0.0;
  double trotter_leading_total = 0.0;

  std::vector<BoundStepCheck> steps;
};

/// Builds the pruned, step-averaged, and trotterized approximations of the
/// switched path and reports the Killing distance between consecutive
/// approximations next to the corresponding bounds. The path is divided
/// into S steps of equal inner-product length.
BoundCheckReport empirical_bound_check(const ControlSchedule& schedule,
                                       const NoiseRealization* realization,
                                       const HamiltonianSet& set, const PauliBasis& basis,
                                       const PenaltyMatrix& penalty, double cutoff, int S);

}  // namespace rqoc
