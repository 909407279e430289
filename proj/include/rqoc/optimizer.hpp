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
#include <vector>

#include "rqoc/dynamics.hpp"

namespace rqoc {

struct RiskMeasure {
  enum class Kind { expectation, cvar };

  Kind kind = Kind::expectation;
  double gamma = 1.0;  // cvar tail fraction in (0, 1]

  static RiskMeasure expectation() { return {Kind::expectation, 1.0}; }
  static RiskMeasure cvar(double gamma);
};

/// Expectation: arithmetic mean. CVaR(gamma): mean of the ceil(gamma * L)
/// largest values, the worst-case tail of a minimization objective.
double risk(const std::vector<double>& values, const RiskMeasure& measure);

struct OCPProblem {
  HamiltonianSet set;
  Matrix target;
  double eta = 0.05;
  double beta = 0.0;  // chance-constraint risk level
  bool phase_invariant = true;
  double horizon = 0.0;
  double dt = 0.0;
  double h_max = 1.0;
  RiskMeasure risk_measure = RiskMeasure::expectation();
  double penalty_mu = 1.0;

  int steps() const;
  void validate() const;
};

struct SaaComponents {
  double objective = 0.0;
  double risk_value = 0.0;
  double success_fraction = 0.0;
  double penalty_term = 0.0;
  std::vector<double> hitting_times;  // censored at the horizon
  std::vector<bool> hit;
};

/// objective = risk(censored hitting times) + penalty_mu * max(0, (1 - beta)
/// - success_fraction), evaluated on the fixed scenario set.
SaaComponents saa_objective(const ControlSchedule& schedule, const ScenarioSet& scenarios,
                            const OCPProblem& problem, int workers = 0);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double risk_value = 0.0;
  double success_fraction = 0.0;
  double closest_approach = 0.0;
  double step_size = 0.0;
};

struct OptimizationReport {
  ControlSchedule schedule;
  double objective = 0.0;
  double risk_value = 0.0;
  double success_fraction = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  int restart_index = 0;
  std::vector<IterationRecord> log;  // accepted iterates of the winning restart
};

struct OptimizeConfig {
  int max_iters = 200;
  double fd_step = 0.02;
  double init_step = 0.4;     // initial line-search step, in control units
  double min_step = 1e-4;     // stall threshold for the backtracking step
  int restarts = 4;           // restart 0 starts from the zero schedule
  std::uint64_t init_seed = 1;
  int workers = 1;
  // Weight of the closest-approach term added to the finite-difference
  // search direction. It breaks the flat plateaus of the censored hitting
  // objective; accepted steps never increase the objective itself.
  double shaping_weight = 0.25;
};

/// Projected descent over the control grid with central finite differences
/// and backtracking, multi-restart; the best report is returned and the
/// objective is non-increasing across accepted iterates.
OptimizationReport optimize(const OCPProblem& problem, const ScenarioSet& scenarios,
                            const OptimizeConfig& config = {});

/// The deterministic time-optimal problem: optimize against the single
/// noise-free scenario, with the terminal constraint enforced (beta = 0).
OptimizationReport solve_deterministic(const OCPProblem& problem,
                                       const OptimizeConfig& config = {});

}  // namespace rqoc
