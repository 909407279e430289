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

#include <array>
#include <optional>
#include <vector>

#include "rqoc/linalg.hpp"
#include "rqoc/noise.hpp"

namespace rqoc {

/// One control channel: the intended generator and the erroneous one the
/// switching process substitutes while the channel is in error.
struct HamiltonianChannel {
  Matrix intended;
  Matrix error;
};

struct HamiltonianSet {
  int n = 1;  // qubit count
  std::vector<HamiltonianChannel> channels;

  int dim() const { return 1 << n; }
  int channel_count() const { return static_cast<int>(channels.size()); }
  // All members Hermitian, traceless to 1e-10, and of dimension 2^n.
  void validate() const;
};

/// Piecewise-constant controls h_j(t_k) on a uniform dt grid, with the
/// per-step Euclidean magnitude bound ||h(t_k)||_2 <= h_max.
struct ControlSchedule {
  double dt = 0.0;
  Eigen::MatrixXd values;  // steps x channels
  double h_max = 1.0;

  int steps() const { return static_cast<int>(values.rows()); }
  int channel_count() const { return static_cast<int>(values.cols()); }
  double horizon() const { return dt * steps(); }
  void validate() const;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<Matrix> unitaries;           // grid times t_0 .. t_K
  std::optional<double> hitting_time;      // filled by hitting_time()
  std::vector<double> step_costs;          // optional per-step metric costs

  int steps() const { return static_cast<int>(unitaries.size()) - 1; }
};

/// Sum_j h_j (alpha_j intended_j + (1 - alpha_j) error_j).
Matrix effective_hamiltonian(const Eigen::VectorXd& h, const std::vector<int>& alpha,
                             const HamiltonianSet& set);

/// Exact piecewise propagation of dU/dt = -iH(t)U: every grid interval is
/// split at interior noise jumps and each constant piece is advanced with
/// its matrix exponential. Aborts (std::runtime_error) if unitarity drifts
/// beyond 1e-9. Pass realization = nullptr for noise-free dynamics.
Trajectory propagate(const ControlSchedule& schedule, const NoiseRealization* realization,
                     const HamiltonianSet& set);

/// Smallest grid time within eta of the target (sup distance, optionally
/// phase invariant); nullopt when the trajectory never enters the ball.
std::optional<double> hitting_time(const Trajectory& traj, const Matrix& target,
                                   double eta, bool phase_invariant);

/// psi(t_k) = U(t_k) psi0 for a normalized initial state.
std::vector<Vector> apply_to_state(const Trajectory& traj, const Vector& psi0);

/// (<sigma_x>, <sigma_y>, <sigma_z>) of a single-qubit state.
std::array<double, 3> bloch_coordinates(const Vector& psi);

/// First-hitting sweep that never materializes the trajectory. Records the
/// closest phase-seeded approach to the target for diagnostics (the exact
/// refined distance decides hits; see sup_distance).
struct ScenarioOutcome {
  std::optional<double> hit_time;
  double closest_approach = 0.0;
};
ScenarioOutcome simulate_hitting(const ControlSchedule& schedule,
                                 const NoiseRealization* realization,
                                 const HamiltonianSet& set, const Matrix& target,
                                 double eta, bool phase_invariant);

struct ChanceEstimate {
  double success_fraction = 0.0;
  std::vector<double> hitting_times;  // censored at the horizon for misses
  std::vector<bool> hit;              // censoring flags
};

/// Monte-Carlo estimate of the chance constraint over a scenario set.
/// Deterministic for a fixed set regardless of worker count.
ChanceEstimate chance_estimate(const ControlSchedule& schedule, const ScenarioSet& scenarios,
                               const HamiltonianSet& set, const Matrix& target, double eta,
                               bool phase_invariant, int workers = 0);

}  // namespace rqoc
