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

#include "rqoc/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "detail/expm.hpp"
#include "detail/parallel.hpp"
#include "detail/switching.hpp"

namespace rqoc {

namespace {

constexpr double kUnitarityAbort = 1e-9;

void check_consistent(const ControlSchedule& schedule, const NoiseRealization* realization,
                      const HamiltonianSet& set) {
  schedule.validate();
  set.validate();
  if (schedule.channel_count() != set.channel_count()) {
    throw std::invalid_argument("schedule channel count does not match Hamiltonian set");
  }
  if (realization != nullptr) {
    if (realization->channel_count() != set.channel_count()) {
      throw std::invalid_argument("realization channel count does not match Hamiltonian set");
    }
    if (realization->horizon() < schedule.horizon() - 1e-12) {
      throw std::invalid_argument("realization horizon shorter than schedule horizon");
    }
  }
}

template <typename Mat>
void accumulate_effective(const Eigen::MatrixXd& values, int k, const std::vector<int>& alpha,
                          const HamiltonianSet& set, Mat& H) {
  H.setZero();
  for (int j = 0; j < set.channel_count(); ++j) {
    const double hj = values(k, j);
    if (hj == 0.0) continue;
    const auto& ch = set.channels[static_cast<std::size_t>(j)];
    H += hj * (alpha[static_cast<std::size_t>(j)] != 0 ? ch.intended : ch.error);
  }
}

// Sweep the switched dynamics, invoking visit(k, U) at every grid time
// t_k (including k = 0 with U = I). visit returns false to stop early.
template <typename Mat, typename Visit>
void sweep(const ControlSchedule& schedule, const NoiseRealization* realization,
           const HamiltonianSet& set, Visit&& visit) {
  const int d = set.dim();
  const int m = set.channel_count();
  Mat U = Mat::Identity(d, d);
  Mat H(d, d);
  detail::SwitchScratch scratch;
  if (!visit(0, U)) return;
  for (int k = 0; k < schedule.steps(); ++k) {
    const double t0 = schedule.dt * k;
    const double t1 = schedule.dt * (k + 1);
    detail::for_each_switched_piece(
        t0, t1, realization, m, scratch,
        [&](double a, double b, const std::vector<int>& alpha) {
          accumulate_effective(schedule.values, k, alpha, set, H);
          U = (detail::expm_neg_i_herm(Mat(H), b - a) * U).eval();
        });
    const double drift = (U.adjoint() * U - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (drift > kUnitarityAbort) {
      throw std::runtime_error("propagate: unitarity drift " + std::to_string(drift) +
                               " at step " + std::to_string(k + 1));
    }
    if (!visit(k + 1, U)) return;
  }
}

// Lazy phase-invariant hit test with exact semantics: the refined distance
// is only computed when the cheap bounds cannot decide.
template <typename Mat>
bool within_eta(const Mat& U, const Matrix& target, double eta, bool phase_invariant,
                double* approach) {
  if (!phase_invariant) {
    const double dist = (U - target).cwiseAbs().maxCoeff();
    *approach = dist;
    return dist <= eta;
  }
  // Any-phase lower bound from entry moduli.
  const double lb = (U.cwiseAbs() - target.cwiseAbs()).cwiseAbs().maxCoeff();
  const Complex tr = (target.adjoint() * U).trace();
  double seeded;
  if (std::abs(tr) > 1e-14) {
    seeded = (std::polar(1.0, -std::arg(tr)) * U - target).cwiseAbs().maxCoeff();
  } else {
    seeded = sup_distance(Matrix(U), target, true);
    *approach = seeded;
    return seeded <= eta;
  }
  *approach = seeded;
  if (seeded <= eta) return true;
  if (lb > eta) return false;
  const double exact = sup_distance(Matrix(U), target, true);
  *approach = exact;
  return exact <= eta;
}

template <typename Mat>
ScenarioOutcome simulate_hitting_impl(const ControlSchedule& schedule,
                                      const NoiseRealization* realization,
                                      const HamiltonianSet& set, const Matrix& target,
                                      double eta, bool phase_invariant) {
  ScenarioOutcome out;
  double best = std::numeric_limits<double>::infinity();
  sweep<Mat>(schedule, realization, set, [&](int k, const Mat& U) {
    double approach = 0.0;
    if (within_eta(U, target, eta, phase_invariant, &approach)) {
      out.hit_time = schedule.dt * k;
      out.closest_approach = approach;
      return false;
    }
    best = std::min(best, approach);
    return true;
  });
  if (!out.hit_time) out.closest_approach = best;
  return out;
}

}  // namespace

void HamiltonianSet::validate() const {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("HamiltonianSet: qubit count must be in [1, 6]");
  }
  if (channels.empty()) throw std::invalid_argument("HamiltonianSet: no channels");
  const int d = dim();
  for (const auto& ch : channels) {
    for (const Matrix* H : {&ch.intended, &ch.error}) {
      if (H->rows() != d || H->cols() != d) {
        throw std::invalid_argument("HamiltonianSet: channel dimension mismatch");
      }
      require_hermitian(*H, "HamiltonianSet channel");
      if (std::abs(normalized_trace(*H)) > 1e-10) {
        throw std::invalid_argument("HamiltonianSet: channel generator is not traceless");
      }
    }
  }
}

void ControlSchedule::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("ControlSchedule: dt must be positive");
  }
  if (values.rows() < 1 || values.cols() < 1) {
    throw std::invalid_argument("ControlSchedule: empty control grid");
  }
  if (!(h_max > 0.0)) throw std::invalid_argument("ControlSchedule: h_max must be positive");
  if (!values.allFinite()) throw std::invalid_argument("ControlSchedule: non-finite control");
  for (int k = 0; k < steps(); ++k) {
    if (values.row(k).norm() > h_max * (1.0 + 1e-12)) {
      throw std::invalid_argument("ControlSchedule: step " + std::to_string(k) +
                                  " exceeds the magnitude bound");
    }
  }
}

Matrix effective_hamiltonian(const Eigen::VectorXd& h, const std::vector<int>& alpha,
                             const HamiltonianSet& set) {
  if (h.size() != set.channel_count() ||
      static_cast<int>(alpha.size()) != set.channel_count()) {
    throw std::invalid_argument("effective_hamiltonian: channel count mismatch");
  }
  Matrix H = Matrix::Zero(set.dim(), set.dim());
  for (int j = 0; j < set.channel_count(); ++j) {
    const auto& ch = set.channels[static_cast<std::size_t>(j)];
    H += h(j) * (alpha[static_cast<std::size_t>(j)] != 0 ? ch.intended : ch.error);
  }
  return H;
}

Trajectory propagate(const ControlSchedule& schedule, const NoiseRealization* realization,
                     const HamiltonianSet& set) {
  check_consistent(schedule, realization, set);
  Trajectory traj;
  traj.dt = schedule.dt;
  traj.unitaries.reserve(static_cast<std::size_t>(schedule.steps()) + 1);
  sweep<Matrix>(schedule, realization, set, [&](int, const Matrix& U) {
    traj.unitaries.push_back(U);
    return true;
  });
  return traj;
}

std::optional<double> hitting_time(const Trajectory& traj, const Matrix& target,
                                   double eta, bool phase_invariant) {
  if (!(eta > 0.0)) throw std::invalid_argument("hitting_time: eta must be positive");
  for (std::size_t k = 0; k < traj.unitaries.size(); ++k) {
    if (sup_distance(traj.unitaries[k], target, phase_invariant) <= eta) {
      return traj.dt * static_cast<double>(k);
    }
  }
  return std::nullopt;
}

std::vector<Vector> apply_to_state(const Trajectory& traj, const Vector& psi0) {
  if (traj.unitaries.empty()) throw std::invalid_argument("apply_to_state: empty trajectory");
  if (psi0.size() != traj.unitaries.front().rows()) {
    throw std::invalid_argument("apply_to_state: state dimension mismatch");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("apply_to_state: initial state is not normalized");
  }
  std::vector<Vector> states;
  states.reserve(traj.unitaries.size());
  for (const auto& U : traj.unitaries) {
    Vector psi = U * psi0;
    if (std::abs(psi.norm() - 1.0) > 1e-9) {
      throw std::runtime_error("apply_to_state: state norm drift");
    }
    states.push_back(std::move(psi));
  }
  return states;
}

std::array<double, 3> bloch_coordinates(const Vector& psi) {
  if (psi.size() != 2) throw std::invalid_argument("bloch_coordinates: need a qubit state");
  const Complex a = psi(0);
  const Complex b = psi(1);
  const Complex cross = std::conj(a) * b;
  return {2.0 * cross.real(), 2.0 * cross.imag(),
          std::norm(a) - std::norm(b)};
}

ScenarioOutcome simulate_hitting(const ControlSchedule& schedule,
                                 const NoiseRealization* realization,
                                 const HamiltonianSet& set, const Matrix& target,
                                 double eta, bool phase_invariant) {
  check_consistent(schedule, realization, set);
  if (target.rows() != set.dim() || target.cols() != set.dim()) {
    throw std::invalid_argument("simulate_hitting: target dimension mismatch");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("simulate_hitting: eta must be positive");
  if (set.dim() == 2) {
    return simulate_hitting_impl<Eigen::Matrix2cd>(schedule, realization, set, target, eta,
                                                   phase_invariant);
  }
  return simulate_hitting_impl<Matrix>(schedule, realization, set, target, eta,
                                       phase_invariant);
}

ChanceEstimate chance_estimate(const ControlSchedule& schedule, const ScenarioSet& scenarios,
                               const HamiltonianSet& set, const Matrix& target, double eta,
                               bool phase_invariant, int workers) {
  if (scenarios.size() < 1) throw std::invalid_argument("chance_estimate: empty scenario set");
  const int L = scenarios.size();
  ChanceEstimate est;
  est.hitting_times.resize(static_cast<std::size_t>(L));
  est.hit.assign(static_cast<std::size_t>(L), false);
  const double horizon = schedule.horizon();
  detail::parallel_for(L, workers, [&](int l) {
    const auto outcome = simulate_hitting(schedule, &scenarios.realizations[static_cast<std::size_t>(l)],
                                          set, target, eta, phase_invariant);
    est.hitting_times[static_cast<std::size_t>(l)] =
        outcome.hit_time ? *outcome.hit_time : horizon;
    est.hit[static_cast<std::size_t>(l)] = outcome.hit_time.has_value();
  });
  int hits = 0;
  for (bool h : est.hit) hits += h ? 1 : 0;
  est.success_fraction = static_cast<double>(hits) / static_cast<double>(L);
  return est;
}

}  // namespace rqoc
