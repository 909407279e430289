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

#include "rqoc/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "rqoc/dynamics.hpp"
#include "detail/switching.hpp"

namespace rqoc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One constant-generator piece of the switched path, held as basis
// coefficients.
struct Piece {
  Eigen::VectorXd coeffs;
  double duration = 0.0;
};

std::vector<Piece> build_pieces(const ControlSchedule& schedule,
                                const NoiseRealization* realization,
                                const HamiltonianSet& set, const PauliBasis& basis) {
  std::vector<Piece> pieces;
  detail::SwitchScratch scratch;
  Eigen::VectorXd h(set.channel_count());
  for (int k = 0; k < schedule.steps(); ++k) {
    h = schedule.values.row(k);
    detail::for_each_switched_piece(
        schedule.dt * k, schedule.dt * (k + 1), realization, set.channel_count(), scratch,
        [&](double a, double b, const std::vector<int>& alpha) {
          pieces.push_back({expand(effective_hamiltonian(h, alpha, set), basis), b - a});
        });
  }
  return pieces;
}

Matrix product_exponential(const std::vector<Piece>& pieces, const PauliBasis& basis) {
  Matrix U = Matrix::Identity(basis.dim(), basis.dim());
  for (const auto& piece : pieces) {
    U = expm_neg_i(reconstruct(piece.coeffs, basis), piece.duration) * U;
  }
  return U;
}

}  // namespace

PruneResult prune(const Eigen::VectorXd& h, const PenaltyMatrix& penalty, double cutoff) {
  if (h.size() != penalty.diag.size()) {
    throw std::invalid_argument("prune: coefficient length mismatch");
  }
  if (!(cutoff > 0.0)) throw std::invalid_argument("prune: cutoff must be positive");
  PruneResult out;
  out.coeffs = Eigen::VectorXd::Zero(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (penalty.diag(i) < cutoff && h(i) != 0.0) {
      out.coeffs(i) = h(i);
      ++out.active_terms;
    }
  }
  return out;
}

double pruning_bound(const std::vector<double>& gammas, double dt, double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("pruning_bound: cutoff must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("pruning_bound: dt must be positive");
  double sum = 0.0;
  for (double g : gammas) {
    if (g < 0.0) throw std::invalid_argument("pruning_bound: negative path speed");
    sum += g * dt;
  }
  return sum / std::sqrt(cutoff);
}

double averaging_bound(int active_terms, double delta) {
  if (active_terms < 1) throw std::invalid_argument("averaging_bound: need at least one term");
  if (!(delta >= 0.0)) throw std::invalid_argument("averaging_bound: negative step length");
  const double root_n = std::sqrt(static_cast<double>(active_terms));
  if (!(delta < 1.0 / root_n)) {
    throw std::invalid_argument("averaging_bound: requires delta < N^{-1/2}");
  }
  return kPi * root_n * delta * delta;
}

double trotter_leading(const std::vector<Matrix>& terms, double delta) {
  if (terms.empty()) return 0.0;
  const Eigen::Index d = terms.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_hermitian(terms[i], "trotter_leading");
    if (terms[i].rows() != d || terms[i].cols() != d) {
      throw std::invalid_argument("trotter_leading: term dimension mismatch");
    }
    for (std::size_t j = 0; j < i; ++j) {
      sum += terms[i] * terms[j] - terms[j] * terms[i];
    }
  }
  return 0.5 * frobenius_norm(sum) * delta * delta;
}

BoundCheckReport empirical_bound_check(const ControlSchedule& schedule,
                                       const NoiseRealization* realization,
                                       const HamiltonianSet& set, const PauliBasis& basis,
                                       const PenaltyMatrix& penalty, double cutoff, int S) {
  schedule.validate();
  set.validate();
  if (set.dim() != basis.dim()) {
    throw std::invalid_argument("empirical_bound_check: basis dimension mismatch");
  }
  if (penalty.size() != basis.size()) {
    throw std::invalid_argument("empirical_bound_check: penalty length mismatch");
  }
  if (S < 1) throw std::invalid_argument("empirical_bound_check: need at least one step");
  if (!(cutoff > 0.0)) throw std::invalid_argument("empirical_bound_check: bad cutoff");

  BoundCheckReport report;
  report.cutoff = cutoff;
  report.step_count = S;

  const std::vector<Piece> full = build_pieces(schedule, realization, set, basis);

  // Pruning: drop expensive directions piece by piece.
  std::vector<Piece> pruned;
  pruned.reserve(full.size());
  std::vector<bool> retained(static_cast<std::size_t>(basis.size()), false);
  double bound_sum = 0.0;
  for (const auto& piece : full) {
    const double gamma = std::sqrt(metric_cost_clean(piece.coeffs, penalty));
    bound_sum += gamma * piece.duration;
    PruneResult pr = prune(piece.coeffs, penalty, cutoff);
    for (Eigen::Index i = 0; i < pr.coeffs.size(); ++i) {
      if (pr.coeffs(i) != 0.0) retained[static_cast<std::size_t>(i)] = true;
    }
    pruned.push_back({std::move(pr.coeffs), piece.duration});
  }
  report.pruning_bound = bound_sum / std::sqrt(cutoff);
  int N = 0;
  for (bool r : retained) N += r ? 1 : 0;
  report.active_terms = N;

  const Matrix U_full = product_exponential(full, basis);
  const Matrix U_pruned = product_exponential(pruned, basis);
  report.pruning_empirical = killing_geodesic_distance(U_full, U_pruned).value;
  report.pruning_within_bound = report.pruning_empirical <= report.pruning_bound + 1e-9;

  // Split the pruned path into S segments of equal inner-product length.
  double total_length = 0.0;
  for (const auto& piece : pruned) total_length += piece.coeffs.norm() * piece.duration;
  report.step_length = total_length / S;

  std::vector<std::vector<Piece>> segments(static_cast<std::size_t>(S));
  {
    std::size_t seg = 0;
    double used = 0.0;  // length consumed in the current segment
    for (Piece piece : pruned) {
      const double speed = piece.coeffs.norm();
      while (piece.duration > 1e-15 && seg + 1 < segments.size()) {
        const double room = report.step_length - used;
        const double piece_len = speed * piece.duration;
        if (piece_len <= room + 1e-15) break;
        // Cut the piece where the segment fills up.
        const double tau = (speed > 0.0) ? room / speed : piece.duration;
        if (tau > 1e-15) {
          segments[seg].push_back({piece.coeffs, tau});
          piece.duration -= tau;
        }
        ++seg;
        used = 0.0;
      }
      if (piece.duration > 0.0) {
        segments[seg].push_back({piece.coeffs, piece.duration});
        used += speed * piece.duration;
      }
    }
  }

  // Per segment: ordered product vs averaged exponential vs trotterized.
  const double root_n = N > 0 ? std::sqrt(static_cast<double>(N)) : 0.0;
  report.averaging_precondition_ok = true;
  report.averaging_within_bound = true;
  Matrix U_avg_total = Matrix::Identity(basis.dim(), basis.dim());
  Matrix U_trot_total = Matrix::Identity(basis.dim(), basis.dim());
  double avg_bound_total = 0.0;
  for (const auto& segment : segments) {
    BoundStepCheck check;
    double seg_time = 0.0;
    Eigen::VectorXd integrated = Eigen::VectorXd::Zero(basis.size());
    Matrix ordered = Matrix::Identity(basis.dim(), basis.dim());
    for (const auto& piece : segment) {
      seg_time += piece.duration;
      integrated += piece.coeffs * piece.duration;
      ordered = expm_neg_i(reconstruct(piece.coeffs, basis), piece.duration) * ordered;
      check.length += piece.coeffs.norm() * piece.duration;
    }
    if (seg_time > 0.0) {
      const Eigen::VectorXd avg_coeffs = integrated / seg_time;
      const Matrix averaged = expm_neg_i(reconstruct(avg_coeffs, basis), seg_time);
      std::vector<Matrix> trotter_terms;
      Matrix trotterized = Matrix::Identity(basis.dim(), basis.dim());
      for (Eigen::Index i = 0; i < avg_coeffs.size(); ++i) {
        if (avg_coeffs(i) == 0.0) continue;
        trotter_terms.push_back(avg_coeffs(i) * basis.matrix(static_cast<int>(i)));
        trotterized = expm_neg_i(trotter_terms.back(), seg_time) * trotterized;
      }
      check.averaging_empirical = killing_geodesic_distance(ordered, averaged).value;
      check.trotter_empirical = killing_geodesic_distance(averaged, trotterized).value;
      check.trotter_leading = rqoc::trotter_leading(trotter_terms, seg_time);
      U_avg_total = averaged * U_avg_total;
      U_trot_total = trotterized * U_trot_total;
    }
    if (N >= 1 && check.length < 1.0 / root_n) {
      check.averaging_bound = kPi * root_n * check.length * check.length;
      avg_bound_total += *check.averaging_bound;
      if (check.averaging_empirical > *check.averaging_bound + 1e-9) {
        report.averaging_within_bound = false;
      }
    } else if (N >= 1) {
      report.averaging_precondition_ok = false;
    }
    report.trotter_leading_total += check.trotter_leading;
    report.steps.push_back(std::move(check));
  }
  if (report.averaging_precondition_ok) report.averaging_bound_total = avg_bound_total;
  report.averaging_empirical_total = killing_geodesic_distance(U_pruned, U_avg_total).value;
  report.trotter_empirical_total = killing_geodesic_distance(U_avg_total, U_trot_total).value;
  return report;
}

}  // namespace rqoc
