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

#include "rqoc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail/parallel.hpp"
#include "detail/splitmix.hpp"

namespace rqoc {

namespace {

// Objective plus the smooth closest-approach term used to steer descent
// across the plateaus of the censored hitting-time landscape.
struct Merit {
  double objective = 0.0;
  double approach = 0.0;  // mean closest approach over scenarios

  bool better_than(const Merit& other) const {
    if (objective != other.objective) return objective < other.objective;
    return approach < other.approach;
  }
};

struct Evaluation {
  SaaComponents saa;
  double approach = 0.0;

  Merit merit() const { return {saa.objective, approach}; }
};

class SaaEvaluator {
 public:
  SaaEvaluator(const OCPProblem& problem, const ScenarioSet& scenarios, int workers)
      : problem_(problem), scenarios_(scenarios), workers_(workers) {}

  Evaluation evaluate(const ControlSchedule& schedule) const {
    const int L = scenarios_.size();
    Evaluation ev;
    ev.saa.hitting_times.resize(static_cast<std::size_t>(L));
    ev.saa.hit.assign(static_cast<std::size_t>(L), false);
    std::vector<double> approach(static_cast<std::size_t>(L));
    detail::parallel_for(L, workers_, [&](int l) {
      const auto outcome =
          simulate_hitting(schedule, &scenarios_.realizations[static_cast<std::size_t>(l)],
                           problem_.set, problem_.target, problem_.eta,
                           problem_.phase_invariant);
      const auto sl = static_cast<std::size_t>(l);
      ev.saa.hitting_times[sl] = outcome.hit_time ? *outcome.hit_time : problem_.horizon;
      ev.saa.hit[sl] = outcome.hit_time.has_value();
      approach[sl] = outcome.closest_approach;
    });
    int hits = 0;
    double approach_sum = 0.0;
    for (int l = 0; l < L; ++l) {
      hits += ev.saa.hit[static_cast<std::size_t>(l)] ? 1 : 0;
      approach_sum += approach[static_cast<std::size_t>(l)];
    }
    ev.saa.success_fraction = static_cast<double>(hits) / static_cast<double>(L);
    ev.saa.risk_value = risk(ev.saa.hitting_times, problem_.risk_measure);
    ev.saa.penalty_term =
        problem_.penalty_mu * std::max(0.0, (1.0 - problem_.beta) - ev.saa.success_fraction);
    ev.saa.objective = ev.saa.risk_value + ev.saa.penalty_term;
    ev.approach = approach_sum / static_cast<double>(L);
    return ev;
  }

 private:
  const OCPProblem& problem_;
  const ScenarioSet& scenarios_;
  int workers_;
};

// Scale rows back onto the ||h(t_k)||_2 <= h_max ball.
void project(Eigen::MatrixXd& values, double h_max) {
  for (Eigen::Index k = 0; k < values.rows(); ++k) {
    const double norm = values.row(k).norm();
    if (norm > h_max) values.row(k) *= h_max / norm;
  }
}

Eigen::MatrixXd random_schedule(int steps, int channels, double h_max,
                                detail::SplitMix64& rng) {
  Eigen::MatrixXd values(steps, channels);
  for (Eigen::Index k = 0; k < values.rows(); ++k) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      values(k, j) = 0.7 * h_max * rng.next_symmetric();
    }
  }
  project(values, h_max);
  return values;
}

struct RestartResult {
  ControlSchedule schedule;
  Evaluation eval;
  int iterations = 0;
  bool stalled = false;
  std::vector<IterationRecord> log;
};

RestartResult descend(const OCPProblem& problem, const SaaEvaluator& evaluator,
                      Eigen::MatrixXd init, const OptimizeConfig& config) {
  RestartResult res;
  res.schedule = ControlSchedule{problem.dt, std::move(init), problem.h_max};
  res.eval = evaluator.evaluate(res.schedule);
  res.log.push_back({0, res.eval.saa.objective, res.eval.saa.risk_value,
                     res.eval.saa.success_fraction, res.eval.approach, 0.0});

  const int steps = res.schedule.steps();
  const int channels = res.schedule.channel_count();
  double step_size = config.init_step;
  // Central differences on the combined surrogate; the fd step is widened
  // when the landscape is locally flat at the base resolution.
  const double fd_ladder[3] = {config.fd_step, 4.0 * config.fd_step, 16.0 * config.fd_step};

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    Eigen::MatrixXd gradient(steps, channels);
    bool have_gradient = false;
    for (double fd : fd_ladder) {
      const int nvars = steps * channels;
      std::vector<double> plus(static_cast<std::size_t>(nvars));
      std::vector<double> minus(static_cast<std::size_t>(nvars));
      detail::parallel_for(nvars, config.workers, [&](int v) {
        const int k = v / channels;
        const int j = v % channels;
        ControlSchedule probe = res.schedule;
        probe.values(k, j) += fd;
        project(probe.values, problem.h_max);
        const Evaluation ep = evaluator.evaluate(probe);
        plus[static_cast<std::size_t>(v)] =
            ep.saa.objective + config.shaping_weight * ep.approach;
        probe.values = res.schedule.values;
        probe.values(k, j) -= fd;
        project(probe.values, problem.h_max);
        const Evaluation em = evaluator.evaluate(probe);
        minus[static_cast<std::size_t>(v)] =
            em.saa.objective + config.shaping_weight * em.approach;
      });
      double norm2 = 0.0;
      for (int v = 0; v < nvars; ++v) {
        const double g =
            (plus[static_cast<std::size_t>(v)] - minus[static_cast<std::size_t>(v)]) /
            (2.0 * fd);
        gradient(v / channels, v % channels) = g;
        norm2 += g * g;
      }
      if (norm2 > 1e-24) {
        have_gradient = true;
        gradient /= std::sqrt(norm2);
        break;
      }
    }
    if (!have_gradient) {
      res.stalled = true;
      res.iterations = iter - 1;
      return res;
    }

    // Backtracking on the normalized descent direction. A step is accepted
    // only if it does not increase the objective, with exact objective ties
    // broken by the closest approach.
    bool accepted = false;
    while (step_size >= config.min_step) {
      ControlSchedule candidate = res.schedule;
      candidate.values -= step_size * gradient;
      project(candidate.values, problem.h_max);
      const Evaluation ec = evaluator.evaluate(candidate);
      if (ec.merit().better_than(res.eval.merit())) {
        res.schedule = std::move(candidate);
        res.eval = ec;
        res.log.push_back({iter, ec.saa.objective, ec.saa.risk_value,
                           ec.saa.success_fraction, ec.approach, step_size});
        accepted = true;
        step_size = std::min(1.5 * step_size, config.init_step);
        break;
      }
      step_size *= 0.5;
    }
    if (!accepted) {
      res.stalled = true;
      res.iterations = iter;
      return res;
    }
    res.iterations = iter;
  }
  return res;
}

}  // namespace

RiskMeasure RiskMeasure::cvar(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("RiskMeasure: cvar gamma must lie in (0, 1]");
  }
  return {Kind::cvar, gamma};
}

double risk(const std::vector<double>& values, const RiskMeasure& measure) {
  if (values.empty()) throw std::invalid_argument("risk: empty value list");
  if (measure.kind == RiskMeasure::Kind::expectation) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  if (!(measure.gamma > 0.0) || measure.gamma > 1.0) {
    throw std::invalid_argument("risk: cvar gamma must lie in (0, 1]");
  }
  const auto L = values.size();
  const auto tail = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(L),
                       std::ceil(measure.gamma * static_cast<double>(L))));
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < tail; ++i) sum += sorted[i];
  return sum / static_cast<double>(tail);
}

int OCPProblem::steps() const {
  return static_cast<int>(std::llround(horizon / dt));
}

void OCPProblem::validate() const {
  set.validate();
  if (target.rows() != set.dim() || target.cols() != set.dim()) {
    throw std::invalid_argument("OCPProblem: target dimension mismatch");
  }
  require_unitary(target, "OCPProblem target");
  if (!(eta > 0.0) || !(eta < 2.0)) {
    throw std::invalid_argument("OCPProblem: eta must lie in (0, 2)");
  }
  if (!(beta >= 0.0) || beta > 1.0) {
    throw std::invalid_argument("OCPProblem: beta must lie in [0, 1]");
  }
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("OCPProblem: need positive dt and horizon");
  }
  const double k = horizon / dt;
  if (std::abs(k - std::llround(k)) > 1e-9 || std::llround(k) < 1) {
    throw std::invalid_argument("OCPProblem: horizon must be an integral number of steps");
  }
  if (!(h_max > 0.0)) throw std::invalid_argument("OCPProblem: h_max must be positive");
  if (!(penalty_mu >= 0.0)) throw std::invalid_argument("OCPProblem: penalty_mu must be >= 0");
}

SaaComponents saa_objective(const ControlSchedule& schedule, const ScenarioSet& scenarios,
                            const OCPProblem& problem, int workers) {
  problem.validate();
  if (scenarios.size() < 1) throw std::invalid_argument("saa_objective: empty scenario set");
  if (scenarios.horizon < problem.horizon - 1e-12) {
    throw std::invalid_argument("saa_objective: scenario horizon shorter than problem horizon");
  }
  return SaaEvaluator(problem, scenarios, workers).evaluate(schedule).saa;
}

OptimizationReport optimize(const OCPProblem& problem, const ScenarioSet& scenarios,
                            const OptimizeConfig& config) {
  problem.validate();
  if (scenarios.size() < 1) throw std::invalid_argument("optimize: empty scenario set");
  if (scenarios.horizon < problem.horizon - 1e-12) {
    throw std::invalid_argument("optimize: scenario horizon shorter than problem horizon");
  }
  if (config.restarts < 1) throw std::invalid_argument("optimize: need at least one restart");

  const SaaEvaluator evaluator(problem, scenarios, config.workers);
  const int steps = problem.steps();
  const int channels = problem.set.channel_count();

  OptimizationReport best;
  Merit best_merit;
  bool have_best = false;
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::MatrixXd init;
    if (r == 0) {
      init = Eigen::MatrixXd::Zero(steps, channels);
    } else {
      detail::SplitMix64 rng(detail::mix64(config.init_seed, static_cast<std::uint64_t>(r)));
      init = random_schedule(steps, channels, problem.h_max, rng);
    }
    RestartResult res = descend(problem, evaluator, std::move(init), config);
    if (!std::isfinite(res.eval.saa.objective)) {
      throw std::runtime_error("optimize: non-finite objective encountered");
    }
    if (!have_best || res.eval.merit().better_than(best_merit)) {
      best.schedule = res.schedule;
      best.objective = res.eval.saa.objective;
      best.risk_value = res.eval.saa.risk_value;
      best.success_fraction = res.eval.saa.success_fraction;
      best.iterations = res.iterations;
      best.converged = res.eval.saa.success_fraction >= (1.0 - problem.beta) - 1e-12;
      best.seed = config.init_seed;
      best.restart_index = r;
      best.log = res.log;
      best_merit = res.eval.merit();
      have_best = true;
    }
  }
  return best;
}

OptimizationReport solve_deterministic(const OCPProblem& problem,
                                       const OptimizeConfig& config) {
  OCPProblem det = problem;
  det.beta = 0.0;
  det.risk_measure = RiskMeasure::expectation();
  const ScenarioSet noise_free =
      build_scenarios(NoiseParams{0.0, 0.0}, problem.horizon,
                      problem.set.channel_count(), 1, 0);
  return optimize(det, noise_free, config);
}

}  // namespace rqoc
