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

#include "rqoc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "detail/splitmix.hpp"

namespace rqoc {

void NoiseParams::validate() const {
  if (!(lambda_e >= 0.0) || !std::isfinite(lambda_e) ||
      !(lambda_c >= 0.0) || !std::isfinite(lambda_c)) {
    throw std::invalid_argument("NoiseParams: rates must be finite and nonnegative");
  }
}

NoiseRealization::NoiseRealization(std::vector<std::vector<double>> channel_jumps,
                                   double horizon)
    : channel_jumps_(std::move(channel_jumps)), horizon_(horizon) {
  if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("NoiseRealization: bad horizon");
  }
  for (const auto& jumps : channel_jumps_) {
    double prev = 0.0;
    bool first = true;
    for (double t : jumps) {
      if (!std::isfinite(t) || t < 0.0 || t > horizon_) {
        throw std::invalid_argument("NoiseRealization: jump time outside [0, horizon]");
      }
      if (!first && t <= prev) {
        throw std::invalid_argument("NoiseRealization: jump times not strictly increasing");
      }
      prev = t;
      first = false;
    }
  }
}

const std::vector<double>& NoiseRealization::jumps(int channel) const {
  if (channel < 0 || channel >= channel_count()) {
    throw std::out_of_range("NoiseRealization: channel out of range");
  }
  return channel_jumps_[static_cast<std::size_t>(channel)];
}

int NoiseRealization::alpha_at(int channel, double t) const {
  const auto& js = jumps(channel);
  if (!(t >= 0.0) || t > horizon_) {
    throw std::invalid_argument("NoiseRealization: time outside [0, horizon]");
  }
  // Right-continuous: a jump at exactly t counts as already taken.
  const auto past = std::upper_bound(js.begin(), js.end(), t) - js.begin();
  return (past % 2 == 0) ? 1 : 0;
}

double NoiseRealization::error_measure(int channel, double T) const {
  const auto& js = jumps(channel);
  if (!(T >= 0.0) || T > horizon_) {
    throw std::invalid_argument("NoiseRealization: T outside [0, horizon]");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < js.size(); i += 2) {
    const double start = js[i];
    if (start >= T) break;
    const double end = (i + 1 < js.size()) ? std::min(js[i + 1], T) : T;
    total += end - start;
  }
  return total;
}

nlohmann::ordered_json NoiseRealization::to_json() const {
  nlohmann::ordered_json j;
  j["horizon"] = horizon_;
  nlohmann::ordered_json chans = nlohmann::ordered_json::array();
  for (const auto& jumps : channel_jumps_) chans.push_back(jumps);
  j["channel_jumps"] = std::move(chans);
  return j;
}

NoiseRealization NoiseRealization::from_json(const nlohmann::ordered_json& j) {
  std::vector<std::vector<double>> chans;
  for (const auto& c : j.at("channel_jumps")) {
    chans.push_back(c.get<std::vector<double>>());
  }
  return NoiseRealization(std::move(chans), j.at("horizon").get<double>());
}

namespace {

// Exponential holding time by inversion; rate 0 never fires.
double exp_holding(detail::SplitMix64& g, double rate) {
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(g.next_u01()) / rate;
}

}  // namespace

NoiseRealization sample_realization(const NoiseParams& params, double horizon,
                                    int channels, std::uint64_t seed,
                                    std::uint64_t scenario_index) {
  params.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("sample_realization: horizon must be positive");
  }
  if (channels < 1) throw std::invalid_argument("sample_realization: need a channel");
  std::vector<std::vector<double>> chans(static_cast<std::size_t>(channels));
  const std::uint64_t scenario_key = detail::mix64(seed, scenario_index);
  for (int c = 0; c < channels; ++c) {
    detail::SplitMix64 g(detail::mix64(scenario_key, static_cast<std::uint64_t>(c)));
    auto& jumps = chans[static_cast<std::size_t>(c)];
    double t = 0.0;
    bool clean = true;  // alpha(0) = 1
    for (;;) {
      t += exp_holding(g, clean ? params.lambda_e : params.lambda_c);
      if (!(t < horizon)) break;
      jumps.push_back(t);
      clean = !clean;
    }
  }
  return NoiseRealization(std::move(chans), horizon);
}

ScenarioSet build_scenarios(const NoiseParams& params, double horizon, int channels,
                            int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("build_scenarios: count must be >= 1");
  ScenarioSet set;
  set.seed = seed;
  set.params = params;
  set.horizon = horizon;
  set.realizations.reserve(static_cast<std::size_t>(count));
  for (int l = 0; l < count; ++l) {
    set.realizations.push_back(
        sample_realization(params, horizon, channels, seed, static_cast<std::uint64_t>(l)));
  }
  return set;
}

bool in_error_measure_set(const NoiseRealization& r, double T, double min_measure) {
  for (int c = 0; c < r.channel_count(); ++c) {
    if (r.error_measure(c, T) < min_measure) return false;
  }
  return true;
}

}  // namespace rqoc
