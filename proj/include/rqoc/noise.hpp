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

#include <nlohmann/json_fwd.hpp>

namespace rqoc {

/// Rates of the bang-bang switching process. lambda_e governs error onset
/// (holding times while the channel is clean), lambda_c error clearing.
/// A zero rate means an infinite holding time in that state.
struct NoiseParams {
  double lambda_e = 0.0;
  double lambda_c = 0.0;

  void validate() const;
};

/// One realization of the per-channel switching signals alpha_j(t) on
/// [0, horizon]. Each channel starts clean (alpha = 1) and flips at each
/// jump time; alpha is right-continuous at jumps.
class NoiseRealization {
 public:
  NoiseRealization(std::vector<std::vector<double>> channel_jumps, double horizon);

  int channel_count() const { return static_cast<int>(channel_jumps_.size()); }
  double horizon() const { return horizon_; }
  const std::vector<double>& jumps(int channel) const;

  /// 0/1 value of alpha at time t in [0, horizon].
  int alpha_at(int channel, double t) const;

  /// Lebesgue measure of {t <= T : alpha(t) = 0}, exact from the intervals.
  double error_measure(int channel, double T) const;

  nlohmann::ordered_json to_json() const;
  static NoiseRealization from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<std::vector<double>> channel_jumps_;
  double horizon_;
};

struct ScenarioSet {
  std::uint64_t seed = 0;
  NoiseParams params;
  double horizon = 0.0;
  std::vector<NoiseRealization> realizations;

  int size() const { return static_cast<int>(realizations.size()); }
};

/// Draw one realization. Streams are keyed by (seed, scenario_index,
/// channel), so any scenario/channel can be regenerated independently of
/// evaluation order, bit-for-bit.
NoiseRealization sample_realization(const NoiseParams& params, double horizon,
                                    int channels, std::uint64_t seed,
                                    std::uint64_t scenario_index = 0);

ScenarioSet build_scenarios(const NoiseParams& params, double horizon, int channels,
                            int count, std::uint64_t seed);

/// Filter predicate for the error-measure envelope: true when every
/// channel spends at least min_measure time units in error up to T.
bool in_error_measure_set(const NoiseRealization& r, double T, double min_measure);

}  // namespace rqoc
