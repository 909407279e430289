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

#include <algorithm>
#include <vector>

#include "rqoc/noise.hpp"

namespace rqoc::detail {

// Reused buffers for the jump-refined iteration below.
struct SwitchScratch {
  std::vector<double> cuts;
  std::vector<int> alpha;
};

// Visit the constant-generator pieces of [t0, t1): the interval is split at
// every interior jump time of any channel, and on each piece the switching
// state is the right-continuous alpha at the piece start.
//   fn(piece_t0, piece_t1, const std::vector<int>& alpha)
template <typename F>
void for_each_switched_piece(double t0, double t1, const NoiseRealization* r,
                             int channels, SwitchScratch& scratch, F&& fn) {
  scratch.alpha.assign(static_cast<std::size_t>(channels), 1);
  if (r == nullptr) {
    fn(t0, t1, scratch.alpha);
    return;
  }
  scratch.cuts.clear();
  for (int c = 0; c < channels; ++c) {
    const auto& js = r->jumps(c);
    auto it = std::upper_bound(js.begin(), js.end(), t0);
    for (; it != js.end() && *it < t1; ++it) scratch.cuts.push_back(*it);
  }
  std::sort(scratch.cuts.begin(), scratch.cuts.end());
  double a = t0;
  for (std::size_t i = 0; i <= scratch.cuts.size(); ++i) {
    const double b = (i < scratch.cuts.size()) ? scratch.cuts[i] : t1;
    if (b > a) {
      for (int c = 0; c < channels; ++c) {
        scratch.alpha[static_cast<std::size_t>(c)] = r->alpha_at(c, a);
      }
      fn(a, b, scratch.alpha);
      a = b;
    }
  }
}

}  // namespace rqoc::detail
