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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rqoc/linalg.hpp"

namespace rqoc::experiments {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCsvSchemaVersion = "1";

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int workers = 1;
  // When nonempty the config's "experiment" field must match (the CLI passes
  // the subcommand name here).
  std::string expect_kind;
};

// Exit codes: 0 success, 2 constraint-infeasible result, 3 config error,
// 1 unexpected failure.
struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> outputs;
};

RunResult run_experiment(const nlohmann::ordered_json& config, const RunOptions& options);
RunResult run_experiment_file(const std::string& config_path, const RunOptions& options);

/// Scan oracle: min over theta (and the global phase) of the sup distance
/// between exp(-i theta sigma_x) and the target.
double x_orbit_min_distance(const Matrix& target);

}  // namespace rqoc::experiments
