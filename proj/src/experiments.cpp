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

#include "rqoc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rqoc/bounds.hpp"
#include "rqoc/dynamics.hpp"
#include "rqoc/metrics.hpp"
#include "rqoc/optimizer.hpp"
#include "rqoc/pauli.hpp"
#include "detail/splitmix.hpp"

namespace rqoc::experiments {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

const json& require_key(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required key '" + key + "'");
  return *it;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      fail(path, "unknown key '" + item.key() + "'");
    }
  }
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) fail(path, "expected an integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

double get_double(const json& obj, const std::string& path, const std::string& key) {
  return as_double(require_key(obj, path, key), path + "." + key);
}

double get_double_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as_double(obj.at(key), path + "." + key);
}

int get_int_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as_int(obj.at(key), path + "." + key);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Output writers

class OutputSink {
 public:
  OutputSink(const RunOptions& options, const json& config, const std::string& kind,
             std::uint64_t seed)
      : dir_(options.out_dir), kind_(kind), seed_(seed) {
    fs::create_directories(dir_);
    config_hash_ = fnv1a64(config.dump());
    started_at_ = iso_timestamp();
  }

  std::string write_json(const std::string& name, const json& payload) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << payload.dump(2) << "\n";
    outputs_.push_back(path.string());
    return path.string();
  }

  std::string write_csv(const std::string& name, const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& rows) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c) {
      out << (c == 0 ? "" : ",") << header[c];
    }
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c == 0 ? "" : ",") << format_double(row[c]);
      }
      out << "\n";
    }
    outputs_.push_back(path.string());
    return path.string();
  }

  void finalize_manifest() {
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["csv_schema_version"] = kCsvSchemaVersion;
    manifest["experiment"] = kind_;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash_));
    manifest["config_hash"] = hash;
    manifest["seed"] = seed_;
    manifest["started_at"] = started_at_;
    manifest["finished_at"] = iso_timestamp();
    json files = json::array();
    for (const auto& f : outputs_) files.push_back(fs::path(f).filename().string());
    manifest["outputs"] = std::move(files);
    write_json("manifest.json", manifest);
  }

  const std::vector<std::string>& outputs() const { return outputs_; }

 private:
  std::string dir_;
  std::string kind_;
  std::uint64_t seed_;
  std::uint64_t config_hash_ = 0;
  std::string started_at_;
  std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------------------
// Config parsing

Matrix parse_dense(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of rows");
  const std::size_t d = v.size();
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    const json& row = v.at(r);
    if (!row.is_array() || row.size() != d) fail(path, "matrix rows must have equal length");
    for (std::size_t c = 0; c < d; ++c) {
      const json& e = row.at(c);
      if (!e.is_array() || e.size() != 2) {
        fail(path, "entries must be [re, im] pairs");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(as_double(e.at(0), path), as_double(e.at(1), path));
    }
  }
  return m;
}

int label_position(const std::string& label, const PauliBasis& basis, const std::string& path) {
  for (int i = 0; i < basis.size(); ++i) {
    if (basis.element(i).label() == label) return i;
  }
  fail(path, "'" + label + "' is not a Pauli label for n = " +
                 std::to_string(basis.qubit_count()));
}

Matrix parse_operator(const json& v, const std::string& path, const PauliBasis& basis) {
  if (v.is_string()) {
    return basis.matrix(label_position(v.get<std::string>(), basis, path));
  }
  if (v.is_object()) {
    check_keys(v, path, {"terms", "dense"});
    if (v.contains("dense")) {
      Matrix m = parse_dense(v.at("dense"), path + ".dense");
      if (m.rows() != basis.dim()) fail(path + ".dense", "dimension does not match n");
      return m;
    }
    if (v.contains("terms")) {
      const json& terms = v.at("terms");
      if (!terms.is_array() || terms.empty()) fail(path + ".terms", "expected a nonempty array");
      Matrix m = Matrix::Zero(basis.dim(), basis.dim());
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const json& term = terms.at(i);
        const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
        if (!term.is_array() || term.size() != 2) fail(tpath, "expected [label, coeff]");
        const std::string label = as_string(term.at(0), tpath);
        m += as_double(term.at(1), tpath) * basis.matrix(label_position(label, basis, tpath));
      }
      return m;
    }
    fail(path, "expected 'terms' or 'dense'");
  }
  fail(path, "expected a Pauli label string or an object");
}

struct ParsedHamiltonians {
  HamiltonianSet set;
  PauliBasis basis;
};

ParsedHamiltonians parse_hamiltonians(const json& v, const std::string& path) {
  check_keys(v, path, {"n", "channels"});
  const int n = as_int(require_key(v, path, "n"), path + ".n");
  if (n < 1 || n > kMaxQubits) fail(path + ".n", "qubit count must be in [1, 6]");
  PauliBasis basis(n);
  HamiltonianSet set;
  set.n = n;
  const json& channels = require_key(v, path, "channels");
  if (!channels.is_array() || channels.empty()) {
    fail(path + ".channels", "expected a nonempty array");
  }
  for (std::size_t j = 0; j < channels.size(); ++j) {
    const std::string cpath = path + ".channels[" + std::to_string(j) + "]";
    const json& ch = channels.at(j);
    check_keys(ch, cpath, {"intended", "error"});
    HamiltonianChannel channel;
    channel.intended = parse_operator(require_key(ch, cpath, "intended"), cpath + ".intended", basis);
    channel.error = ch.contains("error")
                        ? parse_operator(ch.at("error"), cpath + ".error", basis)
                        : channel.intended;
    set.channels.push_back(std::move(channel));
  }
  try {
    set.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return {std::move(set), std::move(basis)};
}

Matrix parse_target(const json& v, const std::string& path, int dim) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "identity") return Matrix::Identity(dim, dim);
    if (name == "hadamard") {
      if (dim != 2) fail(path, "hadamard target requires n = 1");
      Matrix h(2, 2);
      const double s = 1.0 / std::sqrt(2.0);
      h << s, s, s, -s;
      return h;
    }
    if (name == "pauli_x") {
      if (dim != 2) fail(path, "pauli_x target requires n = 1");
      Matrix x(2, 2);
      x << 0, 1, 1, 0;
      return x;
    }
    fail(path, "unknown target '" + name + "' (use hadamard, pauli_x, identity, or a dense matrix)");
  }
  if (v.is_object()) {
    check_keys(v, path, {"dense"});
    Matrix m = parse_dense(require_key(v, path, "dense"), path + ".dense");
    if (m.rows() != dim) fail(path + ".dense", "dimension does not match n");
    if (!is_unitary(m)) fail(path + ".dense", "target is not unitary");
    return m;
  }
  fail(path, "expected a gate name or a dense matrix");
}

NoiseParams parse_noise(const json& v, const std::string& path, bool* none) {
  *none = false;
  if (v.is_string()) {
    if (v.get<std::string>() == "none") {
      *none = true;
      return NoiseParams{0.0, 0.0};
    }
    fail(path, "expected 'none' or an object with rates");
  }
  check_keys(v, path, {"lambda_e", "lambda_c"});
  NoiseParams params;
  params.lambda_e = get_double(v, path, "lambda_e");
  params.lambda_c = get_double(v, path, "lambda_c");
  try {
    params.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return params;
}

ControlSchedule parse_schedule_csv(const std::string& file, const std::string& path,
                                   double h_max) {
  std::ifstream in(file);
  if (!in) fail(path, "referenced file does not exist: " + file);
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty schedule file");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) fail(path, "schedule needs at least two grid rows");
  const std::size_t cols = rows.front().size();
  if (cols < 2) fail(path, "schedule needs a time column and a control column");
  const double dt = rows[1][0] - rows[0][0];
  ControlSchedule schedule;
  schedule.dt = dt;
  schedule.h_max = h_max;
  schedule.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(cols - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(path, "ragged schedule row");
    const double expect_t = rows[0][0] + dt * static_cast<double>(r);
    if (std::abs(rows[r][0] - expect_t) > 1e-9) fail(path, "non-uniform time grid");
    for (std::size_t c = 1; c < cols; ++c) {
      schedule.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
          rows[r][c];
    }
  }
  return schedule;
}

ControlSchedule parse_schedule(const json& v, const std::string& path) {
  check_keys(v, path, {"dt", "h_max", "values", "csv"});
  const double h_max = get_double(v, path, "h_max");
  if (v.contains("csv")) {
    if (v.contains("values") || v.contains("dt")) {
      fail(path, "'csv' excludes inline 'values'/'dt'");
    }
    ControlSchedule schedule =
        parse_schedule_csv(as_string(v.at("csv"), path + ".csv"), path + ".csv", h_max);
    try {
      schedule.validate();
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
    return schedule;
  }
  ControlSchedule schedule;
  schedule.dt = get_double(v, path, "dt");
  schedule.h_max = h_max;
  const json& values = require_key(v, path, "values");
  if (!values.is_array() || values.empty()) fail(path + ".values", "expected rows");
  const std::size_t m = values.at(0).is_array() ? values.at(0).size() : 0;
  if (m == 0) fail(path + ".values", "rows must be nonempty arrays");
  schedule.values.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < values.size(); ++r) {
    const json& row = values.at(r);
    if (!row.is_array() || row.size() != m) fail(path + ".values", "ragged rows");
    for (std::size_t c = 0; c < m; ++c) {
      schedule.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_double(row.at(c), path + ".values");
    }
  }
  try {
    schedule.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return schedule;
}

MetricKind parse_metric(const json& v, const std::string& path) {
  check_keys(v, path, {"kind", "param"});
  const std::string kind = as_string(require_key(v, path, "kind"), path + ".kind");
  const bool has_param = v.contains("param");
  const auto param = [&]() { return get_double(v, path, "param"); };
  if (kind == "killing") return MetricKind::killing();
  if (kind == "cliff") return MetricKind::cliff();
  if (!has_param) fail(path, "metric '" + kind + "' needs 'param'");
  if (kind == "binomial") return MetricKind::binomial(param());
  if (kind == "exponential") return MetricKind::exponential(param());
  if (kind == "single_qubit_zz") return MetricKind::single_qubit_zz(param());
  if (kind == "two_qubit_weight2") return MetricKind::two_qubit_weight2(param());
  fail(path + ".kind", "unknown metric kind '" + kind + "'");
}

RiskMeasure parse_risk(const json& v, const std::string& path) {
  check_keys(v, path, {"kind", "gamma"});
  const std::string kind = as_string(require_key(v, path, "kind"), path + ".kind");
  if (kind == "expectation") return RiskMeasure::expectation();
  if (kind == "cvar") {
    return RiskMeasure::cvar(get_double(v, path, "gamma"));
  }
  fail(path + ".kind", "unknown risk kind '" + kind + "'");
}

OptimizeConfig parse_optimizer(const json& parent, const std::string& parent_path,
                               std::uint64_t seed, int workers) {
  OptimizeConfig config;
  config.init_seed = seed;
  config.workers = workers;
  if (!parent.contains("optimizer")) return config;
  const json& v = parent.at("optimizer");
  const std::string path = parent_path + ".optimizer";
  check_keys(v, path,
             {"max_iters", "fd_step", "init_step", "min_step", "restarts", "shaping_weight"});
  config.max_iters = get_int_or(v, path, "max_iters", config.max_iters);
  config.fd_step = get_double_or(v, path, "fd_step", config.fd_step);
  config.init_step = get_double_or(v, path, "init_step", config.init_step);
  config.min_step = get_double_or(v, path, "min_step", config.min_step);
  config.restarts = get_int_or(v, path, "restarts", config.restarts);
  config.shaping_weight = get_double_or(v, path, "shaping_weight", config.shaping_weight);
  return config;
}

void fill_random_schedule(ControlSchedule& schedule, std::uint64_t seed) {
  detail::SplitMix64 rng(detail::mix64(seed, 0x9d2c5680ULL));
  for (Eigen::Index k = 0; k < schedule.values.rows(); ++k) {
    for (Eigen::Index j = 0; j < schedule.values.cols(); ++j) {
      schedule.values(k, j) = 0.7 * schedule.h_max * rng.next_symmetric();
    }
    const double norm = schedule.values.row(k).norm();
    if (norm > schedule.h_max) schedule.values.row(k) *= schedule.h_max / norm;
  }
}

std::uint64_t parse_seed(const json& config, const RunOptions& options) {
  if (options.seed_override) return *options.seed_override;
  if (!config.contains("seed")) {
    fail("$.seed", "a seed is mandatory for stochastic experiments");
  }
  return as_u64(config.at("seed"), "$.seed");
}

// ---------------------------------------------------------------------------
// Shared output pieces

json report_to_json(const OptimizationReport& report) {
  json j;
  j["objective"] = report.objective;
  j["risk_value"] = report.risk_value;
  j["success_fraction"] = report.success_fraction;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["seed"] = report.seed;
  j["restart_index"] = report.restart_index;
  json log = json::array();
  for (const auto& rec : report.log) {
    json r;
    r["iteration"] = rec.iteration;
    r["objective"] = rec.objective;
    r["risk_value"] = rec.risk_value;
    r["success_fraction"] = rec.success_fraction;
    r["closest_approach"] = rec.closest_approach;
    r["step_size"] = rec.step_size;
    log.push_back(std::move(r));
  }
  j["log"] = std::move(log);
  return j;
}

std::vector<std::string> schedule_header(int channels) {
  std::vector<std::string> header{"t"};
  for (int j = 1; j <= channels; ++j) header.push_back("h_" + std::to_string(j));
  return header;
}

void write_schedule_csv(OutputSink& sink, const std::string& name,
                        const ControlSchedule& schedule) {
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < schedule.steps(); ++k) {
    std::vector<double> row{schedule.dt * k};
    for (int j = 0; j < schedule.channel_count(); ++j) row.push_back(schedule.values(k, j));
    rows.push_back(std::move(row));
  }
  sink.write_csv(name, schedule_header(schedule.channel_count()), rows);
}

std::vector<std::string> unitary_header(int d) {
  std::vector<std::string> header{"t"};
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      header.push_back("u" + std::to_string(r) + std::to_string(c) + "_re");
      header.push_back("u" + std::to_string(r) + std::to_string(c) + "_im");
    }
  }
  return header;
}

void write_trajectory_csvs(OutputSink& sink, const std::string& tag, const Trajectory& traj) {
  const int d = static_cast<int>(traj.unitaries.front().rows());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < traj.unitaries.size(); ++k) {
    std::vector<double> row{traj.dt * static_cast<double>(k)};
    const Matrix& U = traj.unitaries[k];
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        row.push_back(U(r, c).real());
        row.push_back(U(r, c).imag());
      }
    }
    rows.push_back(std::move(row));
  }
  sink.write_csv("unitary_" + tag + ".csv", unitary_header(d), rows);
}

void write_bloch_csv(OutputSink& sink, const std::string& name, const Trajectory& traj) {
  Vector psi0(2);
  psi0 << 1.0, 0.0;
  const auto states = apply_to_state(traj, psi0);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto bloch = bloch_coordinates(states[k]);
    rows.push_back({traj.dt * static_cast<double>(k), bloch[0], bloch[1], bloch[2]});
  }
  sink.write_csv(name, {"t", "bx", "by", "bz"}, rows);
}

// ---------------------------------------------------------------------------
// Experiment runners

RunResult run_basis(const json& config, const RunOptions& options) {
  check_keys(config, "$", {"experiment", "n", "seed"});
  const int n = as_int(require_key(config, "$", "n"), "$.n");
  if (n < 1 || n > kMaxQubits) fail("$.n", "qubit count must be in [1, 6]");
  OutputSink sink(options, config, "basis", 0);
  PauliBasis basis(n);
  json j;
  j["n"] = n;
  j["size"] = basis.size();
  json elements = json::array();
  for (int i = 0; i < basis.size(); ++i) {
    json e;
    e["position"] = i;
    e["index"] = basis.element(i).index();
    e["label"] = basis.element(i).label();
    e["weight"] = basis.element(i).weight();
    elements.push_back(std::move(e));
  }
  j["elements"] = std::move(elements);
  sink.write_json("basis.json", j);
  sink.finalize_manifest();
  return {0, "", sink.outputs()};
}

RunResult run_metrics(const json& config, const RunOptions& options) {
  check_keys(config, "$", {"experiment", "n", "metric", "clean_cost", "noisy_cost", "seed"});
  const int n = as_int(require_key(config, "$", "n"), "$.n");
  if (n < 1 || n > kMaxQubits) fail("$.n", "qubit count must be in [1, 6]");
  PauliBasis basis(n);
  const MetricKind kind = parse_metric(require_key(config, "$", "metric"), "$.metric");
  PenaltyMatrix penalty;
  try {
    penalty = build_penalty(kind, basis);
  } catch (const std::exception& e) {
    fail("$.metric", e.what());
  }
  OutputSink sink(options, config, "metrics", 0);
  json j;
  j["n"] = n;
  j["metric"] = kind.name();
  json diag = json::array();
  for (int i = 0; i < basis.size(); ++i) {
    json e;
    e["label"] = basis.element(i).label();
    e["weight"] = basis.element(i).weight();
    e["penalty"] = penalty.diag(i);
    diag.push_back(std::move(e));
  }
  j["penalties"] = std::move(diag);

  if (config.contains("clean_cost")) {
    const json& cc = config.at("clean_cost");
    check_keys(cc, "$.clean_cost", {"coeffs"});
    const json& coeffs = require_key(cc, "$.clean_cost", "coeffs");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != basis.size()) {
      fail("$.clean_cost.coeffs", "expected " + std::to_string(basis.size()) + " coefficients");
    }
    Eigen::VectorXd h(basis.size());
    for (int i = 0; i < basis.size(); ++i) h(i) = as_double(coeffs.at(i), "$.clean_cost.coeffs");
    j["clean_cost"] = metric_cost_clean(h, penalty);
  }

  if (config.contains("noisy_cost")) {
    const json& nc = config.at("noisy_cost");
    const std::string path = "$.noisy_cost";
    check_keys(nc, path, {"channel_dirs", "h", "alpha", "noisy"});
    const json& dirs = require_key(nc, path, "channel_dirs");
    const json& hv = require_key(nc, path, "h");
    const json& av = require_key(nc, path, "alpha");
    const json& noisy = require_key(nc, path, "noisy");
    if (!dirs.is_array() || dirs.empty()) fail(path + ".channel_dirs", "expected labels");
    const std::size_t m = dirs.size();
    if (hv.size() != m || av.size() != m || noisy.size() != m) {
      fail(path, "channel_dirs, h, alpha, and noisy must have equal length");
    }
    std::vector<int> channel_dirs;
    std::vector<int> alpha;
    Eigen::VectorXd h(static_cast<Eigen::Index>(m));
    std::vector<Matrix> noisy_set;
    for (std::size_t i = 0; i < m; ++i) {
      channel_dirs.push_back(label_position(as_string(dirs.at(i), path + ".channel_dirs"),
                                            basis, path + ".channel_dirs"));
      h(static_cast<Eigen::Index>(i)) = as_double(hv.at(i), path + ".h");
      const int a = as_int(av.at(i), path + ".alpha");
      if (a != 0 && a != 1) fail(path + ".alpha", "alpha entries must be 0 or 1");
      alpha.push_back(a);
      noisy_set.push_back(
          parse_operator(noisy.at(i), path + ".noisy[" + std::to_string(i) + "]", basis));
    }
    const Eigen::MatrixXd M = expansion_matrix(noisy_set, basis);
    const auto cmp = metric_cost_noisy_paper(channel_dirs, h, alpha, M, basis, penalty);
    json costs;
    costs["oracle"] = cmp.oracle;
    costs["paper"] = cmp.paper;
    costs["discrepancy"] = cmp.discrepancy;
    j["noisy_cost"] = std::move(costs);
  }

  sink.write_json("metrics.json", j);
  sink.finalize_manifest();
  return {0, "", sink.outputs()};
}

RunResult run_simulate(const json& config, const RunOptions& options) {
  check_keys(config, "$",
             {"experiment", "hamiltonians", "schedule", "noise", "scenarios", "seed", "target",
              "eta", "phase_invariant"});
  auto parsed = parse_hamiltonians(require_key(config, "$", "hamiltonians"), "$.hamiltonians");
  ControlSchedule schedule = parse_schedule(require_key(config, "$", "schedule"), "$.schedule");
  if (schedule.channel_count() != parsed.set.channel_count()) {
    fail("$.schedule", "channel count does not match the Hamiltonian set");
  }
  bool no_noise = false;
  const NoiseParams noise = parse_noise(require_key(config, "$", "noise"), "$.noise", &no_noise);
  const int L = get_int_or(config, "$", "scenarios", 1);
  if (L < 1) fail("$.scenarios", "need at least one scenario");
  if (no_noise && L != 1) fail("$.scenarios", "noise 'none' implies a single scenario");
  const std::uint64_t seed = no_noise ? 0 : parse_seed(config, options);

  std::optional<Matrix> target;
  double eta = 0.0;
  bool phase_invariant = true;
  if (config.contains("target")) {
    target = parse_target(config.at("target"), "$.target", parsed.set.dim());
    eta = get_double(config, "$", "eta");
    if (!(eta > 0.0)) fail("$.eta", "eta must be positive");
    if (config.contains("phase_invariant")) {
      phase_invariant = as_bool(config.at("phase_invariant"), "$.phase_invariant");
    }
  } else if (config.contains("eta") || config.contains("phase_invariant")) {
    fail("$.eta", "eta/phase_invariant need a target");
  }

  OutputSink sink(options, config, "simulate", seed);
  const ScenarioSet scenarios =
      build_scenarios(noise, schedule.horizon(), parsed.set.channel_count(), L, seed);

  json summary;
  summary["scenarios"] = L;
  summary["horizon"] = schedule.horizon();
  json per_scenario = json::array();
  int hits = 0;
  for (int l = 0; l < L; ++l) {
    char tag[16];
    std::snprintf(tag, sizeof(tag), "s%03d", l);
    const NoiseRealization& realization = scenarios.realizations[static_cast<std::size_t>(l)];
    const NoiseRealization* r = no_noise ? nullptr : &realization;
    const Trajectory traj = propagate(schedule, r, parsed.set);
    write_trajectory_csvs(sink, tag, traj);
    if (parsed.set.dim() == 2) write_bloch_csv(sink, std::string("bloch_") + tag + ".csv", traj);
    json s;
    s["scenario"] = l;
    s["realization"] = no_noise ? json("none") : json(realization.to_json());
    if (target) {
      const auto hit = hitting_time(traj, *target, eta, phase_invariant);
      s["hit"] = hit.has_value();
      s["hitting_time"] = hit ? json(*hit) : json(nullptr);
      if (hit) ++hits;
      s["final_distance"] = sup_distance(traj.unitaries.back(), *target, phase_invariant);
    }
    per_scenario.push_back(std::move(s));
  }
  summary["per_scenario"] = std::move(per_scenario);
  if (target) {
    summary["success_fraction"] = static_cast<double>(hits) / static_cast<double>(L);
  }
  sink.write_json("summary.json", summary);
  sink.finalize_manifest();
  return {0, "", sink.outputs()};
}

RunResult run_optimize(const json& config, const RunOptions& options) {
  check_keys(config, "$",
             {"experiment", "hamiltonians", "target", "eta", "beta", "phase_invariant",
              "horizon", "dt", "h_max", "risk", "penalty_mu", "noise", "scenarios", "seed",
              "optimizer"});
  auto parsed = parse_hamiltonians(require_key(config, "$", "hamiltonians"), "$.hamiltonians");

  OCPProblem problem;
  problem.set = parsed.set;
  problem.target = parse_target(require_key(config, "$", "target"), "$.target", parsed.set.dim());
  problem.eta = get_double(config, "$", "eta");
  problem.beta = get_double_or(config, "$", "beta", 0.0);
  problem.phase_invariant =
      config.contains("phase_invariant") ? as_bool(config.at("phase_invariant"), "$.phase_invariant") : true;
  problem.horizon = get_double(config, "$", "horizon");
  problem.dt = get_double(config, "$", "dt");
  problem.h_max = get_double(config, "$", "h_max");
  problem.risk_measure = config.contains("risk")
                             ? parse_risk(config.at("risk"), "$.risk")
                             : RiskMeasure::expectation();
  problem.penalty_mu = get_double_or(config, "$", "penalty_mu", 10.0 * problem.horizon);
  try {
    problem.validate();
  } catch (const std::exception& e) {
    fail("$", e.what());
  }

  bool no_noise = false;
  const NoiseParams noise = parse_noise(require_key(config, "$", "noise"), "$.noise", &no_noise);
  const int L = get_int_or(config, "$", "scenarios", no_noise ? 1 : 64);
  if (L < 1) fail("$.scenarios", "need at least one scenario");
  if (no_noise && L != 1) fail("$.scenarios", "noise 'none' implies a single scenario");
  const std::uint64_t seed = parse_seed(config, options);
  const OptimizeConfig opt_config = parse_optimizer(config, "$", seed, options.workers);

  OutputSink sink(options, config, "optimize", seed);
  const ScenarioSet scenarios =
      build_scenarios(noise, problem.horizon, parsed.set.channel_count(), L, seed);
  const OptimizationReport report = optimize(problem, scenarios, opt_config);

  json j = report_to_json(report);
  const SaaComponents final_eval = saa_objective(report.schedule, scenarios, problem,
                                                 options.workers);
  json times = json::array();
  json hit_flags = json::array();
  for (std::size_t l = 0; l < final_eval.hitting_times.size(); ++l) {
    times.push_back(final_eval.hitting_times[l]);
    hit_flags.push_back(static_cast<bool>(final_eval.hit[l]));
  }
  j["hitting_times"] = std::move(times);
  j["hit"] = std::move(hit_flags);
  sink.write_json("report.json", j);
  write_schedule_csv(sink, "schedule.csv", report.schedule);
  sink.finalize_manifest();
  if (!report.converged) {
    return {2, "chance constraint not met on the training scenarios", sink.outputs()};
  }
  return {0, "", sink.outputs()};
}

RunResult run_bounds(const json& config, const RunOptions& options) {
  check_keys(config, "$",
             {"experiment", "hamiltonians", "schedule", "random_schedule", "noise", "seed",
              "metric", "cutoff", "averaging_steps"});
  auto parsed = parse_hamiltonians(require_key(config, "$", "hamiltonians"), "$.hamiltonians");
  const MetricKind kind = parse_metric(require_key(config, "$", "metric"), "$.metric");
  PenaltyMatrix penalty;
  try {
    penalty = build_penalty(kind, parsed.basis);
  } catch (const std::exception& e) {
    fail("$.metric", e.what());
  }
  const double cutoff = get_double(config, "$", "cutoff");
  const int S = get_int_or(config, "$", "averaging_steps", 8);
  if (S < 1) fail("$.averaging_steps", "need at least one step");

  bool no_noise = true;
  NoiseParams noise{0.0, 0.0};
  if (config.contains("noise")) {
    noise = parse_noise(config.at("noise"), "$.noise", &no_noise);
  }
  std::uint64_t seed = 0;
  const bool needs_seed = !no_noise || config.contains("random_schedule");
  if (needs_seed) seed = parse_seed(config, options);

  ControlSchedule schedule;
  if (config.contains("schedule") == config.contains("random_schedule")) {
    fail("$", "provide exactly one of 'schedule' and 'random_schedule'");
  }
  if (config.contains("schedule")) {
    schedule = parse_schedule(config.at("schedule"), "$.schedule");
  } else {
    const json& rs = config.at("random_schedule");
    check_keys(rs, "$.random_schedule", {"steps", "dt", "h_max"});
    const int steps = as_int(require_key(rs, "$.random_schedule", "steps"), "$.random_schedule.steps");
    if (steps < 1) fail("$.random_schedule.steps", "need at least one step");
    schedule.dt = get_double(rs, "$.random_schedule", "dt");
    schedule.h_max = get_double(rs, "$.random_schedule", "h_max");
    schedule.values.resize(steps, parsed.set.channel_count());
    fill_random_schedule(schedule, seed);
    try {
      schedule.validate();
    } catch (const std::exception& e) {
      fail("$.random_schedule", e.what());
    }
  }
  if (schedule.channel_count() != parsed.set.channel_count()) {
    fail("$.schedule", "channel count does not match the Hamiltonian set");
  }

  OutputSink sink(options, config, "bounds", seed);
  std::optional<NoiseRealization> realization;
  if (!no_noise) {
    realization = sample_realization(noise, schedule.horizon(), parsed.set.channel_count(), seed);
  }
  const BoundCheckReport report =
      empirical_bound_check(schedule, realization ? &*realization : nullptr, parsed.set,
                            parsed.basis, penalty, cutoff, S);

  json j;
  j["cutoff"] = report.cutoff;
  j["active_terms"] = report.active_terms;
  j["step_count"] = report.step_count;
  j["step_length"] = report.step_length;
  j["pruning"] = {{"empirical", report.pruning_empirical},
                  {"bound", report.pruning_bound},
                  {"within_bound", report.pruning_within_bound}};
  json avg;
  avg["empirical_total"] = report.averaging_empirical_total;
  avg["bound_total"] =
      report.averaging_bound_total ? json(*report.averaging_bound_total) : json(nullptr);
  avg["precondition_ok"] = report.averaging_precondition_ok;
  avg["within_bound"] = report.averaging_within_bound;
  j["averaging"] = std::move(avg);
  j["trotter"] = {{"empirical_total", report.trotter_empirical_total},
                  {"leading_total", report.trotter_leading_total}};
  json steps = json::array();
  for (const auto& s : report.steps) {
    json e;
    e["length"] = s.length;
    e["averaging_empirical"] = s.averaging_empirical;
    e["averaging_bound"] = s.averaging_bound ? json(*s.averaging_bound) : json(nullptr);
    e["trotter_empirical"] = s.trotter_empirical;
    e["trotter_leading"] = s.trotter_leading;
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  sink.write_json("bounds.json", j);
  sink.finalize_manifest();
  return {0, "", sink.outputs()};
}

RunResult run_figure2(const json& config, const RunOptions& options) {
  check_keys(config, "$",
             {"experiment", "eta", "horizon", "dt", "h_max", "noise", "noise_mode", "seed",
              "penalty_mu", "optimizer"});
  const double eta = get_double_or(config, "$", "eta", 0.05);
  const double horizon = get_double_or(config, "$", "horizon", 4.8);
  const double dt = get_double_or(config, "$", "dt", 0.15);
  const double h_max = get_double_or(config, "$", "h_max", 1.0);
  bool no_noise = false;
  NoiseParams noise{1.0, 10.0};
  if (config.contains("noise")) {
    noise = parse_noise(config.at("noise"), "$.noise", &no_noise);
    if (no_noise) fail("$.noise", "figure2 needs a noise model for the red branch");
  }
  std::string noise_mode = "sampled";
  if (config.contains("noise_mode")) {
    noise_mode = as_string(config.at("noise_mode"), "$.noise_mode");
    if (noise_mode != "sampled" && noise_mode != "all_error") {
      fail("$.noise_mode", "expected 'sampled' or 'all_error'");
    }
  }
  const std::uint64_t seed = parse_seed(config, options);

  // The caption set: intended (sigma_x, sigma_y), both errors sigma_x.
  PauliBasis basis(1);
  HamiltonianSet set;
  set.n = 1;
  set.channels.push_back({basis.matrix(0), basis.matrix(0)});
  set.channels.push_back({basis.matrix(1), basis.matrix(0)});

  OCPProblem problem;
  problem.set = set;
  problem.target = parse_target(json("hadamard"), "$", 2);
  problem.eta = eta;
  problem.beta = 0.0;
  problem.phase_invariant = true;
  problem.horizon = horizon;
  problem.dt = dt;
  problem.h_max = h_max;
  problem.penalty_mu = get_double_or(config, "$", "penalty_mu", 10.0 * horizon);
  try {
    problem.validate();
  } catch (const std::exception& e) {
    fail("$", e.what());
  }
  const OptimizeConfig opt_config = parse_optimizer(config, "$", seed, options.workers);

  OutputSink sink(options, config, "figure2", seed);
  const OptimizationReport report = solve_deterministic(problem, opt_config);

  const Trajectory clean_traj = propagate(report.schedule, nullptr, set);
  write_bloch_csv(sink, "bloch_noise_free.csv", clean_traj);

  const NoiseRealization realization =
      noise_mode == "all_error"
          ? NoiseRealization({{0.0}, {0.0}}, horizon)
          : sample_realization(noise, horizon, set.channel_count(), seed);
  const Trajectory noisy_traj = propagate(report.schedule, &realization, set);
  write_bloch_csv(sink, "bloch_noisy.csv", noisy_traj);
  write_schedule_csv(sink, "schedule.csv", report.schedule);

  const auto clean_hit = hitting_time(clean_traj, problem.target, eta, true);
  const auto noisy_hit = hitting_time(noisy_traj, problem.target, eta, true);
  json summary;
  summary["optimizer"] = report_to_json(report);
  json clean;
  clean["hit"] = clean_hit.has_value();
  clean["hitting_time"] = clean_hit ? json(*clean_hit) : json(nullptr);
  clean["final_distance"] = sup_distance(clean_traj.unitaries.back(), problem.target, true);
  summary["noise_free"] = std::move(clean);
  json noisy;
  noisy["mode"] = noise_mode;
  noisy["realization"] = realization.to_json();
  noisy["hit"] = noisy_hit.has_value();
  noisy["hitting_time"] = noisy_hit ? json(*noisy_hit) : json(nullptr);
  noisy["final_distance"] = sup_distance(noisy_traj.unitaries.back(), problem.target, true);
  summary["noisy"] = std::move(noisy);
  summary["x_orbit_min_distance"] = x_orbit_min_distance(problem.target);
  sink.write_json("summary.json", summary);
  sink.finalize_manifest();

  if (!report.converged || !clean_hit) {
    return {2, "noise-free optimization did not reach the target", sink.outputs()};
  }
  return {0, "", sink.outputs()};
}

}  // namespace

double x_orbit_min_distance(const Matrix& target) {
  if (target.rows() != 2 || target.cols() != 2) {
    throw std::invalid_argument("x_orbit_min_distance: needs a single-qubit target");
  }
  Matrix sigma_x(2, 2);
  sigma_x << 0, 1, 1, 0;
  const auto distance = [&](double theta) {
    return sup_distance(expm_neg_i(sigma_x, theta), target, true);
  };
  constexpr int kScan = 2048;
  constexpr double kTwoPi = 6.283185307179586;
  double best_theta = 0.0;
  double best = distance(0.0);
  for (int i = 1; i < kScan; ++i) {
    const double theta = kTwoPi * i / kScan;
    const double v = distance(theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  // Local refinement around the best scan point.
  double lo = best_theta - kTwoPi / kScan;
  double hi = best_theta + kTwoPi / kScan;
  for (int iter = 0; iter < 60; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (distance(m1) <= distance(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, distance(0.5 * (lo + hi)));
}

RunResult run_experiment(const nlohmann::ordered_json& config, const RunOptions& options) {
  try {
    const std::string kind =
        as_string(require_key(config, "$", "experiment"), "$.experiment");
    if (!options.expect_kind.empty() && kind != options.expect_kind) {
      fail("$.experiment", "config declares '" + kind + "' but the '" + options.expect_kind +
                               "' subcommand was invoked");
    }
    if (kind == "basis") return run_basis(config, options);
    if (kind == "metrics") return run_metrics(config, options);
    if (kind == "simulate") return run_simulate(config, options);
    if (kind == "optimize") return run_optimize(config, options);
    if (kind == "bounds") return run_bounds(config, options);
    if (kind == "figure2") return run_figure2(config, options);
    fail("$.experiment", "unknown experiment kind '" + kind + "'");
  } catch (const ConfigError& e) {
    return {3, e.what(), {}};
  } catch (const std::exception& e) {
    return {1, e.what(), {}};
  }
}

RunResult run_experiment_file(const std::string& config_path, const RunOptions& options) {
  std::ifstream in(config_path);
  if (!in) {
    return {3, "config error at " + config_path + ": file does not exist", {}};
  }
  nlohmann::ordered_json config;
  try {
    config = nlohmann::ordered_json::parse(in);
  } catch (const std::exception& e) {
    return {3, std::string("config error: invalid JSON: ") + e.what(), {}};
  }
  return run_experiment(config, options);
}

}  // namespace rqoc::experiments
