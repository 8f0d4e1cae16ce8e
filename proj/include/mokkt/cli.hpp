/*
 Copyright 2026 The mokkt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mokkt/cq.hpp"
#include "mokkt/solve.hpp"

namespace mokkt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitNotConverged = 1,
  kExitCqFail = 2,
  kExitKktFail = 3,
  kExitUsage = 64,
  kExitIo = 74,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem;
  ParameterMap overrides;
  int grid_n = 1000;
  std::optional<Vector> weights;
  int weight_count = 11;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output_dir = ".";
  std::string trajectory;  ///< input trajectory file (check-cq, verify)
  bool bundles = false;    ///< per-point JSON bundles from pareto
  double gamma0 = 0.5;
  int directions = 16;
  KktTolerances kkt;
  SolverOptions solver;
  CQOptions cq;
};

using Json = nlohmann::ordered_json;

/// Reads a JSON config file into `cfg`; keys mirror the long flag names.
void load_config_file(const std::string& path, RunConfig& cfg);
void apply_config_json(const Json& j, RunConfig& cfg);

/// Parses "k=v" into the override map.
void parse_override(const std::string& text, ParameterMap& overrides);
Vector parse_weights(const std::string& text);

/// Checks grid size, weights and the problem name; throws UsageError.
void validate(const RunConfig& cfg, const Problem& problem, bool need_weights);

Json config_json(const RunConfig& cfg);
Json tolerances_json(const RunConfig& cfg);

Json to_json(const Vector& v);
Json to_json(const Matrix& a);  ///< row-major nested arrays
Json to_json(const CQReport& r);
Json to_json(const KKTReport& r);
Json to_json(const SscReport& r);
Json to_json(const SolveResult& r);
Json to_json(const DiscreteKktReport& r);

/// Trajectory file: problem, overrides, grid_n, n, m, x and u (row-major), optional weights.
Json trajectory_json(const Problem& problem, const Trajectory& traj,
                     const std::optional<Vector>& weights);

struct TrajectoryFile {
  std::string problem;
  ParameterMap overrides;
  Trajectory traj;
  std::optional<Vector> weights;
};

TrajectoryFile read_trajectory(const std::string& path);

/// Front CSV: header "w_1..w_k,J_1..J_k,converged,kkt_pass" and one row per kept point.
std::string front_csv(const ParetoResult& res, int k);

/// Creates the directory if needed and writes the file; throws IoError.
void write_file(const std::string& dir, const std::string& name, const std::string& content);

/// Library entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mokkt::cli
