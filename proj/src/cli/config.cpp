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

#include <cmath>
#include <fstream>
#include <sstream>

#include "mokkt/cli.hpp"

namespace mokkt::cli {

namespace {

template <typename T>
void read_key(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void parse_override(const std::string& text, ParameterMap& overrides) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("--set expects key=value, got '" + text + "'");
  }
  const std::string key = text.substr(0, eq), value = text.substr(eq + 1);
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    overrides[key] = v;
  } catch (const std::exception&) {
    throw UsageError("--set " + key + ": '" + value + "' is not a number");
  }
}

Vector parse_weights(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--weights: '" + item + "' is not a number");
    }
  }
  if (vals.empty()) throw UsageError("--weights: empty list");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void apply_config_json(const Json& j, RunConfig& cfg) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  read_key(j, "problem", cfg.problem);
  if (j.contains("set")) {
    if (!j["set"].is_object()) throw UsageError("config: 'set' must be an object");
    for (const auto& [k, v] : j["set"].items()) {
      if (!v.is_number()) throw UsageError("config: override '" + k + "' must be a number");
      cfg.overrides[k] = v.get<double>();
    }
  }
  read_key(j, "grid-n", cfg.grid_n);
  if (j.contains("weights")) {
    const Json& w = j["weights"];
    if (w.is_string()) {
      cfg.weights = parse_weights(w.get<std::string>());
    } else if (w.is_array()) {
      std::vector<double> v;
      read_key(j, "weights", v);
      cfg.weights = Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (!w.is_null()) {
      throw UsageError("config: 'weights' must be an array or a comma-separated string");
    }
  }
  read_key(j, "weight-count", cfg.weight_count);
  read_key(j, "seed", cfg.seed);
  read_key(j, "jobs", cfg.jobs);
  read_key(j, "out", cfg.output_dir);
  read_key(j, "trajectory", cfg.trajectory);
  read_key(j, "bundles", cfg.bundles);
  read_key(j, "gamma0", cfg.gamma0);
  read_key(j, "directions", cfg.directions);
  read_key(j, "u-box", cfg.cq.h4prime.u_box);
  read_key(j, "max-outer", cfg.solver.max_outer);
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (!t.is_object()) throw UsageError("config: 'tolerances' must be an object");
    read_key(t, "stationarity", cfg.kkt.stationarity);
    read_key(t, "complementarity", cfg.kkt.complementarity);
    read_key(t, "feasibility", cfg.kkt.feasibility);
    read_key(t, "activity", cfg.kkt.activity);
    read_key(t, "recurrence", cfg.kkt.recurrence);
    read_key(t, "violation", cfg.solver.violation_tol);
    read_key(t, "gradient", cfg.solver.gradient_tol);
    read_key(t, "rank", cfg.cq.rank_tol);
    read_key(t, "h2", cfg.cq.h2_tol);
    read_key(t, "gamma-min", cfg.cq.gamma_min);
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  apply_config_json(j, cfg);
}

void validate(const RunConfig& cfg, const Problem& problem, bool need_weights) {
  if (cfg.grid_n < 10) throw UsageError("--grid-n must be at least 10");
  if (cfg.weight_count < 1) throw UsageError("--weight-count must be at least 1");
  if (cfg.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (cfg.directions < 0) throw UsageError("--directions must be nonnegative");
  if (cfg.weights) {
    const Vector& w = *cfg.weights;
    if (w.size() != problem.k) {
      throw UsageError("--weights: problem '" + problem.name + "' has " +
                       std::to_string(problem.k) + " objectives, got " +
                       std::to_string(w.size()) + " weights");
    }
    if (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-9) {
      throw UsageError("--weights must be nonnegative and sum to 1");
    }
  } else if (need_weights && problem.k > 1) {
    throw UsageError("--weights is required for problem '" + problem.name + "' (k=" +
                     std::to_string(problem.k) + ")");
  }
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["problem"] = cfg.problem;
  j["set"] = Json::object();
  for (const auto& [k, v] : cfg.overrides) j["set"][k] = v;
  j["grid-n"] = cfg.grid_n;
  j["weights"] = cfg.weights ? to_json(*cfg.weights) : Json();
  j["weight-count"] = cfg.weight_count;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.output_dir;
  j["trajectory"] = cfg.trajectory;
  j["gamma0"] = cfg.gamma0;
  j["directions"] = cfg.directions;
  j["u-box"] = cfg.cq.h4prime.u_box;
  j["max-outer"] = cfg.solver.max_outer;
  return j;
}

Json tolerances_json(const RunConfig& cfg) {
  Json t;
  t["stationarity"] = cfg.kkt.stationarity;
  t["complementarity"] = cfg.kkt.complementarity;
  t["feasibility"] = cfg.kkt.feasibility;
  t["activity"] = cfg.kkt.activity;
  t["recurrence"] = cfg.kkt.recurrence;
  t["normalization"] = cfg.kkt.normalization;
  t["violation"] = cfg.solver.violation_tol;
  t["gradient"] = cfg.solver.gradient_tol;
  t["rank"] = cfg.cq.rank_tol;
  t["h2"] = cfg.cq.h2_tol;
  t["gamma-min"] = cfg.cq.gamma_min;
  t["h4prime-slack"] = cfg.cq.h4prime.slack_tol;
  return t;
}

}  // namespace mokkt::cli
