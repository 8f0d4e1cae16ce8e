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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mokkt/cli.hpp"

namespace mokkt::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix flat_to_matrix(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
    throw UsageError(std::string("trajectory: '") + what + "' must hold " +
                     std::to_string(rows * cols) + " numbers");
  }
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) a(i, c) = j[i * cols + c].get<double>();
  return a;
}

Json flat(const Matrix& a) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index c = 0; c < a.cols(); ++c) j.push_back(a(i, c));
  return j;
}

}  // namespace

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json to_json(const Matrix& a) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) j.push_back(to_json(Vector(a.row(i).transpose())));
  return j;
}

Json to_json(const CQReport& r) {
  Json j;
  j["h2_det"] = r.h2_det;
  j["h2_ok"] = r.h2_ok;
  j["h3_gamma"] = r.h3_gamma;
  j["h3_ok"] = r.h3_ok;
  j["h4_rank_min"] = r.h4_rank.empty() ? 0 : *std::min_element(r.h4_rank.begin(), r.h4_rank.end());
  j["h4_rank_max"] = r.h4_rank.empty() ? 0 : *std::max_element(r.h4_rank.begin(), r.h4_rank.end());
  j["h4_mstar"] = r.h4_mstar;
  j["h4_applicable"] = r.h4_applicable;
  j["h4_constant_dimension"] = r.h4_constant_dimension;
  j["h5_min_eig"] = r.h5_min_eig ? Json(*r.h5_min_eig) : Json();
  j["h5_ok"] = r.h5_ok ? Json(*r.h5_ok) : Json();
  j["h4prime_slack"] = r.h4p_slack ? Json(*r.h4p_slack) : Json();
  j["h4prime_ok"] = r.h4p_ok ? Json(*r.h4p_ok) : Json();
  j["route"] = r.route;
  j["decisive_ok"] = r.decisive_ok;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const KKTReport& r) {
  Json j;
  j["status"] = r.status;
  j["pass"] = r.verdict.pass;
  j["multiplier_found"] = r.multiplier_found;
  j["normal"] = r.normal;
  Json res;
  res["stationarity"] = r.stationarity_resid;
  res["stationarity_tol"] = r.stationarity_tol;
  res["adjoint"] = r.adjoint_resid;
  res["transversality"] = r.transversality_resid;
  res["recurrence_tol"] = r.recurrence_tol;
  res["comp_l_max"] = r.comp_l_max;
  res["comp_l_min"] = r.comp_l_min;
  res["comp_theta_max"] = r.comp_theta_max;
  res["comp_theta_min"] = r.comp_theta_min;
  res["primal_feas"] = r.primal_feas;
  j["residuals"] = res;
  Json v;
  v["adjoint"] = r.verdict.adjoint;
  v["stationarity"] = r.verdict.stationarity;
  v["transversality"] = r.verdict.transversality;
  v["complementarity_l"] = r.verdict.complementarity_l;
  v["complementarity_theta"] = r.verdict.complementarity_theta;
  v["primal_feasibility"] = r.verdict.primal_feasibility;
  v["normal"] = r.verdict.normal;
  j["verdict"] = v;
  j["endpoint_active"] = r.endpoint_active;
  j["path_active_count"] = r.path_active_count;
  j["second_order_values"] = r.second_order_values;
  Json m;
  m["lambda"] = to_json(r.multipliers.lambda);
  m["l"] = to_json(r.multipliers.l);
  m["p"] = to_json(r.multipliers.p);
  m["theta"] = to_json(r.multipliers.theta);
  j["multipliers"] = m;
  return j;
}

Json to_json(const SscReport& r) {
  Json j;
  j["status"] = r.status;
  j["precondition_ok"] = r.precondition_ok;
  j["legendre_ok"] = r.legendre_ok;
  j["min_eig_luu"] = r.min_eig_luu;
  j["gamma0"] = r.gamma0;
  j["directions"] = r.form_values.size();
  j["min_form"] = r.min_form;
  j["forms_positive"] = r.forms_positive;
  j["pass"] = r.pass;
  j["certificate"] = "sampled";
  return j;
}

Json to_json(const SolveResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["status"] = r.status;
  j["weights"] = to_json(r.weights);
  j["J"] = to_json(r.J);
  j["outer_iterations"] = r.outer_iterations;
  j["inner_iterations"] = r.inner_iterations;
  j["violation"] = r.violation;
  j["stationarity"] = r.stationarity;
  j["complementarity"] = r.complementarity;
  j["rho"] = r.rho;
  j["multipliers"] = {{"endpoint", to_json(r.multipliers.endpoint)},
                      {"path", to_json(r.multipliers.path)}};
  return j;
}

Json to_json(const DiscreteKktReport& r) {
  return {{"stationarity", r.stationarity},
          {"min_multiplier", r.min_multiplier},
          {"complementarity", r.complementarity},
          {"feasibility", r.feasibility}};
}

Json trajectory_json(const Problem& problem, const Trajectory& traj,
                     const std::optional<Vector>& weights) {
  Json j;
  j["problem"] = problem.name;
  j["overrides"] = Json::object();
  const Problem defaults = get_problem(problem.name);
  for (const auto& [k, v] : problem.parameter_values()) {
    if (v != defaults.param(k)) j["overrides"][k] = v;
  }
  j["grid_n"] = traj.grid.intervals();
  j["n"] = problem.n;
  j["m"] = problem.m;
  j["x"] = flat(traj.x);
  j["u"] = flat(traj.u);
  if (weights) j["weights"] = to_json(*weights);
  return j;
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file '" + path + "'");
  TrajectoryFile tf;
  try {
    const Json j = Json::parse(in);
    tf.problem = j.at("problem").get<std::string>();
    if (j.contains("overrides")) {
      for (const auto& [k, v] : j["overrides"].items()) tf.overrides[k] = v.get<double>();
    }
    const int N = j.at("grid_n").get<int>();
    const int n = j.at("n").get<int>(), m = j.at("m").get<int>();
    if (N < 1 || n < 1 || m < 1) throw UsageError("trajectory: bad dimensions");
    tf.traj.grid = Grid(N);
    tf.traj.x = flat_to_matrix(j.at("x"), N + 1, n, "x");
    tf.traj.u = flat_to_matrix(j.at("u"), N, m, "u");
    if (j.contains("weights") && !j["weights"].is_null()) {
      const auto w = j["weights"].get<std::vector<double>>();
      tf.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("trajectory file '" + path + "': " + e.what());
  }
  return tf;
}

std::string front_csv(const ParetoResult& res, int k) {
  std::string out;
  for (int c = 1; c <= k; ++c) out += "w_" + std::to_string(c) + ",";
  for (int c = 1; c <= k; ++c) out += "J_" + std::to_string(c) + ",";
  out += "converged,kkt_pass\n";
  for (std::size_t idx : res.front) {
    const ParetoPoint& pt = res.points[idx];
    for (int c = 0; c < k; ++c) out += fmt(pt.weights(c)) + ",";
    for (int c = 0; c < k; ++c) out += fmt(pt.J(c)) + ",";
    out += std::string(pt.solve.converged ? "1" : "0") + "," + (pt.kkt.verdict.pass ? "1" : "0") +
           "\n";
  }
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace mokkt::cli
