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
#include <ostream>

#include <CLI11.hpp>

#include "mokkt/cli.hpp"

#ifndef MOKKT_VERSION
#define MOKKT_VERSION "0.0.0"
#endif

namespace mokkt::cli {

namespace {

struct Flags {
  std::string problem;
  std::vector<std::string> sets;
  int grid_n = 0;
  std::string weights;
  int weight_count = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string config;
  std::string trajectory;
  double u_box = 0.0;
  double gamma0 = 0.0;
  int directions = 0;
  int max_outer = 0;
  double stationarity = 0.0, complementarity = 0.0, feasibility = 0.0, activity = 0.0;
  double violation = 0.0, gradient = 0.0;
  bool bundles = false;
};

struct Bound {
  CLI::Option *problem, *sets, *grid_n, *weights, *weight_count, *seed, *jobs, *out, *trajectory,
      *u_box, *gamma0, *directions, *max_outer, *stationarity, *complementarity, *feasibility,
      *activity, *violation, *gradient, *bundles;
};

Bound add_flags(CLI::App* sub, Flags& f) {
  Bound b{};
  b.problem = sub->add_option("--problem", f.problem, "registered problem name");
  b.sets = sub->add_option("--set", f.sets, "parameter override key=value (repeatable)");
  b.grid_n = sub->add_option("--grid-n", f.grid_n, "number of grid intervals (default 1000)");
  b.weights = sub->add_option("--weights", f.weights, "simplex weights w1,...,wk");
  b.weight_count = sub->add_option("--weight-count", f.weight_count, "number of sweep weights");
  b.seed = sub->add_option("--seed", f.seed, "seed for weights and direction sampling");
  b.jobs = sub->add_option("--jobs", f.jobs, "parallel cold-start solves in a sweep");
  b.out = sub->add_option("--out", f.out, "output directory (default .)");
  sub->add_option("--config", f.config, "JSON config file; flags override it");
  b.trajectory = sub->add_option("--trajectory", f.trajectory, "trajectory JSON file");
  b.u_box = sub->add_option("--u-box", f.u_box, "box bound on the H4' direction");
  b.gamma0 = sub->add_option("--gamma0", f.gamma0, "Legendre constant for the sufficient check");
  b.directions = sub->add_option("--directions", f.directions, "sampled critical directions");
  b.max_outer = sub->add_option("--max-outer", f.max_outer, "outer solver iterations");
  b.stationarity = sub->add_option("--stationarity-tol", f.stationarity);
  b.complementarity = sub->add_option("--complementarity-tol", f.complementarity);
  b.feasibility = sub->add_option("--feasibility-tol", f.feasibility);
  b.activity = sub->add_option("--activity-tol", f.activity);
  b.violation = sub->add_option("--violation-tol", f.violation);
  b.gradient = sub->add_option("--gradient-tol", f.gradient);
  b.bundles = sub->add_flag("--bundles", f.bundles, "write one JSON bundle per sweep point");
  return b;
}

RunConfig build_config(const Flags& f, const Bound& b) {
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(f.config, cfg);
  if (b.problem->count()) cfg.problem = f.problem;
  for (const std::string& s : f.sets) parse_override(s, cfg.overrides);
  if (b.grid_n->count()) cfg.grid_n = f.grid_n;
  if (b.weights->count()) cfg.weights = parse_weights(f.weights);
  if (b.weight_count->count()) cfg.weight_count = f.weight_count;
  if (b.seed->count()) cfg.seed = f.seed;
  if (b.jobs->count()) cfg.jobs = f.jobs;
  if (b.out->count()) cfg.output_dir = f.out;
  if (b.trajectory->count()) cfg.trajectory = f.trajectory;
  if (b.u_box->count()) cfg.cq.h4prime.u_box = f.u_box;
  if (b.gamma0->count()) cfg.gamma0 = f.gamma0;
  if (b.directions->count()) cfg.directions = f.directions;
  if (b.max_outer->count()) cfg.solver.max_outer = f.max_outer;
  if (b.stationarity->count()) cfg.kkt.stationarity = f.stationarity;
  if (b.complementarity->count()) cfg.kkt.complementarity = f.complementarity;
  if (b.feasibility->count()) cfg.kkt.feasibility = f.feasibility;
  if (b.activity->count()) cfg.kkt.activity = f.activity;
  if (b.violation->count()) cfg.solver.violation_tol = f.violation;
  if (b.gradient->count()) cfg.solver.gradient_tol = f.gradient;
  if (b.bundles->count()) cfg.bundles = f.bundles;
  return cfg;
}

Problem load_problem(const RunConfig& cfg) {
  if (cfg.problem.empty()) throw UsageError("--problem is required");
  try {
    return get_problem(cfg.problem, cfg.overrides);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void prepare_output(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  const auto probe = std::filesystem::path(cfg.output_dir) / ".mokkt_probe";
  std::FILE* fp = ec ? nullptr : std::fopen(probe.string().c_str(), "wb");
  if (!fp) throw IoError("output directory '" + cfg.output_dir + "' is not writable");
  std::fclose(fp);
  std::filesystem::remove(probe, ec);
}

Json envelope(const char* command, const RunConfig& cfg, const Problem& problem) {
  Json j;
  j["command"] = command;
  j["version"] = MOKKT_VERSION;
  j["config"] = config_json(cfg);
  j["tolerances"] = tolerances_json(cfg);
  j["grid_n"] = cfg.grid_n;
  Json p;
  p["name"] = problem.name;
  p["n"] = problem.n;
  p["m"] = problem.m;
  p["k"] = problem.k;
  p["r"] = problem.r;
  p["parameters"] = Json::object();
  for (const auto& [k, v] : problem.parameter_values()) p["parameters"][k] = v;
  p["notes"] = problem.notes;
  j["problem"] = p;
  return j;
}

// validate() has already required weights whenever k > 1.
Vector weights_or_default(const RunConfig& cfg) {
  return cfg.weights ? *cfg.weights : Vector(Vector::Ones(1));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const char* yes_no(bool b) { return b ? "pass" : "fail"; }

SscReport second_order_check(const RunConfig& cfg, const Problem& problem, const Trajectory& traj,
                             const KKTReport& kkt) {
  std::vector<CriticalDirection> dirs;
  if (cfg.directions > 0) {
    SamplingOptions so;
    so.activity = cfg.kkt.activity;
    dirs = sample_critical_directions(problem, traj, cfg.directions, cfg.seed, so);
  }
  return check_ssc(problem, traj, kkt.multipliers, dirs, cfg.gamma0, cfg.kkt);
}

int cmd_list_problems(std::ostream& out) {
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    out << p.name << " (n=" << p.n << ",m=" << p.m << ",k=" << p.k << ",r=" << p.r << ")  "
        << p.summary << "\n";
    for (const Parameter& par : p.params) {
      out << "    " << par.name << " = " << par.value << "  [" << par.lower << ", " << par.upper
          << "]  " << par.description << "\n";
    }
  }
  return kExitOk;
}

int cmd_check_cq(const RunConfig& cfg_in, std::ostream& out) {
  RunConfig cfg = cfg_in;
  std::string candidate;
  Trajectory traj;
  Problem problem;
  prepare_output(cfg);
  if (!cfg.trajectory.empty()) {
    TrajectoryFile tf = read_trajectory(cfg.trajectory);
    if (cfg.problem.empty()) cfg.problem = tf.problem;
    if (cfg.problem != tf.problem) throw UsageError("--problem does not match the trajectory file");
    for (const auto& [k, v] : tf.overrides) cfg.overrides.try_emplace(k, v);
    cfg.grid_n = tf.traj.grid.intervals();
    problem = load_problem(cfg);
    validate(cfg, problem, false);
    if (tf.traj.x.cols() != problem.n || tf.traj.u.cols() != problem.m) {
      throw UsageError("trajectory dimensions do not match problem '" + problem.name + "'");
    }
    traj = tf.traj;
    candidate = "file " + cfg.trajectory;
  } else {
    problem = load_problem(cfg);
    validate(cfg, problem, false);
    if (cfg.weights) {
      const SolveResult r =
          solve_scalarized(problem, *cfg.weights, Matrix::Zero(cfg.grid_n, problem.m), cfg.solver);
      traj = r.traj;
      candidate = std::string("scalarized solve (") + (r.converged ? "converged" : "not converged") + ")";
    } else {
      traj = integrate_state(problem, Matrix::Zero(cfg.grid_n, problem.m), Grid(cfg.grid_n));
      candidate = "zero control";
    }
  }
  const CQReport rep = check_constraint_qualifications(problem, traj, cfg.cq);
  Json j = envelope("check-cq", cfg, problem);
  j["candidate"] = candidate;
  j["cq"] = to_json(rep);
  write_file(cfg.output_dir, "cq_report.json", j.dump(2) + "\n");

  out << "problem " << problem.name << ", candidate: " << candidate << "\n";
  out << "  H2  det h'(x(1)) = " << num(rep.h2_det) << "  " << yes_no(rep.h2_ok) << "\n";
  out << "  H3  gamma = " << num(rep.h3_gamma) << "  " << yes_no(rep.h3_ok) << "\n";
  out << "  H4  m* = " << rep.h4_mstar << "  "
      << (rep.h4_applicable ? "applicable" : "not applicable") << "\n";
  if (rep.h5_ok) out << "  H5  min eig W = " << num(*rep.h5_min_eig) << "  " << yes_no(*rep.h5_ok) << "\n";
  if (rep.h4p_ok) out << "  H4' slack = " << num(*rep.h4p_slack) << "  " << yes_no(*rep.h4p_ok) << "\n";
  out << "  route " << rep.route << ": " << yes_no(rep.decisive_ok) << "\n";
  return rep.decisive_ok ? kExitOk : kExitCqFail;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = load_problem(cfg);
  validate(cfg, problem, true);
  prepare_output(cfg);
  const Vector w = weights_or_default(cfg);
  const SolveResult r =
      solve_scalarized(problem, w, Matrix::Zero(cfg.grid_n, problem.m), cfg.solver);
  const Vector lambda = w / w.norm();
  KKTReport kkt = verify_kkt(problem, r.traj, lambda, cfg.kkt);
  const SscReport ssc = second_order_check(cfg, problem, r.traj, kkt);
  kkt.second_order_values = ssc.form_values;
  const DiscreteKktReport disc = check_discrete_vop_kkt(problem, r.traj, w, r.multipliers);

  Json j = envelope("solve", cfg, problem);
  j["lambda"] = to_json(lambda);
  j["solve"] = to_json(r);
  j["kkt"] = to_json(kkt);
  j["second_order"] = to_json(ssc);
  j["discrete_kkt"] = to_json(disc);
  write_file(cfg.output_dir, "solve_report.json", j.dump(2) + "\n");
  write_file(cfg.output_dir, "trajectory.json", trajectory_json(problem, r.traj, w).dump(2) + "\n");

  out << "problem " << problem.name << ", N = " << cfg.grid_n << "\n";
  out << "  solver: " << r.status << " (outer " << r.outer_iterations << ", inner "
      << r.inner_iterations << ")\n";
  out << "  J =";
  for (Eigen::Index c = 0; c < r.J.size(); ++c) out << " " << r.J(c);
  out << "\n  KKT: " << kkt.status << " (stationarity " << num(kkt.stationarity_resid) << ")\n";
  out << "  second order: " << ssc.status << "\n";
  if (!r.converged) return kExitNotConverged;
  return kkt.verdict.pass ? kExitOk : kExitKktFail;
}

int cmd_verify(const RunConfig& cfg_in, std::ostream& out) {
  RunConfig cfg = cfg_in;
  if (cfg.trajectory.empty()) throw UsageError("verify needs --trajectory");
  prepare_output(cfg);
  const TrajectoryFile tf = read_trajectory(cfg.trajectory);
  if (cfg.problem.empty()) cfg.problem = tf.problem;
  if (cfg.problem != tf.problem) throw UsageError("--problem does not match the trajectory file");
  for (const auto& [k, v] : tf.overrides) cfg.overrides.try_emplace(k, v);
  if (!cfg.weights) cfg.weights = tf.weights;
  cfg.grid_n = tf.traj.grid.intervals();
  const Problem problem = load_problem(cfg);
  validate(cfg, problem, true);
  if (tf.traj.x.cols() != problem.n || tf.traj.u.cols() != problem.m) {
    throw UsageError("trajectory dimensions do not match problem '" + problem.name + "'");
  }
  const Vector w = weights_or_default(cfg);
  const Vector lambda = w / w.norm();
  KKTReport kkt = verify_kkt(problem, tf.traj, lambda, cfg.kkt);
  const SscReport ssc = second_order_check(cfg, problem, tf.traj, kkt);
  kkt.second_order_values = ssc.form_values;

  Json j = envelope("verify", cfg, problem);
  j["lambda"] = to_json(lambda);
  j["kkt"] = to_json(kkt);
  j["second_order"] = to_json(ssc);
  write_file(cfg.output_dir, "verify_report.json", j.dump(2) + "\n");

  out << "problem " << problem.name << ", trajectory " << cfg.trajectory << "\n";
  out << "  KKT: " << kkt.status << " (stationarity " << num(kkt.stationarity_resid)
      << ", primal " << num(kkt.primal_feas) << ")\n";
  out << "  second order: " << ssc.status << "\n";
  return kkt.verdict.pass ? kExitOk : kExitKktFail;
}

int cmd_pareto(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = load_problem(cfg);
  validate(cfg, problem, false);
  prepare_output(cfg);
  ParetoOptions po;
  po.weight_count = cfg.weight_count;
  po.seed = cfg.seed;
  po.jobs = cfg.jobs;
  po.grid_n = cfg.grid_n;
  po.solver = cfg.solver;
  po.kkt = cfg.kkt;
  const ParetoResult res = pareto_sweep(problem, po);

  int converged = 0, passed = 0;
  Json pts = Json::array();
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const ParetoPoint& pt = res.points[i];
    converged += pt.solve.converged;
    passed += pt.kept && pt.kkt.verdict.pass;
    Json p;
    p["index"] = i;
    p["weights"] = to_json(pt.weights);
    p["lambda"] = to_json(pt.lambda);
    p["J"] = to_json(pt.J);
    p["converged"] = pt.solve.converged;
    p["kept"] = pt.kept;
    p["kkt_pass"] = pt.kkt.verdict.pass;
    p["solver_status"] = pt.solve.status;
    p["kkt_status"] = pt.kkt.status;
    pts.push_back(p);
    if (cfg.bundles && pt.solve.converged) {
      Json b = envelope("pareto", cfg, problem);
      b["index"] = i;
      b["lambda"] = to_json(pt.lambda);
      b["solve"] = to_json(pt.solve);
      b["kkt"] = to_json(pt.kkt);
      b["trajectory"] = trajectory_json(problem, pt.traj, pt.weights);
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu.json", i);
      write_file(cfg.output_dir, name, b.dump(2) + "\n");
    }
  }
  Json j = envelope("pareto", cfg, problem);
  j["points"] = pts;
  j["front"] = res.front;
  j["summary"] = {{"attempted", res.points.size()},
                  {"converged", converged},
                  {"front", res.front.size()},
                  {"kkt_pass", passed}};
  write_file(cfg.output_dir, "pareto.json", j.dump(2) + "\n");
  write_file(cfg.output_dir, "front.csv", front_csv(res, problem.k));

  out << "pareto " << problem.name << ": " << res.points.size() << " weights, " << converged
      << " converged, " << res.front.size() << " on front, " << passed << " kkt pass, "
      << res.front.size() - passed << " flagged\n";
  return converged > 0 ? kExitOk : kExitNotConverged;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scalarized solves, KKT verification and constraint-qualification checks for "
               "multiobjective optimal control problems.",
               "mokkt"};
  app.set_version_flag("--version", MOKKT_VERSION);
  app.require_subcommand(1);
  Flags f;
  CLI::App* list = app.add_subcommand("list-problems", "list registered problems");
  CLI::App* cq = app.add_subcommand("check-cq", "check H2, H3, H4/H5 and H4' at a candidate");
  CLI::App* solve = app.add_subcommand("solve", "solve a scalarized problem and verify KKT");
  CLI::App* verify = app.add_subcommand("verify", "re-verify a saved trajectory");
  CLI::App* pareto = app.add_subcommand("pareto", "weight sweep with dominance filtering");
  const Bound bcq = add_flags(cq, f);
  const Bound bsolve = add_flags(solve, f);
  const Bound bverify = add_flags(verify, f);
  const Bound bpareto = add_flags(pareto, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list_problems(out);
    if (cq->parsed()) return cmd_check_cq(build_config(f, bcq), out);
    if (solve->parsed()) return cmd_solve(build_config(f, bsolve), out);
    if (verify->parsed()) return cmd_verify(build_config(f, bverify), out);
    if (pareto->parsed()) return cmd_pareto(build_config(f, bpareto), out);
  } catch (const UsageError& e) {
    err << "mokkt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "mokkt: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "mokkt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "mokkt: numerical failure: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitUsage;
}

}  // namespace mokkt::cli
