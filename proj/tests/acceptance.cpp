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

// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mokkt/cq.hpp"
#include "mokkt/kkt.hpp"
#include "mokkt/solve.hpp"
#include "oracles.hpp"
#include "test_problems.hpp"

namespace mokkt {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

Matrix normal_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a(rows, cols);
  for (auto& v : a.reshaped()) v = nd(rng);
  return a;
}

Matrix example31_reference_basis() {
  Matrix W(3, 2);
  W << 0.5, 0.0, 1.0, 1.0, 1.5, 1.0;
  return W;
}

Matrix example31_reference_B() {
  Matrix B(2, 2);
  B << 2.0, 1.0, 1.0, 1.0;
  return B;
}

Outcome example31_structure() {
  const Problem p = get_problem("example31");
  std::mt19937_64 rng(1);
  const int N = 40;
  const Trajectory tr = integrate_state(p, normal_matrix(N, 3, rng), Grid(N));

  NullspaceBasis nb = nullspace_basis(p, tr);
  Matrix ref_S(3, 2);
  ref_S << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  const Eigen::HouseholderQR<Matrix> qr(ref_S);
  const Matrix Q = qr.householderQ() * Matrix::Identity(3, 2);
  const Matrix P = Q * Q.transpose();
  double s_err = 0.0;
  for (const Matrix& S : nb.S) s_err = std::max(s_err, (S * S.transpose() - P).cwiseAbs().maxCoeff());

  double r_err = 0.0;
  for (const Matrix& R : build_R(p, tr)) r_err = std::max(r_err, std::abs(R(0, 0) - 3.0));
  const double h2_err = std::abs(check_h2(p, tr).det - 1.0);

  for (auto& S : nb.S) S = example31_reference_basis();
  const ABMatrices ab = build_AB(p, tr, nb);
  double a_err = 0.0, b_err = 0.0;
  for (int i = 0; i < N; ++i) {
    const double t = tr.grid.midpoint(i);
    Matrix A(2, 2);
    A << t, 0.0, 0.0, t - 1.0 / 3.0;
    a_err = std::max(a_err, (ab.A[i] - A).cwiseAbs().maxCoeff());
    b_err = std::max(b_err, (ab.B[i] - example31_reference_B()).cwiseAbs().maxCoeff());
  }

  // phi_u applied to the reference kernel columns, for the record.
  const Matrix phiu = p.dynamics.eval(0.5, tr.state(0), tr.control(0)).du;
  const double reference_gap = (phiu * ref_S - example31_reference_B()).cwiseAbs().maxCoeff();

  const double worst = std::max({s_err, r_err, h2_err, a_err, b_err});
  Outcome o;
  o.pass = nb.mstar == 2 && worst < 1e-12;
  o.detail = fmt("A %.1e, B %.1e, S %.1e, R %.1e", a_err, b_err, s_err, r_err) +
             fmt(", det h' %.1e; |phi_u S_ref - B_ref| = %.0f", h2_err, reference_gap);
  return o;
}

Outcome principal_matrix_oracle() {
  const Problem p = get_problem("example31");
  const int N = 1000;
  const Trajectory tr = integrate_state(p, Matrix::Zero(N, 3), Grid(N));
  const PrincipalMatrix pm = principal_matrix(reduced_A(p, tr), tr.grid);
  double err = 0.0;
  for (int i = 0; i <= N; ++i) {
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = testing::omega11(tr.grid.node(i));
    expected(1, 1) = testing::omega22(tr.grid.node(i));
    err = std::max(err, (pm.omega_1s[i] - expected).cwiseAbs().maxCoeff());
  }
  return {err < 1e-9, fmt("max |Omega(1,tau) - closed form| = %.2e at N=1000", err)};
}

Outcome controllability_inverse() {
  const Problem p = get_problem("example31");
  const int N = 1000;
  const Trajectory tr = integrate_state(p, Matrix::Zero(N, 3), Grid(N));
  const PrincipalMatrix pm = principal_matrix(reduced_A(p, tr), tr.grid);
  NullspaceBasis reference = nullspace_basis(p, tr);
  for (auto& S : reference.S) S = example31_reference_basis();
  const IntervalMatrixFn B = reduced_B(p, tr, reference);

  const double a0 = testing::alpha0(), b0 = testing::beta0();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  double err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector xi(2);
    xi << nd(rng), nd(rng);
    auto v = [&](double, int) {
      Vector out(2);
      out << xi(0) / a0 - xi(1) / b0, 2.0 * xi(1) / b0 - xi(0) / a0;
      return out;
    };
    err = std::max(err, (reachability_map(pm, B, v) - xi).norm());
  }
  const H5Result h5 = check_h5(p, tr, nullspace_basis(p, tr));
  return {err < 1e-7 && h5.min_eig > 0.0 && h5.ok,
          fmt("max |H(v) - xi| = %.2e over 10 draws; Gramian min eig %.4f", err, h5.min_eig)};
}

Outcome smartgrid_cq_route() {
  const Problem p = get_problem("smartgrid");
  const int N = 200;
  const Trajectory tr = integrate_state(p, Matrix::Zero(N, 3), Grid(N));
  const bool interior = path_constraint_values(p, tr).maxCoeff() < 0.0 &&
                        p.endpoint_constraint.value(tr.state(N)).maxCoeff() < 0.0;
  const CQReport rep = check_constraint_qualifications(p, tr);
  bool rank3 = true;
  for (int r : rep.h4_rank) rank3 = rank3 && r == 3;
  const double slack = rep.h4p_slack.value_or(0.0);

  const double gamma = 0.01;
  const DirectionMargins m = evaluate_h4prime_direction(
      p, tr, [&](double t, int) { return Vector(Vector::Constant(3, -gamma * std::exp(t / gamma))); });
  const double b_margin = m.endpoint.maxCoeff(), c_margin = m.path.maxCoeff();

  Outcome o;
  o.pass = interior && rank3 && !rep.h4_applicable && rep.route == "H4'" && rep.h4p_ok.value_or(false) &&
           slack > 0.0 && m.endpoint.allFinite() && b_margin < 0.0 && c_margin < 0.0;
  o.detail = std::string("H4 ") + (rep.h4_applicable ? "applicable" : "not applicable") +
             fmt(" (rank 3: %.0f); eps* = %.4g; exponential direction margins endpoint %.4g, path %.4g",
                 rank3 ? 1.0 : 0.0, slack, b_margin, c_margin);
  return o;
}

Outcome smartgrid_adjoint_structure() {
  const Problem p = get_problem("smartgrid");
  const int N = 200;
  std::mt19937_64 rng(5);
  double err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Trajectory tr = integrate_state(p, normal_matrix(N, 3, rng, 0.3), Grid(N));
    Vector lambda = normal_matrix(4, 1, rng).cwiseAbs();
    lambda /= lambda.norm();
    // Rows 2 and 3 of h are the inactive caps on x2 and x3, so their multipliers vanish.
    Vector l = Vector::Zero(3);
    l(0) = std::abs(normal_matrix(1, 1, rng)(0));
    const Matrix theta = normal_matrix(N, 3, rng).cwiseAbs();
    const Matrix P = integrate_adjoint(p, tr, lambda, l, theta);
    const Reconstruction rec = reconstruct_multipliers(p, tr, lambda);
    for (int i = 0; i <= N; ++i) {
      err = std::max({err, std::abs(P(i, 2) + lambda(2)), std::abs(P(i, 0) + l(0)),
                      std::abs(rec.multipliers.p(i, 2) + lambda(2)),
                      std::abs(rec.multipliers.p(i, 0) + rec.multipliers.l(0))});
    }
  }
  return {err < 1e-10, fmt("max |p3 + lambda3|, |p1 + l1| = %.2e over 10 tuples", err)};
}

Outcome lq_end_to_end() {
  const Problem p = get_problem("lq1");
  const int N = 1000;
  const SolveResult r = solve_scalarized(p, Vector::Ones(1), Matrix::Zero(N, 1));
  const testing::Lq1Oracle oracle;
  double err = 0.0;
  for (int i = 0; i < N; ++i) {
    err = std::max(err, std::abs(r.traj.u(i, 0) - oracle.control(r.traj.grid.midpoint(i))));
  }
  const KKTReport k = verify_kkt(p, r.traj, Vector::Ones(1));
  const auto dirs = sample_critical_directions(p, r.traj, 16, 1);
  const SscReport ssc = check_ssc(p, r.traj, k.multipliers, dirs, 0.5);
  Outcome o;
  o.pass = r.converged && err < 1e-4 && k.verdict.pass && k.stationarity_resid < 1e-6 && ssc.pass;
  o.detail = fmt("|u - u*| = %.2e; kkt stationarity %.2e; ssc min form %.4f", err,
                 k.stationarity_resid, ssc.min_form) +
             (k.verdict.pass ? "; kkt pass" : "; kkt fail") + (ssc.pass ? ", ssc pass" : ", ssc fail");
  return o;
}

Vector simplex_point(int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector w(k);
  for (int i = 0; i < k; ++i) w(i) = e(rng);
  return w / w.sum();
}

Outcome gradient_checks() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    const int N = 12;
    for (int trial = 0; trial < 20; ++trial) {
      const TranscribedNLP nlp(p, Grid(N), simplex_point(p.k, rng));
      const Vector z = normal_matrix(nlp.size(), 1, rng, 0.5);
      const Vector mult = normal_matrix(nlp.constraint_count(), 1, rng).cwiseAbs();
      auto lagrangian = [&](const Vector& v) {
        const Trajectory tr = nlp.simulate(v);
        return nlp.objective(tr) + mult.dot(nlp.constraints(tr));
      };
      const Vector g = nlp.lagrangian_gradient(nlp.simulate(z), mult);
      Vector fd(z.size());
      const double e = 1e-6;
      for (Eigen::Index q = 0; q < z.size(); ++q) {
        Vector a = z, b = z;
        a(q) += e;
        b(q) -= e;
        fd(q) = (lagrangian(a) - lagrangian(b)) / (2.0 * e);
      }
      worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff()));
    }
  }
  return {worst < 1e-5, fmt("worst relative error %.2e over 20 points per problem", worst)};
}

// example31 has m = 3 > r = 1, so the stationarity condition is solvable only on a consistent
// tuple: with L_u^T lambda = (lambda1 + lambda2) u - lambda2 u_ref and constant
// phi_u, g_u the control is chosen so that some theta0 zeroes the residual.
Matrix consistent_example31_controls(const Problem& p, const Vector& lambda, const Matrix& p_mid,
                                     std::mt19937_64& rng) {
  const int N = static_cast<int>(p_mid.rows());
  const Vector zero = Vector::Zero(3);
  const Matrix phiu = p.dynamics.eval(0.0, p.x0, zero).du;
  const Matrix gu = p.mixed_constraint.eval(0.0, p.x0, zero).du;
  Vector u_ref = Vector::Zero(3);
  u_ref(0) = p.param("u_ref_1");
  const Matrix theta0 = normal_matrix(N, 1, rng);
  Matrix u(N, 3);
  for (int i = 0; i < N; ++i) {
    const Vector rhs = phiu.transpose() * p_mid.row(i).transpose() + lambda(1) * u_ref -
                       gu.transpose() * theta0.row(i).transpose();
    u.row(i) = (rhs / (lambda(0) + lambda(1))).transpose();
  }
  return u;
}

Outcome theta_resubstitution() {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names = problem_names();
  double worst = 0.0;
  int tuples = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = get_problem(names[trial % names.size()]);
    const int N = 20;
    Vector lambda = normal_matrix(p.k, 1, rng).cwiseAbs();
    lambda /= lambda.norm();
    const Matrix pm = normal_matrix(N, p.n, rng);
    Matrix u;
    if (p.m == p.r) {
      u = normal_matrix(N, p.m, rng, 0.3);
    } else if (p.name == "example31") {
      u = consistent_example31_controls(p, lambda, pm, rng);
    } else {
      continue;
    }
    const Trajectory traj = integrate_state(p, u, Grid(N));
    const Matrix theta = extract_theta(p, traj, lambda, pm);
    const double scale = 1.0 + pm.cwiseAbs().maxCoeff();
    for (int i = 0; i < N; ++i) {
      const double t = traj.grid.midpoint(i);
      const Vector x = midpoint_state(p, traj, i);
      const Vector ui = traj.control(i);
      const Vector r = p.running_cost.eval(t, x, ui).du.transpose() * lambda -
                       p.dynamics.eval(t, x, ui).du.transpose() * pm.row(i).transpose() +
                       p.mixed_constraint.eval(t, x, ui).du.transpose() * theta.row(i).transpose();
      worst = std::max(worst, r.cwiseAbs().maxCoeff() / scale);
    }
    ++tuples;
  }
  return {tuples == 100 && worst < 1e-10,
          fmt("max residual / (1 + |p|) = %.2e over %.0f tuples", worst, tuples)};
}

Outcome lq_multiplier_consistency() {
  const Problem p = get_problem("lq1", {{"u_min", -0.5}});
  const int N = 1000;
  const SolveResult r = solve_scalarized(p, Vector::Ones(1), Matrix::Zero(N, 1));
  const ScaledMultipliers s = grid_scaled_multipliers(r.multipliers, r.traj.grid, Vector::Ones(1));
  const KKTReport k = verify_kkt(p, r.traj, Vector::Ones(1));
  const double err = (s.theta - k.multipliers.theta).cwiseAbs().maxCoeff();
  return {r.converged && k.verdict.pass && s.theta.maxCoeff() > 0.1 && err < 5e-3,
          fmt("|theta_grid - theta| = %.2e, max theta %.4f (u_min = -0.5, N=1000)", err,
              s.theta.maxCoeff())};
}

Outcome pareto_sanity(double& smartgrid_seconds) {
  ParetoOptions opts;
  opts.weight_count = 11;
  opts.grid_n = 20;
  const ParetoResult parabola = pareto_sweep(testing::parabola_problem(), opts);
  double front_err = 0.0;
  bool all_converged = parabola.points.size() == 11;
  for (const ParetoPoint& pt : parabola.points) {
    const double w2 = pt.weights(1);
    all_converged = all_converged && pt.solve.converged;
    front_err = std::max({front_err, std::abs(pt.J(0) - w2 * w2),
                          std::abs(pt.J(1) - (1.0 - w2) * (1.0 - w2))});
  }

  opts.weight_count = 20;
  opts.grid_n = 500;
  const auto t0 = std::chrono::steady_clock::now();
  const ParetoResult sg = pareto_sweep(get_problem("smartgrid"), opts);
  smartgrid_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int converged = 0, dominated_pairs = 0;
  for (const ParetoPoint& a : sg.points) {
    if (!a.solve.converged) continue;
    ++converged;
    for (const ParetoPoint& b : sg.points) {
      if (&a == &b || !b.solve.converged) continue;
      const Eigen::ArrayXd d = b.J.array() - a.J.array();
      if ((d <= 1e-10).all() && (d < -1e-10).any()) ++dominated_pairs;
    }
  }
  Outcome o;
  o.pass = all_converged && front_err < 1e-4 && converged == 20 && dominated_pairs == 0 &&
           smartgrid_seconds < 120.0;
  o.detail = fmt("parabola front error %.2e; smartgrid %.0f/20 converged, %.0f dominated pairs, %.1f s",
                 front_err, converged, dominated_pairs, smartgrid_seconds);
  return o;
}

Outcome rk4_order() {
  const Problem p = get_problem("example31");
  std::vector<double> errs;
  for (int N : {10, 20, 40}) {
    const Trajectory tr = integrate_state(p, Matrix::Zero(N, 3), Grid(N));
    Vector exact(2);
    exact << testing::example31_x1(1.0), testing::example31_x2(1.0);
    errs.push_back((tr.state(N) - exact).norm());
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  return {r1 >= 12.0 && r2 >= 12.0, fmt("error ratios %.2f (10->20), %.2f (20->40)", r1, r2)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace mokkt

int main() {
  using namespace mokkt;
  double sweep_seconds = 0.0;
  const std::vector<Criterion> criteria = {
      {1, "example31 structure", 1.0, example31_structure},
      {2, "principal matrix oracle", 2.0, principal_matrix_oracle},
      {3, "controllability inverse", 5.0, controllability_inverse},
      {4, "smartgrid constraint qualification route", 10.0, smartgrid_cq_route},
      {5, "smartgrid adjoint structure", 10.0, smartgrid_adjoint_structure},
      {6, "lq1 end to end", 30.0, lq_end_to_end},
      {7, "NLP gradient checks", 60.0, gradient_checks},
      {8, "theta resubstitution", 10.0, theta_resubstitution},
      {9, "discrete/continuous multipliers on lq1", 30.0, lq_multiplier_consistency},
      {10, "Pareto sweep sanity", 180.0, [&] { return pareto_sanity(sweep_seconds); }},
      {11, "RK4 convergence order", 1.0, rk4_order},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_seconds;
    if (!pass) ++failures;
    std::printf("criterion %2d %s  %s: %s (%.2f s, budget %.0f s)\n", c.id, pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), secs, c.budget_seconds);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
