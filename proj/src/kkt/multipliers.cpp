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

#include <algorithm>
#include <cmath>

#include "mokkt/kkt.hpp"
#include "mokkt/nnls.hpp"

namespace mokkt {

namespace {

double inf_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Node and midpoint data of interval i.
struct IntervalPoints {
  double t0, tm, t1;
  Vector x0, xm, x1, u;
};

IntervalPoints points(const Problem& problem, const Trajectory& traj, int i) {
  return {traj.grid.node(i),       traj.grid.midpoint(i),
          traj.grid.node(i + 1),   traj.state(i),
          midpoint_state(problem, traj, i), traj.state(i + 1),
          traj.control(i)};
}

// Backward RK4 step of the adjoint equation from t_{i+1} to t_i.
Vector backward_step(const Problem& problem, const IntervalPoints& d, double h, const Vector& p1,
                     const Vector& lambda, const Vector& theta) {
  const Vector k1 = adjoint_rhs(problem, d.t1, d.x1, d.u, p1, lambda, theta);
  const Vector k2 = adjoint_rhs(problem, d.tm, d.xm, d.u, p1 - 0.5 * h * k1, lambda, theta);
  const Vector k3 = adjoint_rhs(problem, d.tm, d.xm, d.u, p1 - 0.5 * h * k2, lambda, theta);
  const Vector k4 = adjoint_rhs(problem, d.t0, d.x0, d.u, p1 - h * k3, lambda, theta);
  return p1 - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector hermite_costate(const Problem& problem, const IntervalPoints& d, double h, const Vector& p0,
                       const Vector& p1, const Vector& lambda, const Vector& theta) {
  const Vector f0 = adjoint_rhs(problem, d.t0, d.x0, d.u, p0, lambda, theta);
  const Vector f1 = adjoint_rhs(problem, d.t1, d.x1, d.u, p1, lambda, theta);
  return 0.5 * (p0 + p1) + (h / 8.0) * (f0 - f1);
}

Vector midpoint_residual(const Problem& problem, const IntervalPoints& d, const Vector& pm,
                         const Vector& lambda, const Vector& theta) {
  const StageJet L = problem.running_cost.eval(d.tm, d.xm, d.u);
  const StageJet phi = problem.dynamics.eval(d.tm, d.xm, d.u);
  const StageJet g = problem.mixed_constraint.eval(d.tm, d.xm, d.u);
  return L.du.transpose() * lambda - phi.du.transpose() * pm + g.du.transpose() * theta;
}

Vector terminal_costate(const Problem& problem, const Vector& x1, const Vector& lambda,
                        const Vector& l) {
  return -(problem.terminal_cost.eval(x1).dx.transpose() * lambda +
           problem.endpoint_constraint.eval(x1).dx.transpose() * l);
}

double stationarity_scale(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                          const Matrix& p) {
  double lu = 0.0;
  for (int i = 0; i < traj.grid.intervals(); ++i) {
    const StageJet L = problem.running_cost.eval(traj.grid.midpoint(i),
                                                 midpoint_state(problem, traj, i), traj.control(i));
    lu = std::max(lu, inf_norm(L.du.transpose() * lambda));
  }
  return 1.0 + lu + inf_norm(p);
}

bool is_normal(const Vector& lambda, double tol) {
  return lambda.size() > 0 && lambda.minCoeff() >= 0.0 && std::abs(lambda.norm() - 1.0) <= tol;
}

}  // namespace

Vector theta_density(const Problem& problem, double t, const Vector& x, const Vector& u,
                     const Vector& lambda, const Vector& p) {
  const StageJet L = problem.running_cost.eval(t, x, u);
  const StageJet phi = problem.dynamics.eval(t, x, u);
  const StageJet g = problem.mixed_constraint.eval(t, x, u);
  Eigen::LLT<Matrix> llt(g.du * g.du.transpose());
  if (llt.info() != Eigen::Success) throw NumericalError("extract_theta: R is singular");
  return llt.solve(g.du * (phi.du.transpose() * p - L.du.transpose() * lambda));
}

Matrix extract_theta(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                     const Matrix& p_mid) {
  const int N = traj.grid.intervals();
  if (p_mid.rows() != N || p_mid.cols() != problem.n) {
    throw std::invalid_argument("extract_theta: costate must have one row per interval");
  }
  Matrix theta(N, problem.r);
  for (int i = 0; i < N; ++i) {
    theta.row(i) = theta_density(problem, traj.grid.midpoint(i), midpoint_state(problem, traj, i),
                                 traj.control(i), lambda, p_mid.row(i).transpose())
                       .transpose();
  }
  return theta;
}

Matrix costate_at_midpoints(const Problem& problem, const Trajectory& traj,
                            const MultiplierSet& mult) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  Matrix pm(N, problem.n);
  for (int i = 0; i < N; ++i) {
    pm.row(i) = hermite_costate(problem, points(problem, traj, i), h, mult.p.row(i).transpose(),
                                mult.p.row(i + 1).transpose(), mult.lambda,
                                mult.theta.row(i).transpose())
                    .transpose();
  }
  return pm;
}

Matrix stationarity_residual(const Problem& problem, const Trajectory& traj,
                             const MultiplierSet& mult) {
  const int N = traj.grid.intervals();
  const Matrix pm = costate_at_midpoints(problem, traj, mult);
  Matrix res(N, problem.m);
  for (int i = 0; i < N; ++i) {
    res.row(i) = midpoint_residual(problem, points(problem, traj, i), pm.row(i).transpose(),
                                   mult.lambda, mult.theta.row(i).transpose())
                     .transpose();
  }
  return res;
}

ActiveSets active_sets(const Problem& problem, const Trajectory& traj, double activity) {
  ActiveSets act;
  const int N = traj.grid.intervals();
  const Vector hv = problem.endpoint_constraint.value(traj.state(N));
  for (int q = 0; q < problem.n; ++q) {
    if (std::abs(hv(q)) <= activity) act.endpoint.push_back(q);
  }
  const Matrix g = path_constraint_values(problem, traj);
  act.path.resize(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < problem.r; ++j) {
      if (g(i, j) >= -activity) act.path[i].push_back(j);
    }
  }
  return act;
}

AdjointSweep adjoint_sweep(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                           const Vector& l, const ActiveSets& active) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  AdjointSweep out{Matrix(N + 1, problem.n), Matrix::Zero(N, problem.r), Matrix(N, problem.m)};
  Vector p1 = terminal_costate(problem, traj.state(N), lambda, l);
  out.p.row(N) = p1.transpose();
  for (int i = N - 1; i >= 0; --i) {
    const IntervalPoints d = points(problem, traj, i);
    Vector theta = Vector::Zero(problem.r);
    auto residual = [&](const Vector& th) {
      const Vector p0 = backward_step(problem, d, h, p1, lambda, th);
      return midpoint_residual(problem, d, hermite_costate(problem, d, h, p0, p1, lambda, th),
                               lambda, th);
    };
    const std::vector<int>& J = active.path[i];
    if (!J.empty()) {
      const Vector r0 = residual(theta);
      Matrix M(problem.m, static_cast<Eigen::Index>(J.size()));
      for (size_t c = 0; c < J.size(); ++c) {
        M.col(static_cast<Eigen::Index>(c)) = residual(Vector::Unit(problem.r, J[c])) - r0;
      }
      const Vector z = Eigen::CompleteOrthogonalDecomposition<Matrix>(M).solve(-r0);
      for (size_t c = 0; c < J.size(); ++c) theta(J[c]) = z(static_cast<Eigen::Index>(c));
    }
    const Vector p0 = backward_step(problem, d, h, p1, lambda, theta);
    if (!p0.allFinite()) {
      throw NumericalError("adjoint_sweep: non-finite costate at node " + std::to_string(i));
    }
    out.residual.row(i) =
        midpoint_residual(problem, d, hermite_costate(problem, d, h, p0, p1, lambda, theta), lambda,
                          theta)
            .transpose();
    out.theta.row(i) = theta.transpose();
    out.p.row(i) = p0.transpose();
    p1 = p0;
  }
  return out;
}

Reconstruction reconstruct_multipliers(const Problem& problem, const Trajectory& traj,
                                       const Vector& lambda, const KktTolerances& tol) {
  if (lambda.size() != problem.k) {
    throw std::invalid_argument("reconstruct_multipliers: lambda has wrong length");
  }
  Reconstruction rec;
  rec.active = active_sets(problem, traj, tol.activity);
  Vector l = Vector::Zero(problem.n);
  const auto& I = rec.active.endpoint;
  if (!I.empty()) {
    const double w = std::sqrt(traj.grid.step());
    const Vector r0 = w * adjoint_sweep(problem, traj, lambda, l, rec.active).residual.reshaped();
    Matrix M(r0.size(), static_cast<Eigen::Index>(I.size()));
    for (size_t c = 0; c < I.size(); ++c) {
      const Vector e = Vector::Unit(problem.n, I[c]);
      M.col(static_cast<Eigen::Index>(c)) =
          w * adjoint_sweep(problem, traj, lambda, e, rec.active).residual.reshaped() - r0;
    }
    const NnlsResult sol = nnls(M, -r0);
    for (size_t c = 0; c < I.size(); ++c) l(I[c]) = sol.x(static_cast<Eigen::Index>(c));
  }
  const AdjointSweep sw = adjoint_sweep(problem, traj, lambda, l, rec.active);
  rec.multipliers = {lambda, l, sw.p, sw.theta, is_normal(lambda, tol.normalization)};

  const double scale = stationarity_scale(problem, traj, lambda, sw.p);
  const double resid = inf_norm(sw.residual);
  rec.found = resid <= 10.0 * tol.stationarity * scale;
  rec.status = rec.found ? "multipliers reconstructed" : "no normal multiplier found at this lambda";
  return rec;
}

KKTReport verify_multipliers(const Problem& problem, const Trajectory& traj,
                             const MultiplierSet& mult, const KktTolerances& tol) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  KKTReport rep;
  rep.tolerances = tol;
  rep.multipliers = mult;

  const double p_norm = inf_norm(mult.p);
  rep.stationarity_resid = inf_norm(stationarity_residual(problem, traj, mult));
  rep.stationarity_tol = tol.stationarity * stationarity_scale(problem, traj, mult.lambda, mult.p);

  double adjoint = 0.0, dynamics = (traj.state(0) - problem.x0).cwiseAbs().maxCoeff();
  for (int i = 0; i < N; ++i) {
    const IntervalPoints d = points(problem, traj, i);
    const Vector p0 = backward_step(problem, d, h, mult.p.row(i + 1).transpose(), mult.lambda,
                                    mult.theta.row(i).transpose());
    adjoint = std::max(adjoint, (p0 - mult.p.row(i).transpose()).cwiseAbs().maxCoeff());
    const Vector x1 = rk4_step(problem.dynamics, d.t0, h, d.x0, d.u);
    dynamics = std::max(dynamics, (x1 - d.x1).cwiseAbs().maxCoeff());
  }
  rep.adjoint_resid = adjoint;
  const Vector xN = traj.state(N);
  rep.transversality_resid =
      (mult.p.row(N).transpose() - terminal_costate(problem, xN, mult.lambda, mult.l)).norm();
  rep.recurrence_tol = tol.recurrence * (1.0 + p_norm);

  const Vector hv = problem.endpoint_constraint.value(xN);
  rep.comp_l_max = mult.l.cwiseProduct(hv).cwiseAbs().maxCoeff();
  rep.comp_l_min = mult.l.minCoeff();
  const Matrix g = path_constraint_values(problem, traj);
  rep.comp_theta_max = mult.theta.cwiseProduct(g).cwiseAbs().maxCoeff();
  rep.comp_theta_min = mult.theta.minCoeff();
  rep.primal_feas = std::max({0.0, hv.maxCoeff(), g.maxCoeff(), dynamics});
  rep.normal = is_normal(mult.lambda, tol.normalization);

  const double l_scale = 1.0 + inf_norm(mult.l), th_scale = 1.0 + inf_norm(mult.theta);
  auto& v = rep.verdict;
  v.adjoint = rep.adjoint_resid <= rep.recurrence_tol;
  v.transversality = rep.transversality_resid <= rep.recurrence_tol;
  v.stationarity = rep.stationarity_resid <= rep.stationarity_tol;
  v.complementarity_l = rep.comp_l_max <= tol.complementarity * l_scale &&
                        rep.comp_l_min >= -tol.complementarity * l_scale;
  v.complementarity_theta = rep.comp_theta_max <= tol.complementarity * th_scale &&
                            rep.comp_theta_min >= -tol.activity * th_scale;
  v.primal_feasibility = rep.primal_feas <= tol.feasibility;
  v.normal = rep.normal;
  v.pass = v.adjoint && v.transversality && v.stationarity && v.complementarity_l &&
           v.complementarity_theta && v.primal_feasibility && v.normal;
  rep.status = v.pass ? "first-order conditions hold" : "first-order conditions violated";
  return rep;
}

KKTReport verify_kkt(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                     const KktTolerances& tol) {
  const Reconstruction rec = reconstruct_multipliers(problem, traj, lambda, tol);
  KKTReport rep = verify_multipliers(problem, traj, rec.multipliers, tol);
  rep.endpoint_active = rec.active.endpoint;
  for (const auto& J : rec.active.path) rep.path_active_count += static_cast<int>(J.size());
  rep.multiplier_found = rec.found;
  if (!rec.found) {
    rep.verdict.pass = false;
    rep.status = rec.status;
  }
  return rep;
}

}  // namespace mokkt
