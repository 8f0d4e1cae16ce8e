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
#include <limits>

#include "mokkt/cq.hpp"

namespace mokkt {

H4PrimeResult check_h4prime(const Problem& problem, const Trajectory& traj,
                            const H4PrimeOptions& options) {
  const int N = traj.grid.intervals();
  const int n = problem.n, m = problem.m, r = problem.r;
  const Eigen::Index nu = static_cast<Eigen::Index>(N) * m;
  const Eigen::Index eps = nu;
  const Linearization lin = linearize(problem, traj);

  LinearProgram lp;
  lp.A = Matrix::Zero(n + static_cast<Eigen::Index>(N) * r, nu + 1);
  lp.b = Vector(lp.A.rows());
  lp.c = Vector::Unit(nu + 1, eps);
  lp.lower = Vector::Constant(nu + 1, -options.u_box);
  lp.upper = Vector::Constant(nu + 1, options.u_box);
  lp.lower(eps) = -std::numeric_limits<double>::infinity();
  lp.upper(eps) = std::numeric_limits<double>::infinity();

  const Vector hval = problem.endpoint_constraint.value(traj.state(N));
  for (int q = 0; q < n; ++q) {
    const Matrix grad =
        combination_gradient(problem, traj, lin, {Vector(), Vector::Unit(n, q), Matrix()});
    lp.A.row(q).head(nu) = grad.transpose().reshaped().transpose();
    lp.A(q, eps) = 1.0;
    lp.b(q) = -hval(q);
  }
  const Matrix gval = path_constraint_values(problem, traj);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < r; ++j) {
      const Eigen::Index row = n + static_cast<Eigen::Index>(i) * r + j;
      const Matrix grad = path_row_gradient(problem, traj, lin, i, j);
      // Rows i+1.. of grad are zero.
      lp.A.row(row).head(static_cast<Eigen::Index>(i + 1) * m) =
          grad.topRows(i + 1).transpose().reshaped().transpose();
      lp.A(row, eps) = 1.0;
      lp.b(row) = -gval(i, j);
    }
  }

  Vector start = Vector::Zero(nu + 1);
  start(eps) = lp.b.minCoeff();
  const LpResult res = solve_lp(lp, start, options.lp);

  H4PrimeResult out;
  out.status = to_string(res.status);
  out.u_hat = res.x.head(nu).reshaped(m, N).transpose();
  out.x_hat = propagate_tangent(lin, out.u_hat).x;
  out.slack = res.x(eps);
  out.ok = res.status == LpStatus::kOptimal && out.slack > options.slack_tol;
  return out;
}

DirectionMargins evaluate_h4prime_direction(const Problem& problem, const Trajectory& traj,
                                            const IntervalVectorFn& u_hat, int refine) {
  if (refine < 1) throw std::invalid_argument("evaluate_h4prime_direction: refine must be >= 1");
  const int N = traj.grid.intervals();
  const double hf = traj.grid.step() / refine;
  DirectionMargins out;
  out.path = Vector::Constant(problem.r, -std::numeric_limits<double>::infinity());

  Vector xh = Vector::Zero(problem.n);
  for (int i = 0; i < N; ++i) {
    const Vector u = traj.control(i);
    auto rhs = [&](double t, const Vector& y) {
      const StageJet phi = problem.dynamics.eval(t, interpolate_state(problem, traj, i, t), u);
      return Vector(phi.dx * y + phi.du * u_hat(t, i));
    };
    for (int s = 0; s < refine; ++s) {
      const double t0 = traj.grid.node(i) + s * hf, t1 = t0 + hf, tm = t0 + 0.5 * hf;
      const Vector k1 = rhs(t0, xh);
      const Vector k2 = rhs(tm, xh + 0.5 * hf * k1);
      const Vector k3 = rhs(tm, xh + 0.5 * hf * k2);
      const Vector k4 = rhs(t1, xh + hf * k3);
      const Vector next = xh + (hf / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const Vector xm = 0.5 * (xh + next) + (hf / 8.0) * (k1 - rhs(t1, next));
      const StageJet g =
          problem.mixed_constraint.eval(tm, interpolate_state(problem, traj, i, tm), u);
      const Vector lin_g = g.value + g.dx * xm + g.du * u_hat(tm, i);
      out.path = out.path.cwiseMax(lin_g);
      xh = next;
    }
  }
  const EndpointJet h = problem.endpoint_constraint.eval(traj.state(N));
  out.endpoint = h.value + h.dx * xh;
  out.worst = std::max(out.endpoint.maxCoeff(), out.path.maxCoeff());
  return out;
}

}  // namespace mokkt
