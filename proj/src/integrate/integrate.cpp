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

#include <sstream>

#include "mokkt/integrate.hpp"

namespace mokkt {

Vector rk4_step(const StageFunction& phi, double t, double h, const Vector& x, const Vector& u) {
  const Vector k1 = phi.value(t, x, u);
  const Vector k2 = phi.value(t + 0.5 * h, x + 0.5 * h * k1, u);
  const Vector k3 = phi.value(t + 0.5 * h, x + 0.5 * h * k2, u);
  const Vector k4 = phi.value(t + h, x + h * k3, u);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_state(const Problem& problem, const Matrix& u, const Grid& grid) {
  const int N = grid.intervals();
  if (u.rows() != N || u.cols() != problem.m) {
    std::ostringstream os;
    os << "integrate_state: control array is " << u.rows() << "x" << u.cols() << ", expected "
       << N << "x" << problem.m;
    throw std::invalid_argument(os.str());
  }
  Trajectory traj{grid, Matrix(N + 1, problem.n), u};
  traj.x.row(0) = problem.x0.transpose();
  Vector x = problem.x0;
  const double h = grid.step();
  for (int i = 0; i < N; ++i) {
    x = rk4_step(problem.dynamics, grid.node(i), h, x, u.row(i).transpose());
    if (!x.allFinite()) {
      throw NumericalError("integrate_state: non-finite state at node " + std::to_string(i + 1));
    }
    traj.x.row(i + 1) = x.transpose();
  }
  return traj;
}

Vector interpolate_state(const Problem& problem, const Trajectory& traj, int interval, double t) {
  const double h = traj.grid.step();
  const double t0 = traj.grid.node(interval), t1 = traj.grid.node(interval + 1);
  const double s = (t - t0) / h;
  const Vector x0 = traj.state(interval), x1 = traj.state(interval + 1);
  const Vector u = traj.control(interval);
  const Vector f0 = problem.dynamics.value(t0, x0, u);
  const Vector f1 = problem.dynamics.value(t1, x1, u);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * x1 +
         (s3 - s2) * h * f1;
}

Vector midpoint_state(const Problem& problem, const Trajectory& traj, int interval) {
  const double h = traj.grid.step();
  const Vector x0 = traj.state(interval), x1 = traj.state(interval + 1);
  const Vector u = traj.control(interval);
  const Vector f0 = problem.dynamics.value(traj.grid.node(interval), x0, u);
  const Vector f1 = problem.dynamics.value(traj.grid.node(interval + 1), x1, u);
  return 0.5 * (x0 + x1) + (h / 8.0) * (f0 - f1);
}

Matrix path_constraint_values(const Problem& problem, const Trajectory& traj) {
  const int N = traj.grid.intervals();
  Matrix g(N, problem.r);
  for (int i = 0; i < N; ++i) {
    g.row(i) = problem.mixed_constraint
                   .value(traj.grid.midpoint(i), midpoint_state(problem, traj, i), traj.control(i))
                   .transpose();
  }
  return g;
}

Vector objective_values(const Problem& problem, const Trajectory& traj) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  Vector running = Vector::Zero(problem.k);
  for (int i = 0; i < N; ++i) {
    const Vector u = traj.control(i);
    const auto& L = problem.running_cost;
    running += (h / 6.0) * (L.value(traj.grid.node(i), traj.state(i), u) +
                            4.0 * L.value(traj.grid.midpoint(i), midpoint_state(problem, traj, i), u) +
                            L.value(traj.grid.node(i + 1), traj.state(i + 1), u));
  }
  return running + problem.terminal_cost.value(traj.state(N));
}

Vector adjoint_rhs(const Problem& problem, double t, const Vector& x, const Vector& u,
                   const Vector& p, const Vector& lambda, const Vector& theta) {
  const StageJet phi = problem.dynamics.eval(t, x, u);
  const StageJet L = problem.running_cost.eval(t, x, u);
  const StageJet g = problem.mixed_constraint.eval(t, x, u);
  return -phi.dx.transpose() * p + L.dx.transpose() * lambda + g.dx.transpose() * theta;
}

Matrix integrate_adjoint(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                         const Vector& l, const Matrix& theta) {
  const int N = traj.grid.intervals();
  if (lambda.size() != problem.k || l.size() != problem.n || theta.rows() != N ||
      theta.cols() != problem.r) {
    throw std::invalid_argument("integrate_adjoint: multiplier dimensions do not match problem");
  }
  const double h = traj.grid.step();
  Matrix p(N + 1, problem.n);
  const Vector x1 = traj.state(N);
  Vector pc = -(problem.terminal_cost.eval(x1).dx.transpose() * lambda +
                problem.endpoint_constraint.eval(x1).dx.transpose() * l);
  p.row(N) = pc.transpose();
  for (int i = N - 1; i >= 0; --i) {
    const Vector u = traj.control(i), th = theta.row(i).transpose();
    const Vector xa = traj.state(i + 1), xm = midpoint_state(problem, traj, i), xb = traj.state(i);
    const double ta = traj.grid.node(i + 1), tm = traj.grid.midpoint(i), tb = traj.grid.node(i);
    const Vector k1 = adjoint_rhs(problem, ta, xa, u, pc, lambda, th);
    const Vector k2 = adjoint_rhs(problem, tm, xm, u, pc - 0.5 * h * k1, lambda, th);
    const Vector k3 = adjoint_rhs(problem, tm, xm, u, pc - 0.5 * h * k2, lambda, th);
    const Vector k4 = adjoint_rhs(problem, tb, xb, u, pc - h * k3, lambda, th);
    pc = pc - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!pc.allFinite()) {
      throw NumericalError("integrate_adjoint: non-finite costate at node " + std::to_string(i));
    }
    p.row(i) = pc.transpose();
  }
  return p;
}

}  // namespace mokkt
