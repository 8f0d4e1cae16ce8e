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

#include "mokkt/integrate.hpp"

namespace mokkt {

namespace {

void rk4_jacobians(const StageFunction& phi, double t, double h, const Vector& x, const Vector& u,
                   Matrix& jx, Matrix& ju) {
  const auto n = x.size();
  const Matrix I = Matrix::Identity(n, n);

  const StageJet s1 = phi.eval(t, x, u);
  const Matrix k1x = s1.dx, k1u = s1.du;

  const StageJet s2 = phi.eval(t + 0.5 * h, x + 0.5 * h * s1.value, u);
  const Matrix k2x = s2.dx * (I + 0.5 * h * k1x);
  const Matrix k2u = s2.dx * (0.5 * h * k1u) + s2.du;

  const StageJet s3 = phi.eval(t + 0.5 * h, x + 0.5 * h * s2.value, u);
  const Matrix k3x = s3.dx * (I + 0.5 * h * k2x);
  const Matrix k3u = s3.dx * (0.5 * h * k2u) + s3.du;

  const StageJet s4 = phi.eval(t + h, x + h * s3.value, u);
  const Matrix k4x = s4.dx * (I + h * k3x);
  const Matrix k4u = s4.dx * (h * k3u) + s4.du;

  jx = I + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  ju = (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
}

}  // namespace

Linearization linearize(const Problem& problem, const Trajectory& traj) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  const Matrix I = Matrix::Identity(problem.n, problem.n);
  Linearization lin;
  lin.intervals.resize(N);
  for (int i = 0; i < N; ++i) {
    auto& L = lin.intervals[i];
    const Vector x0 = traj.state(i), x1 = traj.state(i + 1), u = traj.control(i);
    rk4_jacobians(problem.dynamics, traj.grid.node(i), h, x0, u, L.jx, L.ju);
    const StageJet f0 = problem.dynamics.eval(traj.grid.node(i), x0, u);
    const StageJet f1 = problem.dynamics.eval(traj.grid.node(i + 1), x1, u);
    L.mid_x0 = 0.5 * I + (h / 8.0) * f0.dx;
    L.mid_x1 = 0.5 * I - (h / 8.0) * f1.dx;
    L.mid_u = (h / 8.0) * (f0.du - f1.du);
    L.x_mid = 0.5 * (x0 + x1) + (h / 8.0) * (f0.value - f1.value);
  }
  return lin;
}

Matrix combination_gradient(const Problem& problem, const Trajectory& traj,
                            const Linearization& lin, const FunctionalWeights& weights) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  const bool has_obj = weights.objective.size() > 0;
  const bool has_end = weights.endpoint.size() > 0;
  const bool has_path = weights.path.size() > 0;

  const Vector xN = traj.state(N);
  Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(problem.n);
  if (has_obj) a += weights.objective.transpose() * problem.terminal_cost.eval(xN).dx;
  if (has_end) a += weights.endpoint.transpose() * problem.endpoint_constraint.eval(xN).dx;

  Matrix grad = Matrix::Zero(N, problem.m);
  for (int i = N - 1; i >= 0; --i) {
    const auto& L = lin.intervals[i];
    const Vector u = traj.control(i);
    const double tm = traj.grid.midpoint(i);
    Eigen::RowVectorXd cmid = Eigen::RowVectorXd::Zero(problem.n);
    Eigen::RowVectorXd cx0 = Eigen::RowVectorXd::Zero(problem.n);
    Eigen::RowVectorXd cx1 = Eigen::RowVectorXd::Zero(problem.n);
    Eigen::RowVectorXd cu = Eigen::RowVectorXd::Zero(problem.m);
    if (has_obj) {
      const Vector& w = weights.objective;
      const StageJet l0 = problem.running_cost.eval(traj.grid.node(i), traj.state(i), u);
      const StageJet lm = problem.running_cost.eval(tm, L.x_mid, u);
      const StageJet l1 = problem.running_cost.eval(traj.grid.node(i + 1), traj.state(i + 1), u);
      cmid += (4.0 * h / 6.0) * (w.transpose() * lm.dx);
      cx0 += (h / 6.0) * (w.transpose() * l0.dx);
      cx1 += (h / 6.0) * (w.transpose() * l1.dx);
      cu += (h / 6.0) * (w.transpose() * (l0.du + 4.0 * lm.du + l1.du));
    }
    if (has_path) {
      const Eigen::RowVectorXd gamma = weights.path.row(i);
      if (!gamma.isZero(0.0)) {
        const StageJet g = problem.mixed_constraint.eval(tm, L.x_mid, u);
        cmid += gamma * g.dx;
        cu += gamma * g.du;
      }
    }
    cx0 += cmid * L.mid_x0;
    cx1 += cmid * L.mid_x1;
    cu += cmid * L.mid_u;
    const Eigen::RowVectorXd next = a + cx1;
    grad.row(i) = cu + next * L.ju;
    a = next * L.jx + cx0;
  }
  return grad;
}

Matrix path_row_gradient(const Problem& problem, const Trajectory& traj, const Linearization& lin,
                         int interval, int j) {
  const int N = traj.grid.intervals();
  Matrix grad = Matrix::Zero(N, problem.m);
  const auto& L = lin.intervals[interval];
  const StageJet g = problem.mixed_constraint.eval(traj.grid.midpoint(interval), L.x_mid,
                                                   traj.control(interval));
  const Eigen::RowVectorXd cmid = g.dx.row(j);
  const Eigen::RowVectorXd cx1 = cmid * L.mid_x1;
  grad.row(interval) = g.du.row(j) + cmid * L.mid_u + cx1 * L.ju;
  Eigen::RowVectorXd a = cx1 * L.jx + cmid * L.mid_x0;
  for (int i = interval - 1; i >= 0 && !a.isZero(0.0); --i) {
    grad.row(i) = a * lin.intervals[i].ju;
    a = a * lin.intervals[i].jx;
  }
  return grad;
}

Tangent propagate_tangent(const Linearization& lin, const Matrix& du, const Vector& dx0) {
  const int N = static_cast<int>(lin.intervals.size());
  const auto n = lin.intervals.front().jx.rows();
  Tangent tan{Matrix(N + 1, n), Matrix(N, n)};
  Vector x = dx0.size() == 0 ? Vector(Vector::Zero(n)) : dx0;
  tan.x.row(0) = x.transpose();
  for (int i = 0; i < N; ++i) {
    const auto& L = lin.intervals[i];
    const Vector ui = du.row(i).transpose();
    const Vector next = L.jx * x + L.ju * ui;
    tan.x_mid.row(i) = (L.mid_x0 * x + L.mid_x1 * next + L.mid_u * ui).transpose();
    tan.x.row(i + 1) = next.transpose();
    x = next;
  }
  return tan;
}

}  // namespace mokkt
