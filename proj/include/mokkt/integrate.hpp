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

#include <functional>
#include <vector>

#include "mokkt/model.hpp"

namespace mokkt {

/// One classical RK4 step of x' = phi(t, x, u) with u frozen over the step.
Vector rk4_step(const StageFunction& phi, double t, double h, const Vector& x, const Vector& u);

/// Forward propagation of the state; throws NumericalError at the first non-finite node.
Trajectory integrate_state(const Problem& problem, const Matrix& u, const Grid& grid);

/// Cubic Hermite state inside interval i at time t in [t_i, t_{i+1}].
Vector interpolate_state(const Problem& problem, const Trajectory& traj, int interval, double t);

/// Hermite state at the midpoint of interval i.
Vector midpoint_state(const Problem& problem, const Trajectory& traj, int interval);

/// N x r matrix of g at the interval midpoints.
Matrix path_constraint_values(const Problem& problem, const Trajectory& traj);

/// Objective vector J (Simpson rule per interval plus terminal cost).
Vector objective_values(const Problem& problem, const Trajectory& traj);

/// Backward RK4 solution of p' = -phi_x^T p + L_x^T lambda + g_x^T theta,
/// p(1) = -(lambda^T l'(x(1)) + l^T h'(x(1)))^T; theta is N x r, constant per interval.
/// Returns the (N+1) x n costate at the nodes.
Matrix integrate_adjoint(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                         const Vector& l, const Matrix& theta);

/// Right-hand side of the adjoint equation at (t, x, u) for fixed multipliers.
Vector adjoint_rhs(const Problem& problem, double t, const Vector& x, const Vector& u,
                   const Vector& p, const Vector& lambda, const Vector& theta);

/// Derivatives of one RK4 step and of the Hermite midpoint for interval i.
struct IntervalLinearization {
  Matrix jx;      ///< d x_{i+1} / d x_i
  Matrix ju;      ///< d x_{i+1} / d u_i
  Matrix mid_x0;  ///< d x_mid / d x_i (holding x_{i+1} fixed)
  Matrix mid_x1;  ///< d x_mid / d x_{i+1}
  Matrix mid_u;   ///< d x_mid / d u_i (holding both nodes fixed)
  Vector x_mid;
};

struct Linearization {
  std::vector<IntervalLinearization> intervals;
};

Linearization linearize(const Problem& problem, const Trajectory& traj);

/// Weights of the scalar functional
///   objective^T J + endpoint^T h(x(1)) + sum_i path.row(i) g(t_mid_i, x_mid_i, u_i).
/// Empty members count as zero.
struct FunctionalWeights {
  Vector objective;
  Vector endpoint;
  Matrix path;
};

/// Gradient (N x m) of the weighted functional with respect to the controls,
/// by a reverse sweep through the RK4 recurrence.
Matrix combination_gradient(const Problem& problem, const Trajectory& traj,
                            const Linearization& lin, const FunctionalWeights& weights);

/// Gradient (N x m) of the single path constraint g_j at the midpoint of `interval`.
Matrix path_row_gradient(const Problem& problem, const Trajectory& traj, const Linearization& lin,
                         int interval, int j);

/// Solution of the linearized recurrence driven by du (and initial perturbation dx0).
struct Tangent {
  Matrix x;      ///< (N+1) x n
  Matrix x_mid;  ///< N x n
};

Tangent propagate_tangent(const Linearization& lin, const Matrix& du, const Vector& dx0 = Vector());

/// Time-dependent matrix evaluated on interval i at time t.
using IntervalMatrixFn = std::function<Matrix(double t, int interval)>;
using IntervalVectorFn = std::function<Vector(double t, int interval)>;

struct PrincipalMatrix {
  Grid grid;
  std::vector<Matrix> omega_1s;  ///< entry i holds Omega(1, t_i)
  double condition_estimate = 1.0;
  bool backward_fallback = false;
};

/// Omega(1, t_i) of x' = A(t) x from Phi(1) Phi(t_i)^{-1}, with backward integration
/// of d/ds Omega(1, s) = -Omega(1, s) A(s) when Phi is too ill-conditioned.
PrincipalMatrix principal_matrix(const IntervalMatrixFn& A, const Grid& grid,
                                 double fallback_condition = 1e12);

/// Forward RK4 transition matrix Omega(t_j, t_i) for i <= j.
Matrix transition_matrix(const IntervalMatrixFn& A, const Grid& grid, int from, int to);

struct Gramian {
  Matrix W;
  Vector eigenvalues;
  double min_eig = 0.0;
  double rank_tol = 0.0;
};

/// W = int_0^1 Omega(1,s) B(s) B(s)^T Omega(1,s)^T ds by the composite trapezoid rule.
/// B is sampled at the nodes with the interval on the left (the last node uses interval N-1).
Gramian controllability_gramian(const IntervalMatrixFn& A, const IntervalMatrixFn& B,
                                const Grid& grid, double rank_tol = 1e-10);
Gramian controllability_gramian(const PrincipalMatrix& omega, const IntervalMatrixFn& B,
                                double rank_tol = 1e-10);

/// H(v) = int_0^1 Omega(1,s) B(s) v(s) ds (composite Simpson for even N, trapezoid otherwise).
Vector reachability_map(const PrincipalMatrix& omega, const IntervalMatrixFn& B,
                        const IntervalVectorFn& v);

}  // namespace mokkt
