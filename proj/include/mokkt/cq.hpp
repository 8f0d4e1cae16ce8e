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

#include <optional>
#include <string>
#include <vector>

#include "mokkt/integrate.hpp"
#include "mokkt/lp.hpp"

namespace mokkt {

/// g and its Jacobians at the midpoint of interval i (Hermite state, control u_i).
StageJet mixed_constraint_at(const Problem& problem, const Trajectory& traj, int interval);

/// R = g_u g_u^T at every interval midpoint.
std::vector<Matrix> build_R(const Problem& problem, const Trajectory& traj);

struct H2Result {
  double det = 0.0;
  bool ok = false;
};

/// det h'(x(1)); ok when |det| exceeds `tol`.
H2Result check_h2(const Problem& problem, const Trajectory& traj, double tol = 1e-10);

struct H3Result {
  double gamma = 0.0;
  bool ok = false;
};

/// gamma = min_i |det R[t_i]|; ok when gamma >= gamma_min.
H3Result check_h3(const Problem& problem, const Trajectory& traj, double gamma_min = 1e-8);
H3Result check_h3(const std::vector<Matrix>& R, double gamma_min = 1e-8);

/// Orthonormal bases S_i (m x m*) of ker g_u at every interval midpoint.
struct NullspaceBasis {
  int mstar = 0;
  std::vector<int> rank;
  std::vector<Matrix> S;
  bool constant_dimension = true;
};

/// Per-interval SVD with threshold 1e-10 * sigma_max. Each basis is rotated
/// (orthogonal Procrustes) towards the previous one so S varies smoothly in t.
NullspaceBasis nullspace_basis(const Problem& problem, const Trajectory& traj);

/// A = phi_x - phi_u g_u^T R^{-1} g_x and B = phi_u S at the interval midpoints.
struct ABMatrices {
  std::vector<Matrix> A;
  std::vector<Matrix> B;
};

ABMatrices build_AB(const Problem& problem, const Trajectory& traj, const NullspaceBasis& basis);

/// A(t) and B(t) inside each interval, with the Hermite state and S_i frozen per interval.
IntervalMatrixFn reduced_A(const Problem& problem, const Trajectory& traj);
IntervalMatrixFn reduced_B(const Problem& problem, const Trajectory& traj,
                           const NullspaceBasis& basis);

struct H5Result {
  double min_eig = 0.0;
  bool ok = false;
  Gramian gramian;
};

/// Gramian of (A, B); ok when min_eig > rank_tol * trace(W) / n.
H5Result check_h5(const Problem& problem, const Trajectory& traj, const NullspaceBasis& basis,
                  double rank_tol = 1e-10);
H5Result check_h5(const Gramian& gramian);

struct H4PrimeOptions {
  double u_box = 1e3;
  double slack_tol = 1e-10;
  LpOptions lp;
};

struct H4PrimeResult {
  double slack = 0.0;
  Matrix u_hat;  ///< N x m
  Matrix x_hat;  ///< (N+1) x n
  bool ok = false;
  std::string status;
};

/// Maximizes eps subject to h + h' x_hat(1) <= -eps and g + g_x x_hat + g_u u_hat <= -eps
/// at every interval midpoint, |u_hat| <= u_box, x_hat from the linearized recurrence.
H4PrimeResult check_h4prime(const Problem& problem, const Trajectory& traj,
                            const H4PrimeOptions& options = {});

/// Margins of a direction after re-simulating the linearized dynamics.
struct DirectionMargins {
  Vector endpoint;  ///< h_i + h_i' x_hat(1)
  Vector path;      ///< max over evaluation points of g_j + g_jx x_hat + g_ju u_hat
  double worst = 0.0;
};

/// Simulates x_hat' = phi_x x_hat + phi_u u_hat with `refine` RK4 substeps per interval
/// and evaluates the endpoint and path margins at the substep midpoints. u_hat is
/// queried at arbitrary times with the index of the enclosing interval.
DirectionMargins evaluate_h4prime_direction(const Problem& problem, const Trajectory& traj,
                                            const IntervalVectorFn& u_hat, int refine = 1);

struct CQOptions {
  double h2_tol = 1e-10;
  double gamma_min = 1e-8;
  double rank_tol = 1e-10;
  H4PrimeOptions h4prime;
};

struct CQReport {
  double h2_det = 0.0;
  bool h2_ok = false;
  double h3_gamma = 0.0;
  bool h3_ok = false;
  std::vector<int> h4_rank;
  int h4_mstar = 0;
  bool h4_applicable = false;
  bool h4_constant_dimension = true;
  std::optional<double> h5_min_eig;
  std::optional<bool> h5_ok;
  std::optional<double> h4p_slack;
  std::optional<bool> h4p_ok;
  std::string route;  ///< "H4+H5" or "H4'"
  bool decisive_ok = false;
  std::vector<std::string> notes;
};

/// Runs every check; H5 when H4 applies, the H4' program otherwise.
CQReport check_constraint_qualifications(const Problem& problem, const Trajectory& traj,
                                         const CQOptions& options = {});

}  // namespace mokkt
