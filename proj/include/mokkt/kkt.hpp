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

#include <cstdint>
#include <string>
#include <vector>

#include "mokkt/integrate.hpp"

namespace mokkt {

/// lambda >= 0, endpoint multiplier l, costate at the nodes and a
/// piecewise-constant mixed-constraint density.
struct MultiplierSet {
  Vector lambda;
  Vector l;
  Matrix p;      ///< (N+1) x n
  Matrix theta;  ///< N x r
  bool normal = false;
};

struct KktTolerances {
  double stationarity = 1e-5;     ///< scaled by 1 + |lambda^T L_u|_inf + |p|_inf
  double complementarity = 1e-6;  ///< scaled by 1 + |multiplier|_inf
  double feasibility = 1e-7;
  double activity = 1e-6;
  double recurrence = 1e-9;  ///< adjoint and transversality defects, scaled by 1 + |p|_inf
  double normalization = 1e-12;
};

struct KktVerdict {
  bool adjoint = false;
  bool stationarity = false;
  bool transversality = false;
  bool complementarity_l = false;
  bool complementarity_theta = false;
  bool primal_feasibility = false;
  bool normal = false;
  bool pass = false;
};

struct KKTReport {
  double stationarity_resid = 0.0;
  double stationarity_tol = 0.0;
  double adjoint_resid = 0.0;
  double transversality_resid = 0.0;
  double recurrence_tol = 0.0;
  double comp_l_max = 0.0;
  double comp_l_min = 0.0;
  double comp_theta_max = 0.0;
  double comp_theta_min = 0.0;
  double primal_feas = 0.0;
  std::vector<double> second_order_values;
  bool normal = false;
  std::vector<int> endpoint_active;
  int path_active_count = 0;
  bool multiplier_found = true;
  std::string status;
  KktVerdict verdict;
  KktTolerances tolerances;
  MultiplierSet multipliers;
};

/// Pointwise density theta = (g_u g_u^T)^{-1} g_u (phi_u^T p - L_u^T lambda) at the
/// interval midpoints; `p_mid` holds the costate there (N x n). Throws if R is singular.
Matrix extract_theta(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                     const Matrix& p_mid);

/// Same formula at a single point.
Vector theta_density(const Problem& problem, double t, const Vector& x, const Vector& u,
                     const Vector& lambda, const Vector& p);

/// Costate at the interval midpoints by Hermite interpolation of the adjoint recurrence.
Matrix costate_at_midpoints(const Problem& problem, const Trajectory& traj,
                            const MultiplierSet& mult);

/// Per-interval stationarity residual L_u^T lambda - phi_u^T p + g_u^T theta at the midpoints.
Matrix stationarity_residual(const Problem& problem, const Trajectory& traj,
                             const MultiplierSet& mult);

/// Active sets used by the reconstruction.
struct ActiveSets {
  std::vector<int> endpoint;               ///< |h_i(x(1))| <= activity
  std::vector<std::vector<int>> path;      ///< per interval, g_j >= -activity
};

ActiveSets active_sets(const Problem& problem, const Trajectory& traj, double activity);

/// Backward sweep for fixed (lambda, l): on every interval theta is restricted to the
/// active components and chosen by least squares on the midpoint stationarity
/// residual; the costate follows the adjoint recurrence exactly.
struct AdjointSweep {
  Matrix p;
  Matrix theta;
  Matrix residual;  ///< N x m stationarity residual
};

AdjointSweep adjoint_sweep(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                           const Vector& l, const ActiveSets& active);

struct Reconstruction {
  MultiplierSet multipliers;
  ActiveSets active;
  bool found = false;
  std::string status;
};

/// Multipliers at a given lambda: l >= 0 on the active endpoint rows by NNLS on the
/// affine map l -> stationarity residual, theta and p from the backward sweep.
Reconstruction reconstruct_multipliers(const Problem& problem, const Trajectory& traj,
                                       const Vector& lambda, const KktTolerances& tol = {});

/// Residuals and verdicts of the first-order conditions for given multipliers.
KKTReport verify_multipliers(const Problem& problem, const Trajectory& traj,
                             const MultiplierSet& mult, const KktTolerances& tol = {});

/// Reconstructs the multipliers at lambda and verifies them.
KKTReport verify_kkt(const Problem& problem, const Trajectory& traj, const Vector& lambda,
                     const KktTolerances& tol = {});

struct CriticalDirection {
  Matrix xtil;      ///< (N+1) x n
  Matrix xtil_mid;  ///< N x n
  Matrix util;      ///< N x m
  std::vector<bool> b1_tight;  ///< per objective
  std::vector<bool> b3_tight;  ///< per endpoint row in the active set
  int b4_tight = 0;            ///< number of tight (interval, component) pairs
  Vector b1_values;            ///< linearized objectives
  Vector b3_values;            ///< linearized active endpoint rows
  double b4_max = 0.0;         ///< max(0, largest linearized active path row)
  double dynamics_defect = 0.0;
};

/// Direction from an arbitrary control perturbation (x_tilde by the linearized recurrence).
CriticalDirection make_direction(const Problem& problem, const Trajectory& traj,
                                 const Matrix& util, double activity = 1e-6);

/// lambda^T l'' + l^T h'' at x(1) plus the trapezoid integral of
/// lambda^T L'' - p^T phi'' + theta^T g'' along (x_tilde, u_tilde).
double second_order_form(const Problem& problem, const Trajectory& traj,
                         const MultiplierSet& mult, const CriticalDirection& dir);

struct SamplingOptions {
  double activity = 1e-6;
  int max_passes = 50;
};

/// Random normal u_tilde projected onto the linearized critical constraints:
/// objective gradients, active endpoint rows and active path rows.
/// Directions are normalized to sqrt(h sum |u_tilde_i|^2) = 1.
std::vector<CriticalDirection> sample_critical_directions(const Problem& problem,
                                                          const Trajectory& traj, int count,
                                                          std::uint64_t seed,
                                                          const SamplingOptions& options = {});

struct SscReport {
  bool precondition_ok = false;
  std::string status;
  double min_eig_luu = 0.0;
  double gamma0 = 0.0;
  bool legendre_ok = false;  ///< lambda^T L_uu >= gamma0 I at every midpoint
  std::vector<double> form_values;
  double min_form = 0.0;
  bool forms_positive = false;
  bool pass = false;
  bool sampled = true;
};

SscReport check_ssc(const Problem& problem, const Trajectory& traj, const MultiplierSet& mult,
                    const std::vector<CriticalDirection>& directions, double gamma0,
                    const KktTolerances& tol = {});

/// Inequality multipliers of the transcribed problem for
/// f + endpoint^T h(x_N) + sum_i path.row(i) g(mid_i).
struct NlpMultipliers {
  Vector endpoint;
  Matrix path;
};

/// Continuous-scale view: l = endpoint / |w|_2, theta = path / (h |w|_2).
struct ScaledMultipliers {
  Vector l;
  Matrix theta;
};

ScaledMultipliers grid_scaled_multipliers(const NlpMultipliers& mult, const Grid& grid,
                                          const Vector& weights);

struct DiscreteKktReport {
  double stationarity = 0.0;  ///< |grad Lagrangian|_inf / h
  double min_multiplier = 0.0;
  double complementarity = 0.0;  ///< max of |mu_q h_q| and |mu_ij g_ij| / h
  double feasibility = 0.0;
};

DiscreteKktReport check_discrete_vop_kkt(const Problem& problem, const Trajectory& traj,
                                         const Vector& weights, const NlpMultipliers& mult);

}  // namespace mokkt
