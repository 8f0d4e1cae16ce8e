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

#include "mokkt/kkt.hpp"

namespace mokkt {

/// Single-shooting transcription of min w^T J subject to h(x_N) <= 0 and g <= 0 at the
/// interval midpoints. The decision vector is the control array flattened row by row
/// (index i*m + j); constraints are stacked as h (n rows) then g (row i*r + j).
class TranscribedNLP {
 public:
  TranscribedNLP(const Problem& problem, const Grid& grid, Vector weights);

  const Problem& problem() const { return problem_; }
  const Grid& grid() const { return grid_; }
  const Vector& weights() const { return weights_; }
  int size() const { return grid_.intervals() * problem_.m; }
  int constraint_count() const { return problem_.n + grid_.intervals() * problem_.r; }

  Vector flatten(const Matrix& u) const;
  Matrix controls(const Vector& z) const;
  Trajectory simulate(const Vector& z) const;

  double objective(const Trajectory& traj) const;
  Vector constraints(const Trajectory& traj) const;

  /// Gradient of w^T J + sum_c mult_c c_c(z); `mult` has constraint_count() entries
  /// (empty means zero).
  Vector lagrangian_gradient(const Trajectory& traj, const Vector& mult = Vector()) const;

  /// Splits a stacked constraint-space vector into endpoint and path parts.
  NlpMultipliers split(const Vector& stacked) const;

 private:
  Problem problem_;
  Grid grid_;
  Vector weights_;
};

struct SolverOptions {
  double violation_tol = 1e-7;
  double gradient_tol = 1e-7;  ///< on |grad L|_inf / h
  int max_outer = 50;
  int max_inner = 4000;
  double rho0 = 10.0;
  double rho_max = 1e10;
  int lbfgs_memory = 12;
  double armijo = 1e-4;
};

struct SolveResult {
  Trajectory traj;
  Vector weights;
  Vector J;
  NlpMultipliers multipliers;  ///< NLP scale: path entries carry the quadrature weight h
  bool converged = false;
  std::string status;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double violation = 0.0;     ///< max(0, constraints) after the final iterate
  double stationarity = 0.0;  ///< |grad L|_inf / h
  double complementarity = 0.0;
  double rho = 0.0;
};

/// Augmented Lagrangian with an L-BFGS inner solver and Armijo backtracking.
/// `weights` are simplex weights; `u_init` has one row per interval.
SolveResult solve_scalarized(const Problem& problem, const Vector& weights, const Matrix& u_init,
                             const SolverOptions& opts = {});

/// Deterministic weights on the (k-1)-simplex: evenly spaced for k = 2, Halton points
/// (starting at index seed + 1) mapped by sorted spacings for k >= 3.
std::vector<Vector> simplex_weights(int k, int count, std::uint64_t seed = 0);

/// Indices of points not dominated by any other (b <= a + tol everywhere and
/// b < a - tol somewhere). Input order is kept; duplicates all survive.
std::vector<std::size_t> dominance_filter(const std::vector<Vector>& points, double tol = 1e-10);

struct ParetoPoint {
  Vector weights;
  Vector lambda;  ///< w / |w|_2, used for verification
  Vector J;
  Trajectory traj;
  SolveResult solve;
  KKTReport kkt;
  bool kept = false;  ///< converged and non-dominated
};

struct ParetoOptions {
  int weight_count = 11;
  std::uint64_t seed = 0;
  int jobs = 1;  ///< > 1 runs cold-started solves concurrently
  int grid_n = 1000;
  SolverOptions solver;
  KktTolerances kkt;
};

struct ParetoResult {
  std::vector<ParetoPoint> points;  ///< every attempted weight in sweep order
  std::vector<std::size_t> front;   ///< indices of kept points
};

ParetoResult pareto_sweep(const Problem& problem, const ParetoOptions& opts);

}  // namespace mokkt
