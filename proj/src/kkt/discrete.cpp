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

namespace mokkt {

ScaledMultipliers grid_scaled_multipliers(const NlpMultipliers& mult, const Grid& grid,
                                          const Vector& weights) {
  const double norm = weights.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("grid_scaled_multipliers: zero weight vector");
  return {mult.endpoint / norm, mult.path / (grid.step() * norm)};
}

DiscreteKktReport check_discrete_vop_kkt(const Problem& problem, const Trajectory& traj,
                                         const Vector& weights, const NlpMultipliers& mult) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  DiscreteKktReport rep;
  const Linearization lin = linearize(problem, traj);
  const Matrix grad = combination_gradient(problem, traj, lin, {weights, mult.endpoint, mult.path});
  rep.stationarity = grad.cwiseAbs().maxCoeff() / h;

  double lo = std::min(weights.size() ? weights.minCoeff() : 0.0, 0.0);
  if (mult.endpoint.size()) lo = std::min(lo, mult.endpoint.minCoeff());
  if (mult.path.size()) lo = std::min(lo, mult.path.minCoeff());
  rep.min_multiplier = lo;

  const Vector hv = problem.endpoint_constraint.value(traj.state(N));
  const Matrix g = path_constraint_values(problem, traj);
  double comp = 0.0;
  if (mult.endpoint.size()) comp = mult.endpoint.cwiseProduct(hv).cwiseAbs().maxCoeff();
  if (mult.path.size()) comp = std::max(comp, mult.path.cwiseProduct(g).cwiseAbs().maxCoeff() / h);
  rep.complementarity = comp;

  double feas = std::max({0.0, hv.maxCoeff(), g.maxCoeff(),
                          (traj.state(0) - problem.x0).cwiseAbs().maxCoeff()});
  for (int i = 0; i < N; ++i) {
    const Vector x1 = rk4_step(problem.dynamics, traj.grid.node(i), h, traj.state(i), traj.control(i));
    feas = std::max(feas, (x1 - traj.state(i + 1)).cwiseAbs().maxCoeff());
  }
  rep.feasibility = feas;
  return rep;
}

}  // namespace mokkt
