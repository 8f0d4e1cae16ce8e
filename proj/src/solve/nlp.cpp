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

#include "mokkt/solve.hpp"

namespace mokkt {

TranscribedNLP::TranscribedNLP(const Problem& problem, const Grid& grid, Vector weights)
    : problem_(problem), grid_(grid), weights_(std::move(weights)) {
  if (weights_.size() != problem_.k) {
    throw std::invalid_argument("TranscribedNLP: weight vector has wrong length");
  }
}

Vector TranscribedNLP::flatten(const Matrix& u) const {
  if (u.rows() != grid_.intervals() || u.cols() != problem_.m) {
    throw std::invalid_argument("TranscribedNLP: control array has wrong shape");
  }
  return Matrix(u.transpose()).reshaped();
}

Matrix TranscribedNLP::controls(const Vector& z) const {
  if (z.size() != size()) throw std::invalid_argument("TranscribedNLP: decision has wrong length");
  return Matrix(z.reshaped(problem_.m, grid_.intervals()).transpose());
}

Trajectory TranscribedNLP::simulate(const Vector& z) const {
  return integrate_state(problem_, controls(z), grid_);
}

double TranscribedNLP::objective(const Trajectory& traj) const {
  return weights_.dot(objective_values(problem_, traj));
}

Vector TranscribedNLP::constraints(const Trajectory& traj) const {
  Vector c(constraint_count());
  c.head(problem_.n) = problem_.endpoint_constraint.value(traj.state(grid_.intervals()));
  c.tail(grid_.intervals() * problem_.r) =
      Matrix(path_constraint_values(problem_, traj).transpose()).reshaped();
  return c;
}

NlpMultipliers TranscribedNLP::split(const Vector& stacked) const {
  if (stacked.size() != constraint_count()) {
    throw std::invalid_argument("TranscribedNLP: multiplier vector has wrong length");
  }
  const Vector path = stacked.tail(grid_.intervals() * problem_.r);
  return {stacked.head(problem_.n),
          Matrix(path.reshaped(problem_.r, grid_.intervals()).transpose())};
}

Vector TranscribedNLP::lagrangian_gradient(const Trajectory& traj, const Vector& mult) const {
  FunctionalWeights w;
  w.objective = weights_;
  if (mult.size() > 0) {
    const NlpMultipliers nm = split(mult);
    w.endpoint = nm.endpoint;
    w.path = nm.path;
  }
  return flatten(combination_gradient(problem_, traj, linearize(problem_, traj), w));
}

}  // namespace mokkt
