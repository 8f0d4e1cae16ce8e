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

#include "mokkt/integrate.hpp"

namespace mokkt {

namespace {

// One RK4 step of Phi' = A(t) Phi on interval i, forward.
Matrix transition_step(const IntervalMatrixFn& A, const Grid& grid, int i, const Matrix& phi) {
  const double h = grid.step();
  const double t0 = grid.node(i), tm = grid.midpoint(i), t1 = grid.node(i + 1);
  const Matrix a0 = A(t0, i), am = A(tm, i), a1 = A(t1, i);
  const Matrix k1 = a0 * phi;
  const Matrix k2 = am * (phi + 0.5 * h * k1);
  const Matrix k3 = am * (phi + 0.5 * h * k2);
  const Matrix k4 = a1 * (phi + h * k3);
  return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix node_value(const IntervalMatrixFn& B, const Grid& grid, int i) {
  return B(grid.node(i), std::min(i, grid.intervals() - 1));
}

}  // namespace

PrincipalMatrix principal_matrix(const IntervalMatrixFn& A, const Grid& grid,
                                 double fallback_condition) {
  const int N = grid.intervals();
  const Matrix a = A(0.0, 0);
  const auto n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("principal_matrix: A must be square");

  std::vector<Matrix> phi(N + 1);
  phi[0] = Matrix::Identity(n, n);
  for (int i = 0; i < N; ++i) {
    phi[i + 1] = transition_step(A, grid, i, phi[i]);
    if (!phi[i + 1].allFinite()) {
      throw NumericalError("principal_matrix: non-finite transition matrix at node " +
                           std::to_string(i + 1));
    }
  }

  PrincipalMatrix out{grid, std::vector<Matrix>(N + 1), 1.0, false};
  for (int i = 0; i <= N; ++i) {
    Eigen::PartialPivLU<Matrix> lu(phi[i].transpose());
    const double rcond = lu.rcond();
    out.condition_estimate = std::max(out.condition_estimate, rcond > 0.0 ? 1.0 / rcond : 1e300);
    out.omega_1s[i] = lu.solve(phi[N].transpose()).transpose();
  }
  out.omega_1s[N] = Matrix::Identity(n, n);
  if (out.condition_estimate <= fallback_condition) return out;

  out.backward_fallback = true;
  const double h = grid.step();
  Matrix omega = Matrix::Identity(n, n);
  for (int i = N - 1; i >= 0; --i) {
    const double t1 = grid.node(i + 1), tm = grid.midpoint(i), t0 = grid.node(i);
    const Matrix k1 = -omega * A(t1, i);
    const Matrix k2 = -(omega - 0.5 * h * k1) * A(tm, i);
    const Matrix k3 = -(omega - 0.5 * h * k2) * A(tm, i);
    const Matrix k4 = -(omega - h * k3) * A(t0, i);
    omega = omega - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.omega_1s[i] = omega;
  }
  return out;
}

Matrix transition_matrix(const IntervalMatrixFn& A, const Grid& grid, int from, int to) {
  if (from < 0 || to > grid.intervals() || from > to) {
    throw std::invalid_argument("transition_matrix: need 0 <= from <= to <= N");
  }
  const auto n = A(grid.node(from), std::min(from, grid.intervals() - 1)).rows();
  Matrix phi = Matrix::Identity(n, n);
  for (int i = from; i < to; ++i) phi = transition_step(A, grid, i, phi);
  return phi;
}

Gramian controllability_gramian(const PrincipalMatrix& omega, const IntervalMatrixFn& B,
                                double rank_tol) {
  const Grid& grid = omega.grid;
  const int N = grid.intervals();
  const auto n = omega.omega_1s[0].rows();
  Matrix W = Matrix::Zero(n, n);
  for (int i = 0; i <= N; ++i) {
    const Matrix ob = omega.omega_1s[i] * node_value(B, grid, i);
    const double w = (i == 0 || i == N) ? 0.5 : 1.0;
    W += w * ob * ob.transpose();
  }
  W *= grid.step();
  W = 0.5 * (W + W.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(W);
  Gramian g;
  g.W = W;
  g.eigenvalues = eig.eigenvalues();
  g.min_eig = n > 0 ? g.eigenvalues(0) : 0.0;
  g.rank_tol = rank_tol;
  return g;
}

Gramian controllability_gramian(const IntervalMatrixFn& A, const IntervalMatrixFn& B,
                                const Grid& grid, double rank_tol) {
  return controllability_gramian(principal_matrix(A, grid), B, rank_tol);
}

Vector reachability_map(const PrincipalMatrix& omega, const IntervalMatrixFn& B,
                        const IntervalVectorFn& v) {
  const Grid& grid = omega.grid;
  const int N = grid.intervals();
  const auto n = omega.omega_1s[0].rows();
  const bool simpson = N % 2 == 0;
  Vector sum = Vector::Zero(n);
  for (int i = 0; i <= N; ++i) {
    double w;
    if (i == 0 || i == N) {
      w = simpson ? 1.0 / 3.0 : 0.5;
    } else {
      w = simpson ? (i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0) : 1.0;
    }
    const int interval = std::min(i, N - 1);
    sum += w * (omega.omega_1s[i] * (B(grid.node(i), interval) * v(grid.node(i), interval)));
  }
  return grid.step() * sum;
}

}  // namespace mokkt
