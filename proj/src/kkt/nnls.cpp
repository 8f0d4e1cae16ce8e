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
#include <vector>

#include "mokkt/nnls.hpp"

namespace mokkt {

namespace {

// Least-squares solution restricted to the columns flagged in `passive`.
Vector restricted_solve(const Matrix& A, const Vector& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (passive[j]) cols.push_back(j);
  }
  Matrix Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
  const Vector z = Eigen::CompleteOrthogonalDecomposition<Matrix>(Ap).solve(b);
  Vector s = Vector::Zero(A.cols());
  for (size_t c = 0; c < cols.size(); ++c) s(cols[c]) = z(static_cast<Eigen::Index>(c));
  return s;
}

}  // namespace

NnlsResult nnls(const Matrix& A, const Vector& b, int max_iterations) {
  const auto n = A.cols();
  if (A.rows() != b.size()) throw std::invalid_argument("nnls: dimension mismatch");
  const int max_iter = max_iterations > 0 ? max_iterations : static_cast<int>(3 * n + 10);
  const double col_norm = n > 0 ? A.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * col_norm *
                     static_cast<double>(std::max(A.rows(), n)) * std::max(1.0, b.norm());

  NnlsResult out;
  out.x = Vector::Zero(n);
  std::vector<bool> passive(n, false);
  Vector w = A.transpose() * b;
  while (true) {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
    }
    if (best < 0) {
      out.converged = true;
      break;
    }
    if (out.iterations >= max_iter) break;
    ++out.iterations;
    passive[best] = true;

    for (Eigen::Index inner = 0; inner <= n; ++inner) {
      const Vector s = restricted_solve(A, b, passive);
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && s(j) <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, out.x(j) / (out.x(j) - s(j)));
        }
      }
      if (feasible) {
        out.x = s;
        break;
      }
      out.x += alpha * (s - out.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && out.x(j) <= tol) {
          passive[j] = false;
          out.x(j) = 0.0;
        }
      }
    }
    w = A.transpose() * (b - A * out.x);
  }
  out.residual_norm = (A * out.x - b).norm();
  return out;
}

}  // namespace mokkt
