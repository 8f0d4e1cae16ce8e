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

#include <cmath>
#include <vector>

#include "mokkt/lp.hpp"

namespace mokkt {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kInfeasibleStart:
      return "infeasible start";
    case LpStatus::kIterationLimit:
      return "iteration limit";
  }
  return "unknown";
}

LpResult solve_lp(const LinearProgram& lp, const Vector& start, const LpOptions& options) {
  const auto rows = lp.A.rows(), nx = lp.A.cols();
  if (lp.b.size() != rows || lp.c.size() != nx || lp.lower.size() != nx ||
      lp.upper.size() != nx || start.size() != nx) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const auto nvar = nx + rows;

  // Variables 0..nx-1 are structural, nx.. are slacks s = b - A x >= 0.
  Vector value(nvar), lo(nvar), hi(nvar);
  value.head(nx) = start;
  value.tail(rows) = lp.b - lp.A * start;
  lo.head(nx) = lp.lower;
  hi.head(nx) = lp.upper;
  lo.tail(rows).setZero();
  hi.tail(rows).setConstant(inf);

  LpResult result;
  for (Eigen::Index j = 0; j < nvar; ++j) {
    if (value(j) < lo(j) - options.feasibility_tol || value(j) > hi(j) + options.feasibility_tol) {
      result.status = LpStatus::kInfeasibleStart;
      result.x = start;
      return result;
    }
  }

  // Dictionary: x_basic(r) = value + sum_j T(r, j) * delta(nonbasic(j)).
  Matrix T = -lp.A;
  Vector d = lp.c;
  std::vector<Eigen::Index> basic(rows), nonbasic(nx);
  for (Eigen::Index r = 0; r < rows; ++r) basic[r] = nx + r;
  for (Eigen::Index j = 0; j < nx; ++j) nonbasic[j] = j;

  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : static_cast<int>(50 * (rows + nx));
  std::vector<Eigen::Index> col_nz, row_nz;
  col_nz.reserve(rows);
  row_nz.reserve(nx);

  for (int iter = 0;; ++iter) {
    // Bland: lowest variable index among improving nonbasic candidates.
    Eigen::Index enter = -1;
    double dir = 0.0;
    for (Eigen::Index j = 0; j < nx; ++j) {
      const Eigen::Index v = nonbasic[j];
      if (enter >= 0 && v >= nonbasic[enter]) continue;
      if (d(j) > options.optimality_tol && value(v) < hi(v)) {
        enter = j;
        dir = 1.0;
      } else if (d(j) < -options.optimality_tol && value(v) > lo(v)) {
        enter = j;
        dir = -1.0;
      }
    }
    if (enter < 0) {
      result.status = LpStatus::kOptimal;
      break;
    }
    if (iter >= max_iter) {
      result.status = LpStatus::kIterationLimit;
      break;
    }
    result.iterations = iter + 1;

    const Eigen::Index ev = nonbasic[enter];
    double step = dir > 0 ? hi(ev) - value(ev) : value(ev) - lo(ev);
    Eigen::Index leave = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double rate = T(r, enter) * dir;
      if (std::abs(T(r, enter)) <= options.pivot_tol) continue;
      const Eigen::Index bv = basic[r];
      double limit;
      if (rate < 0.0) {
        if (lo(bv) == -inf) continue;
        limit = std::max(0.0, (value(bv) - lo(bv)) / -rate);
      } else {
        if (hi(bv) == inf) continue;
        limit = std::max(0.0, (hi(bv) - value(bv)) / rate);
      }
      if (limit < step || (limit == step && leave >= 0 && bv < basic[leave])) {
        step = limit;
        leave = r;
      }
    }
    if (step == inf) {
      result.status = LpStatus::kUnbounded;
      break;
    }

    value(ev) += dir * step;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (T(r, enter) != 0.0) value(basic[r]) += T(r, enter) * dir * step;
    }
    if (leave < 0) {
      value(ev) = dir > 0 ? hi(ev) : lo(ev);
      continue;
    }
    const Eigen::Index lv = basic[leave];
    value(lv) = T(leave, enter) * dir < 0.0 ? lo(lv) : hi(lv);

    // Exchange basic lv (row `leave`) with nonbasic ev (column `enter`).
    const double piv = T(leave, enter);
    col_nz.clear();
    row_nz.clear();
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r != leave && T(r, enter) != 0.0) col_nz.push_back(r);
    }
    for (Eigen::Index j = 0; j < nx; ++j) {
      if (j != enter && T(leave, j) != 0.0) row_nz.push_back(j);
    }
    for (Eigen::Index j : row_nz) T(leave, j) = -T(leave, j) / piv;
    T(leave, enter) = 1.0 / piv;
    for (Eigen::Index j : row_nz) {
      const double trj = T(leave, j);
      for (Eigen::Index r : col_nz) {
        double& t = T(r, j);
        t += T(r, enter) * trj;
        if (std::abs(t) < 1e-15) t = 0.0;
      }
    }
    for (Eigen::Index r : col_nz) T(r, enter) /= piv;
    const double ds = d(enter);
    for (Eigen::Index j : row_nz) d(j) += ds * T(leave, j);
    d(enter) = ds / piv;
    basic[leave] = ev;
    nonbasic[enter] = lv;
  }

  result.x = value.head(nx);
  result.objective = lp.c.dot(result.x);
  return result;
}

}  // namespace mokkt
