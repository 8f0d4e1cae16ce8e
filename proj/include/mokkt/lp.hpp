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

#include <limits>
#include <string>

#include "mokkt/types.hpp"

namespace mokkt {

/// maximize c^T x  subject to  A x <= b,  lower <= x <= upper (bounds may be infinite).
struct LinearProgram {
  Matrix A;
  Vector b;
  Vector c;
  Vector lower;
  Vector upper;
};

enum class LpStatus { kOptimal, kUnbounded, kInfeasibleStart, kIterationLimit };

std::string to_string(LpStatus status);

struct LpOptions {
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  int max_iterations = 0;  ///< 0 selects 50 * (rows + columns)
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  double objective = -std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Bounded-variable primal simplex with Bland's rule, started from a feasible `start`.
/// Nonbasic variables may sit strictly inside their bounds; such a variable enters
/// in whichever direction improves the objective.
LpResult solve_lp(const LinearProgram& lp, const Vector& start, const LpOptions& options = {});

}  // namespace mokkt
