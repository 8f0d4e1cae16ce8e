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

#include <cmath>

#include "mokkt/model.hpp"

namespace mokkt::testing {

/// Problem of the given size with every evaluator identically zero except
/// h(x) = x - cap (square, h' = I) and g(t, x, u) = -1 (inactive).
inline Problem blank_problem(int n, int m, int k, int r, double cap = 100.0) {
  Problem p;
  p.name = "blank";
  p.n = n;
  p.m = m;
  p.k = k;
  p.r = r;
  p.x0 = Vector::Zero(n);
  auto zero_stage = [](int out, int nn, int mm) {
    StageFunction f;
    f.eval = [=](double, const Vector&, const Vector&) {
      return StageJet{Vector::Zero(out), Matrix::Zero(out, nn), Matrix::Zero(out, mm)};
    };
    f.hessian = [=](double, const Vector&, const Vector&, const Vector&) {
      return StageHessian{Matrix::Zero(nn, nn), Matrix::Zero(nn, mm), Matrix::Zero(mm, mm)};
    };
    return f;
  };
  auto zero_endpoint = [](int out, int nn) {
    EndpointFunction f;
    f.eval = [=](const Vector&) { return EndpointJet{Vector::Zero(out), Matrix::Zero(out, nn)}; };
    f.hessian = [=](const Vector&, const Vector&) { return Matrix(Matrix::Zero(nn, nn)); };
    return f;
  };
  p.dynamics = zero_stage(n, n, m);
  p.running_cost = zero_stage(k, n, m);
  p.mixed_constraint = zero_stage(r, n, m);
  p.mixed_constraint.eval = [=](double, const Vector&, const Vector&) {
    return StageJet{Vector::Constant(r, -1.0), Matrix::Zero(r, n), Matrix::Zero(r, m)};
  };
  p.terminal_cost = zero_endpoint(k, n);
  p.endpoint_constraint.eval = [=](const Vector& x) {
    return EndpointJet{x - Vector::Constant(n, cap), Matrix::Identity(n, n)};
  };
  p.endpoint_constraint.hessian = [=](const Vector&, const Vector&) {
    return Matrix(Matrix::Zero(n, n));
  };
  return p;
}

/// Scalar control with J1 = int u^2, J2 = int (u - 1)^2 and inactive bounds.
inline Problem parabola_problem() {
  Problem p = blank_problem(1, 1, 2, 1, 10.0);
  p.name = "parabola";
  p.running_cost.eval = [](double, const Vector&, const Vector& u) {
    StageJet j{Vector(2), Matrix::Zero(2, 1), Matrix(2, 1)};
    j.value << u(0) * u(0), (u(0) - 1.0) * (u(0) - 1.0);
    j.du << 2.0 * u(0), 2.0 * (u(0) - 1.0);
    return j;
  };
  p.running_cost.hessian = [](double, const Vector&, const Vector&, const Vector& w) {
    return StageHessian{Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                        Matrix::Constant(1, 1, 2.0 * (w(0) + w(1)))};
  };
  p.mixed_constraint.eval = [](double, const Vector&, const Vector& u) {
    return StageJet{Vector::Constant(1, u(0) - 10.0), Matrix::Zero(1, 1), Matrix::Ones(1, 1)};
  };
  return p;
}

/// Exact solution of the lq1 problem (x0 = 1, bounds inactive).
inline double lq1_state(double t) { return std::cosh(1.0 - t) / std::cosh(1.0); }
inline double lq1_control(double t) { return -std::sinh(1.0 - t) / std::cosh(1.0); }

}  // namespace mokkt::testing
