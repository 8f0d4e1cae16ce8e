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

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mokkt/types.hpp"

namespace mokkt {

/// Value and Jacobians of a stage map f(t, x, u).
struct StageJet {
  Vector value;
  Matrix dx;
  Matrix du;
};

/// Hessian blocks of the scalar w^T f(t, x, u); `xu` is n x m.
struct StageHessian {
  Matrix xx;
  Matrix xu;
  Matrix uu;
};

struct StageFunction {
  std::function<StageJet(double t, const Vector& x, const Vector& u)> eval;
  std::function<StageHessian(double t, const Vector& x, const Vector& u, const Vector& w)> hessian;

  Vector value(double t, const Vector& x, const Vector& u) const { return eval(t, x, u).value; }
};

struct EndpointJet {
  Vector value;
  Matrix dx;
};

struct EndpointFunction {
  std::function<EndpointJet(const Vector& x)> eval;
  /// Hessian of w^T f(x).
  std::function<Matrix(const Vector& x, const Vector& w)> hessian;

  Vector value(const Vector& x) const { return eval(x).value; }
};

struct Parameter {
  std::string name;
  double value;
  double lower;
  double upper;
  std::string description;
};

using ParameterMap = std::map<std::string, double>;

/// Multiobjective optimal control problem on [0, 1]:
///   min (J_1..J_k),  J_c = l_c(x(1)) + int_0^1 L_c(t, x, u) dt
///   x' = phi(t, x, u), x(0) = x0, h(x(1)) <= 0, g(t, x, u) <= 0.
struct Problem {
  std::string name;
  std::string summary;
  int n = 0;
  int m = 0;
  int k = 0;
  int r = 0;
  Vector x0;
  StageFunction dynamics;
  StageFunction running_cost;
  StageFunction mixed_constraint;
  EndpointFunction terminal_cost;
  EndpointFunction endpoint_constraint;
  std::vector<Parameter> params;
  std::vector<std::string> notes;

  double param(std::string_view key) const;
  ParameterMap parameter_values() const;
};

/// Registered problem names in display order.
std::vector<std::string> problem_names();

/// Builds a registered problem with parameter overrides applied.
/// Throws std::invalid_argument for unknown names, keys or out-of-range values.
Problem get_problem(const std::string& name, const ParameterMap& overrides = {});

/// Worst relative error of one derivative block against central differences.
struct BlockError {
  std::string block;
  double error;
};

struct DerivativeReport {
  std::vector<BlockError> blocks;

  double worst() const;
  double worst_first_order() const;
  double worst_second_order() const;
  double block(std::string_view name) const;
};

/// Compares the analytic derivatives of every evaluator with central differences.
///
/// First derivatives are differenced from values, Hessian blocks from the
/// analytic Jacobians. The error is max|A - FD| / max(1, max|A|).
DerivativeReport check_derivatives(const Problem& problem, double t, const Vector& x,
                                   const Vector& u, double h_fd = 1e-5);

/// Throws std::invalid_argument if an evaluator returns arrays of the wrong shape.
void validate_shapes(const Problem& problem, double t, const Vector& x, const Vector& u);

}  // namespace mokkt
