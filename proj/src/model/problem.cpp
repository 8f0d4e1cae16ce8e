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

#include <sstream>

#include "mokkt/model.hpp"

namespace mokkt {

double Problem::param(std::string_view key) const {
  for (const auto& p : params) {
    if (p.name == key) return p.value;
  }
  throw std::invalid_argument("problem '" + name + "' has no parameter '" + std::string(key) + "'");
}

ParameterMap Problem::parameter_values() const {
  ParameterMap out;
  for (const auto& p : params) out[p.name] = p.value;
  return out;
}

namespace {

void expect_shape(const std::string& what, const Matrix& a, Eigen::Index rows, Eigen::Index cols) {
  if (a.rows() != rows || a.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << a.rows() << "x" << a.cols();
    throw std::invalid_argument(os.str());
  }
}

void check_stage(const std::string& what, const StageFunction& f, int out, int n, int m, double t,
                 const Vector& x, const Vector& u) {
  const StageJet jet = f.eval(t, x, u);
  expect_shape(what + " value", jet.value, out, 1);
  expect_shape(what + " dx", jet.dx, out, n);
  expect_shape(what + " du", jet.du, out, m);
  const StageHessian hess = f.hessian(t, x, u, Vector::Ones(out));
  expect_shape(what + " xx", hess.xx, n, n);
  expect_shape(what + " xu", hess.xu, n, m);
  expect_shape(what + " uu", hess.uu, m, m);
}

void check_endpoint(const std::string& what, const EndpointFunction& f, int out, int n,
                    const Vector& x) {
  const EndpointJet jet = f.eval(x);
  expect_shape(what + " value", jet.value, out, 1);
  expect_shape(what + " dx", jet.dx, out, n);
  expect_shape(what + " xx", f.hessian(x, Vector::Ones(out)), n, n);
}

}  // namespace

void validate_shapes(const Problem& problem, double t, const Vector& x, const Vector& u) {
  const int n = problem.n, m = problem.m;
  expect_shape("x0", problem.x0, n, 1);
  check_stage("dynamics", problem.dynamics, n, n, m, t, x, u);
  check_stage("running_cost", problem.running_cost, problem.k, n, m, t, x, u);
  check_stage("mixed_constraint", problem.mixed_constraint, problem.r, n, m, t, x, u);
  check_endpoint("terminal_cost", problem.terminal_cost, problem.k, n, x);
  check_endpoint("endpoint_constraint", problem.endpoint_constraint, n, n, x);
}

}  // namespace mokkt
