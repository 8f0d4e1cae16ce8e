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
#include <numbers>
#include <sstream>

#include "mokkt/model.hpp"

namespace mokkt {

namespace {

StageHessian zero_hessian(int n, int m) {
  return {Matrix::Zero(n, n), Matrix::Zero(n, m), Matrix::Zero(m, m)};
}

EndpointFunction zero_endpoint(int out, int n) {
  return {[out, n](const Vector&) { return EndpointJet{Vector::Zero(out), Matrix::Zero(out, n)}; },
          [n](const Vector&, const Vector&) { return Matrix(Matrix::Zero(n, n)); }};
}

void apply_overrides(Problem& p, const ParameterMap& overrides) {
  for (const auto& [key, value] : overrides) {
    auto it = std::find_if(p.params.begin(), p.params.end(),
                           [&](const Parameter& q) { return q.name == key; });
    if (it == p.params.end()) {
      throw std::invalid_argument("problem '" + p.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value) || value < it->lower || value > it->upper) {
      std::ostringstream os;
      os << "parameter '" << key << "' = " << value << " outside [" << it->lower << ", "
         << it->upper << "]";
      throw std::invalid_argument(os.str());
    }
    it->value = value;
  }
}

// Linear time-varying system with a single mixed constraint whose control
// gradient has a two-dimensional kernel.
Problem make_example31(const ParameterMap& overrides) {
  Problem p;
  p.name = "example31";
  p.summary = "linear time-varying system, rank-deficient mixed constraint";
  p.n = 2;
  p.m = 3;
  p.k = 2;
  p.r = 1;
  p.params = {
      {"x0_1", 1.0, -100.0, 100.0, "initial state x1(0)"},
      {"x0_2", 0.0, -100.0, 100.0, "initial state x2(0)"},
      {"gx_scale", -1.0, -1.0, 1.0, "coefficient s in g = s(x1 - x2) + u1 + u2 - u3 - 1"},
      {"u_ref_1", 1.0, -100.0, 100.0, "first component of the reference control in L2"},
  };
  apply_overrides(p, overrides);
  p.x0 = Vector(2);
  p.x0 << p.param("x0_1"), p.param("x0_2");
  const double s = p.param("gx_scale");
  Vector u_ref = Vector::Zero(3);
  u_ref(0) = p.param("u_ref_1");

  p.dynamics.eval = [](double t, const Vector& x, const Vector& u) {
    StageJet j;
    j.value = Vector(2);
    j.value << t * x(0) + u(0) + u(2), -x(0) / 3.0 + t * x(1) + u(1);
    j.dx = Matrix(2, 2);
    j.dx << t, 0.0, -1.0 / 3.0, t;
    j.du = Matrix(2, 3);
    j.du << 1.0, 0.0, 1.0, 0.0, 1.0, 0.0;
    return j;
  };
  p.dynamics.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(2, 3);
  };

  p.running_cost.eval = [u_ref](double, const Vector& x, const Vector& u) {
    StageJet j;
    j.value = Vector(2);
    j.value << 0.5 * (x.squaredNorm() + u.squaredNorm()), 0.5 * (u - u_ref).squaredNorm();
    j.dx = Matrix::Zero(2, 2);
    j.dx.row(0) = x.transpose();
    j.du = Matrix(2, 3);
    j.du.row(0) = u.transpose();
    j.du.row(1) = (u - u_ref).transpose();
    return j;
  };
  p.running_cost.hessian = [](double, const Vector&, const Vector&, const Vector& w) {
    StageHessian h = zero_hessian(2, 3);
    h.xx = w(0) * Matrix::Identity(2, 2);
    h.uu = (w(0) + w(1)) * Matrix::Identity(3, 3);
    return h;
  };

  p.terminal_cost = zero_endpoint(2, 2);

  p.endpoint_constraint.eval = [](const Vector& x) {
    EndpointJet j;
    j.value = Vector(2);
    j.value << x(0) - x(1) * x(1) - 1.0, x(1) - 1.0;
    j.dx = Matrix(2, 2);
    j.dx << 1.0, -2.0 * x(1), 0.0, 1.0;
    return j;
  };
  p.endpoint_constraint.hessian = [](const Vector&, const Vector& w) {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = -2.0 * w(0);
    return h;
  };

  p.mixed_constraint.eval = [s](double, const Vector& x, const Vector& u) {
    StageJet j;
    j.value = Vector(1);
    j.value << s * (x(0) - x(1)) + u(0) + u(1) - u(2) - 1.0;
    j.dx = Matrix(1, 2);
    j.dx << s, -s;
    j.du = Matrix(1, 3);
    j.du << 1.0, 1.0, -1.0;
    return j;
  };
  p.mixed_constraint.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(2, 3);
  };

  p.notes.push_back("L1 = |x|^2/2 + |u|^2/2, L2 = |u - u_ref|^2/2, terminal costs zero");
  if (s != -1.0) {
    p.notes.push_back("gx_scale != -1: the reduced matrix A[t] is no longer diag(t, t - 1/3)");
  }
  return p;
}

// Three-state energy system: storage x1, grid balance x2, emissions x3;
// controls are conventional, renewable and storage power.
Problem make_smartgrid(const ParameterMap& overrides) {
  Problem p;
  p.name = "smartgrid";
  p.summary = "smart-grid dispatch with storage, balance and emission states";
  p.n = 3;
  p.m = 3;
  p.k = 4;
  p.r = 3;
  p.params = {
      {"c1", 0.05, 0.0, 100.0, "quadratic cost of u1"},
      {"c2", 0.03, 0.0, 100.0, "quadratic cost of u2"},
      {"c3", 0.10, 0.0, 100.0, "quadratic cost of u3"},
      {"eta", 0.9, 0.0, 10.0, "storage efficiency"},
      {"alpha3", 0.5, -10.0, 10.0, "emission rate of u3"},
      {"x2_target", 1.0, -100.0, 100.0, "balance set point in J4"},
      {"x1_max", 2.0, -1e6, 1e6, "terminal storage bound"},
      {"u1_max", 1.5, -1e6, 1e6, "bound on u1"},
      {"u2_max", 1.5, -1e6, 1e6, "bound on u2"},
      {"c_bound", 3.0, -1e6, 1e6, "bound c in t*u1 + t*u2 + u3 <= c"},
      {"x0_1", 0.5, -100.0, 100.0, "initial storage"},
      {"x0_2", 1.0, -100.0, 100.0, "initial balance"},
      {"x0_3", 0.0, -100.0, 100.0, "initial emissions"},
      {"delta", 0.4, 0.0, 100.0, "balance decay rate"},
      {"d_mean", 0.8, -100.0, 100.0, "mean demand"},
      {"d_amp", 0.4, -100.0, 100.0, "demand oscillation amplitude"},
      {"b1", 1.0, -100.0, 100.0, "balance gain of u1"},
      {"b2", 1.0, -100.0, 100.0, "balance gain of u2"},
      {"b3", 1.0, -100.0, 100.0, "balance gain of u3"},
      {"x2_cap", 1e3, -1e9, 1e9, "terminal bound on x2 (inactive by default)"},
      {"x3_cap", 1e3, -1e9, 1e9, "terminal bound on x3 (inactive by default)"},
  };
  apply_overrides(p, overrides);
  p.x0 = Vector(3);
  p.x0 << p.param("x0_1"), p.param("x0_2"), p.param("x0_3");

  const double eta = p.param("eta"), delta = p.param("delta"), alpha3 = p.param("alpha3");
  const double d_mean = p.param("d_mean"), d_amp = p.param("d_amp");
  const double b1 = p.param("b1"), b2 = p.param("b2"), b3 = p.param("b3");
  const double c1 = p.param("c1"), c2 = p.param("c2"), c3 = p.param("c3");
  const double x2t = p.param("x2_target");
  const double x1_max = p.param("x1_max"), x2_cap = p.param("x2_cap"), x3_cap = p.param("x3_cap");
  const double u1_max = p.param("u1_max"), u2_max = p.param("u2_max"), c_bound = p.param("c_bound");

  p.dynamics.eval = [=](double t, const Vector& x, const Vector& u) {
    const double demand = d_mean + d_amp * std::sin(2.0 * std::numbers::pi * t);
    StageJet j;
    j.value = Vector(3);
    j.value << eta * (u(0) + u(1) + u(2) - x(1)),
        -delta * x(1) + demand + b1 * u(0) + b2 * u(1) + b3 * u(2), alpha3 * u(2);
    j.dx = Matrix::Zero(3, 3);
    j.dx(0, 1) = -eta;
    j.dx(1, 1) = -delta;
    j.du = Matrix(3, 3);
    j.du << eta, eta, eta, b1, b2, b3, 0.0, 0.0, alpha3;
    return j;
  };
  p.dynamics.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(3, 3);
  };

  p.running_cost.eval = [=](double, const Vector& x, const Vector& u) {
    StageJet j;
    j.value = Vector(4);
    j.value << c1 * u(0) * u(0) + c2 * u(1) * u(1) + c3 * u(2) * u(2), -(u(0) + u(1)), 0.0,
        (x(1) - x2t) * (x(1) - x2t);
    j.dx = Matrix::Zero(4, 3);
    j.dx(3, 1) = 2.0 * (x(1) - x2t);
    j.du = Matrix::Zero(4, 3);
    j.du.row(0) << 2.0 * c1 * u(0), 2.0 * c2 * u(1), 2.0 * c3 * u(2);
    j.du.row(1) << -1.0, -1.0, 0.0;
    return j;
  };
  p.running_cost.hessian = [=](double, const Vector&, const Vector&, const Vector& w) {
    StageHessian h = zero_hessian(3, 3);
    h.xx(1, 1) = 2.0 * w(3);
    h.uu.diagonal() << 2.0 * c1 * w(0), 2.0 * c2 * w(0), 2.0 * c3 * w(0);
    return h;
  };

  p.terminal_cost.eval = [](const Vector& x) {
    EndpointJet j;
    j.value = Vector::Zero(4);
    j.value(2) = x(2);
    j.dx = Matrix::Zero(4, 3);
    j.dx(2, 2) = 1.0;
    return j;
  };
  p.terminal_cost.hessian = [](const Vector&, const Vector&) { return Matrix(Matrix::Zero(3, 3)); };

  p.endpoint_constraint.eval = [=](const Vector& x) {
    EndpointJet j;
    j.value = Vector(3);
    j.value << x(0) - x1_max, x(1) - x2_cap, x(2) - x3_cap;
    j.dx = Matrix::Identity(3, 3);
    return j;
  };
  p.endpoint_constraint.hessian = [](const Vector&, const Vector&) {
    return Matrix(Matrix::Zero(3, 3));
  };

  p.mixed_constraint.eval = [=](double t, const Vector&, const Vector& u) {
    StageJet j;
    j.value = Vector(3);
    j.value << u(0) - u1_max, u(1) - u2_max, t * u(0) + t * u(1) + u(2) - c_bound;
    j.dx = Matrix::Zero(3, 3);
    j.du = Matrix(3, 3);
    j.du << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, t, t, 1.0;
    return j;
  };
  p.mixed_constraint.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(3, 3);
  };

  p.notes.push_back("numeric parameter defaults are illustrative, not calibrated data");
  p.notes.push_back("f(t, x2) = -delta*x2 + d_mean + d_amp*sin(2*pi*t)");
  p.notes.push_back("endpoint rows 2 and 3 pad h to a square map; caps keep them inactive");
  p.notes.push_back("R[t] is computed as g_u g_u^T; for this g_u, det R[t] = 1 exactly");
  return p;
}

// Scalar linear-quadratic problem with closed-form optimum
// x* = cosh(1 - t)/cosh(1), u* = -sinh(1 - t)/cosh(1) (for x0 = 1, bounds inactive).
Problem make_lq1(const ParameterMap& overrides) {
  Problem p;
  p.name = "lq1";
  p.summary = "scalar linear-quadratic regulator x' = u";
  p.n = p.m = p.k = p.r = 1;
  p.params = {
      {"x0", 1.0, -100.0, 100.0, "initial state"},
      {"x_max", 10.0, -1e6, 1e6, "terminal bound x(1) <= x_max"},
      {"u_min", -10.0, -1e6, 1e6, "control bound u >= u_min"},
  };
  apply_overrides(p, overrides);
  p.x0 = Vector::Constant(1, p.param("x0"));
  const double x_max = p.param("x_max"), u_min = p.param("u_min");

  p.dynamics.eval = [](double, const Vector&, const Vector& u) {
    return StageJet{u, Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
  };
  p.dynamics.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(1, 1);
  };
  p.running_cost.eval = [](double, const Vector& x, const Vector& u) {
    return StageJet{Vector::Constant(1, 0.5 * (x(0) * x(0) + u(0) * u(0))),
                    Matrix::Constant(1, 1, x(0)), Matrix::Constant(1, 1, u(0))};
  };
  p.running_cost.hessian = [](double, const Vector&, const Vector&, const Vector& w) {
    return StageHessian{Matrix::Constant(1, 1, w(0)), Matrix::Zero(1, 1),
                        Matrix::Constant(1, 1, w(0))};
  };
  p.terminal_cost = zero_endpoint(1, 1);
  p.endpoint_constraint.eval = [x_max](const Vector& x) {
    return EndpointJet{Vector::Constant(1, x(0) - x_max), Matrix::Identity(1, 1)};
  };
  p.endpoint_constraint.hessian = [](const Vector&, const Vector&) {
    return Matrix(Matrix::Zero(1, 1));
  };
  p.mixed_constraint.eval = [u_min](double, const Vector&, const Vector& u) {
    return StageJet{Vector::Constant(1, u_min - u(0)), Matrix::Zero(1, 1),
                    Matrix::Constant(1, 1, -1.0)};
  };
  p.mixed_constraint.hessian = [](double, const Vector&, const Vector&, const Vector&) {
    return zero_hessian(1, 1);
  };
  return p;
}

}  // namespace

std::vector<std::string> problem_names() { return {"example31", "smartgrid", "lq1"}; }

Problem get_problem(const std::string& name, const ParameterMap& overrides) {
  if (name == "example31") return make_example31(overrides);
  if (name == "smartgrid") return make_smartgrid(overrides);
  if (name == "lq1") return make_lq1(overrides);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace mokkt
