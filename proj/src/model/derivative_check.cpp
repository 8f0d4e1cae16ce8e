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

#include "mokkt/model.hpp"

namespace mokkt {

namespace {

double relative_error(const Matrix& analytic, const Matrix& fd) {
  if (analytic.size() == 0) return 0.0;
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

struct StageProbe {
  const StageFunction& f;
  double t;
  const Vector& x;
  const Vector& u;
  double h;

  // Central difference of `fn` along coordinate j of x (wrt_u false) or u.
  template <class Fn>
  auto diff(Fn fn, bool wrt_u, int j) const {
    Vector xp = x, xm = x, up = u, um = u;
    if (wrt_u) {
      up(j) += h;
      um(j) -= h;
    } else {
      xp(j) += h;
      xm(j) -= h;
    }
    return ((fn(f.eval(t, xp, up)) - fn(f.eval(t, xm, um))) / (2.0 * h)).eval();
  }
};

void check_stage(const std::string& name, const StageFunction& f, double t, const Vector& x,
                 const Vector& u, double h, DerivativeReport& report) {
  const StageJet jet = f.eval(t, x, u);
  const auto n = x.size(), m = u.size(), out = jet.value.size();
  StageProbe probe{f, t, x, u, h};

  Matrix fd_x(out, n), fd_u(out, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    fd_x.col(j) = probe.diff([](const StageJet& s) { return s.value; }, false, int(j));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    fd_u.col(j) = probe.diff([](const StageJet& s) { return s.value; }, true, int(j));
  }
  report.blocks.push_back({name + ".dx", relative_error(jet.dx, fd_x)});
  report.blocks.push_back({name + ".du", relative_error(jet.du, fd_u)});

  double e_xx = 0.0, e_xu = 0.0, e_uu = 0.0;
  for (Eigen::Index c = 0; c < out; ++c) {
    const StageHessian hess = f.hessian(t, x, u, Vector::Unit(out, c));
    Matrix xx(n, n), xu(n, m), uu(m, m);
    auto row_dx = [c](const StageJet& s) { return Vector(s.dx.row(c).transpose()); };
    auto row_du = [c](const StageJet& s) { return Vector(s.du.row(c).transpose()); };
    for (Eigen::Index j = 0; j < n; ++j) xx.col(j) = probe.diff(row_dx, false, int(j));
    for (Eigen::Index j = 0; j < m; ++j) {
      xu.col(j) = probe.diff(row_dx, true, int(j));
      uu.col(j) = probe.diff(row_du, true, int(j));
    }
    e_xx = std::max(e_xx, relative_error(hess.xx, xx));
    e_xu = std::max(e_xu, relative_error(hess.xu, xu));
    e_uu = std::max(e_uu, relative_error(hess.uu, uu));
  }
  report.blocks.push_back({name + ".xx", e_xx});
  report.blocks.push_back({name + ".xu", e_xu});
  report.blocks.push_back({name + ".uu", e_uu});
}

void check_endpoint(const std::string& name, const EndpointFunction& f, const Vector& x, double h,
                    DerivativeReport& report) {
  const EndpointJet jet = f.eval(x);
  const auto n = x.size(), out = jet.value.size();
  Matrix fd(out, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    fd.col(j) = (f.eval(xp).value - f.eval(xm).value) / (2.0 * h);
  }
  report.blocks.push_back({name + ".dx", relative_error(jet.dx, fd)});

  double e_xx = 0.0;
  for (Eigen::Index c = 0; c < out; ++c) {
    Matrix xx(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      xx.col(j) = (f.eval(xp).dx.row(c) - f.eval(xm).dx.row(c)).transpose() / (2.0 * h);
    }
    e_xx = std::max(e_xx, relative_error(f.hessian(x, Vector::Unit(out, c)), xx));
  }
  report.blocks.push_back({name + ".xx", e_xx});
}

bool is_second_order(const std::string& block) {
  const auto tail = block.substr(block.rfind('.') + 1);
  return tail == "xx" || tail == "xu" || tail == "uu";
}

}  // namespace

double DerivativeReport::worst() const {
  double w = 0.0;
  for (const auto& b : blocks) w = std::max(w, b.error);
  return w;
}

double DerivativeReport::worst_first_order() const {
  double w = 0.0;
  for (const auto& b : blocks) {
    if (!is_second_order(b.block)) w = std::max(w, b.error);
  }
  return w;
}

double DerivativeReport::worst_second_order() const {
  double w = 0.0;
  for (const auto& b : blocks) {
    if (is_second_order(b.block)) w = std::max(w, b.error);
  }
  return w;
}

double DerivativeReport::block(std::string_view name) const {
  for (const auto& b : blocks) {
    if (b.block == name) return b.error;
  }
  throw std::out_of_range("no derivative block '" + std::string(name) + "'");
}

DerivativeReport check_derivatives(const Problem& problem, double t, const Vector& x,
                                   const Vector& u, double h_fd) {
  if (!(h_fd > 0.0)) throw std::invalid_argument("check_derivatives: step must be positive");
  DerivativeReport report;
  check_stage("dynamics", problem.dynamics, t, x, u, h_fd, report);
  check_stage("running_cost", problem.running_cost, t, x, u, h_fd, report);
  check_stage("mixed_constraint", problem.mixed_constraint, t, x, u, h_fd, report);
  check_endpoint("terminal_cost", problem.terminal_cost, x, h_fd, report);
  check_endpoint("endpoint_constraint", problem.endpoint_constraint, x, h_fd, report);
  return report;
}

}  // namespace mokkt
