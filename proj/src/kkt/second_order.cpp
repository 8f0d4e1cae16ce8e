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
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "mokkt/kkt.hpp"

namespace mokkt {

namespace {

// Quadratic form of lambda^T L - p^T phi + theta^T g at one point.
double stage_form(const Problem& problem, double t, const Vector& x, const Vector& u,
                  const Vector& lambda, const Vector& p, const Vector& theta, const Vector& dx,
                  const Vector& du) {
  const StageHessian L = problem.running_cost.hessian(t, x, u, lambda);
  const StageHessian f = problem.dynamics.hessian(t, x, u, -p);
  const StageHessian g = problem.mixed_constraint.hessian(t, x, u, theta);
  const Matrix xx = L.xx + f.xx + g.xx;
  const Matrix xu = L.xu + f.xu + g.xu;
  const Matrix uu = L.uu + f.uu + g.uu;
  return dx.dot(xx * dx) + 2.0 * dx.dot(xu * du) + du.dot(uu * du);
}

// Linear constraint rows on the flattened control perturbation.
struct CriticalRows {
  std::vector<Vector> rows;
};

Vector flatten(const Matrix& g) { return Matrix(g.transpose()).reshaped(); }

Matrix unflatten(const Vector& v, int N, int m) {
  return Matrix(v.reshaped(m, N).transpose());
}

CriticalRows critical_rows(const Problem& problem, const Trajectory& traj,
                           const Linearization& lin, const ActiveSets& active) {
  CriticalRows out;
  for (int c = 0; c < problem.k; ++c) {
    FunctionalWeights w;
    w.objective = Vector::Unit(problem.k, c);
    out.rows.push_back(flatten(combination_gradient(problem, traj, lin, w)));
  }
  for (int q : active.endpoint) {
    FunctionalWeights w;
    w.endpoint = Vector::Unit(problem.n, q);
    out.rows.push_back(flatten(combination_gradient(problem, traj, lin, w)));
  }
  for (int i = 0; i < traj.grid.intervals(); ++i) {
    for (int j : active.path[i]) {
      out.rows.push_back(flatten(path_row_gradient(problem, traj, lin, i, j)));
    }
  }
  return out;
}

bool satisfies_invariants(const CriticalDirection& d, double activity) {
  if (d.dynamics_defect >= 1e-10) return false;
  if (d.b1_values.size() > 0 && d.b1_values.maxCoeff() > activity) return false;
  if (d.b3_values.size() > 0 && d.b3_values.maxCoeff() > activity) return false;
  return d.b4_max <= activity;
}

CriticalDirection direction_from(const Problem& problem, const Trajectory& traj,
                                 const Linearization& lin, const ActiveSets& active,
                                 const Matrix& util, double activity) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  const Tangent tan = propagate_tangent(lin, util);
  CriticalDirection d;
  d.xtil = tan.x;
  d.xtil_mid = tan.x_mid;
  d.util = util;

  double defect = 0.0;
  Vector b1 = problem.terminal_cost.eval(traj.state(N)).dx * tan.x.row(N).transpose();
  for (int i = 0; i < N; ++i) {
    const auto& L = lin.intervals[i];
    const Vector ui = util.row(i).transpose();
    defect = std::max(defect, (tan.x.row(i + 1).transpose() - L.jx * tan.x.row(i).transpose() -
                               L.ju * ui).cwiseAbs().maxCoeff());
    const StageJet a = problem.running_cost.eval(traj.grid.node(i), traj.state(i), traj.control(i));
    const StageJet b = problem.running_cost.eval(traj.grid.midpoint(i), L.x_mid, traj.control(i));
    const StageJet c =
        problem.running_cost.eval(traj.grid.node(i + 1), traj.state(i + 1), traj.control(i));
    b1 += (h / 6.0) * (a.dx * tan.x.row(i).transpose() + a.du * ui +
                       4.0 * (b.dx * tan.x_mid.row(i).transpose() + b.du * ui) +
                       c.dx * tan.x.row(i + 1).transpose() + c.du * ui);
    const StageJet g = problem.mixed_constraint.eval(traj.grid.midpoint(i), L.x_mid, traj.control(i));
    for (int j : active.path[i]) {
      const double v = g.dx.row(j).dot(tan.x_mid.row(i)) + g.du.row(j).dot(ui);
      d.b4_max = std::max(d.b4_max, v);
      if (std::abs(v) <= activity) ++d.b4_tight;
    }
  }
  d.dynamics_defect = defect;
  d.b1_values = b1;
  for (int c = 0; c < problem.k; ++c) d.b1_tight.push_back(std::abs(b1(c)) <= activity);

  const Matrix hx = problem.endpoint_constraint.eval(traj.state(N)).dx;
  d.b3_values.resize(static_cast<Eigen::Index>(active.endpoint.size()));
  for (size_t q = 0; q < active.endpoint.size(); ++q) {
    const double v = hx.row(active.endpoint[q]).dot(tan.x.row(N));
    d.b3_values(static_cast<Eigen::Index>(q)) = v;
    d.b3_tight.push_back(std::abs(v) <= activity);
  }
  return d;
}

}  // namespace

CriticalDirection make_direction(const Problem& problem, const Trajectory& traj,
                                 const Matrix& util, double activity) {
  return direction_from(problem, traj, linearize(problem, traj),
                        active_sets(problem, traj, activity), util, activity);
}

double second_order_form(const Problem& problem, const Trajectory& traj,
                         const MultiplierSet& mult, const CriticalDirection& dir) {
  const int N = traj.grid.intervals();
  const double h = traj.grid.step();
  const Vector xN = traj.state(N);
  const Vector dxN = dir.xtil.row(N).transpose();
  const Matrix terminal = problem.terminal_cost.hessian(xN, mult.lambda) +
                          problem.endpoint_constraint.hessian(xN, mult.l);
  double value = dxN.dot(terminal * dxN);
  for (int i = 0; i < N; ++i) {
    const Vector u = traj.control(i);
    const Vector du = dir.util.row(i).transpose();
    const Vector theta = mult.theta.row(i).transpose();
    value += 0.5 * h *
             (stage_form(problem, traj.grid.node(i), traj.state(i), u, mult.lambda,
                         mult.p.row(i).transpose(), theta, dir.xtil.row(i).transpose(), du) +
              stage_form(problem, traj.grid.node(i + 1), traj.state(i + 1), u, mult.lambda,
                         mult.p.row(i + 1).transpose(), theta, dir.xtil.row(i + 1).transpose(),
                         du));
  }
  return value;
}

std::vector<CriticalDirection> sample_critical_directions(const Problem& problem,
                                                          const Trajectory& traj, int count,
                                                          std::uint64_t seed,
                                                          const SamplingOptions& options) {
  if (count < 1) throw std::invalid_argument("sample_critical_directions: count must be >= 1");
  const int N = traj.grid.intervals();
  const int m = problem.m;
  const Linearization lin = linearize(problem, traj);
  const ActiveSets active = active_sets(problem, traj, options.activity);
  const CriticalRows rows = critical_rows(problem, traj, lin, active);
  std::vector<double> norms;
  for (const Vector& a : rows.rows) norms.push_back(a.squaredNorm());

  std::vector<CriticalDirection> out;
  for (int d = 0; d < count; ++d) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(d)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Vector v(static_cast<Eigen::Index>(N) * m);
    for (Eigen::Index q = 0; q < v.size(); ++q) v(q) = normal(rng);

    for (int pass = 0; pass < options.max_passes; ++pass) {
      bool moved = false;
      for (size_t r = 0; r < rows.rows.size(); ++r) {
        const double s = rows.rows[r].dot(v);
        if (s > 0.0 && norms[r] > 0.0) {
          v -= (s / norms[r]) * rows.rows[r];
          moved = true;
        }
      }
      if (!moved) break;
    }
    const double l2 = std::sqrt(traj.grid.step()) * v.norm();
    if (!(l2 > 1e-12)) continue;
    v /= l2;
    CriticalDirection dir =
        direction_from(problem, traj, lin, active, unflatten(v, N, m), options.activity);
    if (satisfies_invariants(dir, options.activity)) out.push_back(std::move(dir));
  }
  return out;
}

SscReport check_ssc(const Problem& problem, const Trajectory& traj, const MultiplierSet& mult,
                    const std::vector<CriticalDirection>& directions, double gamma0,
                    const KktTolerances& tol) {
  SscReport rep;
  rep.gamma0 = gamma0;
  const KKTReport first = verify_multipliers(problem, traj, mult, tol);
  const KktVerdict& v = first.verdict;
  rep.precondition_ok = v.adjoint && v.transversality && v.stationarity && v.complementarity_l &&
                        v.complementarity_theta;
  if (!rep.precondition_ok) {
    rep.status = "precondition violated: first-order conditions do not hold";
    return rep;
  }

  double min_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < traj.grid.intervals(); ++i) {
    const Vector u = traj.control(i);
    for (const auto& [t, x] : {std::pair{traj.grid.node(i), Vector(traj.state(i))},
                               std::pair{traj.grid.midpoint(i), midpoint_state(problem, traj, i)}}) {
      const Matrix luu = problem.running_cost.hessian(t, x, u, mult.lambda).uu;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (luu + luu.transpose()),
                                               Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
  }
  rep.min_eig_luu = min_eig;
  rep.legendre_ok = gamma0 > 0.0 && min_eig >= gamma0;

  rep.min_form = std::numeric_limits<double>::infinity();
  for (const CriticalDirection& d : directions) {
    const double f = second_order_form(problem, traj, mult, d);
    rep.form_values.push_back(f);
    rep.min_form = std::min(rep.min_form, f);
  }
  rep.forms_positive = directions.empty() || rep.min_form > 0.0;
  if (directions.empty()) rep.min_form = 0.0;
  rep.pass = rep.legendre_ok && rep.forms_positive;
  if (rep.pass) {
    rep.status = directions.empty()
                     ? "sufficient conditions hold; no nonzero critical direction was sampled"
                     : "sufficient conditions hold on sample";
  } else if (!rep.legendre_ok) {
    rep.status = "Legendre condition fails: min eigenvalue of lambda^T L_uu below gamma0";
  } else {
    rep.status = "second-order form not positive on a sampled critical direction";
  }
  return rep;
}

}  // namespace mokkt
