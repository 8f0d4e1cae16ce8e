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
#include <deque>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mokkt/solve.hpp"

namespace mokkt {

namespace {

struct Point {
  Vector z;
  Trajectory traj;
  double f = 0.0;
  Vector c;
};

std::optional<Point> evaluate(const TranscribedNLP& nlp, const Vector& z) {
  try {
    Point p{z, nlp.simulate(z), 0.0, Vector()};
    p.f = nlp.objective(p.traj);
    p.c = nlp.constraints(p.traj);
    if (!std::isfinite(p.f) || !p.c.allFinite()) return std::nullopt;
    return p;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

// Powell-Hestenes-Rockafellar augmented Lagrangian; `omega` carries the quadrature
// weights so that nu is on the density scale for path rows.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const TranscribedNLP& nlp, Vector omega)
      : nlp_(nlp), omega_(std::move(omega)), nu_(Vector::Zero(omega_.size())) {}

  double rho = 0.0;

  const Vector& nu() const { return nu_; }
  Vector shifted(const Point& p) const { return (nu_ + rho * p.c).cwiseMax(0.0); }

  double value(const Point& p) const {
    const Vector s = shifted(p);
    return p.f + omega_.dot((s.array().square() - nu_.array().square()).matrix()) / (2.0 * rho);
  }

  Vector gradient(const Point& p) const {
    return nlp_.lagrangian_gradient(p.traj, omega_.cwiseProduct(shifted(p)));
  }

  void update(const Point& p) { nu_ = shifted(p); }

  // Block-diagonal curvature of the stage terms: per interval
  // h (w^T L_uu + rho g_u^T D g_u) at the midpoint, D selecting the shifted-active rows,
  // returned as inverse blocks after flooring the spectrum.
  std::vector<Matrix> preconditioner(const Point& p) const {
    const Problem& pr = nlp_.problem();
    const Grid& grid = nlp_.grid();
    const int N = grid.intervals();
    const Vector s = shifted(p);
    std::vector<Matrix> blocks(N);
    double top = 0.0;
    for (int i = 0; i < N; ++i) {
      const double t = grid.midpoint(i);
      const Vector x = midpoint_state(pr, p.traj, i);
      const Vector u = p.traj.control(i);
      Matrix M = pr.running_cost.hessian(t, x, u, nlp_.weights()).uu;
      const Matrix gu = pr.mixed_constraint.eval(t, x, u).du;
      for (int j = 0; j < pr.r; ++j) {
        if (s(pr.n + i * pr.r + j) > 0.0) M += rho * gu.row(j).transpose() * gu.row(j);
      }
      blocks[i] = 0.5 * (M + M.transpose());
      top = std::max(top, blocks[i].cwiseAbs().maxCoeff());
    }
    const double floor = 1e-3 * std::max(1.0, top);
    for (Matrix& b : blocks) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(b);
      const Vector e = es.eigenvalues().cwiseMax(floor);
      b = es.eigenvectors() * e.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() /
          grid.step();
    }
    return blocks;
  }
  Vector nlp_multipliers() const { return omega_.cwiseProduct(nu_); }

 private:
  const TranscribedNLP& nlp_;
  Vector omega_;
  Vector nu_;
};

struct InnerResult {
  Point point;
  Vector grad;
  int iterations = 0;
  bool stalled = false;
};

// L-BFGS on the augmented Lagrangian; stops when |grad|_inf / h < tol. The initial
// inverse Hessian is the block preconditioner, rebuilt whenever the shifted-active
// pattern changes. Steps pass on Armijo or, once function differences are at
// roundoff level, on the approximate Wolfe test of the directional derivative.
InnerResult minimize(const AugmentedLagrangian& al, Point start, double tol, double h,
                     const SolverOptions& opts, const TranscribedNLP& nlp) {
  InnerResult out{std::move(start), Vector(), 0, false};
  const int m = nlp.problem().m;
  auto pattern_of = [&](const Point& p) {
    const Vector s = al.shifted(p);
    std::vector<bool> on(static_cast<size_t>(s.size()));
    for (Eigen::Index c = 0; c < s.size(); ++c) on[c] = s(c) > 0.0;
    return on;
  };
  std::vector<bool> pattern = pattern_of(out.point);
  std::vector<Matrix> pre = al.preconditioner(out.point);
  auto apply_pre = [&](const Vector& v) {
    Vector r(v.size());
    for (size_t i = 0; i < pre.size(); ++i) {
      r.segment(static_cast<Eigen::Index>(i) * m, m) =
          pre[i] * v.segment(static_cast<Eigen::Index>(i) * m, m);
    }
    return r;
  };
  double f = al.value(out.point);
  out.grad = al.gradient(out.point);
  std::deque<std::pair<Vector, Vector>> mem;
  while (out.iterations < opts.max_inner) {
    if (out.grad.cwiseAbs().maxCoeff() / h < tol) break;
    Vector q = out.grad;
    std::vector<double> alpha(mem.size());
    for (int j = static_cast<int>(mem.size()) - 1; j >= 0; --j) {
      const auto& [s, y] = mem[j];
      alpha[j] = s.dot(q) / y.dot(s);
      q -= alpha[j] * y;
    }
    double gamma = 1.0;
    if (!mem.empty()) {
      const auto& [s, y] = mem.back();
      gamma = s.dot(y) / y.dot(apply_pre(y));
    }
    Vector d = gamma * apply_pre(q);
    for (size_t j = 0; j < mem.size(); ++j) {
      const auto& [s, y] = mem[j];
      d += s * (alpha[j] - y.dot(d) / y.dot(s));
    }
    d = -d;
    double slope = out.grad.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -apply_pre(out.grad);
      slope = out.grad.dot(d);
    }

    const double f_noise = 1e-13 * (1.0 + std::abs(f));
    double step = 1.0;
    std::optional<Point> trial;
    Vector g_trial;
    double f_trial = 0.0;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      trial = evaluate(nlp, out.point.z + step * d);
      if (trial) {
        f_trial = al.value(*trial);
        if (f_trial <= f + opts.armijo * step * slope) break;
        if (f_trial <= f + f_noise) {
          g_trial = al.gradient(*trial);
          const double ds = g_trial.dot(d);
          if (ds >= 0.9 * slope && ds <= -0.8 * slope) break;
          g_trial.resize(0);
        }
      }
      trial.reset();
    }
    ++out.iterations;
    if (!trial) {
      if (mem.empty()) {
        out.stalled = true;
        break;
      }
      mem.clear();
      continue;
    }
    if (g_trial.size() == 0) g_trial = al.gradient(*trial);
    Vector s = trial->z - out.point.z;
    Vector y = g_trial - out.grad;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      mem.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(mem.size()) > opts.lbfgs_memory) mem.pop_front();
    }
    out.point = std::move(*trial);
    out.grad = std::move(g_trial);
    f = f_trial;
    std::vector<bool> now = pattern_of(out.point);
    if (now != pattern) {
      pattern = std::move(now);
      pre = al.preconditioner(out.point);
    }
  }
  return out;
}

double violation_of(const Vector& c) { return std::max(0.0, c.maxCoeff()); }

double complementarity_of(const Vector& c, const Vector& nu) {
  return c.size() == 0 ? 0.0 : (-c).cwiseMin(nu).cwiseAbs().maxCoeff();
}

}  // namespace

SolveResult solve_scalarized(const Problem& problem, const Vector& weights, const Matrix& u_init,
                             const SolverOptions& opts) {
  if (weights.size() != problem.k) {
    throw std::invalid_argument("solve_scalarized: need " + std::to_string(problem.k) + " weights");
  }
  if (weights.minCoeff() < 0.0 || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("solve_scalarized: weights must be nonnegative and sum to 1");
  }
  if (u_init.rows() < 1 || u_init.cols() != problem.m) {
    throw std::invalid_argument("solve_scalarized: initial control has wrong shape");
  }
  const Grid grid(static_cast<int>(u_init.rows()));
  const double h = grid.step();
  const TranscribedNLP nlp(problem, grid, weights);

  Vector omega(nlp.constraint_count());
  omega.head(problem.n).setOnes();
  omega.tail(omega.size() - problem.n).setConstant(h);
  AugmentedLagrangian al(nlp, omega);
  al.rho = opts.rho0;

  std::optional<Point> start = evaluate(nlp, nlp.flatten(u_init));
  if (!start) throw NumericalError("solve_scalarized: non-finite objective at the initial control");
  Point current = std::move(*start);

  SolveResult best;
  double best_score = std::numeric_limits<double>::infinity();
  double prev_measure = std::numeric_limits<double>::infinity();
  int inner_total = 0;
  bool stalled = false;

  auto record = [&](const Point& p, const Vector& grad, int outer, bool conv) {
    const double viol = violation_of(p.c);
    const double comp = complementarity_of(p.c, al.nu());
    const double stat = grad.cwiseAbs().maxCoeff() / h;
    const double score = std::max(std::max(viol, comp) / opts.violation_tol, stat / opts.gradient_tol);
    if (conv || score < best_score) {
      best_score = score;
      best.traj = p.traj;
      best.multipliers = nlp.split(al.nlp_multipliers());
      best.violation = viol;
      best.complementarity = comp;
      best.stationarity = stat;
      best.outer_iterations = outer;
      best.rho = al.rho;
    }
  };

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const double measure_in = std::max(violation_of(current.c), complementarity_of(current.c, al.nu()));
    const double tol = outer == 1 ? opts.gradient_tol
                                  : std::max(opts.gradient_tol, std::min(1e-2, 0.1 * measure_in));
    InnerResult inner = minimize(al, std::move(current), tol, h, opts, nlp);
    inner_total += inner.iterations;
    stalled = inner.stalled;
    current = std::move(inner.point);
    al.update(current);

    const double measure =
        std::max(violation_of(current.c), complementarity_of(current.c, al.nu()));
    const double stat = inner.grad.cwiseAbs().maxCoeff() / h;
    const bool conv = measure < opts.violation_tol && stat < opts.gradient_tol;
    record(current, inner.grad, outer, conv);
    if (conv) {
      best.converged = true;
      break;
    }
    if (measure > 0.25 * prev_measure) al.rho = std::min(2.0 * al.rho, opts.rho_max);
    prev_measure = measure;
  }

  best.weights = weights;
  best.inner_iterations = inner_total;
  best.J = objective_values(problem, best.traj);
  std::ostringstream st;
  if (best.converged) {
    st << "converged";
  } else {
    st << "not converged" << (stalled ? " (line search stalled)" : " (iteration limit)")
       << ": violation " << best.violation << ", complementarity " << best.complementarity
       << ", stationarity " << best.stationarity;
  }
  best.status = st.str();
  return best;
}

}  // namespace mokkt
