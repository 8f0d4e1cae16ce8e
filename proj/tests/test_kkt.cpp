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

#include <gtest/gtest.h>

#include <random>

#include "mokkt/kkt.hpp"
#include "mokkt/nnls.hpp"
#include "test_problems.hpp"

namespace mokkt {
namespace {

using testing::blank_problem;
using testing::lq1_control;

Trajectory lq1_reference(const Problem& p, int N) {
  const Grid grid(N);
  Matrix u(N, 1);
  for (int i = 0; i < N; ++i) u(i, 0) = lq1_control(grid.midpoint(i));
  return integrate_state(p, u, grid);
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
  return a;
}

TEST(Nnls, UnconstrainedMinimumIsNonnegative) {
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  const Vector x_true = Vector::Constant(2, 0.5);
  const NnlsResult r = nnls(A, A * x_true);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - x_true).norm(), 1e-12);
  EXPECT_LT(r.residual_norm, 1e-12);
}

TEST(Nnls, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix A = random_matrix(6, n, rng);
    const Vector b = random_matrix(6, 1, rng);
    const NnlsResult r = nnls(A, b);
    ASSERT_TRUE(r.converged);
    ASSERT_GE(r.x.minCoeff(), 0.0);
    double best = b.norm();
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> cols;
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) cols.push_back(j);
      Matrix As(6, static_cast<Eigen::Index>(cols.size()));
      for (size_t c = 0; c < cols.size(); ++c) As.col(c) = A.col(cols[c]);
      const Vector z = As.colPivHouseholderQr().solve(b);
      if (z.minCoeff() >= 0.0) best = std::min(best, (As * z - b).norm());
    }
    EXPECT_NEAR(r.residual_norm, best, 1e-10) << "trial " << trial;
  }
}

TEST(Nnls, ZeroRightHandSide) {
  const Matrix A = Matrix::Identity(3, 3);
  const NnlsResult r = nnls(A, Vector::Zero(3));
  EXPECT_EQ(r.x.norm(), 0.0);
}

TEST(ExtractTheta, Example31HandEvaluation) {
  const Problem p = get_problem("example31");
  const int N = 10;
  const Trajectory traj = integrate_state(p, Matrix::Ones(N, 3), Grid(N));
  const Matrix theta = extract_theta(p, traj, Vector::Unit(2, 0), Matrix::Zero(N, 2));
  for (int i = 0; i < N; ++i) EXPECT_NEAR(theta(i, 0), -1.0 / 3.0, 1e-14);
}

TEST(ExtractTheta, VanishesWhenStationaryWithoutConstraint) {
  const Problem p = get_problem("lq1");
  // L_u = u and phi_u = 1: p = u makes the unconstrained residual zero.
  const Vector th = theta_density(p, 0.3, Vector::Constant(1, 0.7), Vector::Constant(1, -0.4),
                                  Vector::Ones(1), Vector::Constant(1, -0.4));
  EXPECT_NEAR(th(0), 0.0, 1e-15);
}

TEST(ExtractTheta, RejectsSingularR) {
  Problem p = blank_problem(1, 1, 1, 1);
  EXPECT_THROW(theta_density(p, 0.0, Vector::Zero(1), Vector::Zero(1), Vector::Ones(1),
                             Vector::Zero(1)),
               NumericalError);
}

TEST(ExtractTheta, ResubstitutionLeavesResidualOrthogonalToConstraintGradients) {
  std::mt19937_64 rng(11);
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    const int N = 20;
    const Trajectory traj = integrate_state(p, random_matrix(N, p.m, rng, 0.3), Grid(N));
    Vector lambda = random_matrix(p.k, 1, rng).cwiseAbs();
    lambda /= lambda.norm();
    const Matrix pm = random_matrix(N, p.n, rng);
    const Matrix theta = extract_theta(p, traj, lambda, pm);
    for (int i = 0; i < N; ++i) {
      const double t = traj.grid.midpoint(i);
      const Vector x = midpoint_state(p, traj, i);
      const Vector u = traj.control(i);
      const StageJet L = p.running_cost.eval(t, x, u);
      const StageJet f = p.dynamics.eval(t, x, u);
      const StageJet g = p.mixed_constraint.eval(t, x, u);
      const Vector r = L.du.transpose() * lambda - f.du.transpose() * pm.row(i).transpose() +
                       g.du.transpose() * theta.row(i).transpose();
      const double scale = 1.0 + pm.cwiseAbs().maxCoeff();
      EXPECT_LT((g.du * r).cwiseAbs().maxCoeff(), 1e-10 * scale) << name;
      // Square invertible g_u: the residual itself vanishes.
      if (p.m == p.r) {
        EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-10 * scale) << name;
      }
    }
  }
}

TEST(AdjointSweep, ResidualIsAffineInEndpointMultiplier) {
  std::mt19937_64 rng(3);
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    const int N = 30;
    const Trajectory traj = integrate_state(p, random_matrix(N, p.m, rng, 0.3), Grid(N));
    const Vector lambda = Vector::Constant(p.k, 1.0 / std::sqrt(p.k));
    ActiveSets act = active_sets(p, traj, 1e-6);
    const Vector l0 = random_matrix(p.n, 1, rng), l1 = random_matrix(p.n, 1, rng),
                 l2 = random_matrix(p.n, 1, rng);
    auto res = [&](const Vector& l) { return adjoint_sweep(p, traj, lambda, l, act).residual; };
    const Matrix lhs = res(l1 + l2 - l0);
    const Matrix rhs = res(l1) + res(l2) - res(l0);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9) << name;
  }
}

TEST(AdjointSweep, SatisfiesRecurrenceAndTransversality) {
  const Problem p = get_problem("smartgrid");
  const int N = 40;
  const Trajectory traj = integrate_state(p, Matrix::Constant(N, 3, 0.4), Grid(N));
  const Vector lambda = Vector::Constant(4, 0.5);
  const Reconstruction rec = reconstruct_multipliers(p, traj, lambda);
  const KKTReport rep = verify_multipliers(p, traj, rec.multipliers);
  EXPECT_TRUE(rep.verdict.adjoint);
  EXPECT_TRUE(rep.verdict.transversality);
  EXPECT_LT(rep.adjoint_resid, 1e-12);
}

TEST(Reconstruction, SmartGridStorageAndEmissionCostates) {
  const Problem p = get_problem("smartgrid");
  const int N = 50;
  const Trajectory traj = integrate_state(p, Matrix::Constant(N, 3, 0.3), Grid(N));
  Vector lambda(4);
  lambda << 0.1, 0.2, 0.7, 0.3;
  lambda /= lambda.norm();
  const Reconstruction rec = reconstruct_multipliers(p, traj, lambda);
  const auto& mult = rec.multipliers;
  for (int i = 0; i <= N; ++i) {
    EXPECT_NEAR(mult.p(i, 2), -lambda(2), 1e-13);
    EXPECT_NEAR(mult.p(i, 0), -mult.l(0), 1e-13);
  }
  EXPECT_TRUE(rec.active.endpoint.empty());
  EXPECT_EQ(mult.l.norm(), 0.0);
}

TEST(Reconstruction, InactiveEndpointForcesZeroL) {
  const Problem p = get_problem("lq1");
  const Reconstruction rec = reconstruct_multipliers(p, lq1_reference(p, 100), Vector::Ones(1));
  EXPECT_TRUE(rec.active.endpoint.empty());
  EXPECT_EQ(rec.multipliers.l(0), 0.0);
}

TEST(Reconstruction, Lq1AnalyticOptimum) {
  const Problem p = get_problem("lq1");
  const Trajectory traj = lq1_reference(p, 1000);
  const KKTReport rep = verify_kkt(p, traj, Vector::Ones(1));
  EXPECT_LT(rep.stationarity_resid, 1e-6);
  EXPECT_TRUE(rep.multiplier_found);
  EXPECT_TRUE(rep.verdict.pass) << rep.status;
  for (int i = 0; i <= 1000; i += 50) {
    EXPECT_NEAR(rep.multipliers.p(i, 0), lq1_control(traj.grid.node(i)), 1e-6);
  }
  EXPECT_EQ(rep.multipliers.theta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Reconstruction, ActiveEndpointGivesPositiveL) {
  const double xmax = 0.3;
  const Problem p = get_problem("lq1", {{"x_max", xmax}});
  // Optimal trajectory of the constrained problem: x = a cosh(1-t) + b sinh(1-t) with
  // x(0) = 1, x(1) = xmax; p = u, p(1) = -l.
  const double c = std::cosh(1.0), s = std::sinh(1.0);
  const double a = xmax, b = (1.0 - xmax * c) / s;
  const int N = 2000;
  const Grid grid(N);
  Matrix u(N, 1);
  for (int i = 0; i < N; ++i) {
    const double t = grid.midpoint(i);
    u(i, 0) = -a * std::sinh(1.0 - t) - b * std::cosh(1.0 - t);
  }
  Trajectory traj = integrate_state(p, u, grid);
  // Shift the last control so the endpoint constraint is exactly active.
  const double gap = traj.state(N)(0) - xmax;
  u(N - 1, 0) -= gap / grid.step();
  traj = integrate_state(p, u, grid);
  ASSERT_NEAR(traj.state(N)(0), xmax, 1e-12);
  const Reconstruction rec = reconstruct_multipliers(p, traj, Vector::Ones(1));
  ASSERT_EQ(rec.active.endpoint.size(), 1u);
  EXPECT_NEAR(rec.multipliers.l(0), b, 0.05);
}

TEST(VerifyKkt, PerturbedControlFailsStationarity) {
  const Problem p = get_problem("lq1");
  Trajectory traj = lq1_reference(p, 200);
  Matrix u = traj.u;
  u(57, 0) += 0.1;
  traj = integrate_state(p, u, traj.grid);
  const KKTReport rep = verify_kkt(p, traj, Vector::Ones(1));
  EXPECT_GT(rep.stationarity_resid, 1e-3);
  EXPECT_FALSE(rep.verdict.pass);
}

TEST(VerifyKkt, InfeasibleEndpointFails) {
  const Problem p = get_problem("lq1", {{"x_max", 0.1}});
  const KKTReport rep = verify_kkt(p, lq1_reference(p, 200), Vector::Ones(1));
  EXPECT_GT(rep.primal_feas, 0.1);
  EXPECT_FALSE(rep.verdict.primal_feasibility);
  EXPECT_FALSE(rep.verdict.pass);
}

TEST(VerifyKkt, NonNormalLambdaFails) {
  const Problem p = get_problem("lq1");
  const KKTReport rep = verify_kkt(p, lq1_reference(p, 200), Vector::Constant(1, 2.0));
  EXPECT_FALSE(rep.normal);
  EXPECT_FALSE(rep.verdict.pass);
}

TEST(VerifyKkt, VerdictInvariantUnderCostScaling) {
  // Scaling the costs by s and keeping |lambda| = 1 scales multipliers and residuals by s.
  const double s = 7.5;
  const Problem p = get_problem("lq1");
  Problem q = p;
  q.running_cost.eval = [p, s](double t, const Vector& x, const Vector& u) {
    StageJet j = p.running_cost.eval(t, x, u);
    return StageJet{s * j.value, s * j.dx, s * j.du};
  };
  for (int pert : {0, 1}) {
    Trajectory traj = lq1_reference(p, 200);
    if (pert) {
      Matrix u = traj.u;
      u(10, 0) += 0.05;
      traj = integrate_state(p, u, traj.grid);
    }
    const KKTReport a = verify_kkt(p, traj, Vector::Ones(1));
    const KKTReport b = verify_kkt(q, traj, Vector::Ones(1));
    EXPECT_EQ(a.verdict.pass, b.verdict.pass);
    EXPECT_EQ(a.verdict.stationarity, b.verdict.stationarity);
  }
}

TEST(SecondOrderForm, Lq1ZeroStateDirection) {
  const Problem p = get_problem("lq1");
  const Trajectory traj = lq1_reference(p, 50);
  const Reconstruction rec = reconstruct_multipliers(p, traj, Vector::Ones(1));
  std::mt19937_64 rng(5);
  CriticalDirection d;
  d.util = random_matrix(50, 1, rng);
  d.xtil = Matrix::Zero(51, 1);
  d.xtil_mid = Matrix::Zero(50, 1);
  const double expected = traj.grid.step() * d.util.squaredNorm();
  EXPECT_NEAR(second_order_form(p, traj, rec.multipliers, d), expected, 1e-12);

  CriticalDirection zero = d;
  zero.util.setZero();
  EXPECT_EQ(second_order_form(p, traj, rec.multipliers, zero), 0.0);
}

TEST(SecondOrderForm, ScalesQuadratically) {
  std::mt19937_64 rng(9);
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    const int N = 20;
    const Trajectory traj = integrate_state(p, random_matrix(N, p.m, rng, 0.2), Grid(N));
    const Vector lambda = Vector::Constant(p.k, 1.0 / std::sqrt(p.k));
    const MultiplierSet mult = reconstruct_multipliers(p, traj, lambda).multipliers;
    const Matrix util = random_matrix(N, p.m, rng);
    const double f1 = second_order_form(p, traj, mult, make_direction(p, traj, util));
    const double f3 = second_order_form(p, traj, mult, make_direction(p, traj, -3.0 * util));
    EXPECT_NEAR(f3, 9.0 * f1, 1e-10 * (1.0 + std::abs(f1))) << name;
    // Recomputing the state perturbation from the same control gives the same value.
    EXPECT_EQ(f1, second_order_form(p, traj, mult, make_direction(p, traj, util)));
  }
}

TEST(SecondOrderForm, SecondDifferenceOfLagrangian) {
  // On lq1 L is quadratic and phi linear, so the form equals the second directional
  // difference of lambda J along u + s util up to the quadrature gap (trapezoid vs Simpson).
  const Problem p = get_problem("lq1");
  const int N = 400;
  std::mt19937_64 rng(21);
  const Trajectory traj = lq1_reference(p, N);
  const MultiplierSet mult = reconstruct_multipliers(p, traj, Vector::Ones(1)).multipliers;
  Matrix util(N, 1);
  for (int i = 0; i < N; ++i) util(i, 0) = std::cos(3.0 * traj.grid.midpoint(i));
  const double s = 1e-2;
  auto J = [&](double a) {
    return objective_values(p, integrate_state(p, traj.u + a * util, traj.grid))(0);
  };
  const double fd = (J(s) - 2.0 * J(0.0) + J(-s)) / (s * s);
  const double form = second_order_form(p, traj, mult, make_direction(p, traj, util));
  EXPECT_NEAR(form, fd, 5.0 / N);
}

TEST(CriticalDirections, UnconstrainedProblemAcceptsEveryDraw) {
  Problem p = blank_problem(2, 2, 1, 1);
  const int N = 16;
  const Trajectory traj = integrate_state(p, Matrix::Zero(N, 2), Grid(N));
  const auto dirs = sample_critical_directions(p, traj, 12, 99);
  EXPECT_EQ(dirs.size(), 12u);
  for (const auto& d : dirs) {
    EXPECT_NEAR(std::sqrt(traj.grid.step()) * d.util.norm(), 1.0, 1e-12);
  }
}

TEST(CriticalDirections, InvariantsHoldOnAllProblems) {
  std::mt19937_64 rng(17);
  for (const std::string& name : problem_names()) {
    const Problem p = get_problem(name);
    const int N = 24;
    const Trajectory traj = integrate_state(p, random_matrix(N, p.m, rng, 0.2), Grid(N));
    const auto dirs = sample_critical_directions(p, traj, 10, 1234);
    EXPECT_FALSE(dirs.empty()) << name;
    const Linearization lin = linearize(p, traj);
    for (const auto& d : dirs) {
      EXPECT_LT(d.dynamics_defect, 1e-10);
      EXPECT_LE(d.b1_values.maxCoeff(), 1e-6) << name;
      // Independent check of (b1) through the reverse-mode gradient.
      for (int c = 0; c < p.k; ++c) {
        FunctionalWeights w;
        w.objective = Vector::Unit(p.k, c);
        const Matrix g = combination_gradient(p, traj, lin, w);
        EXPECT_NEAR(g.cwiseProduct(d.util).sum(), d.b1_values(c), 1e-10);
      }
      for (int i = 0; i <= N; ++i) {
        ASSERT_TRUE(d.xtil.row(i).allFinite());
      }
    }
  }
}

TEST(CriticalDirections, SignConditionWhenAllPathConstraintsActive) {
  Problem p = blank_problem(2, 2, 1, 2);
  p.mixed_constraint.eval = [](double, const Vector&, const Vector& u) {
    return StageJet{u, Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
  };
  const int N = 10;
  const Trajectory traj = integrate_state(p, Matrix::Zero(N, 2), Grid(N));
  const auto dirs = sample_critical_directions(p, traj, 20, 5);
  EXPECT_FALSE(dirs.empty());
  for (const auto& d : dirs) EXPECT_LE(d.util.maxCoeff(), 1e-6);
}

TEST(CriticalDirections, DeterministicForSeed) {
  const Problem p = get_problem("example31");
  const Trajectory traj = integrate_state(p, Matrix::Zero(12, 3), Grid(12));
  const auto a = sample_critical_directions(p, traj, 5, 42);
  const auto b = sample_critical_directions(p, traj, 5, 42);
  const auto c = sample_critical_directions(p, traj, 5, 43);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].util, b[i].util);
  ASSERT_FALSE(c.empty());
  EXPECT_NE(a[0].util, c[0].util);
}

TEST(CheckSsc, Lq1PassesWithGammaHalf) {
  const Problem p = get_problem("lq1");
  const Trajectory traj = lq1_reference(p, 1000);
  const Reconstruction rec = reconstruct_multipliers(p, traj, Vector::Ones(1));
  const auto dirs = sample_critical_directions(p, traj, 16, 1);
  const SscReport rep = check_ssc(p, traj, rec.multipliers, dirs, 0.5);
  EXPECT_TRUE(rep.precondition_ok) << rep.status;
  EXPECT_NEAR(rep.min_eig_luu, 1.0, 1e-14);
  EXPECT_TRUE(rep.legendre_ok);
  ASSERT_EQ(rep.form_values.size(), dirs.size());
  // With |u_tilde|_2 = 1 each form is at least int u_tilde^2 = 1.
  for (double f : rep.form_values) EXPECT_GE(f, 1.0 - 1e-9);
  EXPECT_TRUE(rep.pass);
}

TEST(CheckSsc, ZeroControlCurvatureFailsLegendre) {
  Problem p = blank_problem(1, 1, 1, 1);
  const int N = 10;
  const Trajectory traj = integrate_state(p, Matrix::Zero(N, 1), Grid(N));
  const MultiplierSet mult{Vector::Ones(1), Vector::Zero(1), Matrix::Zero(N + 1, 1),
                           Matrix::Zero(N, 1), true};
  const SscReport rep = check_ssc(p, traj, mult, sample_critical_directions(p, traj, 4, 0), 1e-3);
  EXPECT_TRUE(rep.precondition_ok) << rep.status;
  EXPECT_FALSE(rep.legendre_ok);
  EXPECT_FALSE(rep.pass);
}

TEST(CheckSsc, FailedStationarityIsAPreconditionViolation) {
  const Problem p = get_problem("lq1");
  Trajectory traj = lq1_reference(p, 100);
  Matrix u = traj.u;
  u(3, 0) += 0.2;
  traj = integrate_state(p, u, traj.grid);
  const Reconstruction rec = reconstruct_multipliers(p, traj, Vector::Ones(1));
  const SscReport rep = check_ssc(p, traj, rec.multipliers, {}, 0.5);
  EXPECT_FALSE(rep.precondition_ok);
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.form_values.empty());
}

TEST(DiscreteKkt, ZeroObjectiveFeasiblePointZeroMultipliers) {
  Problem p = blank_problem(2, 1, 1, 1);
  const int N = 8;
  const Trajectory traj = integrate_state(p, Matrix::Zero(N, 1), Grid(N));
  const DiscreteKktReport rep =
      check_discrete_vop_kkt(p, traj, Vector::Ones(1), {Vector::Zero(2), Matrix::Zero(N, 1)});
  EXPECT_EQ(rep.stationarity, 0.0);
  EXPECT_EQ(rep.min_multiplier, 0.0);
  EXPECT_EQ(rep.complementarity, 0.0);
  EXPECT_EQ(rep.feasibility, 0.0);
}

TEST(DiscreteKkt, GridScaling) {
  NlpMultipliers m{Vector::Constant(2, 3.0), Matrix::Constant(4, 1, 0.5)};
  Vector w(2);
  w << 3.0, 4.0;
  const ScaledMultipliers s = grid_scaled_multipliers(m, Grid(4), w);
  EXPECT_DOUBLE_EQ(s.l(0), 0.6);
  EXPECT_DOUBLE_EQ(s.theta(0, 0), 0.5 / (0.25 * 5.0));
}

}  // namespace
}  // namespace mokkt
