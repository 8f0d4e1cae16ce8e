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

#include "mokkt/cq.hpp"

namespace mokkt {

StageJet mixed_constraint_at(const Problem& problem, const Trajectory& traj, int interval) {
  return problem.mixed_constraint.eval(traj.grid.midpoint(interval),
                                       midpoint_state(problem, traj, interval),
                                       traj.control(interval));
}

std::vector<Matrix> build_R(const Problem& problem, const Trajectory& traj) {
  const int N = traj.grid.intervals();
  std::vector<Matrix> R(N);
  for (int i = 0; i < N; ++i) {
    const Matrix gu = mixed_constraint_at(problem, traj, i).du;
    R[i] = gu * gu.transpose();
  }
  return R;
}

H2Result check_h2(const Problem& problem, const Trajectory& traj, double tol) {
  const Matrix hx = problem.endpoint_constraint.eval(traj.state(traj.grid.intervals())).dx;
  H2Result out;
  out.det = Eigen::PartialPivLU<Matrix>(hx).determinant();
  out.ok = std::abs(out.det) > tol;
  return out;
}

H3Result check_h3(const std::vector<Matrix>& R, double gamma_min) {
  H3Result out;
  out.gamma = std::numeric_limits<double>::infinity();
  for (const auto& Ri : R) {
    out.gamma = std::min(out.gamma, std::abs(Eigen::PartialPivLU<Matrix>(Ri).determinant()));
  }
  if (R.empty()) out.gamma = 0.0;
  out.ok = out.gamma >= gamma_min;
  return out;
}

H3Result check_h3(const Problem& problem, const Trajectory& traj, double gamma_min) {
  return check_h3(build_R(problem, traj), gamma_min);
}

NullspaceBasis nullspace_basis(const Problem& problem, const Trajectory& traj) {
  const int N = traj.grid.intervals();
  NullspaceBasis out;
  out.rank.resize(N);
  out.S.resize(N);
  for (int i = 0; i < N; ++i) {
    const Matrix gu = mixed_constraint_at(problem, traj, i).du;
    Eigen::JacobiSVD<Matrix> svd(gu, Eigen::ComputeFullV);
    const Vector& sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    int rank = 0;
    for (Eigen::Index c = 0; c < sigma.size(); ++c) {
      if (smax > 0.0 && sigma(c) > 1e-10 * smax) ++rank;
    }
    out.rank[i] = rank;
    const int mstar = problem.m - rank;
    Matrix S = svd.matrixV().rightCols(mstar);
    if (i == 0) {
      out.mstar = mstar;
    } else if (mstar != out.mstar) {
      out.constant_dimension = false;
    }
    if (i > 0 && mstar > 0 && out.S[i - 1].cols() == mstar) {
      Eigen::JacobiSVD<Matrix> p(S.transpose() * out.S[i - 1], Eigen::ComputeFullU | Eigen::ComputeFullV);
      S = (S * (p.matrixU() * p.matrixV().transpose())).eval();
    }
    out.S[i] = S;
  }
  return out;
}

namespace {

Matrix reduced_state_matrix(const StageJet& phi, const StageJet& g) {
  const Matrix R = g.du * g.du.transpose();
  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("R = g_u g_u^T is singular");
  }
  return phi.dx - phi.du * g.du.transpose() * llt.solve(g.dx);
}

}  // namespace

ABMatrices build_AB(const Problem& problem, const Trajectory& traj, const NullspaceBasis& basis) {
  const int N = traj.grid.intervals();
  ABMatrices out;
  out.A.resize(N);
  out.B.resize(N);
  for (int i = 0; i < N; ++i) {
    const double t = traj.grid.midpoint(i);
    const Vector x = midpoint_state(problem, traj, i), u = traj.control(i);
    const StageJet phi = problem.dynamics.eval(t, x, u);
    const StageJet g = problem.mixed_constraint.eval(t, x, u);
    try {
      out.A[i] = reduced_state_matrix(phi, g);
    } catch (const NumericalError&) {
      throw NumericalError("build_AB: R singular on interval " + std::to_string(i));
    }
    out.B[i] = phi.du * basis.S[i];
  }
  return out;
}

IntervalMatrixFn reduced_A(const Problem& problem, const Trajectory& traj) {
  return [&problem, &traj](double t, int i) {
    const Vector x = interpolate_state(problem, traj, i, t), u = traj.control(i);
    return reduced_state_matrix(problem.dynamics.eval(t, x, u),
                                problem.mixed_constraint.eval(t, x, u));
  };
}

IntervalMatrixFn reduced_B(const Problem& problem, const Trajectory& traj,
                           const NullspaceBasis& basis) {
  return [&problem, &traj, &basis](double t, int i) {
    const Vector x = interpolate_state(problem, traj, i, t);
    return Matrix(problem.dynamics.eval(t, x, traj.control(i)).du * basis.S[i]);
  };
}

H5Result check_h5(const Gramian& gramian) {
  H5Result out;
  out.gramian = gramian;
  out.min_eig = gramian.min_eig;
  const auto n = gramian.W.rows();
  out.ok = n > 0 && out.min_eig > gramian.rank_tol * gramian.W.trace() / static_cast<double>(n);
  return out;
}

H5Result check_h5(const Problem& problem, const Trajectory& traj, const NullspaceBasis& basis,
                  double rank_tol) {
  if (!basis.constant_dimension || basis.mstar == 0) {
    H5Result out;
    out.gramian.W = Matrix::Zero(problem.n, problem.n);
    out.gramian.eigenvalues = Vector::Zero(problem.n);
    out.gramian.rank_tol = rank_tol;
    return out;
  }
  const PrincipalMatrix omega = principal_matrix(reduced_A(problem, traj), traj.grid);
  return check_h5(controllability_gramian(omega, reduced_B(problem, traj, basis), rank_tol));
}

CQReport check_constraint_qualifications(const Problem& problem, const Trajectory& traj,
                                         const CQOptions& options) {
  CQReport rep;
  const H2Result h2 = check_h2(problem, traj, options.h2_tol);
  rep.h2_det = h2.det;
  rep.h2_ok = h2.ok;
  const H3Result h3 = check_h3(problem, traj, options.gamma_min);
  rep.h3_gamma = h3.gamma;
  rep.h3_ok = h3.ok;

  const NullspaceBasis basis = nullspace_basis(problem, traj);
  rep.h4_rank = basis.rank;
  rep.h4_mstar = basis.mstar;
  rep.h4_constant_dimension = basis.constant_dimension;
  rep.h4_applicable = basis.constant_dimension && basis.mstar > 0;
  if (!basis.constant_dimension) {
    rep.notes.push_back("rank of g_u varies along the trajectory; H4 violated");
  }

  if (rep.h4_applicable) {
    rep.route = "H4+H5";
    if (h3.ok) {
      const H5Result h5 = check_h5(problem, traj, basis, options.rank_tol);
      rep.h5_min_eig = h5.min_eig;
      rep.h5_ok = h5.ok;
    } else {
      rep.h5_ok = false;
      rep.notes.push_back("H5 not evaluated: R is singular");
    }
    rep.decisive_ok = rep.h2_ok && rep.h3_ok && *rep.h5_ok;
  } else {
    rep.route = "H4'";
    const H4PrimeResult h4p = check_h4prime(problem, traj, options.h4prime);
    rep.h4p_slack = h4p.slack;
    rep.h4p_ok = h4p.ok;
    if (!h4p.status.empty() && h4p.status != "optimal") {
      rep.notes.push_back("H4' program: " + h4p.status);
    }
    rep.decisive_ok = rep.h2_ok && rep.h3_ok && h4p.ok;
  }
  return rep;
}

}  // namespace mokkt
