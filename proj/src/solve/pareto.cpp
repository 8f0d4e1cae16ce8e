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
#include <atomic>
#include <thread>

#include "mokkt/solve.hpp"

namespace mokkt {

namespace {

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

int nth_prime(int n) {
  int count = 0;
  for (int c = 2;; ++c) {
    bool prime = true;
    for (int d = 2; d * d <= c; ++d) {
      if (c % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && count++ == n) return c;
  }
}

ParetoPoint solve_point(const Problem& problem, const Vector& w, const Matrix& u_init,
                        const ParetoOptions& opts) {
  ParetoPoint pt;
  pt.weights = w;
  pt.lambda = w / w.norm();
  try {
    pt.solve = solve_scalarized(problem, w, u_init, opts.solver);
    pt.traj = pt.solve.traj;
    pt.J = pt.solve.J;
    pt.kkt = verify_kkt(problem, pt.traj, pt.lambda, opts.kkt);
  } catch (const std::exception& e) {
    pt.solve.weights = w;
    pt.solve.converged = false;
    pt.solve.status = std::string("solve failed: ") + e.what();
    pt.kkt.status = "not verified";
  }
  return pt;
}

}  // namespace

std::vector<Vector> simplex_weights(int k, int count, std::uint64_t seed) {
  if (k < 1 || count < 1) throw std::invalid_argument("simplex_weights: need k >= 1 and count >= 1");
  if (k == 1) return {Vector::Ones(1)};
  std::vector<Vector> out;
  if (k == 2) {
    for (int j = 0; j < count; ++j) {
      const double s = count == 1 ? 0.5 : static_cast<double>(j) / (count - 1);
      Vector w(2);
      w << 1.0 - s, s;
      out.push_back(w);
    }
    return out;
  }
  for (int j = 0; j < count; ++j) {
    std::vector<double> cuts(k - 1);
    for (int d = 0; d < k - 1; ++d) cuts[d] = radical_inverse(seed + 1 + j, nth_prime(d));
    std::sort(cuts.begin(), cuts.end());
    Vector w(k);
    double prev = 0.0;
    for (int d = 0; d < k - 1; ++d) {
      w(d) = cuts[d] - prev;
      prev = cuts[d];
    }
    w(k - 1) = 1.0 - prev;
    out.push_back(w);
  }
  return out;
}

std::vector<std::size_t> dominance_filter(const std::vector<Vector>& points, double tol) {
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < points.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < points.size() && !dominated; ++b) {
      if (b == a) continue;
      const Eigen::ArrayXd diff = points[b].array() - points[a].array();
      dominated = (diff <= tol).all() && (diff < -tol).any();
    }
    if (!dominated) keep.push_back(a);
  }
  return keep;
}

ParetoResult pareto_sweep(const Problem& problem, const ParetoOptions& opts) {
  if (opts.weight_count < 1) throw std::invalid_argument("pareto_sweep: weight_count must be >= 1");
  const std::vector<Vector> weights = simplex_weights(problem.k, opts.weight_count, opts.seed);
  const Matrix zero = Matrix::Zero(opts.grid_n, problem.m);
  ParetoResult res;
  res.points.resize(weights.size());

  if (opts.jobs <= 1) {
    Matrix u_prev = zero;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      res.points[j] = solve_point(problem, weights[j], u_prev, opts);
      if (res.points[j].solve.converged) u_prev = res.points[j].traj.u;
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t j = next++; j < weights.size(); j = next++) {
        res.points[j] = solve_point(problem, weights[j], zero, opts);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(opts.jobs, static_cast<int>(weights.size()));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<std::size_t> converged;
  std::vector<Vector> values;
  for (std::size_t j = 0; j < res.points.size(); ++j) {
    if (res.points[j].solve.converged) {
      converged.push_back(j);
      values.push_back(res.points[j].J);
    }
  }
  for (std::size_t idx : dominance_filter(values)) {
    res.front.push_back(converged[idx]);
    res.points[converged[idx]].kept = true;
  }
  return res;
}

}  // namespace mokkt
