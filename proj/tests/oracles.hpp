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

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace mokkt::testing {

/// Shooting solution of x' = p, p' = x, x(0) = x0, p(1) = 0, the necessary
/// conditions of min int (x^2 + u^2)/2 with x' = u (u = p). Independent of the
/// library integrators: fixed-step RK4 on the 2x2 system with its own stepping.
class Lq1Oracle {
 public:
  explicit Lq1Oracle(double x0 = 1.0, int steps = 20000) : x0_(x0), steps_(steps) {
    // p(1) is affine in the unknown p(0); two shots determine it.
    const double a = shoot(0.0)[1];
    const double b = shoot(1.0)[1];
    p0_ = -a / (b - a);
  }

  double p0() const { return p0_; }
  double state(double t) const { return integrate_to(t)[0]; }
  double control(double t) const { return integrate_to(t)[1]; }

 private:
  using Z = std::array<double, 2>;

  Z shoot(double p0) const { return integrate(Z{x0_, p0}, 1.0); }
  Z integrate_to(double t) const { return integrate(Z{x0_, p0_}, t); }

  Z integrate(Z z, double t_end) const {
    const int steps = std::max(1, static_cast<int>(std::ceil(steps_ * t_end)));
    const double h = t_end / steps;
    auto f = [](const Z& s) { return Z{s[1], s[0]}; };
    for (int i = 0; i < steps; ++i) {
      const Z k1 = f(z);
      const Z k2 = f({z[0] + 0.5 * h * k1[0], z[1] + 0.5 * h * k1[1]});
      const Z k3 = f({z[0] + 0.5 * h * k2[0], z[1] + 0.5 * h * k2[1]});
      const Z k4 = f({z[0] + h * k3[0], z[1] + h * k3[1]});
      for (int c = 0; c < 2; ++c) z[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    return z;
  }

  double x0_;
  int steps_;
  double p0_ = 0.0;
};

/// int_0^1 exp(1/2 - t^2/2) dt via the error function.
inline double alpha0() {
  return std::exp(0.5) * std::sqrt(M_PI / 2.0) * std::erf(1.0 / std::sqrt(2.0));
}

/// int_0^1 exp(1/6 - t^2/2 + t/3) dt = e^{2/9} int_0^1 exp(-(t - 1/3)^2 / 2) dt.
inline double beta0() {
  const double s = std::sqrt(2.0);
  return std::exp(2.0 / 9.0) * std::sqrt(M_PI / 2.0) *
         (std::erf((2.0 / 3.0) / s) + std::erf((1.0 / 3.0) / s));
}

inline double omega11(double tau) { return std::exp(0.5 - tau * tau / 2.0); }
inline double omega22(double tau) { return std::exp(1.0 / 6.0 - tau * tau / 2.0 + tau / 3.0); }

/// u = 0 solution of the example31 dynamics with x0 = (1, 0).
inline double example31_x1(double t) { return std::exp(t * t / 2.0); }
inline double example31_x2(double t) { return -(t / 3.0) * std::exp(t * t / 2.0); }

}  // namespace mokkt::testing
