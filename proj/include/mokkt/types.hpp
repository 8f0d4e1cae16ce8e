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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mokkt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform grid on [0, 1]: t_i = i / N, i = 0..N.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int intervals) : intervals_(intervals) {
    if (intervals < 1) throw std::invalid_argument("Grid: need at least one interval");
  }

  int intervals() const { return intervals_; }
  int nodes() const { return intervals_ + 1; }
  double step() const { return 1.0 / intervals_; }
  double node(int i) const { return static_cast<double>(i) / intervals_; }
  double midpoint(int i) const { return (i + 0.5) / intervals_; }

  bool operator==(const Grid& other) const = default;

 private:
  int intervals_ = 1;
};

/// Node states and piecewise-constant controls on a grid.
///
/// Row i of `x` is the state at t_i; row i of `u` is the control on [t_i, t_{i+1}).
struct Trajectory {
  Grid grid;
  Matrix x;
  Matrix u;

  Vector state(int i) const { return x.row(i).transpose(); }
  Vector control(int i) const { return u.row(i).transpose(); }
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mokkt
