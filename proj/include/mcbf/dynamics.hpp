// Copyright 2026 The mcbf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "mcbf/core.hpp"

#include <array>
#include <functional>

namespace mcbf
{

/// x' = f(x) + G(x) u over packed state/input vectors.
struct AffineDynamics
{
  int state_dim = 0;
  int input_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> input_columns;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const
  {
    return drift(x) + input_columns(x) * u;
  }
};

/// Drift of the multi-steering kinematics. Throws SteeringSingularity when
/// |δ1| or |δ2| reaches π/2.
Vector8 msttr_f(const StateVector& s, const RobotGeometry& geom);

/// Constant input matrix: J drives a, ω1 drives δ1, ω2 drives δ2.
Matrix83 msttr_g(const StateVector& s);

/// Full vector field f(x) + G u.
Vector8 msttr_rhs(const StateVector& s, const InputVector& u, const RobotGeometry& geom);

Vector6 ssttr_f(const SsttrState& s, const RobotGeometry& geom);
Matrix62 ssttr_g(const SsttrState& s);

AffineDynamics msttr_dynamics(const RobotGeometry& geom);
AffineDynamics ssttr_dynamics(const RobotGeometry& geom);

struct TrailerPose
{
  double x2 = 0.0;
  double y2 = 0.0;
  double heading = 0.0;
};

TrailerPose trailer_pose(const StateVector& s, const RobotGeometry& geom);

/// One classical RK4 step with u held constant.
Eigen::VectorXd integrate_step(const AffineDynamics& dyn, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, double dt);

/// `substeps` RK4 steps of dt / substeps each.
StateVector integrate_step(const StateVector& s, const InputVector& u, const RobotGeometry& geom, double dt,
                           int substeps = 1);
SsttrState integrate_step(const SsttrState& s, const SsttrInput& u, const RobotGeometry& geom, double dt,
                          int substeps = 1);

struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

/// World-frame rectangle, corners counter-clockwise starting rear-right.
struct OrientedRect
{
  std::array<Point2, 4> corners;
  Point2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
};

struct Footprint
{
  OrientedRect tractor;
  OrientedRect trailer;
};

Footprint footprint(const StateVector& s, const RobotGeometry& geom);

/// Signed distance from a point to a rectangle: positive outside, negative
/// (minus penetration depth) inside.
double signed_distance(const OrientedRect& rect, Point2 p);

/// Clearance between a rectangle and a disc; negative means overlap.
double clearance(const OrientedRect& rect, const Obstacle& obs);

}  // namespace mcbf
