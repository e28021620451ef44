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

#include "mcbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcbf
{

namespace
{

void guard_steering(double delta, const char* name)
{
  if (!(std::abs(delta) < std::numbers::pi / 2.0))
  {
    throw SteeringSingularity(std::string("steering angle ") + name + " reached ±π/2");
  }
}

OrientedRect pose_rect(double x, double y, double heading, const BodyRectangle& body)
{
  OrientedRect r;
  r.heading = heading;
  r.half_length = 0.5 * body.length;
  r.half_width = 0.5 * body.width;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  // Longitudinal offset of the body center ahead of the rear axle.
  const double fwd = r.half_length - body.rear_axle_offset;
  r.center = {x + c * fwd, y + s * fwd};
  const std::array<std::array<double, 2>, 4> local{{
      {-r.half_length, -r.half_width},
      {r.half_length, -r.half_width},
      {r.half_length, r.half_width},
      {-r.half_length, r.half_width},
  }};
  for (std::size_t i = 0; i < 4; ++i)
  {
    r.corners[i] = {r.center.x + c * local[i][0] - s * local[i][1], r.center.y + s * local[i][0] + c * local[i][1]};
  }
  return r;
}

}  // namespace

Vector8 msttr_f(const StateVector& s, const RobotGeometry& geom)
{
  guard_steering(s.delta1, "delta1");
  guard_steering(s.delta2, "delta2");
  const double theta_dot = s.v / geom.l1 * std::tan(s.delta1);
  Vector8 f;
  f << s.v * std::cos(s.theta), s.v * std::sin(s.theta), s.a, 0.0, theta_dot,
      theta_dot - s.v / geom.l2 * (std::tan(s.delta2) * std::cos(s.psi) + std::sin(s.psi)), 0.0, 0.0;
  return f;
}

Matrix83 msttr_g(const StateVector& /*s*/)
{
  Matrix83 g = Matrix83::Zero();
  g(sx::kA, 0) = 1.0;
  g(sx::kDelta1, 1) = 1.0;
  g(sx::kDelta2, 2) = 1.0;
  return g;
}

Vector8 msttr_rhs(const StateVector& s, const InputVector& u, const RobotGeometry& geom)
{
  return msttr_f(s, geom) + msttr_g(s) * u.to_vector();
}

Vector6 ssttr_f(const SsttrState& s, const RobotGeometry& geom)
{
  guard_steering(s.delta1, "delta1");
  const double theta_dot = s.v / geom.l1 * std::tan(s.delta1);
  Vector6 f;
  f << s.v * std::cos(s.theta), s.v * std::sin(s.theta), 0.0, theta_dot,
      theta_dot - s.v / geom.l2 * std::sin(s.psi), 0.0;
  return f;
}

Matrix62 ssttr_g(const SsttrState& /*s*/)
{
  Matrix62 g = Matrix62::Zero();
  g(2, 0) = 1.0;
  g(5, 1) = 1.0;
  return g;
}

AffineDynamics msttr_dynamics(const RobotGeometry& geom)
{
  AffineDynamics d;
  d.state_dim = StateVector::kDim;
  d.input_dim = InputVector::kDim;
  d.drift = [geom](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return msttr_f(StateVector::from_vector(x), geom);
  };
  d.input_columns = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return msttr_g(StateVector::from_vector(x));
  };
  return d;
}

AffineDynamics ssttr_dynamics(const RobotGeometry& geom)
{
  AffineDynamics d;
  d.state_dim = SsttrState::kDim;
  d.input_dim = SsttrInput::kDim;
  d.drift = [geom](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return ssttr_f(SsttrState::from_vector(x), geom);
  };
  d.input_columns = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return ssttr_g(SsttrState::from_vector(x));
  };
  return d;
}

TrailerPose trailer_pose(const StateVector& s, const RobotGeometry& geom)
{
  const double heading = s.theta - s.psi;
  return {s.x1 - geom.l2 * std::cos(heading), s.y1 - geom.l2 * std::sin(heading), heading};
}

Eigen::VectorXd integrate_step(const AffineDynamics& dyn, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               double dt)
{
  if (!(dt > 0.0))
  {
    throw std::invalid_argument("integrate_step: dt must be positive");
  }
  const Eigen::VectorXd k1 = dyn(x, u);
  const Eigen::VectorXd k2 = dyn(x + 0.5 * dt * k1, u);
  const Eigen::VectorXd k3 = dyn(x + 0.5 * dt * k2, u);
  const Eigen::VectorXd k4 = dyn(x + dt * k3, u);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace
{
template <typename State, typename Input, typename Rhs>
State rk4_substeps(State s, const Input& u, double dt, int substeps, Rhs&& rhs)
{
  if (!(dt > 0.0) || substeps < 1)
  {
    throw std::invalid_argument("integrate_step: dt must be positive and substeps >= 1");
  }
  const double h = dt / substeps;
  auto x = s.to_vector();
  for (int i = 0; i < substeps; ++i)
  {
    const auto k1 = rhs(x, u);
    const auto k2 = rhs((x + 0.5 * h * k1).eval(), u);
    const auto k3 = rhs((x + 0.5 * h * k2).eval(), u);
    const auto k4 = rhs((x + h * k3).eval(), u);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return State::from_vector(x);
}
}  // namespace

StateVector integrate_step(const StateVector& s, const InputVector& u, const RobotGeometry& geom, double dt,
                           int substeps)
{
  return rk4_substeps(s, u, dt, substeps, [&](const Vector8& x, const InputVector& in) -> Vector8 {
    return msttr_rhs(StateVector::from_vector(x), in, geom);
  });
}

SsttrState integrate_step(const SsttrState& s, const SsttrInput& u, const RobotGeometry& geom, double dt,
                          int substeps)
{
  return rk4_substeps(s, u, dt, substeps, [&](const Vector6& x, const SsttrInput& in) -> Vector6 {
    const SsttrState st = SsttrState::from_vector(x);
    return ssttr_f(st, geom) + ssttr_g(st) * in.to_vector();
  });
}

Footprint footprint(const StateVector& s, const RobotGeometry& geom)
{
  const TrailerPose tp = trailer_pose(s, geom);
  return {pose_rect(s.x1, s.y1, s.theta, geom.tractor_body), pose_rect(tp.x2, tp.y2, tp.heading, geom.trailer_body)};
}

double signed_distance(const OrientedRect& rect, Point2 p)
{
  const double c = std::cos(rect.heading);
  const double s = std::sin(rect.heading);
  const double dx = p.x - rect.center.x;
  const double dy = p.y - rect.center.y;
  const double lx = std::abs(c * dx + s * dy) - rect.half_length;
  const double ly = std::abs(-s * dx + c * dy) - rect.half_width;
  const double outside = std::hypot(std::max(lx, 0.0), std::max(ly, 0.0));
  const double inside = std::min(std::max(lx, ly), 0.0);
  return outside + inside;
}

double clearance(const OrientedRect& rect, const Obstacle& obs)
{
  return signed_distance(rect, {obs.x, obs.y}) - obs.radius;
}

}  // namespace mcbf
