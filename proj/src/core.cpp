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

#include "mcbf/core.hpp"

#include <cmath>
#include <numbers>

namespace mcbf
{

Vector8 StateVector::to_vector() const
{
  Vector8 x;
  x << x1, y1, v, a, theta, psi, delta1, delta2;
  return x;
}

StateVector StateVector::from_vector(const Eigen::Ref<const Eigen::VectorXd>& x)
{
  if (x.size() != kDim)
  {
    throw std::invalid_argument("StateVector::from_vector: expected 8 entries");
  }
  return {x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7)};
}

bool StateVector::finite() const
{
  return to_vector().allFinite();
}

InputVector InputVector::from_vector(const Eigen::Ref<const Eigen::VectorXd>& u)
{
  if (u.size() != kDim)
  {
    throw std::invalid_argument("InputVector::from_vector: expected 3 entries");
  }
  return {u(0), u(1), u(2)};
}

bool InputVector::finite() const
{
  return std::isfinite(jerk) && std::isfinite(omega1) && std::isfinite(omega2);
}

Vector6 SsttrState::to_vector() const
{
  Vector6 x;
  x << x1, y1, v, theta, psi, delta1;
  return x;
}

SsttrState SsttrState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& x)
{
  if (x.size() != kDim)
  {
    throw std::invalid_argument("SsttrState::from_vector: expected 6 entries");
  }
  return {x(0), x(1), x(2), x(3), x(4), x(5)};
}

StateVector SsttrState::embed() const
{
  return {x1, y1, v, 0.0, theta, psi, delta1, 0.0};
}

SsttrInput SsttrInput::from_vector(const Eigen::Ref<const Eigen::VectorXd>& u)
{
  if (u.size() != kDim)
  {
    throw std::invalid_argument("SsttrInput::from_vector: expected 2 entries");
  }
  return {u(0), u(1)};
}

void Limits::validate() const
{
  for (double m : {v_max, a_max, psi_max, delta1_max, delta2_max, jerk_max, omega1_max, omega2_max})
  {
    if (!(m > 0.0) || !std::isfinite(m))
    {
      throw std::invalid_argument("Limits: every maximum must be finite and strictly positive");
    }
  }
}

void RobotGeometry::validate() const
{
  if (!(l1 > 0.0) || !(l2 > 0.0))
  {
    throw std::invalid_argument("RobotGeometry: wheelbases must be positive");
  }
  for (const auto& body : {tractor_body, trailer_body})
  {
    if (!(body.length > 0.0) || !(body.width > 0.0) || body.rear_axle_offset < 0.0)
    {
      throw std::invalid_argument("RobotGeometry: body dimensions must be positive");
    }
  }
}

namespace
{
void check_bound(std::vector<BoundViolation>& out, const char* field, double value, double limit)
{
  if (!(std::abs(value) <= limit))
  {
    out.push_back({field, value, limit});
  }
}
}  // namespace

std::vector<BoundViolation> validate_state(const StateVector& s, const Limits& lim)
{
  std::vector<BoundViolation> out;
  check_bound(out, "v", s.v, lim.v_max);
  check_bound(out, "a", s.a, lim.a_max);
  check_bound(out, "psi", s.psi, lim.psi_max);
  check_bound(out, "delta1", s.delta1, lim.delta1_max);
  check_bound(out, "delta2", s.delta2, lim.delta2_max);
  return out;
}

std::vector<BoundViolation> validate_input(const InputVector& u, const Limits& lim)
{
  std::vector<BoundViolation> out;
  check_bound(out, "jerk", u.jerk, lim.jerk_max);
  check_bound(out, "omega1", u.omega1, lim.omega1_max);
  check_bound(out, "omega2", u.omega2, lim.omega2_max);
  return out;
}

double wrap_angle(double angle)
{
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (w <= 0.0)
  {
    w += kTwoPi;
  }
  return w - std::numbers::pi;
}

TrajectoryLog::TrajectoryLog(RobotKind robot, double ts, std::size_t n_obstacles)
  : robot_(robot), ts_(ts), n_obstacles_(n_obstacles)
{
  if (!(ts > 0.0))
  {
    throw std::invalid_argument("TrajectoryLog: sampling time must be positive");
  }
}

void TrajectoryLog::append(LogEntry entry)
{
  if (entry.h_tractor.size() != n_obstacles_ || entry.h_trailer.size() != n_obstacles_)
  {
    throw std::invalid_argument("TrajectoryLog::append: barrier count does not match obstacle count");
  }
  if (!entries_.empty())
  {
    const double dt = entry.t - entries_.back().t;
    if (!(dt > 0.0) || std::abs(dt - ts_) > 1e-9)
    {
      throw std::invalid_argument("TrajectoryLog::append: entries must be spaced by the sampling time");
    }
  }
  entries_.push_back(std::move(entry));
}

}  // namespace mcbf
