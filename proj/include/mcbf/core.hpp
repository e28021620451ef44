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

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcbf
{

using Vector3 = Eigen::Matrix<double, 3, 1>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Matrix83 = Eigen::Matrix<double, 8, 3>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix62 = Eigen::Matrix<double, 6, 2>;

/// Raised when a steering angle reaches ±π/2 and tan(δ) is undefined.
class SteeringSingularity : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Multi-steering tractor-trailer state. Angles are kept unwrapped.
struct StateVector
{
  double x1 = 0.0;      // m
  double y1 = 0.0;      // m
  double v = 0.0;       // m/s
  double a = 0.0;       // m/s^2
  double theta = 0.0;   // rad, tractor heading
  double psi = 0.0;     // rad, articulation angle
  double delta1 = 0.0;  // rad, tractor steering
  double delta2 = 0.0;  // rad, trailer steering

  static constexpr int kDim = 8;

  Vector8 to_vector() const;
  static StateVector from_vector(const Eigen::Ref<const Eigen::VectorXd>& x);
  bool finite() const;
  bool operator==(const StateVector&) const = default;
};

/// Index of each state inside the packed 8-vector.
namespace sx
{
inline constexpr int kX1 = 0;
inline constexpr int kY1 = 1;
inline constexpr int kV = 2;
inline constexpr int kA = 3;
inline constexpr int kTheta = 4;
inline constexpr int kPsi = 5;
inline constexpr int kDelta1 = 6;
inline constexpr int kDelta2 = 7;
}  // namespace sx

struct InputVector
{
  double jerk = 0.0;    // m/s^3
  double omega1 = 0.0;  // rad/s
  double omega2 = 0.0;  // rad/s

  static constexpr int kDim = 3;

  Vector3 to_vector() const { return {jerk, omega1, omega2}; }
  static InputVector from_vector(const Eigen::Ref<const Eigen::VectorXd>& u);
  bool finite() const;
  bool operator==(const InputVector&) const = default;
};

/// Single-steering model: the multi-steering state with δ2 ≡ 0 and the
/// acceleration promoted to an input.
struct SsttrState
{
  double x1 = 0.0;
  double y1 = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double delta1 = 0.0;

  static constexpr int kDim = 6;

  Vector6 to_vector() const;
  static SsttrState from_vector(const Eigen::Ref<const Eigen::VectorXd>& x);
  /// Embeds into the 8-state layout with a = 0 and δ2 = 0.
  StateVector embed() const;
  bool operator==(const SsttrState&) const = default;
};

struct SsttrInput
{
  double accel = 0.0;   // m/s^2
  double omega1 = 0.0;  // rad/s

  static constexpr int kDim = 2;

  Eigen::Vector2d to_vector() const { return {accel, omega1}; }
  static SsttrInput from_vector(const Eigen::Ref<const Eigen::VectorXd>& u);
  bool operator==(const SsttrInput&) const = default;
};

/// Box limits |x_i| <= max. Defaults are the multi-steering maxima.
struct Limits
{
  double v_max = 20.0;
  double a_max = 1.0;
  double psi_max = 0.784;
  double delta1_max = 0.784;
  double delta2_max = 0.784;
  double jerk_max = 2.5;
  double omega1_max = 1.5;
  double omega2_max = 0.5;

  /// Throws std::invalid_argument unless every maximum is strictly positive.
  void validate() const;
};

struct BodyRectangle
{
  double length = 0.0;            // m
  double width = 0.0;             // m
  double rear_axle_offset = 0.0;  // m, rear edge to rear axle
};

struct RobotGeometry
{
  double l1 = 2.5;  // tractor wheelbase
  double l2 = 5.5;  // hitch to trailer rear axle
  BodyRectangle tractor_body{3.7, 2.0, 0.6};
  BodyRectangle trailer_body{7.0, 2.4, 1.0};

  void validate() const;
};

struct Obstacle
{
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;  // physical extent, used for collision reporting only
};

struct BoundViolation
{
  std::string field;
  double value = 0.0;
  double limit = 0.0;
};

/// Inclusive box check of the bounded state components.
std::vector<BoundViolation> validate_state(const StateVector& s, const Limits& lim);
std::vector<BoundViolation> validate_input(const InputVector& u, const Limits& lim);

/// Wraps an angle to (-π, π].
double wrap_angle(double angle);

enum class RobotKind
{
  Msttr,
  Ssttr
};

/// One row of a closed-loop log. For single-steering runs the input slots hold
/// (a, ω1, 0) and the state has a = δ2 = 0.
struct LogEntry
{
  double t = 0.0;
  StateVector state;
  InputVector u_nominal;
  InputVector u_safe;
  std::vector<double> h_tractor;  // per obstacle
  std::vector<double> h_trailer;  // per obstacle
  bool filter_active = false;
  double mpc_cost = 0.0;
  double min_clearance = 0.0;

  bool operator==(const LogEntry&) const = default;
};

class TrajectoryLog
{
public:
  TrajectoryLog() = default;
  TrajectoryLog(RobotKind robot, double ts, std::size_t n_obstacles);

  /// Appends an entry; its time must be exactly one sampling period after the
  /// previous entry (1e-9 s tolerance) and its barrier lists must match the
  /// obstacle count.
  void append(LogEntry entry);

  RobotKind robot() const { return robot_; }
  double ts() const { return ts_; }
  std::size_t n_obstacles() const { return n_obstacles_; }
  const std::vector<LogEntry>& entries() const { return entries_; }
  std::vector<LogEntry>& mutable_entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const TrajectoryLog&) const = default;

private:
  RobotKind robot_ = RobotKind::Msttr;
  double ts_ = 0.2;
  std::size_t n_obstacles_ = 0;
  std::vector<LogEntry> entries_;
};

}  // namespace mcbf
