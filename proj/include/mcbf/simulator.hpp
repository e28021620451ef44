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
#include "mcbf/dynamics.hpp"
#include "mcbf/mpc.hpp"
#include "mcbf/safety.hpp"

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcbf
{

enum class FilterKind
{
  MultiCbf,
  Ecbf,
  None
};

const char* to_string(FilterKind kind);
const char* to_string(RobotKind kind);

/// Waypoint polyline with circular fillets at interior corners. speeds[i]
/// applies to the leg from waypoints[i] to waypoints[i+1]; a fillet uses the
/// lower speed of its two legs. The path starts and ends at rest.
struct ReferenceSpec
{
  std::vector<Point2> waypoints;
  std::vector<double> speeds;
  double fillet_radius = 10.0;
  double accel = 0.4;  // ramp acceleration, m/s^2

  /// Throws std::invalid_argument on malformed specs or curvature the robot
  /// cannot follow within the steering and articulation limits.
  void validate(const RobotGeometry& geom, const Limits& limits) const;
};

/// Arc-length parametrized line/arc path.
class ReferencePath
{
public:
  struct Pose
  {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double curvature = 0.0;
  };

  explicit ReferencePath(const ReferenceSpec& spec);

  double length() const { return length_; }
  Pose at(double s) const;
  /// Target speed of the piece containing s.
  double speed_limit(double s) const;

private:
  struct Piece
  {
    double s0 = 0.0;
    double length = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double heading0 = 0.0;
    double curvature = 0.0;
    double speed = 0.0;
  };
  std::vector<Piece> pieces_;
  double length_ = 0.0;
};

/// Samples the path at ts: pose from geometry, speed from a trapezoidal
/// profile, δ1 = atan(l1 κ), ψ from the δ2 = 0 trailer kinematics along the
/// path, inputs from forward differences (clamped to the input limits).
ReferenceTrajectory generate_reference(const ReferenceSpec& spec, const RobotGeometry& geom, const Limits& limits,
                                       double ts);

/// Single-steering view of a reference: (x1, y1, v, θ, ψ, δ1) with inputs (a, ω1).
SsttrReferenceTrajectory to_ssttr(const ReferenceTrajectory& ref);

/// Pose on the reference start, shifted `lateral_offset` metres to the right
/// of the heading, at rest and aligned with the path.
StateVector offset_start_state(const ReferenceTrajectory& ref, double lateral_offset);

struct Scenario
{
  std::string name;
  RobotKind robot = RobotKind::Msttr;
  FilterKind filter = FilterKind::MultiCbf;
  RobotGeometry geom;
  Limits limits;
  MpcConfig mpc;
  SsttrMpcConfig ssttr_mpc;
  GainVectors gains;
  std::array<double, 2> ecbf_gains{1.0, 2.0};
  SafetyDistances dists;
  std::vector<Obstacle> obstacles;
  ReferenceSpec reference;
  double duration = 60.0;
  std::optional<StateVector> initial_state;  // default: 2 m right of the path start
  double initial_lateral_offset = 2.0;
  int substeps = 10;
  bool filter_slack = false;
  bool filter_input_boxes = false;
  double filter_margin = 0.0;

  /// Throws std::invalid_argument on inconsistent settings, including
  /// MultiCbf on the single-steering robot or Ecbf on the multi-steering one.
  void validate() const;
  double ts() const { return robot == RobotKind::Msttr ? mpc.ts : ssttr_mpc.ts; }
};

struct BarrierMinimum
{
  Body body = Body::Tractor;
  std::size_t obstacle_index = 0;
  double min_h = 0.0;
  double t_at_min = 0.0;
};

struct RunMetrics
{
  std::vector<BarrierMinimum> min_h;  // tractor rows then trailer rows
  double min_h_tractor = 0.0;
  double min_h_trailer = 0.0;
  double min_footprint_clearance = 0.0;
  double min_clearance_tractor = 0.0;
  double min_clearance_trailer = 0.0;
  bool collision = false;
  double rms_tracking_error = 0.0;
  double rms_tracking_error_final_10s = 0.0;
  int filter_activation_count = 0;
  double filter_slack_total = 0.0;
  double mpc_slack_total = 0.0;
  int mpc_softened_steps = 0;
  int steps = 0;
};

enum class RunStatus
{
  Completed,
  FilterInfeasible,
  SolverFailure,
  SteeringSingularity
};

const char* to_string(RunStatus status);

struct RunResult
{
  TrajectoryLog log;
  RunMetrics metrics;
  RunStatus status = RunStatus::Completed;
  std::string error;
  ReferenceTrajectory reference;
  std::vector<bool> mpc_softened;  // per logged step
};

/// Closed loop: reference window → MPC → filter → plant (RK4) → log, at Ts.
/// Errors stop the loop; the log holds every step completed before it.
RunResult run(const Scenario& sc);

/// Metrics of a log against its reference and the scenario obstacles.
RunMetrics compute_metrics(const TrajectoryLog& log, const ReferenceTrajectory& ref, const Scenario& sc);

/// Per-step footprint clearance (min over bodies and obstacles).
struct BodyClearance
{
  double tractor = std::numeric_limits<double>::infinity();
  double trailer = std::numeric_limits<double>::infinity();
};
BodyClearance footprint_clearance(const StateVector& s, const RobotGeometry& geom, std::span<const Obstacle> obs);

struct BarrierAudit
{
  Body body = Body::Tractor;
  std::size_t obstacle_index = 0;
  std::vector<double> min_m;  // per cascade level m^0..m^{r-1}
  std::optional<double> first_violation_t;
};

struct AuditReport
{
  double tolerance = 1e-6;
  std::vector<BarrierAudit> barriers;
  double min_h = std::numeric_limits<double>::infinity();
  double min_cascade = std::numeric_limits<double>::infinity();
  std::optional<double> first_violation_t;
  int violation_count = 0;  // logged states with any value below -tolerance
  bool regularity_checked = false;
  double min_p_star = std::numeric_limits<double>::infinity();
  int nonpositive_p_star = 0;

  bool passed() const { return violation_count == 0; }
};

/// Recomputes every barrier and cascade value offline at each logged state.
/// Multi-steering logs use the scenario's multi-CBF gains (whatever filter
/// produced them) and also evaluate the regularity LP; single-steering logs
/// use the ECBF gains on the tractor and plain h on the trailer.
AuditReport invariance_audit(const TrajectoryLog& log, const Scenario& sc);

}  // namespace mcbf
