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
#include "mcbf/linmodel.hpp"
#include "mcbf/qpsolver.hpp"

#include <stdexcept>
#include <vector>

namespace mcbf
{

class MpcSolverFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct MpcConfig
{
  int horizon = 5;
  double ts = 0.2;
  Matrix8 Q = Vector8(1.0, 1.0, 0.5, 0.0, 0.05, 0.1, 0.0, 0.0).asDiagonal();
  Matrix8 P = Vector8(1.0, 1.0, 0.5, 0.0, 0.05, 0.1, 0.0, 0.0).asDiagonal();
  Eigen::Matrix3d R = Eigen::Vector3d(0.01, 0.05, 0.05).asDiagonal();
  Limits limits;
  /// Enforce state boxes as hard rows; an infeasible QP is then retried softly.
  bool hard_state_boxes = false;
  double state_slack_weight = 1e4;
  /// Linearize about the measured state (first stage) instead of the reference.
  bool linearize_at_state = false;

  /// Throws std::invalid_argument on N < 1, Ts <= 0, indefinite Q/P or R not PD.
  void validate() const;
};

struct SsttrMpcConfig
{
  int horizon = 5;
  double ts = 0.2;
  Matrix6 Q = Vector6(1.0, 1.0, 0.5, 0.5, 0.5, 0.0).asDiagonal();
  Matrix6 P = Vector6(1.0, 1.0, 0.5, 0.5, 0.5, 0.0).asDiagonal();
  Eigen::Matrix2d R = Eigen::Vector2d(0.01, 0.05).asDiagonal();
  Limits limits;
  bool hard_state_boxes = false;
  double state_slack_weight = 1e4;
  bool linearize_at_state = false;

  void validate() const;
};

/// x^r_{t..t+N} and u^r_{t..t+N-1}.
template <typename State, typename Input>
struct BasicReferenceWindow
{
  std::vector<State> states;
  std::vector<Input> inputs;
};

using ReferenceWindow = BasicReferenceWindow<StateVector, InputVector>;
using SsttrReferenceWindow = BasicReferenceWindow<SsttrState, SsttrInput>;

/// Sampled reference trajectory (states and inputs at multiples of ts).
template <typename State, typename Input>
struct BasicReferenceTrajectory
{
  std::vector<State> states;
  std::vector<Input> inputs;  // same length as states; the last entry is unused by the dynamics
  double ts = 0.2;

  /// Window starting at sample k; samples past the end hold the final state
  /// with zero input.
  BasicReferenceWindow<State, Input> window(std::size_t k, int horizon) const
  {
    BasicReferenceWindow<State, Input> w;
    const std::size_t last = states.size() - 1;
    for (int j = 0; j <= horizon; ++j)
    {
      const std::size_t idx = k + static_cast<std::size_t>(j);
      w.states.push_back(states[std::min(idx, last)]);
      if (j < horizon)
      {
        w.inputs.push_back(idx < last ? inputs[idx] : Input{});
      }
    }
    return w;
  }
};

using ReferenceTrajectory = BasicReferenceTrajectory<StateVector, InputVector>;
using SsttrReferenceTrajectory = BasicReferenceTrajectory<SsttrState, SsttrInput>;

/// Dense LTV tracking problem shared by both robot models. Decision vector is
/// U = (u_0, ..., u_{N-1}) followed by one slack per (stage, bounded state)
/// when the state boxes are soft.
struct CondensedProblem
{
  QpProblem qp;
  double cost_offset = 0.0;  // constant term, so total cost = objective + offset
  Eigen::Index num_inputs = 0;
  Eigen::Index num_slacks = 0;
  Eigen::MatrixXd Sx;  // stacked predictions X = Sx x0 + Su U + Sc
  Eigen::MatrixXd Su;
  Eigen::VectorXd Sc;
};

struct LtvStage
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd C;
};

struct LtvTrackingData
{
  Eigen::VectorXd x0;
  std::vector<LtvStage> stages;        // N
  std::vector<Eigen::VectorXd> x_ref;  // N+1
  std::vector<Eigen::VectorXd> u_ref;  // N
  Eigen::MatrixXd Q;
  Eigen::MatrixXd P;
  Eigen::MatrixXd R;
  Eigen::VectorXd u_max;  // per input
  Eigen::VectorXd x_max;  // per state; +inf for unbounded components
  bool soft_state_boxes = true;
  double slack_weight = 1e4;
};

CondensedProblem condense(const LtvTrackingData& data);

struct MpcResult
{
  InputVector u;
  Eigen::VectorXd U;  // full optimal input sequence
  double cost = 0.0;
  QpStatus status = QpStatus::MaxIter;
  bool softened = false;  // hard state boxes were infeasible and relaxed
  double slack_total = 0.0;
  int iterations = 0;
};

struct SsttrMpcResult
{
  SsttrInput u;
  Eigen::VectorXd U;
  double cost = 0.0;
  QpStatus status = QpStatus::MaxIter;
  bool softened = false;
  double slack_total = 0.0;
  int iterations = 0;
};

/// Builds the condensed QP for the multi-steering robot.
CondensedProblem build_qp(const StateVector& x_now, const ReferenceWindow& ref, const MpcConfig& cfg,
                          const RobotGeometry& geom);
CondensedProblem build_qp(const SsttrState& x_now, const SsttrReferenceWindow& ref, const SsttrMpcConfig& cfg,
                          const RobotGeometry& geom);

/// Receding-horizon controller. Owns its QP workspace and warm-start cache.
class MpcController
{
public:
  MpcController(MpcConfig cfg, RobotGeometry geom);

  /// Throws MpcSolverFailure if no optimal solution is found.
  MpcResult step(const StateVector& x_now, const ReferenceWindow& ref);

  const MpcConfig& config() const { return cfg_; }
  QpSolver& solver() { return solver_; }

private:
  MpcConfig cfg_;
  RobotGeometry geom_;
  QpSolver solver_;
  QpSolver soft_solver_;
};

class SsttrMpcController
{
public:
  SsttrMpcController(SsttrMpcConfig cfg, RobotGeometry geom);

  SsttrMpcResult step(const SsttrState& x_now, const SsttrReferenceWindow& ref);

  const SsttrMpcConfig& config() const { return cfg_; }

private:
  SsttrMpcConfig cfg_;
  RobotGeometry geom_;
  QpSolver solver_;
  QpSolver soft_solver_;
};

}  // namespace mcbf
