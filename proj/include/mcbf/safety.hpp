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
#include "mcbf/qpsolver.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace mcbf
{

enum class Body
{
  Tractor,
  Trailer
};

const char* to_string(Body body);

/// Position barrier h_ik(x) = |p_i - p_k^o|^2 - d_i^2 for body i and obstacle k.
struct PositionBarrier
{
  Body body = Body::Tractor;
  std::size_t obstacle_index = 0;
  double d = 0.0;

  /// 3 for the tractor (jerk/steering-rate inputs), 2 for the trailer.
  int relative_degree() const { return body == Body::Tractor ? 3 : 2; }
};

/// Per-level linear class-K gains of the barrier cascade.
struct GainVectors
{
  std::array<double, 3> tractor{1.0, 2.0, 2.0};
  std::array<double, 2> trailer{4.0, 4.0};

  /// Throws std::invalid_argument unless every gain is strictly positive.
  void validate() const;
};

struct SafetyDistances
{
  double tractor = 4.6;  // d1
  double trailer = 3.0;  // d2
};

/// h_1k and its time derivatives along the multi-steering flow. The third
/// derivative is affine in u: h''' = drift + grad_u · u.
struct TractorDerivatives
{
  double h = 0.0;
  double h_dot = 0.0;
  double h_ddot = 0.0;
  double drift = 0.0;
  Vector3 grad_u = Vector3::Zero();
};

/// h_2k, ḣ_2k, and ḧ_2k = drift + grad_u · u (only ω2 appears).
struct TrailerDerivatives
{
  double h = 0.0;
  double h_dot = 0.0;
  double drift = 0.0;
  Vector3 grad_u = Vector3::Zero();
};

/// Tractor barrier under the single-steering model: ḧ = drift + grad_u · (a, ω1).
struct SsttrTractorDerivatives
{
  double h = 0.0;
  double h_dot = 0.0;
  double drift = 0.0;
  Eigen::Vector2d grad_u = Eigen::Vector2d::Zero();
};

double barrier_value(const StateVector& s, const PositionBarrier& barrier, const Obstacle& obs,
                     const RobotGeometry& geom);

TractorDerivatives tractor_derivatives(const StateVector& s, const Obstacle& obs, const RobotGeometry& geom,
                                       double d1);
TrailerDerivatives trailer_derivatives(const StateVector& s, const Obstacle& obs, const RobotGeometry& geom,
                                       double d2);
SsttrTractorDerivatives ssttr_tractor_derivatives(const SsttrState& s, const Obstacle& obs, const RobotGeometry& geom,
                                                  double d1);

/// Coefficients (c_0, ..., c_{r-1}) of the expanded cascade
/// m^r = h^(r) + Σ c_i h^(i) obtained from m^j = ṁ^{j-1} + k^{j-1} m^{j-1}.
std::vector<double> cascade_coefficients(std::span<const double> gains);

/// The input-independent cascade functions m^0 .. m^{r-1}; m^0 = h.
struct CascadeValues
{
  std::vector<double> m;
};

/// Evaluates m^0..m^{r-1} from the lower derivatives (h, ḣ, ..., h^(r-1)).
CascadeValues cascade(std::span<const double> derivatives, std::span<const double> gains);

/// Cascade values of one barrier at state s.
CascadeValues cascade(const StateVector& s, const PositionBarrier& barrier, const Obstacle& obs,
                      const GainVectors& gains, const RobotGeometry& geom);

struct ConstraintRow
{
  Body body = Body::Tractor;
  std::size_t obstacle_index = 0;
};

/// Stacked safety constraints A u <= b (A = -E(x)). Rows are ordered tractor
/// k = 0..N_o-1, then trailer k = 0..N_o-1.
struct SafetyConstraints
{
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<ConstraintRow> rows;
};

SafetyConstraints assemble_constraints(const StateVector& s, std::span<const Obstacle> obstacles,
                                       const GainVectors& gains, const SafetyDistances& dists,
                                       const RobotGeometry& geom);

struct DecouplingReport
{
  Eigen::MatrixXd matrix;  // E(x): one row of input coefficients per barrier
  int row_rank = 0;
  double min_singular_value = 0.0;
  bool full_row_rank = false;
};

DecouplingReport decoupling_report(const StateVector& s, std::span<const Obstacle> obstacles,
                                   const GainVectors& gains, const SafetyDistances& dists,
                                   const RobotGeometry& geom);

class FilterInfeasible : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct FilterConfig
{
  GainVectors gains;
  SafetyDistances dists;
  Limits limits;
  /// Resolve infeasible QPs with per-row slacks instead of failing.
  bool slack = false;
  double slack_weight = 1e6;
  /// Add |u_i| <= u_i_max rows to the safety QP.
  bool input_boxes = false;
  /// Tightens every barrier row to A u <= b - margin. The constraint is only
  /// imposed at sampling instants, so a positive margin absorbs the drift of
  /// the top cascade level while the input is held.
  double margin = 0.0;
};

struct FilterResult
{
  InputVector u_safe;
  bool active = false;
  double slack_used = 0.0;
};

/// Multi-barrier QP safety filter: min |u - u_nom|^2 s.t. A_mcbf u <= b_mcbf.
class SafetyFilter
{
public:
  SafetyFilter(FilterConfig config, RobotGeometry geom);

  /// Throws FilterInfeasible when the QP has no solution and slack is off.
  FilterResult filter(const InputVector& u_nom, const StateVector& s, std::span<const Obstacle> obstacles);

  const FilterConfig& config() const { return config_; }

private:
  FilterConfig config_;
  RobotGeometry geom_;
  QpSolver solver_;
};

struct EcbfConfig
{
  std::array<double, 2> gains{1.0, 2.0};  // K' = [k0, k1]: ḧ + k1 ḣ + k0 h >= 0
  double d = 4.6;
  Limits limits;
  bool slack = false;
  double slack_weight = 1e6;
  bool input_boxes = false;
};

struct EcbfResult
{
  SsttrInput u_safe;
  bool active = false;
  double slack_used = 0.0;
};

/// Exponential-CBF baseline for the single-steering robot: one relative-degree-2
/// constraint per obstacle on the tractor reference point.
class EcbfFilter
{
public:
  EcbfFilter(EcbfConfig config, RobotGeometry geom);

  EcbfResult filter(const SsttrInput& u_nom, const SsttrState& s, std::span<const Obstacle> obstacles);

  /// A u <= b rows, one per obstacle.
  SafetyConstraints constraints(const SsttrState& s, std::span<const Obstacle> obstacles) const;

  const EcbfConfig& config() const { return config_; }

private:
  EcbfConfig config_;
  RobotGeometry geom_;
  QpSolver solver_;
};

struct RegularityResult
{
  QpStatus status = QpStatus::MaxIter;
  double p_star = 0.0;  // +inf when unbounded
};

/// p*(x) = max p s.t. A_mcbf u + p 1 <= b_mcbf. p* > 0 certifies the
/// Mangasarian-Fromovitz condition of the filter QP at x.
RegularityResult regularity_probe(const StateVector& s, std::span<const Obstacle> obstacles,
                                  const GainVectors& gains, const SafetyDistances& dists, const RobotGeometry& geom);

RegularityResult regularity_probe(const SafetyConstraints& constraints);

}  // namespace mcbf
