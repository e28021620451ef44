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

#include "mcbf/safety.hpp"

#include "mcbf/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace mcbf
{

namespace
{

void guard(double delta)
{
  if (!(std::abs(delta) < std::numbers::pi / 2.0))
  {
    throw SteeringSingularity("barrier derivatives: steering angle reached ±π/2");
  }
}

/// Solves min |u - u_nom|^2 s.t. A u <= b (optionally with slacked rows).
struct ProjectionOutcome
{
  Eigen::VectorXd u;
  bool active = false;
  double slack_used = 0.0;
};

ProjectionOutcome project(QpSolver& solver, const Eigen::VectorXd& u_nom, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b, Eigen::Index n_soft_rows, bool slack, double slack_weight)
{
  ProjectionOutcome out{u_nom, false, 0.0};
  const Eigen::Index nu = u_nom.size();
  if (A.rows() == 0 || ((A * u_nom - b).array() <= 0.0).all())
  {
    return out;
  }
  const QpProblem p(2.0 * Eigen::MatrixXd::Identity(nu, nu), -2.0 * u_nom, A, b);
  const QpSolution s = solver.solve(p);
  if (s.status == QpStatus::Optimal)
  {
    out.u = s.z;
    out.active = true;
    return out;
  }
  if (!slack)
  {
    throw FilterInfeasible(std::string("safety QP not solved: ") + to_string(s.status));
  }
  // Slack on the first n_soft_rows (barrier) rows: A_soft u - s <= b, s >= 0.
  const Eigen::Index m = A.rows();
  const Eigen::Index ns = n_soft_rows;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nu + ns, nu + ns);
  H.topLeftCorner(nu, nu) = 2.0 * Eigen::MatrixXd::Identity(nu, nu);
  H.bottomRightCorner(ns, ns) = 2.0 * slack_weight * Eigen::MatrixXd::Identity(ns, ns);
  Eigen::VectorXd q(nu + ns);
  q.head(nu) = -2.0 * u_nom;
  q.tail(ns).setConstant(slack_weight);
  Eigen::MatrixXd As = Eigen::MatrixXd::Zero(m + ns, nu + ns);
  Eigen::VectorXd bs = Eigen::VectorXd::Zero(m + ns);
  As.topLeftCorner(m, nu) = A;
  As.block(0, nu, ns, ns) = -Eigen::MatrixXd::Identity(ns, ns);
  bs.head(m) = b;
  As.bottomRightCorner(ns, ns) = -Eigen::MatrixXd::Identity(ns, ns);
  QpSolver slack_solver(solver.settings());
  const QpSolution ss = slack_solver.solve(QpProblem(H, q, As, bs));
  if (ss.status != QpStatus::Optimal)
  {
    throw FilterInfeasible(std::string("slacked safety QP not solved: ") + to_string(ss.status));
  }
  out.u = ss.z.head(nu);
  out.active = true;
  out.slack_used = ss.z.tail(ns).cwiseMax(0.0).sum();
  return out;
}

}  // namespace

const char* to_string(Body body)
{
  return body == Body::Tractor ? "tractor" : "trailer";
}

void GainVectors::validate() const
{
  for (double k : tractor)
  {
    if (!(k > 0.0))
    {
      throw std::invalid_argument("GainVectors: tractor gains must be strictly positive");
    }
  }
  for (double k : trailer)
  {
    if (!(k > 0.0))
    {
      throw std::invalid_argument("GainVectors: trailer gains must be strictly positive");
    }
  }
}

double barrier_value(const StateVector& s, const PositionBarrier& barrier, const Obstacle& obs,
                     const RobotGeometry& geom)
{
  double px = s.x1;
  double py = s.y1;
  if (barrier.body == Body::Trailer)
  {
    const TrailerPose tp = trailer_pose(s, geom);
    px = tp.x2;
    py = tp.y2;
  }
  const double dx = px - obs.x;
  const double dy = py - obs.y;
  return dx * dx + dy * dy - barrier.d * barrier.d;
}

TractorDerivatives tractor_derivatives(const StateVector& s, const Obstacle& obs, const RobotGeometry& geom,
                                       double d1)
{
  guard(s.delta1);
  const double l1 = geom.l1;
  const double v = s.v;
  const double a = s.a;
  const double dx = s.x1 - obs.x;
  const double dy = s.y1 - obs.y;
  const double ct = std::cos(s.theta);
  const double st = std::sin(s.theta);
  const double t1 = std::tan(s.delta1);
  // Along-heading and cross-heading components of the obstacle offset.
  const double along = dx * ct + dy * st;
  const double cross = dx * st - dy * ct;

  TractorDerivatives r;
  r.h = dx * dx + dy * dy - d1 * d1;
  r.h_dot = 2.0 * v * along;
  r.h_ddot = 2.0 * v * v + 2.0 * a * along - 2.0 * v * v / l1 * t1 * cross;
  r.drift = 6.0 * v * a - 6.0 * v * a / l1 * t1 * cross - 2.0 * v * v * v / (l1 * l1) * t1 * t1 * along;
  r.grad_u << 2.0 * along, -2.0 * v * v / l1 * (1.0 + t1 * t1) * cross, 0.0;
  return r;
}

TrailerDerivatives trailer_derivatives(const StateVector& s, const Obstacle& obs, const RobotGeometry& geom,
                                       double d2)
{
  guard(s.delta1);
  guard(s.delta2);
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double v = s.v;
  const double a = s.a;
  // Offsets are measured from the tractor reference point.
  const double dx = s.x1 - obs.x;
  const double dy = s.y1 - obs.y;
  const double ct = std::cos(s.theta);
  const double st = std::sin(s.theta);
  const double cp = std::cos(s.psi);
  const double sp = std::sin(s.psi);
  const double phi = s.theta - s.psi;
  const double cphi = std::cos(phi);
  const double sphi = std::sin(phi);
  const double t1 = std::tan(s.delta1);
  const double t2 = std::tan(s.delta2);

  const double along = dx * ct + dy * st;
  const double cross = dx * st - dy * ct;
  const double steer = t2 * cp + sp;  // trailer yaw-rate factor
  const double n_term = dx * sphi - dy * cphi;
  const double q_term = dx * cphi + dy * sphi;
  const double psi_dot = v / l1 * t1 - v / l2 * steer;

  const double ex = dx - l2 * cphi;
  const double ey = dy - l2 * sphi;

  TrailerDerivatives r;
  r.h = ex * ex + ey * ey - d2 * d2;
  r.h_dot = 2.0 * v * along - 2.0 * l2 * v * cp + 2.0 * v * steer * n_term;
  r.drift = 2.0 * v * v - 2.0 * v * v * steer * sp - 2.0 * l2 * a * cp + 2.0 * l2 * v * sp * psi_dot +
            2.0 * a * along - 2.0 * v * v / l1 * t1 * cross + 2.0 * a * steer * n_term -
            2.0 * v * (t2 * sp - cp) * psi_dot * n_term + 2.0 * v * v / l2 * steer * steer * q_term;
  r.grad_u << 0.0, 0.0, 2.0 * v * (1.0 + t2 * t2) * cp * n_term;
  return r;
}

SsttrTractorDerivatives ssttr_tractor_derivatives(const SsttrState& s, const Obstacle& obs,
                                                  const RobotGeometry& geom, double d1)
{
  guard(s.delta1);
  const double v = s.v;
  const double dx = s.x1 - obs.x;
  const double dy = s.y1 - obs.y;
  const double ct = std::cos(s.theta);
  const double st = std::sin(s.theta);
  const double t1 = std::tan(s.delta1);
  const double along = dx * ct + dy * st;
  const double cross = dx * st - dy * ct;

  SsttrTractorDerivatives r;
  r.h = dx * dx + dy * dy - d1 * d1;
  r.h_dot = 2.0 * v * along;
  r.drift = 2.0 * v * v - 2.0 * v * v / geom.l1 * t1 * cross;
  r.grad_u << 2.0 * along, 0.0;
  return r;
}

std::vector<double> cascade_coefficients(std::span<const double> gains)
{
  // Track m^j as a polynomial in the derivative order: m^j = Σ p_i h^(i).
  std::vector<double> poly{1.0};
  for (double k : gains)
  {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
      next[i + 1] += poly[i];  // time derivative shifts the order
      next[i] += k * poly[i];
    }
    poly = std::move(next);
  }
  poly.pop_back();  // leading coefficient of h^(r) is 1
  return poly;
}

CascadeValues cascade(std::span<const double> derivatives, std::span<const double> gains)
{
  if (derivatives.size() != gains.size())
  {
    throw std::invalid_argument("cascade: need one derivative per gain");
  }
  CascadeValues out;
  std::vector<double> poly{1.0};
  for (std::size_t j = 0; j < gains.size(); ++j)
  {
    double value = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
      value += poly[i] * derivatives[i];
    }
    out.m.push_back(value);
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
      next[i + 1] += poly[i];
      next[i] += gains[j] * poly[i];
    }
    poly = std::move(next);
  }
  return out;
}

CascadeValues cascade(const StateVector& s, const PositionBarrier& barrier, const Obstacle& obs,
                      const GainVectors& gains, const RobotGeometry& geom)
{
  if (barrier.body == Body::Tractor)
  {
    const TractorDerivatives d = tractor_derivatives(s, obs, geom, barrier.d);
    const std::array<double, 3> derivs{d.h, d.h_dot, d.h_ddot};
    return cascade(derivs, gains.tractor);
  }
  const TrailerDerivatives d = trailer_derivatives(s, obs, geom, barrier.d);
  const std::array<double, 2> derivs{d.h, d.h_dot};
  return cascade(derivs, gains.trailer);
}

SafetyConstraints assemble_constraints(const StateVector& s, std::span<const Obstacle> obstacles,
                                       const GainVectors& gains, const SafetyDistances& dists,
                                       const RobotGeometry& geom)
{
  gains.validate();
  const auto n_obs = static_cast<Eigen::Index>(obstacles.size());
  SafetyConstraints c;
  c.A.resize(2 * n_obs, 3);
  c.b.resize(2 * n_obs);
  c.rows.reserve(static_cast<std::size_t>(2 * n_obs));
  const std::vector<double> ct = cascade_coefficients(gains.tractor);
  const std::vector<double> cr = cascade_coefficients(gains.trailer);
  for (Eigen::Index k = 0; k < n_obs; ++k)
  {
    const TractorDerivatives d = tractor_derivatives(s, obstacles[static_cast<std::size_t>(k)], geom, dists.tractor);
    // drift + grad·u + c0 h + c1 ḣ + c2 ḧ >= 0
    c.A.row(k) = -d.grad_u.transpose();
    c.b(k) = d.drift + ct[0] * d.h + ct[1] * d.h_dot + ct[2] * d.h_ddot;
    c.rows.push_back({Body::Tractor, static_cast<std::size_t>(k)});
  }
  for (Eigen::Index k = 0; k < n_obs; ++k)
  {
    const TrailerDerivatives d = trailer_derivatives(s, obstacles[static_cast<std::size_t>(k)], geom, dists.trailer);
    c.A.row(n_obs + k) = -d.grad_u.transpose();
    c.b(n_obs + k) = d.drift + cr[0] * d.h + cr[1] * d.h_dot;
    c.rows.push_back({Body::Trailer, static_cast<std::size_t>(k)});
  }
  return c;
}

DecouplingReport decoupling_report(const StateVector& s, std::span<const Obstacle> obstacles,
                                   const GainVectors& gains, const SafetyDistances& dists,
                                   const RobotGeometry& geom)
{
  const SafetyConstraints c = assemble_constraints(s, obstacles, gains, dists, geom);
  DecouplingReport r;
  r.matrix = -c.A;
  if (r.matrix.rows() == 0)
  {
    r.full_row_rank = true;
    return r;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.matrix);
  const Eigen::VectorXd sv = svd.singularValues();
  r.row_rank = static_cast<int>((sv.array() > 1e-9).count());
  r.min_singular_value = sv.size() < r.matrix.rows() ? 0.0 : sv.minCoeff();
  r.full_row_rank = r.row_rank == r.matrix.rows();
  return r;
}

SafetyFilter::SafetyFilter(FilterConfig config, RobotGeometry geom) : config_(config), geom_(geom)
{
  config_.gains.validate();
}

FilterResult SafetyFilter::filter(const InputVector& u_nom, const StateVector& s, std::span<const Obstacle> obstacles)
{
  FilterResult result{u_nom, false, 0.0};
  if (obstacles.empty())
  {
    return result;
  }
  const SafetyConstraints c = assemble_constraints(s, obstacles, config_.gains, config_.dists, geom_);
  Eigen::MatrixXd A = c.A;
  Eigen::VectorXd b = c.b.array() - config_.margin;
  if (config_.input_boxes)
  {
    const Eigen::Index m = A.rows();
    A.conservativeResize(m + 6, 3);
    b.conservativeResize(m + 6);
    A.bottomRows(6).setZero();
    const Vector3 umax(config_.limits.jerk_max, config_.limits.omega1_max, config_.limits.omega2_max);
    for (int i = 0; i < 3; ++i)
    {
      A(m + 2 * i, i) = 1.0;
      A(m + 2 * i + 1, i) = -1.0;
      b(m + 2 * i) = umax(i);
      b(m + 2 * i + 1) = umax(i);
    }
  }
  const ProjectionOutcome p =
      project(solver_, u_nom.to_vector(), A, b, c.A.rows(), config_.slack, config_.slack_weight);
  result.u_safe = p.active ? InputVector::from_vector(p.u) : u_nom;
  result.active = p.active;
  result.slack_used = p.slack_used;
  if (config_.input_boxes)
  {
    // Clip polish round-off so the boxes hold exactly.
    result.u_safe.jerk = std::clamp(result.u_safe.jerk, -config_.limits.jerk_max, config_.limits.jerk_max);
    result.u_safe.omega1 = std::clamp(result.u_safe.omega1, -config_.limits.omega1_max, config_.limits.omega1_max);
    result.u_safe.omega2 = std::clamp(result.u_safe.omega2, -config_.limits.omega2_max, config_.limits.omega2_max);
  }
  return result;
}

EcbfFilter::EcbfFilter(EcbfConfig config, RobotGeometry geom) : config_(config), geom_(geom)
{
  for (double k : config_.gains)
  {
    if (!(k > 0.0))
    {
      throw std::invalid_argument("EcbfFilter: gains must be strictly positive");
    }
  }
}

SafetyConstraints EcbfFilter::constraints(const SsttrState& s, std::span<const Obstacle> obstacles) const
{
  SafetyConstraints c;
  const auto n_obs = static_cast<Eigen::Index>(obstacles.size());
  c.A.resize(n_obs, 2);
  c.b.resize(n_obs);
  for (Eigen::Index k = 0; k < n_obs; ++k)
  {
    const SsttrTractorDerivatives d =
        ssttr_tractor_derivatives(s, obstacles[static_cast<std::size_t>(k)], geom_, config_.d);
    c.A.row(k) = -d.grad_u.transpose();
    c.b(k) = d.drift + config_.gains[0] * d.h + config_.gains[1] * d.h_dot;
    c.rows.push_back({Body::Tractor, static_cast<std::size_t>(k)});
  }
  return c;
}

EcbfResult EcbfFilter::filter(const SsttrInput& u_nom, const SsttrState& s, std::span<const Obstacle> obstacles)
{
  EcbfResult result{u_nom, false, 0.0};
  if (obstacles.empty())
  {
    return result;
  }
  const SafetyConstraints c = constraints(s, obstacles);
  Eigen::MatrixXd A = c.A;
  Eigen::VectorXd b = c.b;
  if (config_.input_boxes)
  {
    const Eigen::Index m = A.rows();
    A.conservativeResize(m + 4, 2);
    b.conservativeResize(m + 4);
    A.bottomRows(4).setZero();
    const Eigen::Vector2d umax(config_.limits.a_max, config_.limits.omega1_max);
    for (int i = 0; i < 2; ++i)
    {
      A(m + 2 * i, i) = 1.0;
      A(m + 2 * i + 1, i) = -1.0;
      b(m + 2 * i) = umax(i);
      b(m + 2 * i + 1) = umax(i);
    }
  }
  const ProjectionOutcome p =
      project(solver_, u_nom.to_vector(), A, b, c.A.rows(), config_.slack, config_.slack_weight);
  result.u_safe = p.active ? SsttrInput::from_vector(p.u) : u_nom;
  result.active = p.active;
  result.slack_used = p.slack_used;
  if (config_.input_boxes)
  {
    result.u_safe.accel = std::clamp(result.u_safe.accel, -config_.limits.a_max, config_.limits.a_max);
    result.u_safe.omega1 = std::clamp(result.u_safe.omega1, -config_.limits.omega1_max, config_.limits.omega1_max);
  }
  return result;
}

RegularityResult regularity_probe(const SafetyConstraints& constraints)
{
  RegularityResult r;
  const Eigen::Index m = constraints.A.rows();
  const Eigen::Index nu = constraints.A.cols();
  if (m == 0)
  {
    r.status = QpStatus::Unbounded;
    r.p_star = std::numeric_limits<double>::infinity();
    return r;
  }
  Eigen::MatrixXd A(m, nu + 1);
  A.leftCols(nu) = constraints.A;
  A.col(nu).setOnes();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nu + 1);
  c(nu) = 1.0;
  const LpResult lp = solve_lp(c, A, constraints.b);
  r.status = lp.status;
  r.p_star = lp.status == QpStatus::Optimal ? lp.value
             : lp.status == QpStatus::Unbounded ? std::numeric_limits<double>::infinity()
                                                : std::numeric_limits<double>::quiet_NaN();
  return r;
}

RegularityResult regularity_probe(const StateVector& s, std::span<const Obstacle> obstacles,
                                  const GainVectors& gains, const SafetyDistances& dists, const RobotGeometry& geom)
{
  return regularity_probe(assemble_constraints(s, obstacles, gains, dists, geom));
}

}  // namespace mcbf
