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

#include "mcbf/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcbf
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weights(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& P, const Eigen::MatrixXd& R, int horizon,
                   double ts, const char* who)
{
  auto fail = [&](const char* what) { throw std::invalid_argument(std::string(who) + ": " + what); };
  if (horizon < 1)
  {
    fail("horizon must be at least 1");
  }
  if (!(ts > 0.0))
  {
    fail("sampling time must be positive");
  }
  auto psd = [](const Eigen::MatrixXd& M, bool strict) {
    if (!M.allFinite() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    {
      return false;
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
    return strict ? lo > 0.0 : lo >= -1e-12;
  };
  if (!psd(Q, false) || !psd(P, false))
  {
    fail("Q and P must be symmetric positive semidefinite");
  }
  if (!psd(R, true))
  {
    fail("R must be symmetric positive definite");
  }
}

struct StepOutcome
{
  QpSolution sol;
  CondensedProblem problem;
  bool softened = false;
};

template <typename Result>
void fill_result(Result& r, const StepOutcome& o)
{
  const CondensedProblem& p = o.problem;
  r.U = o.sol.z.head(p.num_inputs);
  r.cost = o.sol.objective + p.cost_offset;
  r.status = o.sol.status;
  r.softened = o.softened;
  r.slack_total = p.num_slacks > 0 ? o.sol.z.tail(p.num_slacks).cwiseMax(0.0).sum() : 0.0;
  r.iterations = o.sol.iterations;
}

}  // namespace

void MpcConfig::validate() const
{
  check_weights(Q, P, R, horizon, ts, "MpcConfig");
  limits.validate();
}

void SsttrMpcConfig::validate() const
{
  check_weights(Q, P, R, horizon, ts, "SsttrMpcConfig");
  limits.validate();
}

CondensedProblem condense(const LtvTrackingData& d)
{
  const auto N = static_cast<Eigen::Index>(d.stages.size());
  const Eigen::Index nx = d.x0.size();
  const Eigen::Index nu = d.u_max.size();
  if (N < 1 || static_cast<Eigen::Index>(d.x_ref.size()) != N + 1 ||
      static_cast<Eigen::Index>(d.u_ref.size()) != N)
  {
    throw std::invalid_argument("condense: reference window length does not match the horizon");
  }

  CondensedProblem c;
  c.Sx = Eigen::MatrixXd::Zero(N * nx, nx);
  c.Su = Eigen::MatrixXd::Zero(N * nx, N * nu);
  c.Sc = Eigen::VectorXd::Zero(N * nx);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(nx, nx);
  Eigen::MatrixXd gam = Eigen::MatrixXd::Zero(nx, N * nu);
  Eigen::VectorXd cst = Eigen::VectorXd::Zero(nx);
  for (Eigen::Index k = 0; k < N; ++k)
  {
    const LtvStage& s = d.stages[static_cast<std::size_t>(k)];
    phi = (s.A * phi).eval();
    gam = (s.A * gam).eval();
    gam.middleCols(k * nu, nu) = s.B;
    cst = (s.A * cst + s.C).eval();
    c.Sx.middleRows(k * nx, nx) = phi;
    c.Su.middleRows(k * nx, nx) = gam;
    c.Sc.segment(k * nx, nx) = cst;
  }

  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(N * nx, N * nx);
  Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(N * nu, N * nu);
  Eigen::VectorXd Xr(N * nx);
  Eigen::VectorXd Ur(N * nu);
  for (Eigen::Index k = 0; k < N; ++k)
  {
    Qbar.block(k * nx, k * nx, nx, nx) = k + 1 == N ? d.P : d.Q;
    Rbar.block(k * nu, k * nu, nu, nu) = d.R;
    Xr.segment(k * nx, nx) = d.x_ref[static_cast<std::size_t>(k + 1)];
    Ur.segment(k * nu, nu) = d.u_ref[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd free_response = c.Sx * d.x0 + c.Sc;
  const Eigen::VectorXd e = free_response - Xr;
  const Eigen::VectorXd e0 = d.x0 - d.x_ref.front();

  std::vector<Eigen::Index> bounded;
  for (Eigen::Index i = 0; i < nx; ++i)
  {
    if (std::isfinite(d.x_max(i)))
    {
      bounded.push_back(i);
    }
  }
  const Eigen::Index nb = static_cast<Eigen::Index>(bounded.size()) * N;
  c.num_inputs = N * nu;
  c.num_slacks = d.soft_state_boxes ? nb : 0;
  const Eigen::Index nz = c.num_inputs + c.num_slacks;

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nz, nz);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(nz);
  H.topLeftCorner(c.num_inputs, c.num_inputs) = 2.0 * (c.Su.transpose() * Qbar * c.Su + Rbar);
  q.head(c.num_inputs) = 2.0 * (c.Su.transpose() * Qbar * e - Rbar * Ur);
  if (c.num_slacks > 0)
  {
    H.bottomRightCorner(c.num_slacks, c.num_slacks).diagonal().setConstant(2.0 * d.slack_weight);
    q.tail(c.num_slacks).setConstant(d.slack_weight);
  }
  H = (0.5 * (H + H.transpose())).eval();
  c.cost_offset = e.dot(Qbar * e) + Ur.dot(Rbar * Ur) + e0.dot(d.Q * e0);

  const Eigen::Index m_in = 2 * N * nu;
  const Eigen::Index m_state = 2 * nb + c.num_slacks;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_in + m_state, nz);
  Eigen::VectorXd b(m_in + m_state);
  for (Eigen::Index k = 0; k < N; ++k)
  {
    for (Eigen::Index i = 0; i < nu; ++i)
    {
      const Eigen::Index col = k * nu + i;
      A(2 * col, col) = 1.0;
      b(2 * col) = d.u_max(i);
      A(2 * col + 1, col) = -1.0;
      b(2 * col + 1) = d.u_max(i);
    }
  }
  Eigen::Index row = m_in;
  Eigen::Index slack = 0;
  for (Eigen::Index k = 0; k < N; ++k)
  {
    for (Eigen::Index i : bounded)
    {
      const Eigen::Index r = k * nx + i;
      A.block(row, 0, 1, c.num_inputs) = c.Su.row(r);
      b(row) = d.x_max(i) - free_response(r);
      A.block(row + 1, 0, 1, c.num_inputs) = -c.Su.row(r);
      b(row + 1) = d.x_max(i) + free_response(r);
      if (c.num_slacks > 0)
      {
        const Eigen::Index sc = c.num_inputs + slack;
        A(row, sc) = -1.0;
        A(row + 1, sc) = -1.0;
      }
      row += 2;
      ++slack;
    }
  }
  for (Eigen::Index s = 0; s < c.num_slacks; ++s)
  {
    A(row, c.num_inputs + s) = -1.0;
    b(row) = 0.0;
    ++row;
  }
  c.qp = QpProblem(std::move(H), std::move(q), std::move(A), std::move(b));
  return c;
}

CondensedProblem build_qp(const StateVector& x_now, const ReferenceWindow& ref, const MpcConfig& cfg,
                          const RobotGeometry& geom)
{
  cfg.validate();
  const auto N = static_cast<std::size_t>(cfg.horizon);
  if (ref.states.size() != N + 1 || ref.inputs.size() != N)
  {
    throw std::invalid_argument("build_qp: reference window must hold N+1 states and N inputs");
  }
  if (!x_now.finite())
  {
    throw std::invalid_argument("build_qp: current state is not finite");
  }
  // Heading is compared modulo 2π against the reference.
  StateVector x0 = x_now;
  x0.theta = ref.states[0].theta + wrap_angle(x_now.theta - ref.states[0].theta);

  LtvTrackingData d;
  d.x0 = x0.to_vector();
  for (std::size_t k = 0; k < N; ++k)
  {
    const StateVector& lin_x = (k == 0 && cfg.linearize_at_state) ? x0 : ref.states[k];
    const LinearizedModel m = linearize(lin_x, ref.inputs[k], geom, cfg.ts);
    d.stages.push_back({m.A, m.B, m.C});
    d.u_ref.push_back(ref.inputs[k].to_vector());
  }
  for (const StateVector& s : ref.states)
  {
    d.x_ref.push_back(s.to_vector());
  }
  d.Q = cfg.Q;
  d.P = cfg.P;
  d.R = cfg.R;
  const Limits& l = cfg.limits;
  d.u_max = Eigen::Vector3d(l.jerk_max, l.omega1_max, l.omega2_max);
  d.x_max = Vector8(kInf, kInf, l.v_max, l.a_max, kInf, l.psi_max, l.delta1_max, l.delta2_max);
  d.soft_state_boxes = !cfg.hard_state_boxes;
  d.slack_weight = cfg.state_slack_weight;
  return condense(d);
}

CondensedProblem build_qp(const SsttrState& x_now, const SsttrReferenceWindow& ref, const SsttrMpcConfig& cfg,
                          const RobotGeometry& geom)
{
  cfg.validate();
  const auto N = static_cast<std::size_t>(cfg.horizon);
  if (ref.states.size() != N + 1 || ref.inputs.size() != N)
  {
    throw std::invalid_argument("build_qp: reference window must hold N+1 states and N inputs");
  }
  SsttrState x0 = x_now;
  x0.theta = ref.states[0].theta + wrap_angle(x_now.theta - ref.states[0].theta);
  if (!x0.to_vector().allFinite())
  {
    throw std::invalid_argument("build_qp: current state is not finite");
  }

  LtvTrackingData d;
  d.x0 = x0.to_vector();
  for (std::size_t k = 0; k < N; ++k)
  {
    const SsttrState& lin_x = (k == 0 && cfg.linearize_at_state) ? x0 : ref.states[k];
    const SsttrLinearizedModel m = linearize(lin_x, ref.inputs[k], geom, cfg.ts);
    d.stages.push_back({m.A, m.B, m.C});
    d.u_ref.push_back(ref.inputs[k].to_vector());
  }
  for (const SsttrState& s : ref.states)
  {
    d.x_ref.push_back(s.to_vector());
  }
  d.Q = cfg.Q;
  d.P = cfg.P;
  d.R = cfg.R;
  const Limits& l = cfg.limits;
  d.u_max = Eigen::Vector2d(l.a_max, l.omega1_max);
  d.x_max = Vector6(kInf, kInf, l.v_max, kInf, kInf, l.delta1_max);
  d.soft_state_boxes = !cfg.hard_state_boxes;
  d.slack_weight = cfg.state_slack_weight;
  return condense(d);
}

namespace
{

/// Warm-started solve; a run that hits the iteration cap is retried cold.
QpSolution solve_or_restart(QpSolver& solver, const QpProblem& qp)
{
  QpSolution sol = solver.solve(qp);
  if (sol.status == QpStatus::MaxIter)
  {
    solver.reset();
    sol = solver.solve(qp);
  }
  return sol;
}

}  // namespace

MpcController::MpcController(MpcConfig cfg, RobotGeometry geom) : cfg_(std::move(cfg)), geom_(geom)
{
  cfg_.validate();
  geom_.validate();
}

MpcResult MpcController::step(const StateVector& x_now, const ReferenceWindow& ref)
{
  MpcConfig c = cfg_;
  StepOutcome o;
  o.problem = build_qp(x_now, ref, c, geom_);
  o.sol = solve_or_restart(cfg_.hard_state_boxes ? solver_ : soft_solver_, o.problem.qp);
  if (cfg_.hard_state_boxes && o.sol.status != QpStatus::Optimal)
  {
    c.hard_state_boxes = false;
    o.problem = build_qp(x_now, ref, c, geom_);
    o.sol = solve_or_restart(soft_solver_, o.problem.qp);
    o.softened = true;
  }
  if (o.sol.status != QpStatus::Optimal)
  {
    throw MpcSolverFailure(std::string("MPC QP not solved: ") + to_string(o.sol.status));
  }
  MpcResult r;
  fill_result(r, o);
  const Limits& l = cfg_.limits;
  r.u = {std::clamp(r.U(0), -l.jerk_max, l.jerk_max), std::clamp(r.U(1), -l.omega1_max, l.omega1_max),
         std::clamp(r.U(2), -l.omega2_max, l.omega2_max)};
  return r;
}

SsttrMpcController::SsttrMpcController(SsttrMpcConfig cfg, RobotGeometry geom) : cfg_(std::move(cfg)), geom_(geom)
{
  cfg_.validate();
  geom_.validate();
}

SsttrMpcResult SsttrMpcController::step(const SsttrState& x_now, const SsttrReferenceWindow& ref)
{
  SsttrMpcConfig c = cfg_;
  StepOutcome o;
  o.problem = build_qp(x_now, ref, c, geom_);
  o.sol = solve_or_restart(cfg_.hard_state_boxes ? solver_ : soft_solver_, o.problem.qp);
  if (cfg_.hard_state_boxes && o.sol.status != QpStatus::Optimal)
  {
    c.hard_state_boxes = false;
    o.problem = build_qp(x_now, ref, c, geom_);
    o.sol = solve_or_restart(soft_solver_, o.problem.qp);
    o.softened = true;
  }
  if (o.sol.status != QpStatus::Optimal)
  {
    throw MpcSolverFailure(std::string("MPC QP not solved: ") + to_string(o.sol.status));
  }
  SsttrMpcResult r;
  fill_result(r, o);
  const Limits& l = cfg_.limits;
  r.u = {std::clamp(r.U(0), -l.a_max, l.a_max), std::clamp(r.U(1), -l.omega1_max, l.omega1_max)};
  return r;
}

}  // namespace mcbf
