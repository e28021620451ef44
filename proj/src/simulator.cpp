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

#include "mcbf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcbf
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double v)
{
  return v * v;
}

}  // namespace

const char* to_string(FilterKind kind)
{
  switch (kind)
  {
  case FilterKind::MultiCbf: return "multi_cbf";
  case FilterKind::Ecbf: return "ecbf";
  case FilterKind::None: return "none";
  }
  return "unknown";
}

const char* to_string(RobotKind kind)
{
  return kind == RobotKind::Msttr ? "msttr" : "ssttr";
}

const char* to_string(RunStatus status)
{
  switch (status)
  {
  case RunStatus::Completed: return "completed";
  case RunStatus::FilterInfeasible: return "filter_infeasible";
  case RunStatus::SolverFailure: return "solver_failure";
  case RunStatus::SteeringSingularity: return "steering_singularity";
  }
  return "unknown";
}

void ReferenceSpec::validate(const RobotGeometry& geom, const Limits& limits) const
{
  if (waypoints.size() < 2)
  {
    throw std::invalid_argument("reference: at least two waypoints are required");
  }
  if (speeds.size() != waypoints.size() - 1)
  {
    throw std::invalid_argument("reference: need one speed per polyline leg");
  }
  for (double v : speeds)
  {
    if (!(v > 0.0) || v > limits.v_max)
    {
      throw std::invalid_argument("reference: leg speeds must lie in (0, v_max]");
    }
  }
  if (!(accel > 0.0) || accel > limits.a_max)
  {
    throw std::invalid_argument("reference: ramp acceleration must lie in (0, a_max]");
  }
  if (waypoints.size() > 2)
  {
    const double r_steer = geom.l1 / std::tan(limits.delta1_max);
    const double r_artic = geom.l2 / std::sin(limits.psi_max);
    if (!(fillet_radius >= r_steer))
    {
      throw std::invalid_argument("reference: fillet radius is below l1 / tan(delta1_max)");
    }
    if (!(fillet_radius >= r_artic))
    {
      throw std::invalid_argument("reference: fillet radius needs articulation beyond psi_max");
    }
  }
}

ReferencePath::ReferencePath(const ReferenceSpec& spec)
{
  const auto& w = spec.waypoints;
  const std::size_t n = w.size();
  std::vector<double> leg_len(n - 1);
  std::vector<double> leg_heading(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    leg_len[i] = std::hypot(w[i + 1].x - w[i].x, w[i + 1].y - w[i].y);
    leg_heading[i] = std::atan2(w[i + 1].y - w[i].y, w[i + 1].x - w[i].x);
    if (!(leg_len[i] > 0.0))
    {
      throw std::invalid_argument("reference: repeated waypoint");
    }
  }
  // Tangent length consumed by the fillet at each interior waypoint.
  std::vector<double> turn(n, 0.0);
  std::vector<double> tangent(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
  {
    turn[i] = wrap_angle(leg_heading[i] - leg_heading[i - 1]);
    if (std::abs(turn[i]) >= std::numbers::pi - 1e-9)
    {
      throw std::invalid_argument("reference: reversing corner");
    }
    tangent[i] = spec.fillet_radius * std::tan(std::abs(turn[i]) / 2.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    if (tangent[i] + tangent[i + 1] > leg_len[i] + 1e-9)
    {
      throw std::invalid_argument("reference: fillets overlap; legs too short for the fillet radius");
    }
  }

  double s = 0.0;
  double heading = leg_heading[0];
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    const double line = leg_len[i] - tangent[i] - tangent[i + 1];
    const double hx = std::cos(leg_heading[i]);
    const double hy = std::sin(leg_heading[i]);
    if (line > 0.0)
    {
      pieces_.push_back({s, line, w[i].x + tangent[i] * hx, w[i].y + tangent[i] * hy, leg_heading[i], 0.0,
                         spec.speeds[i]});
      s += line;
    }
    if (i + 2 < n)
    {
      const double len = spec.fillet_radius * std::abs(turn[i + 1]);
      const double kappa = (turn[i + 1] > 0.0 ? 1.0 : -1.0) / spec.fillet_radius;
      pieces_.push_back({s, len, w[i + 1].x - tangent[i + 1] * hx, w[i + 1].y - tangent[i + 1] * hy,
                         heading, kappa, std::min(spec.speeds[i], spec.speeds[i + 1])});
      s += len;
      heading += turn[i + 1];
    }
  }
  length_ = s;
}

ReferencePath::Pose ReferencePath::at(double s) const
{
  s = std::clamp(s, 0.0, length_);
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s, [](double v, const Piece& p) { return v < p.s0; });
  const Piece& p = *std::prev(it);
  const double ds = s - p.s0;
  Pose out;
  out.curvature = p.curvature;
  if (p.curvature == 0.0)
  {
    out.heading = p.heading0;
    out.x = p.x0 + ds * std::cos(p.heading0);
    out.y = p.y0 + ds * std::sin(p.heading0);
  }
  else
  {
    out.heading = p.heading0 + p.curvature * ds;
    out.x = p.x0 + (std::sin(out.heading) - std::sin(p.heading0)) / p.curvature;
    out.y = p.y0 - (std::cos(out.heading) - std::cos(p.heading0)) / p.curvature;
  }
  return out;
}

double ReferencePath::speed_limit(double s) const
{
  s = std::clamp(s, 0.0, length_);
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s, [](double v, const Piece& p) { return v < p.s0; });
  return std::prev(it)->speed;
}

ReferenceTrajectory generate_reference(const ReferenceSpec& spec, const RobotGeometry& geom, const Limits& limits,
                                       double ts)
{
  spec.validate(geom, limits);
  if (!(ts > 0.0))
  {
    throw std::invalid_argument("generate_reference: ts must be positive");
  }
  const ReferencePath path(spec);
  const double L = path.length();

  // Trapezoidal speed profile on a fine arc-length grid (forward/backward pass).
  const int cells = std::max(1, static_cast<int>(std::ceil(L / 0.01)));
  const double ds = L / cells;
  std::vector<double> v(static_cast<std::size_t>(cells) + 1);
  v[0] = 0.0;
  for (int i = 1; i <= cells; ++i)
  {
    const double cap = std::min(path.speed_limit((i - 0.5) * ds), path.speed_limit(i * ds));
    v[static_cast<std::size_t>(i)] = std::min(cap, std::sqrt(sq(v[static_cast<std::size_t>(i - 1)]) + 2.0 * spec.accel * ds));
  }
  v.back() = 0.0;
  for (int i = cells - 1; i >= 0; --i)
  {
    const auto ui = static_cast<std::size_t>(i);
    v[ui] = std::min(v[ui], std::sqrt(sq(v[ui + 1]) + 2.0 * spec.accel * ds));
  }
  // Arrival time at each grid node under piecewise-constant acceleration.
  std::vector<double> t(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i)
  {
    t[i] = t[i - 1] + 2.0 * ds / (v[i - 1] + v[i]);
  }

  const auto samples = static_cast<std::size_t>(std::ceil(t.back() / ts)) + 1;
  std::vector<double> s_k(samples);
  std::vector<double> v_k(samples);
  std::size_t cell = 0;
  for (std::size_t k = 0; k < samples; ++k)
  {
    const double tk = static_cast<double>(k) * ts;
    if (tk >= t.back())
    {
      s_k[k] = L;
      v_k[k] = 0.0;
      continue;
    }
    while (cell + 1 < t.size() && t[cell + 1] <= tk)
    {
      ++cell;
    }
    const double acc = (sq(v[cell + 1]) - sq(v[cell])) / (2.0 * ds);
    const double tau = tk - t[cell];
    s_k[k] = cell * ds + v[cell] * tau + 0.5 * acc * tau * tau;
    v_k[k] = v[cell] + acc * tau;
  }

  // Articulation along the path: dψ/ds = κ - sin(ψ) / l2 (δ2 = 0).
  std::vector<double> psi(samples, 0.0);
  {
    double psi_s = 0.0;
    double s_now = 0.0;
    for (std::size_t k = 0; k < samples; ++k)
    {
      const double target = s_k[k];
      const int n = std::max(1, static_cast<int>(std::ceil((target - s_now) / 0.02)));
      const double h = (target - s_now) / n;
      auto rhs = [&](double s, double p) { return path.at(s).curvature - std::sin(p) / geom.l2; };
      for (int i = 0; i < n && h > 0.0; ++i)
      {
        const double k1 = rhs(s_now, psi_s);
        const double k2 = rhs(s_now + 0.5 * h, psi_s + 0.5 * h * k1);
        const double k3 = rhs(s_now + 0.5 * h, psi_s + 0.5 * h * k2);
        const double k4 = rhs(s_now + h, psi_s + h * k3);
        psi_s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s_now += h;
      }
      s_now = target;
      psi[k] = psi_s;
    }
  }

  ReferenceTrajectory ref;
  ref.ts = ts;
  // Heading is unwrapped by accumulating wrapped increments.
  double theta = path.at(0.0).heading;
  double prev_heading = theta;
  for (std::size_t k = 0; k < samples; ++k)
  {
    const ReferencePath::Pose p = path.at(s_k[k]);
    theta += wrap_angle(p.heading - prev_heading);
    prev_heading = p.heading;
    StateVector st;
    st.x1 = p.x;
    st.y1 = p.y;
    st.v = v_k[k];
    st.theta = theta;
    st.psi = psi[k];
    st.delta1 = std::atan(geom.l1 * p.curvature);
    ref.states.push_back(st);
  }
  for (std::size_t k = 0; k + 1 < samples; ++k)
  {
    ref.states[k].a = std::clamp((ref.states[k + 1].v - ref.states[k].v) / ts, -limits.a_max, limits.a_max);
  }
  ref.inputs.assign(samples, InputVector{});
  for (std::size_t k = 0; k + 1 < samples; ++k)
  {
    const StateVector& a = ref.states[k];
    const StateVector& b = ref.states[k + 1];
    ref.inputs[k].jerk = std::clamp((b.a - a.a) / ts, -limits.jerk_max, limits.jerk_max);
    ref.inputs[k].omega1 = std::clamp((b.delta1 - a.delta1) / ts, -limits.omega1_max, limits.omega1_max);
  }
  return ref;
}

SsttrReferenceTrajectory to_ssttr(const ReferenceTrajectory& ref)
{
  SsttrReferenceTrajectory out;
  out.ts = ref.ts;
  for (std::size_t k = 0; k < ref.states.size(); ++k)
  {
    const StateVector& s = ref.states[k];
    out.states.push_back({s.x1, s.y1, s.v, s.theta, s.psi, s.delta1});
    out.inputs.push_back({s.a, ref.inputs[k].omega1});
  }
  return out;
}

StateVector offset_start_state(const ReferenceTrajectory& ref, double lateral_offset)
{
  StateVector s = ref.states.front();
  s.x1 += lateral_offset * std::sin(s.theta);
  s.y1 -= lateral_offset * std::cos(s.theta);
  s.v = 0.0;
  s.a = 0.0;
  s.psi = 0.0;
  s.delta1 = 0.0;
  s.delta2 = 0.0;
  return s;
}

void Scenario::validate() const
{
  geom.validate();
  limits.validate();
  gains.validate();
  if (robot == RobotKind::Msttr && filter == FilterKind::Ecbf)
  {
    throw std::invalid_argument("scenario: the ECBF filter applies to the single-steering robot only");
  }
  if (robot == RobotKind::Ssttr && filter == FilterKind::MultiCbf)
  {
    throw std::invalid_argument("scenario: the multi-CBF filter applies to the multi-steering robot only");
  }
  if (robot == RobotKind::Msttr)
  {
    mpc.validate();
  }
  else
  {
    ssttr_mpc.validate();
  }
  for (double k : ecbf_gains)
  {
    if (!(k > 0.0))
    {
      throw std::invalid_argument("scenario: ECBF gains must be strictly positive");
    }
  }
  if (!(dists.tractor > 0.0) || !(dists.trailer > 0.0))
  {
    throw std::invalid_argument("scenario: safety distances must be positive");
  }
  for (const Obstacle& o : obstacles)
  {
    if (!std::isfinite(o.x) || !std::isfinite(o.y) || !(o.radius >= 0.0))
    {
      throw std::invalid_argument("scenario: obstacle coordinates must be finite with radius >= 0");
    }
  }
  if (!(filter_margin >= 0.0))
  {
    throw std::invalid_argument("scenario: filter margin must be non-negative");
  }
  if (!(duration > 0.0))
  {
    throw std::invalid_argument("scenario: duration must be positive");
  }
  if (substeps < 1)
  {
    throw std::invalid_argument("scenario: substeps must be >= 1");
  }
  reference.validate(geom, limits);
  if (initial_state && !initial_state->finite())
  {
    throw std::invalid_argument("scenario: initial state must be finite");
  }
}

BodyClearance footprint_clearance(const StateVector& s, const RobotGeometry& geom, std::span<const Obstacle> obs)
{
  BodyClearance c;
  const Footprint fp = footprint(s, geom);
  for (const Obstacle& o : obs)
  {
    c.tractor = std::min(c.tractor, clearance(fp.tractor, o));
    c.trailer = std::min(c.trailer, clearance(fp.trailer, o));
  }
  return c;
}

namespace
{

LogEntry make_entry(double t, const StateVector& x, const InputVector& u_nom, const InputVector& u_safe, bool active,
                    double cost, const Scenario& sc)
{
  LogEntry e;
  e.t = t;
  e.state = x;
  e.u_nominal = u_nom;
  e.u_safe = u_safe;
  e.filter_active = active;
  e.mpc_cost = cost;
  const TrailerPose tp = trailer_pose(x, sc.geom);
  for (const Obstacle& o : sc.obstacles)
  {
    e.h_tractor.push_back(sq(x.x1 - o.x) + sq(x.y1 - o.y) - sq(sc.dists.tractor));
    e.h_trailer.push_back(sq(tp.x2 - o.x) + sq(tp.y2 - o.y) - sq(sc.dists.trailer));
  }
  const BodyClearance c = footprint_clearance(x, sc.geom, sc.obstacles);
  e.min_clearance = std::min(c.tractor, c.trailer);
  return e;
}

}  // namespace

RunResult run(const Scenario& sc)
{
  sc.validate();
  RunResult res;
  const double ts = sc.ts();
  res.reference = generate_reference(sc.reference, sc.geom, sc.limits, ts);
  res.log = TrajectoryLog(sc.robot, ts, sc.obstacles.size());
  const StateVector start =
      sc.initial_state ? *sc.initial_state : offset_start_state(res.reference, sc.initial_lateral_offset);
  const auto steps = static_cast<std::size_t>(std::llround(sc.duration / ts));

  try
  {
    if (sc.robot == RobotKind::Msttr)
    {
      MpcConfig mcfg = sc.mpc;
      mcfg.limits = sc.limits;
      MpcController mpc(mcfg, sc.geom);
      FilterConfig fcfg;
      fcfg.gains = sc.gains;
      fcfg.dists = sc.dists;
      fcfg.limits = sc.limits;
      fcfg.slack = sc.filter_slack;
      fcfg.input_boxes = sc.filter_input_boxes;
      fcfg.margin = sc.filter_margin;
      SafetyFilter filter(fcfg, sc.geom);
      StateVector x = start;
      for (std::size_t k = 0; k < steps; ++k)
      {
        const MpcResult m = mpc.step(x, res.reference.window(k, mcfg.horizon));
        FilterResult f{m.u, false, 0.0};
        if (sc.filter == FilterKind::MultiCbf)
        {
          f = filter.filter(m.u, x, sc.obstacles);
        }
        res.log.append(make_entry(static_cast<double>(k) * ts, x, m.u, f.u_safe, f.active, m.cost, sc));
        res.mpc_softened.push_back(m.softened);
        res.metrics.filter_slack_total += f.slack_used;
        res.metrics.mpc_slack_total += m.slack_total;
        x = integrate_step(x, f.u_safe, sc.geom, ts, sc.substeps);
      }
    }
    else
    {
      SsttrMpcConfig mcfg = sc.ssttr_mpc;
      mcfg.limits = sc.limits;
      SsttrMpcController mpc(mcfg, sc.geom);
      const SsttrReferenceTrajectory sref = to_ssttr(res.reference);
      EcbfConfig fcfg;
      fcfg.gains = sc.ecbf_gains;
      fcfg.d = sc.dists.tractor;
      fcfg.limits = sc.limits;
      fcfg.slack = sc.filter_slack;
      fcfg.input_boxes = sc.filter_input_boxes;
      EcbfFilter filter(fcfg, sc.geom);
      SsttrState x{start.x1, start.y1, start.v, start.theta, start.psi, start.delta1};
      for (std::size_t k = 0; k < steps; ++k)
      {
        const SsttrMpcResult m = mpc.step(x, sref.window(k, mcfg.horizon));
        EcbfResult f{m.u, false, 0.0};
        if (sc.filter == FilterKind::Ecbf)
        {
          f = filter.filter(m.u, x, sc.obstacles);
        }
        const InputVector u_nom{m.u.accel, m.u.omega1, 0.0};
        const InputVector u_safe{f.u_safe.accel, f.u_safe.omega1, 0.0};
        res.log.append(make_entry(static_cast<double>(k) * ts, x.embed(), u_nom, u_safe, f.active, m.cost, sc));
        res.mpc_softened.push_back(m.softened);
        res.metrics.filter_slack_total += f.slack_used;
        res.metrics.mpc_slack_total += m.slack_total;
        x = integrate_step(x, f.u_safe, sc.geom, ts, sc.substeps);
      }
    }
  }
  catch (const FilterInfeasible& e)
  {
    res.status = RunStatus::FilterInfeasible;
    res.error = e.what();
  }
  catch (const MpcSolverFailure& e)
  {
    res.status = RunStatus::SolverFailure;
    res.error = e.what();
  }
  catch (const SteeringSingularity& e)
  {
    res.status = RunStatus::SteeringSingularity;
    res.error = e.what();
  }

  const double filter_slack = res.metrics.filter_slack_total;
  const double mpc_slack = res.metrics.mpc_slack_total;
  res.metrics = compute_metrics(res.log, res.reference, sc);
  res.metrics.filter_slack_total = filter_slack;
  res.metrics.mpc_slack_total = mpc_slack;
  res.metrics.mpc_softened_steps =
      static_cast<int>(std::count(res.mpc_softened.begin(), res.mpc_softened.end(), true));
  return res;
}

RunMetrics compute_metrics(const TrajectoryLog& log, const ReferenceTrajectory& ref, const Scenario& sc)
{
  RunMetrics m;
  const std::size_t n_obs = log.n_obstacles();
  m.steps = static_cast<int>(log.size());
  m.min_h_tractor = kInf;
  m.min_h_trailer = kInf;
  m.min_footprint_clearance = kInf;
  m.min_clearance_tractor = kInf;
  m.min_clearance_trailer = kInf;
  for (std::size_t k = 0; k < n_obs; ++k)
  {
    m.min_h.push_back({Body::Tractor, k, kInf, 0.0});
  }
  for (std::size_t k = 0; k < n_obs; ++k)
  {
    m.min_h.push_back({Body::Trailer, k, kInf, 0.0});
  }
  double sum_sq = 0.0;
  double tail_sum_sq = 0.0;
  int tail_count = 0;
  const double t_end = log.empty() ? 0.0 : log.entries().back().t;
  for (std::size_t i = 0; i < log.size(); ++i)
  {
    const LogEntry& e = log.entries()[i];
    for (std::size_t k = 0; k < n_obs; ++k)
    {
      if (e.h_tractor[k] < m.min_h[k].min_h)
      {
        m.min_h[k].min_h = e.h_tractor[k];
        m.min_h[k].t_at_min = e.t;
      }
      if (e.h_trailer[k] < m.min_h[n_obs + k].min_h)
      {
        m.min_h[n_obs + k].min_h = e.h_trailer[k];
        m.min_h[n_obs + k].t_at_min = e.t;
      }
      m.min_h_tractor = std::min(m.min_h_tractor, e.h_tractor[k]);
      m.min_h_trailer = std::min(m.min_h_trailer, e.h_trailer[k]);
    }
    const BodyClearance c = footprint_clearance(e.state, sc.geom, sc.obstacles);
    m.min_clearance_tractor = std::min(m.min_clearance_tractor, c.tractor);
    m.min_clearance_trailer = std::min(m.min_clearance_trailer, c.trailer);
    m.filter_activation_count += e.filter_active ? 1 : 0;

    const StateVector& r = ref.states[std::min(i, ref.states.size() - 1)];
    const double err2 = sq(e.state.x1 - r.x1) + sq(e.state.y1 - r.y1);
    sum_sq += err2;
    if (e.t >= t_end - 10.0 - 1e-9)
    {
      tail_sum_sq += err2;
      ++tail_count;
    }
  }
  m.min_footprint_clearance = std::min(m.min_clearance_tractor, m.min_clearance_trailer);
  m.collision = m.min_footprint_clearance < 0.0;
  m.rms_tracking_error = log.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(log.size()));
  m.rms_tracking_error_final_10s = tail_count == 0 ? 0.0 : std::sqrt(tail_sum_sq / tail_count);
  return m;
}

AuditReport invariance_audit(const TrajectoryLog& log, const Scenario& sc)
{
  AuditReport rep;
  const std::size_t n_obs = sc.obstacles.size();
  const bool multi = log.robot() == RobotKind::Msttr;
  for (Body body : {Body::Tractor, Body::Trailer})
  {
    for (std::size_t k = 0; k < n_obs; ++k)
    {
      const std::size_t levels = multi ? (body == Body::Tractor ? 3 : 2) : (body == Body::Tractor ? 2 : 1);
      rep.barriers.push_back({body, k, std::vector<double>(levels, kInf), std::nullopt});
    }
  }
  // Smaller root λ of s^2 + k1 s + k0 gives the ECBF's first cascade level ḣ + λ h.
  const double k0 = sc.ecbf_gains[0];
  const double k1 = sc.ecbf_gains[1];
  const double disc = k1 * k1 - 4.0 * k0;
  const bool ecbf_real = disc >= 0.0;
  const double lambda = ecbf_real ? 0.5 * (k1 - std::sqrt(disc)) : 0.0;
  if (!multi && !ecbf_real)
  {
    for (BarrierAudit& b : rep.barriers)
    {
      b.min_m.resize(1);
    }
  }

  rep.regularity_checked = multi && n_obs > 0;
  for (const LogEntry& e : log.entries())
  {
    bool violated = false;
    for (BarrierAudit& b : rep.barriers)
    {
      const Obstacle& o = sc.obstacles[b.obstacle_index];
      std::vector<double> m;
      if (multi)
      {
        const double d = b.body == Body::Tractor ? sc.dists.tractor : sc.dists.trailer;
        m = cascade(e.state, {b.body, b.obstacle_index, d}, o, sc.gains, sc.geom).m;
      }
      else if (b.body == Body::Tractor)
      {
        const SsttrState s{e.state.x1, e.state.y1, e.state.v, e.state.theta, e.state.psi, e.state.delta1};
        const SsttrTractorDerivatives d = ssttr_tractor_derivatives(s, o, sc.geom, sc.dists.tractor);
        m = {d.h};
        if (ecbf_real)
        {
          m.push_back(d.h_dot + lambda * d.h);
        }
      }
      else
      {
        m = {barrier_value(e.state, {Body::Trailer, b.obstacle_index, sc.dists.trailer}, o, sc.geom)};
      }
      for (std::size_t j = 0; j < m.size(); ++j)
      {
        b.min_m[j] = std::min(b.min_m[j], m[j]);
        if (m[j] < -rep.tolerance)
        {
          violated = true;
          if (!b.first_violation_t)
          {
            b.first_violation_t = e.t;
          }
        }
      }
      rep.min_h = std::min(rep.min_h, m[0]);
      for (double v : m)
      {
        rep.min_cascade = std::min(rep.min_cascade, v);
      }
    }
    if (violated)
    {
      ++rep.violation_count;
      if (!rep.first_violation_t)
      {
        rep.first_violation_t = e.t;
      }
    }
    if (rep.regularity_checked)
    {
      const RegularityResult r = regularity_probe(e.state, sc.obstacles, sc.gains, sc.dists, sc.geom);
      const double p = r.status == QpStatus::Unbounded ? kInf : r.p_star;
      rep.min_p_star = std::min(rep.min_p_star, std::isnan(p) ? -kInf : p);
      if (!(p > 0.0))
      {
        ++rep.nonpositive_p_star;
      }
    }
  }
  return rep;
}

}  // namespace mcbf
