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

#include "mcbf/cli/verify.hpp"

#include "mcbf/dynamics.hpp"
#include "mcbf/linmodel.hpp"
#include "mcbf/qpsolver.hpp"
#include "mcbf/safety.hpp"
#include "mcbf/testing/fd_oracle.hpp"
#include "mcbf/testing/qp_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace mcbf::cli
{

namespace
{

constexpr double kTs = 0.2;

class Stopwatch
{
public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double uniform(std::mt19937_64& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

StateVector admissible_state(std::mt19937_64& rng, const Limits& lim)
{
  return {uniform(rng, -30.0, 30.0),
          uniform(rng, -30.0, 30.0),
          uniform(rng, -lim.v_max, lim.v_max),
          uniform(rng, -lim.a_max, lim.a_max),
          uniform(rng, -std::numbers::pi, std::numbers::pi),
          uniform(rng, -lim.psi_max, lim.psi_max),
          uniform(rng, -lim.delta1_max, lim.delta1_max),
          uniform(rng, -lim.delta2_max, lim.delta2_max)};
}

InputVector admissible_input(std::mt19937_64& rng, const Limits& lim)
{
  return {uniform(rng, -lim.jerk_max, lim.jerk_max), uniform(rng, -lim.omega1_max, lim.omega1_max),
          uniform(rng, -lim.omega2_max, lim.omega2_max)};
}

/// Central-difference Jacobian of a vector function, step scaled per coordinate.
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0)
{
  const Eigen::VectorXd f0 = f(x0);
  Eigen::MatrixXd J(f0.size(), x0.size());
  for (Eigen::Index j = 0; j < x0.size(); ++j)
  {
    const double h = 1e-6 * std::max(1.0, std::abs(x0(j)));
    Eigen::VectorXd xp = x0;
    Eigen::VectorXd xm = x0;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

struct DiscreteModel
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd C;
};

/// I + Jx Ts, Ju Ts and (F - Jx x - Ju u) Ts from finite differences of F.
DiscreteModel fd_model(const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& F,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& u)
{
  const Eigen::MatrixXd Jx = fd_jacobian([&](const Eigen::VectorXd& xx) { return F(xx, u); }, x);
  const Eigen::MatrixXd Ju = fd_jacobian([&](const Eigen::VectorXd& uu) { return F(x, uu); }, u);
  DiscreteModel m;
  m.A = Eigen::MatrixXd::Identity(x.size(), x.size()) + kTs * Jx;
  m.B = kTs * Ju;
  m.C = kTs * (F(x, u) - Jx * x - Ju * u);
  return m;
}

double model_error(const DiscreteModel& fd, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                   const Eigen::VectorXd& C)
{
  return std::max({(A - fd.A).cwiseAbs().maxCoeff(), (B - fd.B).cwiseAbs().maxCoeff(),
                   (C - fd.C).cwiseAbs().maxCoeff()});
}

std::string format_sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

CheckResult check_linearization(const VerifyOptions& opt)
{
  const Stopwatch clock;
  CheckResult r{"linearization A/B/C vs finite differences", false, opt.jacobian_states, 0.0, 1e-5, 0.0, {}};
  std::mt19937_64 rng(opt.seed);
  const RobotGeometry geom;
  const Limits lim;
  auto F = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return msttr_rhs(StateVector::from_vector(x), InputVector::from_vector(u), geom);
  };
  for (int i = 0; i < opt.jacobian_states; ++i)
  {
    const StateVector s = admissible_state(rng, lim);
    const InputVector u = admissible_input(rng, lim);
    const LinearizedModel m = linearize(s, u, geom, kTs);
    const DiscreteModel fd = fd_model(F, s.to_vector(), u.to_vector());
    r.max_error = std::max(r.max_error, model_error(fd, m.A, m.B, m.C));
  }
  r.passed = r.max_error < r.tolerance;
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_ssttr_linearization(const VerifyOptions& opt)
{
  const Stopwatch clock;
  CheckResult r{"single-steering linearization vs finite differences", false, opt.jacobian_states, 0.0, 1e-5, 0.0, {}};
  std::mt19937_64 rng(opt.seed + 1);
  const RobotGeometry geom;
  const Limits lim;
  auto F = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const SsttrState st = SsttrState::from_vector(x);
    return ssttr_f(st, geom) + ssttr_g(st) * u;
  };
  for (int i = 0; i < opt.jacobian_states; ++i)
  {
    const StateVector full = admissible_state(rng, lim);
    const SsttrState s{full.x1, full.y1, full.v, full.theta, full.psi, full.delta1};
    const SsttrInput u{uniform(rng, -lim.a_max, lim.a_max), uniform(rng, -lim.omega1_max, lim.omega1_max)};
    const SsttrLinearizedModel m = linearize(s, u, geom, kTs);
    const DiscreteModel fd = fd_model(F, s.to_vector(), u.to_vector());
    r.max_error = std::max(r.max_error, model_error(fd, m.A, m.B, m.C));
  }
  r.passed = r.max_error < r.tolerance;
  r.seconds = clock.seconds();
  return r;
}

std::vector<CheckResult> check_table_entries(const VerifyOptions& opt)
{
  struct Entry
  {
    const char* name;
    int row;
    int col;
    std::function<double(const StateVector&, const RobotGeometry&)> value;
  };
  auto sec2 = [](double d) { return 1.0 + std::tan(d) * std::tan(d); };
  const std::vector<Entry> table{
      {"a_57", 4, 6,
       [&](const StateVector& s, const RobotGeometry& g) { return s.v / g.l1 * sec2(s.delta1) * kTs + opt.a57_offset; }},
      {"a_63", 5, 2,
       [](const StateVector& s, const RobotGeometry& g) {
         return (std::tan(s.delta1) / g.l1 - (std::tan(s.delta2) * std::cos(s.psi) + std::sin(s.psi)) / g.l2) * kTs;
       }},
      {"a_66", 5, 5,
       [](const StateVector& s, const RobotGeometry& g) {
         return 1.0 - s.v / g.l2 * (-std::tan(s.delta2) * std::sin(s.psi) + std::cos(s.psi)) * kTs;
       }},
      {"a_67", 5, 6, [&](const StateVector& s, const RobotGeometry& g) { return s.v / g.l1 * sec2(s.delta1) * kTs; }},
      {"a_68", 5, 7,
       [&](const StateVector& s, const RobotGeometry& g) {
         return -s.v / g.l2 * sec2(s.delta2) * std::cos(s.psi) * kTs;
       }},
  };

  std::vector<CheckResult> out;
  const RobotGeometry geom;
  const Limits lim;
  for (const Entry& e : table)
  {
    const Stopwatch clock;
    CheckResult r{std::string("closed-form entry ") + e.name, false, opt.jacobian_states, 0.0, 1e-12, 0.0, {}};
    std::mt19937_64 rng(opt.seed + 2);
    for (int i = 0; i < opt.jacobian_states; ++i)
    {
      const StateVector s = admissible_state(rng, lim);
      const LinearizedModel m = linearize(s, admissible_input(rng, lim), geom, kTs);
      r.max_error = std::max(r.max_error, std::abs(m.A(e.row, e.col) - e.value(s, geom)));
    }
    r.passed = r.max_error < r.tolerance;
    r.seconds = clock.seconds();
    out.push_back(r);
  }
  return out;
}

CheckResult check_barrier_derivatives(const VerifyOptions& opt)
{
  const Stopwatch clock;
  CheckResult r{"barrier derivatives vs finite differences in time", false, opt.barrier_flows, 0.0, 1e-3, 0.0, {}};
  std::mt19937_64 rng(opt.seed + 3);
  const RobotGeometry geom;
  const Limits lim;
  const SafetyDistances dists;
  using testing::rel_err;
  for (int i = 0; i < opt.barrier_flows; ++i)
  {
    StateVector s = admissible_state(rng, lim);
    s.x1 = uniform(rng, -10.0, 10.0);
    s.y1 = uniform(rng, -10.0, 10.0);
    s.v = uniform(rng, 0.5, 8.0);
    const InputVector u = admissible_input(rng, lim);
    const Obstacle obs{s.x1 + uniform(rng, -12.0, 12.0), s.y1 + uniform(rng, -12.0, 12.0), 1.0};

    const PositionBarrier b1{Body::Tractor, 0, dists.tractor};
    auto h1 = [&](const StateVector& x) { return barrier_value(x, b1, obs, geom); };
    const TractorDerivatives d1 = tractor_derivatives(s, obs, geom, dists.tractor);
    const double third = d1.drift + d1.grad_u.dot(u.to_vector());
    r.max_error = std::max({r.max_error, rel_err(d1.h_dot, testing::msttr_flow_derivative(h1, s, u, geom, 1, 1e-3)),
                            rel_err(d1.h_ddot, testing::msttr_flow_derivative(h1, s, u, geom, 2, 1e-3)),
                            rel_err(third, testing::msttr_flow_derivative(h1, s, u, geom, 3, 1e-2))});

    const PositionBarrier b2{Body::Trailer, 0, dists.trailer};
    auto h2 = [&](const StateVector& x) { return barrier_value(x, b2, obs, geom); };
    const TrailerDerivatives d2 = trailer_derivatives(s, obs, geom, dists.trailer);
    const double second = d2.drift + d2.grad_u.dot(u.to_vector());
    r.max_error = std::max({r.max_error, rel_err(d2.h_dot, testing::msttr_flow_derivative(h2, s, u, geom, 1, 1e-3)),
                            rel_err(second, testing::msttr_flow_derivative(h2, s, u, geom, 2, 1e-3))});

    const SsttrState ss{s.x1, s.y1, s.v, s.theta, s.psi, s.delta1};
    const SsttrInput su{u.jerk / lim.jerk_max * lim.a_max, u.omega1};
    auto hs = [&](const SsttrState& x) {
      const double dx = x.x1 - obs.x;
      const double dy = x.y1 - obs.y;
      return dx * dx + dy * dy - dists.tractor * dists.tractor;
    };
    const SsttrTractorDerivatives ds = ssttr_tractor_derivatives(ss, obs, geom, dists.tractor);
    const double ssecond = ds.drift + ds.grad_u.dot(su.to_vector());
    r.max_error = std::max({r.max_error, rel_err(ds.h_dot, testing::ssttr_flow_derivative(hs, ss, su, geom, 1, 1e-3)),
                            rel_err(ssecond, testing::ssttr_flow_derivative(hs, ss, su, geom, 2, 1e-3))});
  }
  r.passed = r.max_error < r.tolerance;
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_qp(const VerifyOptions& opt)
{
  const Stopwatch clock;
  CheckResult r{"QP solver vs brute-force active-set enumeration", false, opt.qp_problems, 0.0, 1e-5, 0.0, {}};
  std::mt19937_64 rng(opt.seed + 4);
  std::uniform_int_distribution<int> nd(1, 10);
  std::uniform_int_distribution<int> md(0, 20);
  double value_err = 0.0;
  double kkt = 0.0;
  int failures = 0;
  for (int i = 0; i < opt.qp_problems; ++i)
  {
    const int n = nd(rng);
    const int m = md(rng);
    const QpProblem p = testing::random_strictly_convex_qp(rng, n, m);
    const auto oracle = testing::brute_force_qp(p);
    const QpSolution s = solve(p);
    if (!oracle || s.status != QpStatus::Optimal)
    {
      ++failures;
      continue;
    }
    r.max_error = std::max(r.max_error, (s.z - oracle->z).cwiseAbs().maxCoeff());
    value_err = std::max(value_err, std::abs(s.objective - oracle->value) / std::max(1.0, std::abs(oracle->value)));
    kkt = std::max(kkt, s.kkt.max());
  }
  r.passed = failures == 0 && r.max_error < 1e-5 && value_err < 1e-6 && kkt < 1e-8;
  r.detail = "value " + format_sci(value_err) + " (tol 1e-6), kkt " + format_sci(kkt) + " (tol 1e-8), failures " +
             std::to_string(failures);
  r.seconds = clock.seconds();
  return r;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opt)
{
  std::vector<CheckResult> out;
  out.push_back(check_linearization(opt));
  out.push_back(check_ssttr_linearization(opt));
  for (CheckResult& r : check_table_entries(opt))
  {
    out.push_back(std::move(r));
  }
  out.push_back(check_barrier_derivatives(opt));
  out.push_back(check_qp(opt));
  return out;
}

std::string format_table(const std::vector<CheckResult>& results)
{
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-54s %-6s %8s %12s %10s %8s\n", "check", "result", "samples", "max error",
                "tolerance", "time[s]");
  os << line;
  for (const CheckResult& r : results)
  {
    std::snprintf(line, sizeof(line), "%-54s %-6s %8d %12.3e %10.1e %8.2f", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                  r.samples, r.max_error, r.tolerance, r.seconds);
    os << line;
    if (!r.detail.empty())
    {
      os << "  " << r.detail;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace mcbf::cli
