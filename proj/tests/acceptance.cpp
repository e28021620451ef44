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

// Acceptance suite: runs each acceptance criterion once and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include "mcbf/cli/commands.hpp"
#include "mcbf/cli/io.hpp"
#include "mcbf/cli/scenario_io.hpp"
#include "mcbf/cli/verify.hpp"
#include "mcbf/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace
{

const std::string kScenarioDir = MCBF_SCENARIO_DIR;
const std::vector<std::string> kShipped{"turn90_msttr", "turn90_ssttr_ecbf", "cluttered_msttr"};

struct Outcome
{
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

mcbf::Scenario scenario(const std::string& name)
{
  return mcbf::cli::load_scenario(kScenarioDir + "/" + name + ".toml");
}

bool within_boxes(const mcbf::InputVector& u, const mcbf::Limits& l, mcbf::RobotKind robot)
{
  const double first = robot == mcbf::RobotKind::Msttr ? l.jerk_max : l.a_max;
  return std::abs(u.jerk) <= first && std::abs(u.omega1) <= l.omega1_max && std::abs(u.omega2) <= l.omega2_max;
}

Outcome criterion_linearization()
{
  const auto r = mcbf::cli::check_linearization({});
  const bool fast = r.seconds < 5.0;
  return {r.passed && fast && r.samples == 100,
          "100 states, max abs error " + fmt("%.3e", r.max_error) + " (< 1e-5), " + fmt("%.2f", r.seconds) + " s (< 5 s)"};
}

Outcome criterion_barrier_derivatives()
{
  const auto r = mcbf::cli::check_barrier_derivatives({});
  const bool fast = r.seconds < 10.0;
  return {r.passed && fast && r.samples == 20,
          "20 flows, max rel error " + fmt("%.3e", r.max_error) + " (< 1e-3), " + fmt("%.2f", r.seconds) + " s (< 10 s)"};
}

Outcome criterion_qp()
{
  const auto r = mcbf::cli::check_qp({});
  const bool fast = r.seconds < 30.0;
  return {r.passed && fast && r.samples == 500,
          "500 problems, max arg error " + fmt("%.3e", r.max_error) + " (< 1e-5), " + r.detail + ", " +
              fmt("%.2f", r.seconds) + " s (< 30 s)"};
}

Outcome criterion_invariance()
{
  const auto t0 = std::chrono::steady_clock::now();
  const mcbf::Scenario sc = scenario("turn90_msttr");
  const auto r = mcbf::run(sc);
  const auto audit = mcbf::invariance_audit(r.log, sc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = r.status == mcbf::RunStatus::Completed && audit.min_h >= -1e-6 && audit.min_cascade >= -1e-6 &&
                  audit.passed() && !r.metrics.collision && secs < 60.0;
  return {ok, "status " + std::string(mcbf::to_string(r.status)) + ", min h " + fmt("%.4g", audit.min_h) +
                  ", min cascade " + fmt("%.4g", audit.min_cascade) + ", collision " +
                  (r.metrics.collision ? "true" : "false") + ", " + fmt("%.2f", secs) + " s (< 60 s)"};
}

Outcome criterion_phenomenon()
{
  const auto multi = mcbf::run(scenario("turn90_msttr"));
  const auto single = mcbf::run(scenario("turn90_ssttr_ecbf"));
  const double single_trailer = single.metrics.min_clearance_trailer;
  const double multi_clearance = multi.metrics.min_footprint_clearance;
  const bool ok = single_trailer < 0.0 && multi_clearance > 0.0 &&
                  multi.metrics.min_h_trailer > single.metrics.min_h_trailer &&
                  multi.status == mcbf::RunStatus::Completed && single.status == mcbf::RunStatus::Completed;
  return {ok, "single-steering trailer clearance " + fmt("%.3f", single_trailer) +
                  " m (< 0), multi-steering clearance " + fmt("%.3f", multi_clearance) +
                  " m (> 0), trailer min h " + fmt("%.3f", multi.metrics.min_h_trailer) + " > " +
                  fmt("%.3f", single.metrics.min_h_trailer)};
}

Outcome criterion_cluttered()
{
  const auto t0 = std::chrono::steady_clock::now();
  const mcbf::Scenario sc = scenario("cluttered_msttr");
  const auto r = mcbf::run(sc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double last_obstacle_x = -1e300;
  for (const auto& o : sc.obstacles)
  {
    last_obstacle_x = std::max(last_obstacle_x, o.x + o.radius);
  }
  // Rear-most axle x at the start of the final 10 s window.
  const double t_window = sc.duration - 10.0;
  double x_at_window = -1e300;
  for (const auto& e : r.log.entries())
  {
    if (e.t >= t_window - 1e-9)
    {
      const auto tp = mcbf::trailer_pose(e.state, sc.geom);
      x_at_window = std::min(e.state.x1, tp.x2);
      break;
    }
  }
  const bool ok = sc.obstacles.size() == 8 && r.status == mcbf::RunStatus::Completed && !r.metrics.collision &&
                  x_at_window > last_obstacle_x && r.metrics.rms_tracking_error_final_10s < 0.2 && secs < 90.0;
  return {ok, "8 obstacles, collision " + std::string(r.metrics.collision ? "true" : "false") +
                  ", final 10 s rms " + fmt("%.3e", r.metrics.rms_tracking_error_final_10s) + " m (< 0.2), " +
                  fmt("%.2f", secs) + " s (< 90 s)"};
}

Outcome criterion_input_boxes()
{
  int nominal_bad = 0;
  int safe_bad = 0;
  int checked = 0;
  for (const std::string& name : kShipped)
  {
    mcbf::Scenario sc = scenario(name);
    for (const auto& e : mcbf::run(sc).log.entries())
    {
      nominal_bad += within_boxes(e.u_nominal, sc.limits, sc.robot) ? 0 : 1;
      ++checked;
    }
    sc.filter_input_boxes = true;
    const auto boxed = mcbf::run(sc);
    for (const auto& e : boxed.log.entries())
    {
      nominal_bad += within_boxes(e.u_nominal, sc.limits, sc.robot) ? 0 : 1;
      safe_bad += within_boxes(e.u_safe, sc.limits, sc.robot) ? 0 : 1;
      ++checked;
    }
  }
  return {nominal_bad == 0 && safe_bad == 0 && checked > 0,
          std::to_string(checked) + " logged steps, nominal outside boxes " + std::to_string(nominal_bad) +
              ", filtered outside boxes with input boxes on " + std::to_string(safe_bad)};
}

Outcome criterion_identity_filter()
{
  mcbf::Scenario with = scenario("turn90_msttr");
  with.obstacles.clear();
  mcbf::Scenario without = with;
  without.filter = mcbf::FilterKind::None;
  const auto a = mcbf::run(with);
  const auto b = mcbf::run(without);
  double worst = 0.0;
  bool identical = a.log.size() == b.log.size() && !a.log.empty();
  for (std::size_t i = 0; i < a.log.size(); ++i)
  {
    const auto& e = a.log.entries()[i];
    worst = std::max(worst, (e.u_safe.to_vector() - e.u_nominal.to_vector()).cwiseAbs().maxCoeff());
    if (identical && i < b.log.size())
    {
      identical = e.state == b.log.entries()[i].state && e.u_safe == b.log.entries()[i].u_safe;
    }
  }
  return {worst <= 1e-9 && identical && a.metrics.filter_activation_count == 0,
          "max |u_safe - u_nom| " + fmt("%.3e", worst) + " (<= 1e-9), trajectory " +
              (identical ? "bitwise identical" : "DIFFERS") + " to filter=none"};
}

Outcome criterion_regularity()
{
  const mcbf::Scenario sc = scenario("turn90_msttr");
  const auto r = mcbf::run(sc);
  const auto audit = mcbf::invariance_audit(r.log, sc);
  const bool ok = r.status == mcbf::RunStatus::Completed && audit.regularity_checked &&
                  audit.nonpositive_p_star == 0 && audit.min_p_star > 0.0;
  return {ok, std::to_string(r.log.size()) + " states, min p* " + fmt("%.4g", audit.min_p_star) +
                  ", nonpositive " + std::to_string(audit.nonpositive_p_star)};
}

Outcome criterion_determinism()
{
  bool ok = true;
  std::string detail;
  for (const std::string& name : kShipped)
  {
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep)
    {
      const fs::path dir = fs::temp_directory_path() / ("mcbf_acceptance_" + name + "_" + std::to_string(rep));
      fs::remove_all(dir);
      mcbf::cli::RunOptions opt;
      opt.scenario_path = kScenarioDir + "/" + name + ".toml";
      opt.out_dir = dir.string();
      std::ostringstream out;
      std::ostringstream err;
      if (mcbf::cli::cmd_run(opt, out, err) != 0)
      {
        ok = false;
      }
      csv[rep] = mcbf::cli::read_file((dir / "trajectory.csv").string());
    }
    const bool same = !csv[0].empty() && csv[0] == csv[1];
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + name + (same ? " identical" : " DIFFERS");
  }
  return {ok, detail};
}

}  // namespace

int main()
{
  struct Criterion
  {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "linearization matches finite-difference Jacobians", criterion_linearization},
      {2, "barrier derivatives match finite differences in time", criterion_barrier_derivatives},
      {3, "QP solver matches brute-force enumeration", criterion_qp},
      {4, "forward invariance on turn90 multi-steering run", criterion_invariance},
      {5, "single-steering trailer collides where multi-steering does not", criterion_phenomenon},
      {6, "cluttered scenario is collision-free and converges", criterion_cluttered},
      {7, "inputs respect the box limits", criterion_input_boxes},
      {8, "filter is the identity without obstacles", criterion_identity_filter},
      {9, "regularity margin positive along turn90", criterion_regularity},
      {10, "repeated runs produce byte-identical CSV", criterion_determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria)
  {
    Outcome o;
    try
    {
      o = c.run();
    }
    catch (const std::exception& e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.passed ? 0 : 1;
    std::printf("%s criterion %d: %s (%s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
