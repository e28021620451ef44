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

#include "mcbf/cli/commands.hpp"

#include "mcbf/cli/io.hpp"
#include "mcbf/cli/plot.hpp"
#include "mcbf/cli/scenario_io.hpp"
#include "mcbf/simulator.hpp"

#include <filesystem>
#include <ostream>

namespace mcbf::cli
{

namespace
{

int exit_code(RunStatus status)
{
  switch (status)
  {
  case RunStatus::Completed: return kExitOk;
  case RunStatus::FilterInfeasible: return kExitFilterInfeasible;
  case RunStatus::SolverFailure:
  case RunStatus::SteeringSingularity: return kExitSolverFailure;
  }
  return kExitError;
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err)
{
  namespace fs = std::filesystem;
  Scenario sc;
  try
  {
    sc = load_scenario(opt.scenario_path);
    sc.mpc.hard_state_boxes = sc.mpc.hard_state_boxes || opt.hard_state_boxes;
    sc.ssttr_mpc.hard_state_boxes = sc.ssttr_mpc.hard_state_boxes || opt.hard_state_boxes;
    sc.mpc.linearize_at_state = sc.mpc.linearize_at_state || opt.linearize_at_state;
    sc.ssttr_mpc.linearize_at_state = sc.ssttr_mpc.linearize_at_state || opt.linearize_at_state;
    sc.filter_slack = sc.filter_slack || opt.filter_slack;
    sc.filter_input_boxes = sc.filter_input_boxes || opt.filter_input_boxes;
    sc.validate();
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  RunResult result;
  AuditReport audit;
  try
  {
    fs::create_directories(opt.out_dir);
    result = run(sc);
    audit = invariance_audit(result.log, sc);
    const fs::path dir(opt.out_dir);
    atomic_write((dir / "trajectory.csv").string(), log_to_csv(result.log));
    atomic_write((dir / "metrics.json").string(), metrics_to_json(result, sc).dump(2) + "\n");
    atomic_write((dir / "audit.json").string(), audit_to_json(audit).dump(2) + "\n");
    atomic_write((dir / "scenario.json").string(), scenario_to_json(sc, result.reference).dump(2) + "\n");
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const RunMetrics& m = result.metrics;
  out << "scenario " << sc.name << ": " << to_string(result.status) << " after " << m.steps << " steps\n";
  out << "  collision " << (m.collision ? "yes" : "no") << ", min footprint clearance "
      << format_double(m.min_footprint_clearance) << " m\n";
  out << "  min h tractor " << format_double(m.min_h_tractor) << ", trailer " << format_double(m.min_h_trailer)
      << "\n";
  out << "  rms tracking error " << format_double(m.rms_tracking_error) << " m, final 10 s "
      << format_double(m.rms_tracking_error_final_10s) << " m\n";
  out << "  invariance audit " << (audit.passed() ? "passed" : "FAILED") << " (" << audit.violation_count
      << " violating states)\n";
  if (!result.error.empty())
  {
    err << "run stopped: " << result.error << "\n";
  }
  out << "  outputs in " << opt.out_dir << "\n";
  return exit_code(result.status);
}

int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err)
{
  namespace fs = std::filesystem;
  const std::optional<PlotKind> kind = parse_plot_kind(opt.kind);
  if (!kind)
  {
    err << "error: unknown plot kind '" << opt.kind << "' (expected path, inputs, barriers or footprint)\n";
    return kExitError;
  }
  try
  {
    const TrajectoryLog log = log_from_csv(read_file(opt.csv_path), opt.csv_path);
    std::optional<PlotContext> ctx;
    std::string ctx_path = opt.scenario_json;
    if (ctx_path.empty())
    {
      const fs::path sibling = fs::path(opt.csv_path).parent_path() / "scenario.json";
      if (fs::exists(sibling))
      {
        ctx_path = sibling.string();
      }
    }
    if (!ctx_path.empty())
    {
      ctx = plot_context_from_json(nlohmann::json::parse(read_file(ctx_path)));
    }
    atomic_write(opt.out_path, render_plot(log, *kind, ctx));
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  out << "wrote " << opt.out_path << "\n";
  return kExitOk;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out)
{
  const std::vector<CheckResult> results = run_verify(opt);
  out << format_table(results);
  int failed = 0;
  for (const CheckResult& r : results)
  {
    failed += r.passed ? 0 : 1;
  }
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace mcbf::cli
