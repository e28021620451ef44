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

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv)
{
  CLI::App app{"Multi-steering tractor-trailer simulation with multi-CBF safety filtering"};
  app.require_subcommand(1);

  mcbf::cli::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write trajectory, metrics and audit files");
  run->add_option("scenario", run_opt.scenario_path, "Scenario TOML file")->required();
  run->add_option("--out", run_opt.out_dir, "Output directory")->capture_default_str();
  run->add_flag("--hard-state-boxes", run_opt.hard_state_boxes, "Enforce MPC state boxes as hard constraints");
  run->add_flag("--filter-slack", run_opt.filter_slack, "Allow a penalized slack in the safety filter");
  run->add_flag("--filter-input-boxes", run_opt.filter_input_boxes, "Add input boxes to the safety filter");
  run->add_flag("--linearize-at-state", run_opt.linearize_at_state,
                "Linearize the first prediction stage at the measured state");

  mcbf::cli::PlotOptions plot_opt;
  CLI::App* plot = app.add_subcommand("plot", "Render a trajectory CSV as SVG");
  plot->add_option("csv", plot_opt.csv_path, "trajectory.csv written by run")->required();
  plot->add_option("--kind", plot_opt.kind, "path, inputs, barriers or footprint")->required();
  plot->add_option("--out", plot_opt.out_path, "Output SVG file")->required();
  plot->add_option("--scenario", plot_opt.scenario_json,
                   "scenario.json for obstacles and geometry (default: next to the CSV)");

  mcbf::cli::VerifyOptions verify_opt;
  std::string fault;
  CLI::App* verify = app.add_subcommand("verify", "Run the oracle suite and print a pass/fail table");
  verify->add_option("--inject-fault", fault, "Perturb a closed-form coefficient (a57) to exercise failure reporting")
      ->check(CLI::IsMember({"a57"}));

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
  {
    return mcbf::cli::cmd_run(run_opt, std::cout, std::cerr);
  }
  if (plot->parsed())
  {
    return mcbf::cli::cmd_plot(plot_opt, std::cout, std::cerr);
  }
  if (fault == "a57")
  {
    verify_opt.a57_offset = 1e-3;
  }
  return mcbf::cli::cmd_verify(verify_opt, std::cout);
}
