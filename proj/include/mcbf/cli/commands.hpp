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

#include "mcbf/cli/verify.hpp"

#include <iosfwd>
#include <string>

namespace mcbf::cli
{

/// Process exit codes of the command line front end.
enum ExitCode : int
{
  kExitOk = 0,
  kExitError = 1,
  kExitFilterInfeasible = 2,
  kExitSolverFailure = 3,
  kExitVerifyFailed = 4
};

struct RunOptions
{
  std::string scenario_path;
  std::string out_dir = ".";
  bool hard_state_boxes = false;
  bool filter_slack = false;
  bool filter_input_boxes = false;
  bool linearize_at_state = false;
};

/// Runs a scenario and writes trajectory.csv, metrics.json, audit.json and
/// scenario.json into the output directory. Outputs are written for failed
/// runs too, holding every step completed before the failure.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct PlotOptions
{
  std::string csv_path;
  std::string kind;
  std::string out_path;
  /// Defaults to scenario.json next to the CSV when that file exists.
  std::string scenario_json;
};

int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err);

int cmd_verify(const VerifyOptions& opt, std::ostream& out);

}  // namespace mcbf::cli
