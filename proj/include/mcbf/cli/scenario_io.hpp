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

#include "mcbf/cli/toml.hpp"
#include "mcbf/simulator.hpp"

#include <json.hpp>

#include <string>

namespace mcbf::cli
{

/// Builds a Scenario from a parsed document. Unknown keys, wrong types and
/// wrong vector lengths raise TomlError at the offending position; missing
/// keys keep the Scenario defaults. The result is validated.
Scenario scenario_from_toml(const TomlValue& doc, const std::string& source);

Scenario load_scenario(const std::string& path);

/// Fully resolved scenario (every field, plus the sampled reference path) as
/// written next to a run's CSV for the plot command.
nlohmann::json scenario_to_json(const Scenario& sc, const ReferenceTrajectory& ref);

/// Inverse of scenario_to_json for the fields the plots need: geometry,
/// distances, obstacles and the reference path.
struct PlotContext
{
  RobotGeometry geom;
  SafetyDistances dists;
  Limits limits;
  std::vector<Obstacle> obstacles;
  std::vector<Point2> reference_path;
  std::string name;
};

PlotContext plot_context_from_json(const nlohmann::json& j);

}  // namespace mcbf::cli
