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

#include "mcbf/cli/scenario_io.hpp"
#include "mcbf/core.hpp"

#include <optional>
#include <string>

namespace mcbf::cli
{

enum class PlotKind
{
  Path,
  Inputs,
  Barriers,
  Footprint
};

/// Parses "path", "inputs", "barriers" or "footprint".
std::optional<PlotKind> parse_plot_kind(const std::string& text);

/// Renders a standalone SVG document. Without a context the default geometry,
/// distances and limits are used and no obstacles or reference are drawn.
std::string render_plot(const TrajectoryLog& log, PlotKind kind, const std::optional<PlotContext>& context);

}  // namespace mcbf::cli
