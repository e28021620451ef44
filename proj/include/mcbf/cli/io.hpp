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

#include "mcbf/simulator.hpp"

#include <json.hpp>

#include <string>

namespace mcbf::cli
{

/// Shortest decimal text that parses back to exactly `v` ("inf", "-inf",
/// "nan" for non-finite values).
std::string format_double(double v);

/// Writes via a temporary sibling file and rename, so readers never see a
/// partially written file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// CSV with header t, x1..delta2, unom_*, usafe_*, h1_k..., h2_k...,
/// filter_active, min_clearance, mpc_cost. Single-steering logs name their
/// first input column unom_accel / usafe_accel instead of unom_jerk.
std::string log_to_csv(const TrajectoryLog& log);

/// Parses log_to_csv output. The robot kind comes from the header, the
/// sampling time from the first two timestamps (0.2 s for shorter logs).
/// Errors carry source:line:column positions.
TrajectoryLog log_from_csv(const std::string& text, const std::string& source = "<csv>");

nlohmann::json metrics_to_json(const RunResult& result, const Scenario& sc);
nlohmann::json audit_to_json(const AuditReport& audit);

}  // namespace mcbf::cli
