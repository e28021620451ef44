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

#include <cstdint>
#include <string>
#include <vector>

namespace mcbf::cli
{

struct CheckResult
{
  std::string name;
  bool passed = false;
  int samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions
{
  std::uint64_t seed = 20260101;
  int jacobian_states = 100;
  int barrier_flows = 20;
  int qp_problems = 500;
  /// Adds this offset to the closed-form a_57 coefficient before comparing.
  double a57_offset = 0.0;
};

/// Linearized A, B, C against central-difference Jacobians of the vector
/// field at random admissible states (Ts = 0.2), max abs error.
CheckResult check_linearization(const VerifyOptions& opt);

/// Same comparison for the single-steering model.
CheckResult check_ssttr_linearization(const VerifyOptions& opt);

/// Closed-form entries a_57, a_63, a_66, a_67, a_68 of A against the
/// linearization. One result per entry.
std::vector<CheckResult> check_table_entries(const VerifyOptions& opt);

/// Closed-form barrier derivatives against finite differences in time along
/// random constant-input flows, relative error.
CheckResult check_barrier_derivatives(const VerifyOptions& opt);

/// QP solver against brute-force active-set enumeration on random strictly
/// convex problems (n <= 10, m <= 20).
CheckResult check_qp(const VerifyOptions& opt);

std::vector<CheckResult> run_verify(const VerifyOptions& opt);

/// Fixed-width pass/fail table, one row per check.
std::string format_table(const std::vector<CheckResult>& results);

}  // namespace mcbf::cli
