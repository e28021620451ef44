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

// Reference oracles for the QP engine: brute-force active-set enumeration and
// a random strictly convex problem generator.

#include "mcbf/qpsolver.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace mcbf::testing
{

struct BruteForceResult
{
  Eigen::VectorXd z;
  Eigen::VectorXd duals;
  double value = 0.0;
};

/// Enumerates active sets by increasing size and returns the first KKT point
/// (unique for strictly convex H). Equality-constrained subproblems are solved
/// directly with a full-pivoting LU; singular subsets are skipped.
inline std::optional<BruteForceResult> brute_force_qp(const QpProblem& p, double feas_tol = 1e-9)
{
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = p.num_ineq();
  std::vector<int> subset;
  std::optional<BruteForceResult> found;

  auto check = [&](const std::vector<int>& active) -> bool {
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = p.H;
    rhs.head(n) = -p.q;
    for (Eigen::Index r = 0; r < k; ++r)
    {
      K.block(n + r, 0, 1, n) = p.A_ineq.row(active[static_cast<std::size_t>(r)]);
      K.block(0, n + r, n, 1) = p.A_ineq.row(active[static_cast<std::size_t>(r)]).transpose();
      rhs(n + r) = p.b_ineq(active[static_cast<std::size_t>(r)]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible())
    {
      return false;
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd z = sol.head(n);
    Eigen::VectorXd duals = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < k; ++r)
    {
      duals(active[static_cast<std::size_t>(r)]) = sol(n + r);
    }
    if (m > 0 && ((p.A_ineq * z - p.b_ineq).maxCoeff() > feas_tol || duals.minCoeff() < -feas_tol))
    {
      return false;
    }
    found = BruteForceResult{z, duals, p.objective(z)};
    return true;
  };

  // Depth-first enumeration of subsets of a fixed size.
  std::function<bool(int, int)> rec = [&](int start, int remaining) -> bool {
    if (remaining == 0)
    {
      return check(subset);
    }
    for (int i = start; i < static_cast<int>(m); ++i)
    {
      subset.push_back(i);
      if (rec(i + 1, remaining - 1))
      {
        return true;
      }
      subset.pop_back();
    }
    return false;
  };
  const int max_size = static_cast<int>(std::min(n, m));
  for (int size = 0; size <= max_size; ++size)
  {
    subset.clear();
    if (rec(0, size))
    {
      return found;
    }
  }
  return std::nullopt;
}

/// Random strictly convex QP with a nonempty feasible set.
inline QpProblem random_strictly_convex_qp(std::mt19937_64& rng, int n, int m)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
    {
      for (Eigen::Index j = 0; j < c; ++j)
      {
        M(i, j) = normal(rng);
      }
    }
    return M;
  };
  const Eigen::MatrixXd M = randn(n, n);
  Eigen::MatrixXd H = M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(n, n);
  H = 0.5 * (H + H.transpose()).eval();
  const Eigen::VectorXd q = 3.0 * randn(n, 1);
  const Eigen::MatrixXd A = randn(m, n);
  const Eigen::VectorXd z0 = randn(n, 1);
  Eigen::VectorXd b = A * z0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    b(i) += slack(rng);
  }
  return QpProblem(H, q, A, b);
}

}  // namespace mcbf::testing
