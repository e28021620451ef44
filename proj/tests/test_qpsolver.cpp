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

#include "mcbf/qpsolver.hpp"

#include "mcbf/testing/qp_oracle.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <limits>
#include <random>

using mcbf::QpProblem;
using mcbf::QpSolver;
using mcbf::QpStatus;

namespace
{

QpProblem scalar_qp(double h, double q, std::vector<std::pair<double, double>> rows)
{
  Eigen::MatrixXd A(rows.size(), 1);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    A(static_cast<Eigen::Index>(i), 0) = rows[i].first;
    b(static_cast<Eigen::Index>(i)) = rows[i].second;
  }
  return QpProblem(Eigen::MatrixXd::Constant(1, 1, h), Eigen::VectorXd::Constant(1, q), A, b);
}

}  // namespace

TEST(QpSolver, ActiveUpperBoundHasHandComputedDual)
{
  // min z^2 s.t. z <= -1: stationarity 2z + λ = 0 at z = -1 gives λ = 2.
  const auto s = mcbf::solve(scalar_qp(2.0, 0.0, {{1.0, -1.0}}));
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), -1.0, 1e-10);
  EXPECT_NEAR(s.duals(0), 2.0, 1e-9);
  EXPECT_LT(s.kkt.max(), 1e-8);
}

TEST(QpSolver, UnconstrainedParabolaVertex)
{
  // (z - 3)^2 = z^2 - 6z + 9
  const auto s = mcbf::solve(QpProblem(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -6.0)));
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 3.0, 1e-12);
}

TEST(QpSolver, FeasibleProjectionTargetIsReturnedWithZeroDuals)
{
  // min u'u - 2 u_nom'u with u_nom strictly inside the constraints.
  const Eigen::Vector3d u_nom(0.3, -0.2, 0.1);
  Eigen::MatrixXd A(2, 3);
  A << 1, 0, 0, 0, 1, 1;
  const Eigen::Vector2d b(1.0, 1.0);
  const auto s = mcbf::solve(QpProblem(2.0 * Eigen::Matrix3d::Identity(), -2.0 * u_nom, A, b));
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_LT((s.z - u_nom).norm(), 1e-9);
  EXPECT_LT(s.duals.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(QpSolver, ContradictoryBoundsAreInfeasible)
{
  const auto s = mcbf::solve(scalar_qp(2.0, 0.0, {{1.0, 0.0}, {-1.0, -1.0}}));
  EXPECT_EQ(s.status, QpStatus::Infeasible);
}

TEST(QpSolver, EqualityConstraintsAreHonoured)
{
  QpProblem p(2.0 * Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
  p.A_eq = Eigen::RowVector2d(1.0, 1.0);
  p.b_eq = Eigen::VectorXd::Constant(1, 2.0);
  const auto s = mcbf::solve(p);
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-9);
  EXPECT_NEAR(s.z(1), 1.0, 1e-9);
}

TEST(QpSolver, RejectsBadInput)
{
  QpProblem asym(Eigen::Matrix2d{{1.0, 0.5}, {0.0, 1.0}}, Eigen::Vector2d::Zero());
  EXPECT_THROW(mcbf::solve(asym), std::invalid_argument);
  QpProblem indefinite(Eigen::Matrix2d{{1.0, 0.0}, {0.0, -1.0}}, Eigen::Vector2d::Zero());
  EXPECT_THROW(mcbf::solve(indefinite), std::invalid_argument);
  QpProblem mismatch(Eigen::Matrix2d::Identity(), Eigen::Vector3d::Zero());
  EXPECT_THROW(mcbf::solve(mismatch), std::invalid_argument);
}

TEST(QpSolver, MatchesBruteForceOnRandomProblems)
{
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nd(1, 10);
  std::uniform_int_distribution<int> md(0, 20);
  for (int trial = 0; trial < 150; ++trial)
  {
    const auto p = mcbf::testing::random_strictly_convex_qp(rng, nd(rng), md(rng));
    const auto oracle = mcbf::testing::brute_force_qp(p);
    ASSERT_TRUE(oracle.has_value());
    const auto s = mcbf::solve(p);
    ASSERT_EQ(s.status, QpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, oracle->value, 1e-6 * std::max(1.0, std::abs(oracle->value)));
    EXPECT_LT((s.z - oracle->z).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LT(s.kkt.max(), 1e-8);
    if (s.duals.size() > 0)
    {
      EXPECT_GE(s.duals.minCoeff(), 0.0);
    }
  }
}

TEST(QpSolver, MinimizerIsInvariantToCostScaling)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial)
  {
    auto p = mcbf::testing::random_strictly_convex_qp(rng, 6, 12);
    const auto base = mcbf::solve(p);
    p.H *= 37.5;
    p.q *= 37.5;
    const auto scaled = mcbf::solve(p);
    ASSERT_EQ(base.status, QpStatus::Optimal);
    ASSERT_EQ(scaled.status, QpStatus::Optimal);
    EXPECT_LT((base.z - scaled.z).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(QpSolver, WarmStartMatchesColdStart)
{
  std::mt19937_64 rng(3);
  QpSolver warm;
  auto p = mcbf::testing::random_strictly_convex_qp(rng, 8, 16);
  for (int step = 0; step < 20; ++step)
  {
    p.q += 0.05 * Eigen::VectorXd::Ones(p.q.size());
    const auto w = warm.solve(p);
    const auto c = mcbf::solve(p);
    ASSERT_EQ(w.status, QpStatus::Optimal);
    EXPECT_LT((w.z - c.z).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(SolveLp, SimpleUpperBound)
{
  const auto r = mcbf::solve_lp(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 5.0));
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.value, 5.0, 1e-6);
}

TEST(SolveLp, EmptyPolytopeIsInfeasible)
{
  Eigen::MatrixXd A(2, 1);
  A << 1.0, -1.0;
  const auto r = mcbf::solve_lp(Eigen::VectorXd::Ones(1), A, Eigen::Vector2d(0.0, -1.0));
  EXPECT_EQ(r.status, QpStatus::Infeasible);
}

TEST(SolveLp, UnboundedDirectionIsReported)
{
  // max p s.t. -p <= 1
  const auto r = mcbf::solve_lp(Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(r.status, QpStatus::Unbounded);
  const auto none = mcbf::solve_lp(Eigen::VectorXd::Ones(2), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
  EXPECT_EQ(none.status, QpStatus::Unbounded);
}

TEST(SolveLp, TwoDimensionalVertex)
{
  // max x + y s.t. x <= 1, y <= 2, x + 2y <= 4 -> (1, 1.5), value 2.5
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 2;
  const auto r = mcbf::solve_lp(Eigen::Vector2d(1, 1), A, Eigen::Vector3d(1, 2, 4));
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.value, 2.5, 1e-6);
}

TEST(SolveLp, MatchesVertexEnumerationOnRandomPolytopes)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const int n = 2 + trial % 3;
    const int m = n + 6;
    Eigen::MatrixXd A(m + 2 * n, n);
    Eigen::VectorXd b(m + 2 * n);
    for (int i = 0; i < m; ++i)
    {
      for (int j = 0; j < n; ++j)
      {
        A(i, j) = g(rng);
      }
      b(i) = std::abs(g(rng)) + (trial % 4 == 0 ? -2.0 : 0.1);
    }
    A.bottomRows(2 * n) << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
    b.tail(2 * n).setConstant(10.0);
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j)
    {
      c(j) = g(rng);
    }

    // Brute force over every vertex of the polytope.
    double best = -std::numeric_limits<double>::infinity();
    const auto rows = A.rows();
    std::vector<int> pick(static_cast<std::size_t>(n));
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == n)
      {
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd r(n);
        for (int k = 0; k < n; ++k)
        {
          M.row(k) = A.row(pick[static_cast<std::size_t>(k)]);
          r(k) = b(pick[static_cast<std::size_t>(k)]);
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible())
        {
          return;
        }
        const Eigen::VectorXd z = lu.solve(r);
        if ((A * z - b).maxCoeff() <= 1e-9)
        {
          best = std::max(best, c.dot(z));
        }
        return;
      }
      for (int i = start; i < rows; ++i)
      {
        pick[static_cast<std::size_t>(depth)] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);

    const auto lp = mcbf::solve_lp(c, A, b);
    if (!std::isfinite(best))
    {
      EXPECT_EQ(lp.status, QpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(lp.status, QpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(lp.value, best, 1e-8 * std::max(1.0, std::abs(best))) << "trial " << trial;
    EXPECT_LE((A * lp.point - b).maxCoeff(), 1e-9);
  }
}
