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

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace mcbf
{

/// min ½ zᵀHz + qᵀz  s.t.  A_ineq z ≤ b_ineq,  A_eq z = b_eq.
struct QpProblem
{
  Eigen::MatrixXd H;
  Eigen::VectorXd q;
  Eigen::MatrixXd A_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;

  QpProblem() = default;
  QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd q_);
  QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd q_, Eigen::MatrixXd A_ineq_, Eigen::VectorXd b_ineq_);

  Eigen::Index num_vars() const { return q.size(); }
  Eigen::Index num_ineq() const { return b_ineq.size(); }
  Eigen::Index num_eq() const { return b_eq.size(); }

  /// Throws std::invalid_argument on inconsistent dimensions, an asymmetric H
  /// (beyond 1e-12 relative to its largest entry) or an eigenvalue below -1e-10.
  void validate() const;

  double objective(const Eigen::VectorXd& z) const { return 0.5 * z.dot(H * z) + q.dot(z); }
};

enum class QpStatus
{
  Optimal,
  Infeasible,
  MaxIter,
  Unbounded
};

const char* to_string(QpStatus status);

struct KktResiduals
{
  double stationarity = std::numeric_limits<double>::infinity();
  double primal = std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();

  double max() const;
};

struct QpSolution
{
  Eigen::VectorXd z;
  Eigen::VectorXd duals;     // one per inequality, >= 0
  Eigen::VectorXd eq_duals;  // one per equality, free sign
  QpStatus status = QpStatus::MaxIter;
  KktResiduals kkt;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

/// Absolute KKT residuals of a candidate primal/dual pair: ‖Hz + q + Aᵀλ‖∞,
/// worst constraint violation, and max |λᵢ (Aᵢz − bᵢ)|.
KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& duals,
                           const Eigen::VectorXd& eq_duals);

struct QpSettings
{
  double tol = 1e-8;
  int max_iter = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  int scaling_iters = 10;
  bool warm_start = true;
};

/// ADMM (operator splitting) with adaptive ρ and Ruiz equilibration, followed
/// by an active-set polish that certifies the KKT conditions.
///
/// A solver owns its workspace and warm-start cache. One instance per thread.
class QpSolver
{
public:
  explicit QpSolver(QpSettings settings = {});

  QpSolution solve(const QpProblem& problem);

  /// Drops the warm-start cache.
  void reset();

  const QpSettings& settings() const { return settings_; }
  QpSettings& settings() { return settings_; }

private:
  QpSettings settings_;

  // Warm-start cache in unscaled coordinates.
  Eigen::Index cached_n_ = -1;
  Eigen::Index cached_m_ = -1;
  Eigen::VectorXd cached_x_;
  Eigen::VectorXd cached_z_;
  Eigen::VectorXd cached_y_;
  std::vector<bool> cached_active_;
};

/// One-shot convenience wrapper (cold start).
QpSolution solve(const QpProblem& problem, double tol = 1e-8, int max_iter = 4000);

struct LpResult
{
  QpStatus status = QpStatus::MaxIter;
  double value = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd point;
};

/// max cᵀz s.t. A z ≤ b over free z, by a two-phase dense simplex with
/// Bland's rule. Reports Infeasible, Unbounded (value +∞) or Optimal.
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  int max_pivots = 10000);

}  // namespace mcbf
