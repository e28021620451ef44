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

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mcbf
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v)
{
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Inequalities first (lower bound -inf), then equalities (l = u).
struct StackedConstraints
{
  Eigen::MatrixXd A;
  Eigen::VectorXd l;
  Eigen::VectorXd u;
  Eigen::Index m_ineq = 0;

  Eigen::Index rows() const { return A.rows(); }
  bool is_eq(Eigen::Index i) const { return i >= m_ineq; }
};

StackedConstraints stack_constraints(const QpProblem& p)
{
  StackedConstraints s;
  const Eigen::Index n = p.num_vars();
  const Eigen::Index mi = p.num_ineq();
  const Eigen::Index me = p.num_eq();
  s.m_ineq = mi;
  s.A.resize(mi + me, n);
  s.l.resize(mi + me);
  s.u.resize(mi + me);
  if (mi > 0)
  {
    s.A.topRows(mi) = p.A_ineq;
    s.l.head(mi).setConstant(-kInf);
    s.u.head(mi) = p.b_ineq;
  }
  if (me > 0)
  {
    s.A.bottomRows(me) = p.A_eq;
    s.l.tail(me) = p.b_eq;
    s.u.tail(me) = p.b_eq;
  }
  return s;
}

struct Equilibration
{
  Eigen::VectorXd D;  // variable scaling
  Eigen::VectorXd E;  // constraint scaling
  double c = 1.0;     // cost scaling
};

double clamp_scale(double norm)
{
  if (norm < 1e-4)
  {
    return 1.0;
  }
  return std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
}

Equilibration ruiz_equilibrate(const Eigen::MatrixXd& H, const Eigen::VectorXd& q, const Eigen::MatrixXd& A,
                               int iterations)
{
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  Equilibration eq{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(m), 1.0};
  Eigen::MatrixXd Hs = H;
  Eigen::MatrixXd As = A;
  for (int it = 0; it < iterations; ++it)
  {
    Eigen::VectorXd dD(n);
    for (Eigen::Index j = 0; j < n; ++j)
    {
      double norm = Hs.col(j).cwiseAbs().maxCoeff();
      if (m > 0)
      {
        norm = std::max(norm, As.col(j).cwiseAbs().maxCoeff());
      }
      dD(j) = clamp_scale(norm);
    }
    Eigen::VectorXd dE(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
      dE(i) = clamp_scale(As.row(i).cwiseAbs().maxCoeff());
    }
    Hs = dD.asDiagonal() * Hs * dD.asDiagonal();
    As = dE.asDiagonal() * As * dD.asDiagonal();
    eq.D = eq.D.cwiseProduct(dD);
    eq.E = eq.E.cwiseProduct(dE);
  }
  double mean_col = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
  {
    mean_col += Hs.col(j).cwiseAbs().maxCoeff();
  }
  mean_col /= static_cast<double>(std::max<Eigen::Index>(n, 1));
  const double gamma = std::max(mean_col, inf_norm(eq.D.cwiseProduct(q)));
  eq.c = 1.0 / std::clamp(gamma, 1e-4, 1e4);
  return eq;
}

struct Tolerances
{
  double stationarity;
  double primal;
  double complementarity;
};

Tolerances scaled_tolerances(const QpProblem& p, const StackedConstraints& st, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, double tol)
{
  const double stat_scale =
      std::max({1.0, inf_norm(p.q), inf_norm(p.H * x), st.rows() ? inf_norm(st.A.transpose() * y) : 0.0});
  double prim_scale = 1.0;
  if (st.rows() > 0)
  {
    prim_scale = std::max({prim_scale, inf_norm(st.A * x), inf_norm(st.u)});
  }
  return {tol * stat_scale, tol * prim_scale, tol * prim_scale * std::max(1.0, inf_norm(y))};
}

struct PolishOutcome
{
  bool ok = false;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // stacked duals
  std::vector<bool> active;
};

/// Primal-dual active-set refinement from an active-set guess. Succeeds only if
/// the resulting point satisfies the KKT conditions to the scaled tolerance.
PolishOutcome polish(const QpProblem& p, const StackedConstraints& st, std::vector<bool> active, double tol)
{
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = st.rows();
  for (Eigen::Index i = st.m_ineq; i < m; ++i)
  {
    active[static_cast<std::size_t>(i)] = true;
  }
  // Regularize each block relative to its own scale: the dual block against
  // the Schur complement A H^-1 A^T.
  const double h_scale = std::max(1.0, p.H.cwiseAbs().maxCoeff());
  const double a_scale = m > 0 ? std::max(1.0, st.A.cwiseAbs().maxCoeff()) : 1.0;
  const double reg = 1e-12 * h_scale;
  const double reg_dual = 1e-12 * a_scale * a_scale / h_scale;
  std::set<std::vector<bool>> visited;
  PolishOutcome out;
  const int max_rounds = static_cast<int>(3 * m + 10);
  for (int round = 0; round < max_rounds; ++round)
  {
    if (!visited.insert(active).second)
    {
      return out;  // cycling
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < m; ++i)
    {
      if (active[static_cast<std::size_t>(i)])
      {
        rows.push_back(i);
      }
    }
    const auto w = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + w, n + w);
    Eigen::VectorXd rhs(n + w);
    K.topLeftCorner(n, n) = p.H;
    rhs.head(n) = -p.q;
    for (Eigen::Index r = 0; r < w; ++r)
    {
      K.block(n + r, 0, 1, n) = st.A.row(rows[static_cast<std::size_t>(r)]);
      K.block(0, n + r, n, 1) = st.A.row(rows[static_cast<std::size_t>(r)]).transpose();
      rhs(n + r) = st.u(rows[static_cast<std::size_t>(r)]);
    }
    Eigen::MatrixXd Kreg = K;
    Kreg.topLeftCorner(n, n).diagonal().array() += reg;
    Kreg.bottomRightCorner(w, w).diagonal().array() -= reg_dual;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Kreg);
    Eigen::VectorXd sol = lu.solve(rhs);
    for (int refine = 0; refine < 10; ++refine)
    {
      const Eigen::VectorXd res = rhs - K * sol;
      if (inf_norm(res) < 1e-15 * std::max(1.0, inf_norm(rhs)))
      {
        break;
      }
      sol += lu.solve(res);
    }
    if (!sol.allFinite())
    {
      return out;
    }
    Eigen::VectorXd x = sol.head(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < w; ++r)
    {
      y(rows[static_cast<std::size_t>(r)]) = sol(n + r);
    }
    const Eigen::VectorXd Ax = st.A * x;
    const Tolerances tl = scaled_tolerances(p, st, x, y, tol);

    std::vector<bool> next = active;
    for (Eigen::Index i = 0; i < st.m_ineq; ++i)
    {
      const auto ui = static_cast<std::size_t>(i);
      if (active[ui])
      {
        next[ui] = y(i) >= -0.1 * tl.stationarity;
      }
      else
      {
        next[ui] = Ax(i) - st.u(i) > 0.1 * tl.primal;
      }
    }
    if (next == active)
    {
      for (Eigen::Index i = 0; i < st.m_ineq; ++i)
      {
        y(i) = std::max(y(i), 0.0);
      }
      const Eigen::VectorXd yi = y.head(st.m_ineq);
      const Eigen::VectorXd ye = y.tail(m - st.m_ineq);
      const KktResiduals r = kkt_residuals(p, x, yi, ye);
      const Tolerances tf = scaled_tolerances(p, st, x, y, tol);
      if (r.stationarity < tf.stationarity && r.primal < tf.primal && r.complementarity < tf.complementarity)
      {
        out.ok = true;
        out.x = std::move(x);
        out.y = std::move(y);
        out.active = std::move(active);
      }
      return out;
    }
    active = std::move(next);
  }
  return out;
}

QpSolution make_solution(const QpProblem& p, const StackedConstraints& st, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, QpStatus status, int iterations)
{
  QpSolution s;
  s.z = x;
  s.duals = y.head(st.m_ineq);
  s.eq_duals = y.tail(st.rows() - st.m_ineq);
  s.status = status;
  s.iterations = iterations;
  s.kkt = kkt_residuals(p, s.z, s.duals.cwiseMax(0.0), s.eq_duals);
  s.objective = p.objective(s.z);
  return s;
}

/// The ADMM iterate itself, accepted when it meets the KKT conditions to the
/// scaled tolerance (degenerate problems where the polish cannot settle).
bool kkt_certified(const QpProblem& p, const StackedConstraints& st, const Eigen::VectorXd& x,
                   Eigen::VectorXd& y, double tol)
{
  y.head(st.m_ineq) = y.head(st.m_ineq).cwiseMax(0.0);
  const KktResiduals r = kkt_residuals(p, x, y.head(st.m_ineq), y.tail(st.rows() - st.m_ineq));
  const Tolerances tl = scaled_tolerances(p, st, x, y, tol);
  return r.stationarity < tl.stationarity && r.primal < tl.primal && r.complementarity < tl.complementarity;
}

}  // namespace

QpProblem::QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd q_)
  : H(std::move(H_)), q(std::move(q_)), A_ineq(0, q.size()), b_ineq(0), A_eq(0, q.size()), b_eq(0)
{
}

QpProblem::QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd q_, Eigen::MatrixXd A_ineq_, Eigen::VectorXd b_ineq_)
  : H(std::move(H_))
  , q(std::move(q_))
  , A_ineq(std::move(A_ineq_))
  , b_ineq(std::move(b_ineq_))
  , A_eq(0, q.size())
  , b_eq(0)
{
}

void QpProblem::validate() const
{
  const Eigen::Index n = q.size();
  if (H.rows() != n || H.cols() != n)
  {
    throw std::invalid_argument("QpProblem: H must be n x n");
  }
  if (A_ineq.rows() != b_ineq.size() || (A_ineq.rows() > 0 && A_ineq.cols() != n))
  {
    throw std::invalid_argument("QpProblem: inequality block has inconsistent dimensions");
  }
  if (A_eq.rows() != b_eq.size() || (A_eq.rows() > 0 && A_eq.cols() != n))
  {
    throw std::invalid_argument("QpProblem: equality block has inconsistent dimensions");
  }
  if (!H.allFinite() || !q.allFinite() || !A_ineq.allFinite() || !b_ineq.allFinite() || !A_eq.allFinite() ||
      !b_eq.allFinite())
  {
    throw std::invalid_argument("QpProblem: non-finite data");
  }
  if (n == 0)
  {
    return;
  }
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
  {
    throw std::invalid_argument("QpProblem: H is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
  {
    throw std::invalid_argument("QpProblem: H is not positive semidefinite");
  }
}

const char* to_string(QpStatus status)
{
  switch (status)
  {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::Infeasible:
      return "infeasible";
    case QpStatus::MaxIter:
      return "max_iter";
    case QpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

double KktResiduals::max() const
{
  return std::max({stationarity, primal, complementarity});
}

KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& duals,
                           const Eigen::VectorXd& eq_duals)
{
  KktResiduals r;
  Eigen::VectorXd grad = p.H * z + p.q;
  r.primal = 0.0;
  r.complementarity = 0.0;
  if (p.num_ineq() > 0)
  {
    grad += p.A_ineq.transpose() * duals;
    const Eigen::VectorXd slack = p.A_ineq * z - p.b_ineq;
    r.primal = std::max(r.primal, slack.maxCoeff());
    r.complementarity = duals.cwiseProduct(slack).cwiseAbs().maxCoeff();
  }
  if (p.num_eq() > 0)
  {
    grad += p.A_eq.transpose() * eq_duals;
    r.primal = std::max(r.primal, inf_norm(p.A_eq * z - p.b_eq));
  }
  r.primal = std::max(r.primal, 0.0);
  r.stationarity = inf_norm(grad);
  return r;
}

QpSolver::QpSolver(QpSettings settings) : settings_(settings)
{
}

void QpSolver::reset()
{
  cached_n_ = -1;
  cached_m_ = -1;
  cached_x_.resize(0);
  cached_z_.resize(0);
  cached_y_.resize(0);
  cached_active_.clear();
}

QpSolution QpSolver::solve(const QpProblem& p)
{
  p.validate();
  const double tol = settings_.tol;
  const Eigen::Index n = p.num_vars();
  const StackedConstraints st = stack_constraints(p);
  const Eigen::Index m = st.rows();

  if (m == 0)
  {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(p.H);
    const Eigen::VectorXd x = cod.solve(-p.q);
    QpSolution s = make_solution(p, st, x, Eigen::VectorXd::Zero(0), QpStatus::Optimal, 0);
    if (s.kkt.stationarity > tol * std::max(1.0, inf_norm(p.q)))
    {
      s.status = QpStatus::Unbounded;
    }
    return s;
  }

  const bool warm = settings_.warm_start && cached_n_ == n && cached_m_ == m;
  auto positive_duals = [&](const Eigen::VectorXd& y) {
    std::vector<bool> active(static_cast<std::size_t>(y.size()), true);
    for (Eigen::Index i = 0; i < st.m_ineq; ++i)
    {
      active[static_cast<std::size_t>(i)] = y(i) > 0.0;
    }
    return active;
  };
  auto remember = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::vector<bool>& active) {
    cached_n_ = n;
    cached_m_ = m;
    cached_x_ = x;
    cached_z_ = (st.A * x).cwiseMax(st.l).cwiseMin(st.u);
    cached_y_ = y;
    cached_active_ = active;
  };

  if (warm)
  {
    PolishOutcome po = polish(p, st, cached_active_, tol);
    if (po.ok)
    {
      remember(po.x, po.y, po.active);
      return make_solution(p, st, po.x, po.y, QpStatus::Optimal, 0);
    }
  }

  const Equilibration eq = ruiz_equilibrate(p.H, p.q, st.A, settings_.scaling_iters);
  const Eigen::MatrixXd Hs = eq.c * eq.D.asDiagonal() * p.H * eq.D.asDiagonal();
  const Eigen::VectorXd qs = eq.c * eq.D.cwiseProduct(p.q);
  const Eigen::MatrixXd As = eq.E.asDiagonal() * st.A * eq.D.asDiagonal();
  const Eigen::VectorXd ls = eq.E.cwiseProduct(st.l);
  const Eigen::VectorXd us = eq.E.cwiseProduct(st.u);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (warm)
  {
    x = cached_x_.cwiseQuotient(eq.D);
    z = eq.E.cwiseProduct(cached_z_);
    y = eq.c * cached_y_.cwiseQuotient(eq.E);
  }
  else
  {
    z = (As * x).cwiseMax(ls).cwiseMin(us);
  }

  const double sigma = settings_.sigma;
  const double alpha = settings_.alpha;
  double rho = settings_.rho;
  Eigen::VectorXd rho_vec(m);
  auto set_rho = [&](double r) {
    for (Eigen::Index i = 0; i < m; ++i)
    {
      rho_vec(i) = st.is_eq(i) ? 1e3 * r : r;
    }
  };
  set_rho(rho);
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor = [&]() {
    Eigen::MatrixXd K = Hs + As.transpose() * rho_vec.asDiagonal() * As;
    K.diagonal().array() += sigma;
    llt.compute(K);
  };
  factor();

  // Residual thresholds at which the active-set polish is attempted.
  const std::vector<double> thresholds{1e-3, 1e-5, 1e-7, 1e-9};
  std::size_t next_threshold = 0;
  int last_polish = 0;

  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd y_prev = y;
  int it = 0;
  auto unscaled = [&](Eigen::VectorXd& xu, Eigen::VectorXd& zu, Eigen::VectorXd& yu) {
    xu = eq.D.cwiseProduct(x);
    zu = z.cwiseQuotient(eq.E);
    yu = eq.E.cwiseProduct(y) / eq.c;
  };
  auto try_polish = [&](const Eigen::VectorXd& zu, const Eigen::VectorXd& yu) -> PolishOutcome {
    std::vector<bool> guess(static_cast<std::size_t>(m), false);
    for (Eigen::Index i = 0; i < st.m_ineq; ++i)
    {
      guess[static_cast<std::size_t>(i)] = st.u(i) - zu(i) < yu(i);
    }
    return polish(p, st, std::move(guess), tol);
  };

  for (it = 1; it <= settings_.max_iter; ++it)
  {
    x_prev = x;
    y_prev = y;
    const Eigen::VectorXd rhs = sigma * x - qs + As.transpose() * (rho_vec.cwiseProduct(z) - y);
    const Eigen::VectorXd x_tilde = llt.solve(rhs);
    const Eigen::VectorXd z_tilde = As * x_tilde;
    x = alpha * x_tilde + (1.0 - alpha) * x;
    const Eigen::VectorXd z_relaxed = alpha * z_tilde + (1.0 - alpha) * z;
    z = (z_relaxed + y.cwiseQuotient(rho_vec)).cwiseMax(ls).cwiseMin(us);
    y += rho_vec.cwiseProduct(z_relaxed - z);

    if (it % 5 != 0 && it != settings_.max_iter)
    {
      continue;
    }

    Eigen::VectorXd xu;
    Eigen::VectorXd zu;
    Eigen::VectorXd yu;
    unscaled(xu, zu, yu);
    const Eigen::VectorXd Ax = st.A * xu;
    const Eigen::VectorXd Hx = p.H * xu;
    const Eigen::VectorXd ATy = st.A.transpose() * yu;
    const double prim = inf_norm(Ax - zu);
    const double dual = inf_norm(Hx + p.q + ATy);
    const double prim_scale = 1.0 + std::max(inf_norm(Ax), inf_norm(zu));
    const double dual_scale = 1.0 + std::max({inf_norm(Hx), inf_norm(ATy), inf_norm(p.q)});

    bool attempt = false;
    while (next_threshold < thresholds.size() && prim <= thresholds[next_threshold] * prim_scale &&
           dual <= thresholds[next_threshold] * dual_scale)
    {
      ++next_threshold;
      attempt = true;
    }
    if (next_threshold > 0 && it - last_polish >= 100)
    {
      attempt = true;
    }
    if (attempt)
    {
      last_polish = it;
      PolishOutcome po = try_polish(zu, yu);
      if (po.ok)
      {
        remember(po.x, po.y, po.active);
        return make_solution(p, st, po.x, po.y, QpStatus::Optimal, it);
      }
      Eigen::VectorXd yc = yu;
      if (kkt_certified(p, st, xu, yc, tol))
      {
        remember(xu, yc, positive_duals(yc));
        return make_solution(p, st, xu, yc, QpStatus::Optimal, it);
      }
    }

    // Primal infeasibility certificate from the dual iterate change.
    const Eigen::VectorXd dy = eq.E.cwiseProduct(y - y_prev) / eq.c;
    const double dy_norm = inf_norm(dy);
    if (dy_norm > 1e-10)
    {
      const double eps = 1e-6 * dy_norm;
      bool certificate = inf_norm(st.A.transpose() * dy) <= eps;
      double support = 0.0;
      for (Eigen::Index i = 0; i < m && certificate; ++i)
      {
        if (dy(i) > 0.0)
        {
          certificate = std::isfinite(st.u(i));
          support += certificate ? st.u(i) * dy(i) : 0.0;
        }
        else if (dy(i) < 0.0)
        {
          certificate = std::isfinite(st.l(i));
          support += certificate ? st.l(i) * dy(i) : 0.0;
        }
      }
      if (certificate && support < -eps)
      {
        cached_n_ = -1;
        return make_solution(p, st, xu, yu, QpStatus::Infeasible, it);
      }
    }

    // Dual infeasibility (unbounded objective) certificate.
    const Eigen::VectorXd dx = eq.D.cwiseProduct(x - x_prev);
    const double dx_norm = inf_norm(dx);
    if (dx_norm > 1e-10)
    {
      const double eps = 1e-6 * dx_norm;
      bool certificate = inf_norm(p.H * dx) <= eps && p.q.dot(dx) < -eps;
      const Eigen::VectorXd Adx = st.A * dx;
      for (Eigen::Index i = 0; i < m && certificate; ++i)
      {
        if (std::isfinite(st.u(i)) && Adx(i) > eps)
        {
          certificate = false;
        }
        if (std::isfinite(st.l(i)) && Adx(i) < -eps)
        {
          certificate = false;
        }
      }
      if (certificate)
      {
        cached_n_ = -1;
        return make_solution(p, st, xu, yu, QpStatus::Unbounded, it);
      }
    }

    if (it % 25 == 0)
    {
      const Eigen::VectorXd Asx = As * x;
      const Eigen::VectorXd Hsx = Hs * x;
      const Eigen::VectorXd AsTy = As.transpose() * y;
      const double prim_s = inf_norm(Asx - z) / std::max({inf_norm(Asx), inf_norm(z), 1e-30});
      const double dual_s = inf_norm(Hsx + qs + AsTy) / std::max({inf_norm(Hsx), inf_norm(AsTy), inf_norm(qs), 1e-30});
      const double ratio = std::sqrt(prim_s / std::max(dual_s, 1e-30));
      const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
      if (new_rho > 5.0 * rho || new_rho < 0.2 * rho)
      {
        rho = new_rho;
        set_rho(rho);
        factor();
      }
    }
  }

  Eigen::VectorXd xu;
  Eigen::VectorXd zu;
  Eigen::VectorXd yu;
  unscaled(xu, zu, yu);
  PolishOutcome po = try_polish(zu, yu);
  if (po.ok)
  {
    remember(po.x, po.y, po.active);
    return make_solution(p, st, po.x, po.y, QpStatus::Optimal, settings_.max_iter);
  }
  Eigen::VectorXd yc = yu;
  if (kkt_certified(p, st, xu, yc, tol))
  {
    remember(xu, yc, positive_duals(yc));
    return make_solution(p, st, xu, yc, QpStatus::Optimal, settings_.max_iter);
  }
  cached_n_ = -1;
  return make_solution(p, st, xu, yu, QpStatus::MaxIter, settings_.max_iter);
}

QpSolution solve(const QpProblem& problem, double tol, int max_iter)
{
  QpSettings settings;
  settings.tol = tol;
  settings.max_iter = max_iter;
  settings.warm_start = false;
  QpSolver solver(settings);
  return solver.solve(problem);
}

namespace
{

/// Dense tableau simplex for min c^T x s.t. T x = rhs, x >= 0, rhs >= 0.
/// Bland's rule; `basis` must hold a feasible starting basis.
QpStatus simplex(Eigen::MatrixXd& T, Eigen::VectorXd& rhs, std::vector<Eigen::Index>& basis, const Eigen::VectorXd& c,
                 Eigen::Index n_allowed, int max_pivots, double tol)
{
  const Eigen::Index m = T.rows();
  for (int pivot = 0; pivot < max_pivots; ++pivot)
  {
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
      cb(i) = c(basis[static_cast<std::size_t>(i)]);
    }
    const Eigen::RowVectorXd reduced = c.head(n_allowed).transpose() - cb.transpose() * T.leftCols(n_allowed);
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n_allowed; ++j)
    {
      if (reduced(j) < -tol)
      {
        enter = j;
        break;
      }
    }
    if (enter < 0)
    {
      return QpStatus::Optimal;
    }
    Eigen::Index leave = -1;
    double best = kInf;
    for (Eigen::Index i = 0; i < m; ++i)
    {
      if (T(i, enter) > tol)
      {
        const double ratio = rhs(i) / T(i, enter);
        if (ratio < best - tol ||
            (ratio <= best + tol && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))
        {
          best = std::min(best, ratio);
          leave = i;
        }
      }
    }
    if (leave < 0)
    {
      return QpStatus::Unbounded;
    }
    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    rhs(leave) /= piv;
    for (Eigen::Index i = 0; i < m; ++i)
    {
      if (i != leave && T(i, enter) != 0.0)
      {
        const double f = T(i, enter);
        T.row(i) -= f * T.row(leave);
        rhs(i) -= f * rhs(leave);
      }
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return QpStatus::MaxIter;
}

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_pivots)
{
  const Eigen::Index n = c.size();
  const Eigen::Index m = A.rows();
  if (m != b.size() || (m > 0 && A.cols() != n))
  {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  LpResult result;
  result.point = Eigen::VectorXd::Zero(n);
  if (m == 0)
  {
    result.status = c.isZero(0.0) ? QpStatus::Optimal : QpStatus::Unbounded;
    result.value = c.isZero(0.0) ? 0.0 : kInf;
    return result;
  }

  // Row-normalize, then write z = z+ - z-, add slacks s, and one artificial
  // per row: [A -A I sgn] (z+, z-, s, art) = b with b flipped to be >= 0.
  Eigen::MatrixXd An = A;
  Eigen::VectorXd bn = b;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const double r = std::max(An.row(i).cwiseAbs().maxCoeff(), std::abs(bn(i)));
    if (r > 0.0)
    {
      An.row(i) /= r;
      bn(i) /= r;
    }
  }
  const Eigen::Index n_struct = 2 * n + m;
  const Eigen::Index n_total = n_struct + m;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, n_total);
  Eigen::VectorXd rhs = bn;
  T.leftCols(n) = An;
  T.middleCols(n, n) = -An;
  T.middleCols(2 * n, m).setIdentity();
  T.rightCols(m).setIdentity();
  for (Eigen::Index i = 0; i < m; ++i)
  {
    if (rhs(i) < 0.0)
    {
      T.row(i).head(n_struct) *= -1.0;
      rhs(i) = -rhs(i);
    }
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
  {
    basis[static_cast<std::size_t>(i)] = n_struct + i;
  }
  constexpr double kTol = 1e-10;

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_total);
  phase1.tail(m).setOnes();
  QpStatus st = simplex(T, rhs, basis, phase1, n_total, max_pivots, kTol);
  if (st != QpStatus::Optimal)
  {
    result.status = st;
    return result;
  }
  double infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    if (basis[static_cast<std::size_t>(i)] >= n_struct)
    {
      infeasibility += rhs(i);
    }
  }
  if (infeasibility > 1e-9)
  {
    result.status = QpStatus::Infeasible;
    return result;
  }
  // Drive artificials that remain basic at zero level out of the basis.
  for (Eigen::Index i = 0; i < m; ++i)
  {
    if (basis[static_cast<std::size_t>(i)] < n_struct)
    {
      continue;
    }
    Eigen::Index j = 0;
    T.row(i).head(n_struct).cwiseAbs().maxCoeff(&j);
    if (std::abs(T(i, j)) > kTol)
    {
      const double piv = T(i, j);
      T.row(i) /= piv;
      rhs(i) /= piv;
      for (Eigen::Index k = 0; k < m; ++k)
      {
        if (k != i && T(k, j) != 0.0)
        {
          const double f = T(k, j);
          T.row(k) -= f * T.row(i);
          rhs(k) -= f * rhs(i);
        }
      }
      basis[static_cast<std::size_t>(i)] = j;
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_total);
  phase2.head(n) = -c;
  phase2.segment(n, n) = c;
  st = simplex(T, rhs, basis, phase2, n_struct, max_pivots, kTol);
  result.status = st;
  if (st == QpStatus::Unbounded)
  {
    result.value = kInf;
    return result;
  }
  if (st != QpStatus::Optimal)
  {
    return result;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_total);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    x(basis[static_cast<std::size_t>(i)]) = rhs(i);
  }
  result.point = x.head(n) - x.segment(n, n);
  result.value = c.dot(result.point);
  return result;
}

}  // namespace mcbf
