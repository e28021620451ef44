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

#include "mcbf/linmodel.hpp"

#include "mcbf/dynamics.hpp"

#include <cmath>

namespace mcbf
{

MsttrJacobians analytic_jacobians(const StateVector& x_r, const RobotGeometry& geom)
{
  // Evaluating f first applies the steering-singularity guard.
  (void)msttr_f(x_r, geom);
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double v = x_r.v;
  const double ct = std::cos(x_r.theta);
  const double st = std::sin(x_r.theta);
  const double cp = std::cos(x_r.psi);
  const double sp = std::sin(x_r.psi);
  const double t1 = std::tan(x_r.delta1);
  const double t2 = std::tan(x_r.delta2);

  MsttrJacobians j;
  j.dfdx.setZero();
  j.dfdx(sx::kX1, sx::kV) = ct;
  j.dfdx(sx::kX1, sx::kTheta) = -v * st;
  j.dfdx(sx::kY1, sx::kV) = st;
  j.dfdx(sx::kY1, sx::kTheta) = v * ct;
  j.dfdx(sx::kV, sx::kA) = 1.0;
  j.dfdx(sx::kTheta, sx::kV) = t1 / l1;
  j.dfdx(sx::kTheta, sx::kDelta1) = v / l1 * (1.0 + t1 * t1);            // a_57
  j.dfdx(sx::kPsi, sx::kV) = t1 / l1 - (t2 * cp + sp) / l2;                // a_63
  j.dfdx(sx::kPsi, sx::kPsi) = -v / l2 * (-t2 * sp + cp);                  // a_66 - 1
  j.dfdx(sx::kPsi, sx::kDelta1) = v / l1 * (1.0 + t1 * t1);              // a_67
  j.dfdx(sx::kPsi, sx::kDelta2) = -v / l2 * (1.0 + t2 * t2) * cp;        // a_68
  j.dfdu = msttr_g(x_r);
  return j;
}

SsttrJacobians analytic_jacobians(const SsttrState& x_r, const RobotGeometry& geom)
{
  (void)ssttr_f(x_r, geom);
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double v = x_r.v;
  const double t1 = std::tan(x_r.delta1);

  SsttrJacobians j;
  j.dfdx.setZero();
  j.dfdx(0, 2) = std::cos(x_r.theta);
  j.dfdx(0, 3) = -v * std::sin(x_r.theta);
  j.dfdx(1, 2) = std::sin(x_r.theta);
  j.dfdx(1, 3) = v * std::cos(x_r.theta);
  j.dfdx(3, 2) = t1 / l1;
  j.dfdx(3, 5) = v / l1 * (1.0 + t1 * t1);
  j.dfdx(4, 2) = t1 / l1 - std::sin(x_r.psi) / l2;
  j.dfdx(4, 4) = -v / l2 * std::cos(x_r.psi);
  j.dfdx(4, 5) = v / l1 * (1.0 + t1 * t1);
  j.dfdu = ssttr_g(x_r);
  return j;
}

LinearizedModel linearize(const StateVector& x_r, const InputVector& u_r, const RobotGeometry& geom, double ts)
{
  if (!(ts > 0.0))
  {
    throw std::invalid_argument("linearize: sampling time must be positive");
  }
  const MsttrJacobians j = analytic_jacobians(x_r, geom);
  const Vector8 xr = x_r.to_vector();
  const Vector3 ur = u_r.to_vector();
  LinearizedModel m;
  m.A = Matrix8::Identity() + j.dfdx * ts;
  m.B = j.dfdu * ts;
  m.C = (msttr_rhs(x_r, u_r, geom) - j.dfdx * xr - j.dfdu * ur) * ts;
  m.ref_state = x_r;
  m.ref_input = u_r;
  m.ts = ts;
  return m;
}

SsttrLinearizedModel linearize(const SsttrState& x_r, const SsttrInput& u_r, const RobotGeometry& geom, double ts)
{
  if (!(ts > 0.0))
  {
    throw std::invalid_argument("linearize: sampling time must be positive");
  }
  const SsttrJacobians j = analytic_jacobians(x_r, geom);
  const Vector6 xr = x_r.to_vector();
  const Eigen::Vector2d ur = u_r.to_vector();
  SsttrLinearizedModel m;
  m.A = Matrix6::Identity() + j.dfdx * ts;
  m.B = j.dfdu * ts;
  m.C = (ssttr_f(x_r, geom) + ssttr_g(x_r) * ur - j.dfdx * xr - j.dfdu * ur) * ts;
  m.ref_state = x_r;
  m.ref_input = u_r;
  m.ts = ts;
  return m;
}

namespace
{
template <int Nx, int Nu, typename Rhs>
Jacobians<Nx, Nu> central_differences(const Eigen::Matrix<double, Nx, 1>& x, const Eigen::Matrix<double, Nu, 1>& u,
                                      double h, Rhs&& rhs)
{
  Jacobians<Nx, Nu> j;
  for (int i = 0; i < Nx; ++i)
  {
    Eigen::Matrix<double, Nx, 1> xp = x;
    Eigen::Matrix<double, Nx, 1> xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.dfdx.col(i) = (rhs(xp, u) - rhs(xm, u)) / (2.0 * h);
  }
  for (int i = 0; i < Nu; ++i)
  {
    Eigen::Matrix<double, Nu, 1> up = u;
    Eigen::Matrix<double, Nu, 1> um = u;
    up(i) += h;
    um(i) -= h;
    j.dfdu.col(i) = (rhs(x, up) - rhs(x, um)) / (2.0 * h);
  }
  return j;
}
}  // namespace

MsttrJacobians numerical_jacobians(const StateVector& x_r, const InputVector& u_r, const RobotGeometry& geom,
                                   double step)
{
  return central_differences<8, 3>(x_r.to_vector(), u_r.to_vector(), step,
                                   [&](const Vector8& x, const Vector3& u) -> Vector8 {
                                     return msttr_rhs(StateVector::from_vector(x), InputVector::from_vector(u), geom);
                                   });
}

SsttrJacobians numerical_jacobians(const SsttrState& x_r, const SsttrInput& u_r, const RobotGeometry& geom,
                                   double step)
{
  return central_differences<6, 2>(x_r.to_vector(), u_r.to_vector(), step,
                                   [&](const Vector6& x, const Eigen::Vector2d& u) -> Vector6 {
                                     const SsttrState s = SsttrState::from_vector(x);
                                     return ssttr_f(s, geom) + ssttr_g(s) * u;
                                   });
}

}  // namespace mcbf
