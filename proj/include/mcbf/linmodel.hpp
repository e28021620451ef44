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

#include "mcbf/core.hpp"

namespace mcbf
{

/// Continuous-time Jacobians of F(x, u) = f(x) + G u.
template <int Nx, int Nu>
struct Jacobians
{
  Eigen::Matrix<double, Nx, Nx> dfdx;
  Eigen::Matrix<double, Nx, Nu> dfdu;
};

using MsttrJacobians = Jacobians<8, 3>;
using SsttrJacobians = Jacobians<6, 2>;

/// x_{k+1} = A x_k + B u_k + C, forward-Euler discretization of the
/// linearization about (ref_state, ref_input).
struct LinearizedModel
{
  Matrix8 A;
  Matrix83 B;
  Vector8 C;
  StateVector ref_state;
  InputVector ref_input;
  double ts = 0.0;
};

struct SsttrLinearizedModel
{
  Matrix6 A;
  Matrix62 B;
  Vector6 C;
  SsttrState ref_state;
  SsttrInput ref_input;
  double ts = 0.0;
};

/// Closed-form ∂F/∂x and ∂F/∂u.
MsttrJacobians analytic_jacobians(const StateVector& x_r, const RobotGeometry& geom);
SsttrJacobians analytic_jacobians(const SsttrState& x_r, const RobotGeometry& geom);

LinearizedModel linearize(const StateVector& x_r, const InputVector& u_r, const RobotGeometry& geom, double ts);
SsttrLinearizedModel linearize(const SsttrState& x_r, const SsttrInput& u_r, const RobotGeometry& geom, double ts);

/// Central-difference Jacobians of the continuous vector field.
MsttrJacobians numerical_jacobians(const StateVector& x_r, const InputVector& u_r, const RobotGeometry& geom,
                                   double step = 1e-6);
SsttrJacobians numerical_jacobians(const SsttrState& x_r, const SsttrInput& u_r, const RobotGeometry& geom,
                                   double step = 1e-6);

}  // namespace mcbf
