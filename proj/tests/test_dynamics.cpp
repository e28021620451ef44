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

#include "mcbf/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using mcbf::InputVector;
using mcbf::RobotGeometry;
using mcbf::SsttrState;
using mcbf::StateVector;

namespace
{

constexpr double kPi = std::numbers::pi;

StateVector random_state(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {20.0 * u(rng), 20.0 * u(rng), 8.0 * u(rng), u(rng), kPi * u(rng),
          0.78 * u(rng), 0.78 * u(rng), 0.78 * u(rng)};
}

/// Distance from p to the closest point of a convex polygon boundary or
/// interior, computed from the corner list alone.
double polygon_distance(const std::array<mcbf::Point2, 4>& c, mcbf::Point2 p)
{
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i)
  {
    const auto a = c[i];
    const auto b = c[(i + 1) % 4];
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double cross = ex * (p.y - a.y) - ey * (p.x - a.x);
    inside = inside && cross >= 0.0;
    const double t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - a.x - t * ex, p.y - a.y - t * ey));
  }
  return inside ? -best : best;
}

}  // namespace

TEST(MsttrDrift, ZeroStateIsEquilibrium)
{
  EXPECT_EQ(mcbf::msttr_f(StateVector{}, RobotGeometry{}), mcbf::Vector8::Zero());
}

TEST(MsttrDrift, StraightDriving)
{
  StateVector s;
  s.v = 1.0;
  mcbf::Vector8 expected = mcbf::Vector8::Zero();
  expected(0) = 1.0;
  EXPECT_LT((mcbf::msttr_f(s, RobotGeometry{}) - expected).norm(), 1e-15);
}

TEST(MsttrDrift, QuarterPiSteeringYawRates)
{
  StateVector s;
  s.v = 1.0;
  s.delta1 = kPi / 4.0;
  const auto f = mcbf::msttr_f(s, RobotGeometry{});
  EXPECT_NEAR(f(mcbf::sx::kTheta), 0.4, 1e-15);
  EXPECT_NEAR(f(mcbf::sx::kPsi), 0.4, 1e-15);
}

TEST(MsttrDrift, SteeringSingularityThrows)
{
  StateVector s;
  s.delta2 = kPi / 2.0;
  EXPECT_THROW(mcbf::msttr_f(s, RobotGeometry{}), mcbf::SteeringSingularity);
  s.delta2 = 0.0;
  s.delta1 = -kPi / 2.0;
  EXPECT_THROW(mcbf::msttr_f(s, RobotGeometry{}), mcbf::SteeringSingularity);
}

TEST(MsttrInputMatrix, ThreeUnitColumns)
{
  std::mt19937_64 rng(1);
  const auto g0 = mcbf::msttr_g(StateVector{});
  EXPECT_EQ(g0.cwiseAbs().sum(), 3.0);
  EXPECT_EQ(g0(mcbf::sx::kA, 0), 1.0);
  EXPECT_EQ(g0(mcbf::sx::kDelta1, 1), 1.0);
  EXPECT_EQ(g0(mcbf::sx::kDelta2, 2), 1.0);
  EXPECT_EQ(Eigen::FullPivLU<mcbf::Matrix83>(g0).rank(), 3);
  for (int i = 0; i < 20; ++i)
  {
    EXPECT_EQ(mcbf::msttr_g(random_state(rng)), g0);
  }
}

TEST(SsttrDrift, ArticulationRelaxesWithoutSteering)
{
  SsttrState s;
  s.v = 1.0;
  s.psi = kPi / 6.0;
  const auto f = mcbf::ssttr_f(s, RobotGeometry{});
  EXPECT_NEAR(f(4), -std::sin(kPi / 6.0) / 5.5, 1e-15);
  EXPECT_EQ(mcbf::ssttr_f(SsttrState{}, RobotGeometry{}), mcbf::Vector6::Zero());
  const auto g = mcbf::ssttr_g(s);
  EXPECT_EQ(g(2, 0), 1.0);
  EXPECT_EQ(g(5, 1), 1.0);
  EXPECT_EQ(g.cwiseAbs().sum(), 2.0);
}

TEST(SsttrDrift, AgreesWithMultiSteeringModelOnSharedCoordinates)
{
  std::mt19937_64 rng(2);
  const RobotGeometry geom;
  const std::array<int, 6> shared{mcbf::sx::kX1, mcbf::sx::kY1, mcbf::sx::kV,
                                  mcbf::sx::kTheta, mcbf::sx::kPsi, mcbf::sx::kDelta1};
  for (int i = 0; i < 1000; ++i)
  {
    StateVector m = random_state(rng);
    m.delta2 = 0.0;
    const SsttrState s{m.x1, m.y1, m.v, m.theta, m.psi, m.delta1};
    const auto fm = mcbf::msttr_f(m, geom);
    const auto fs = mcbf::ssttr_f(s, geom);
    for (int j = 0; j < 6; ++j)
    {
      if (j == 2)
      {
        continue;  // v̇ is the drift a in one model and an input in the other
      }
      ASSERT_NEAR(fs(j), fm(shared[static_cast<std::size_t>(j)]), 1e-13);
    }
  }
}

TEST(TrailerPose, Examples)
{
  const RobotGeometry geom;
  auto p = mcbf::trailer_pose(StateVector{}, geom);
  EXPECT_DOUBLE_EQ(p.x2, -5.5);
  EXPECT_DOUBLE_EQ(p.y2, 0.0);
  EXPECT_DOUBLE_EQ(p.heading, 0.0);

  StateVector s{3.0, -2.0, 0, 0, 0.7, 0.7, 0, 0};
  p = mcbf::trailer_pose(s, geom);
  EXPECT_DOUBLE_EQ(p.x2, 3.0 - 5.5);
  EXPECT_DOUBLE_EQ(p.y2, -2.0);

  s = StateVector{};
  s.theta = kPi / 2.0;
  p = mcbf::trailer_pose(s, geom);
  EXPECT_NEAR(p.x2, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.y2, -5.5);
}

TEST(IntegrateStep, EquilibriumIsFixed)
{
  EXPECT_EQ(mcbf::integrate_step(StateVector{}, InputVector{}, RobotGeometry{}, 0.2), StateVector{});
}

TEST(IntegrateStep, ConstantVelocityIsExact)
{
  StateVector s;
  s.v = 1.0;
  const auto n = mcbf::integrate_step(s, InputVector{}, RobotGeometry{}, 0.2);
  EXPECT_DOUBLE_EQ(n.x1, 0.2);
  EXPECT_EQ(n.y1, 0.0);
}

TEST(IntegrateStep, FourthOrderConvergence)
{
  // Richardson: err(dt) / err(dt/2) -> 16 for a fourth-order method.
  const RobotGeometry geom;
  const StateVector s0{0.0, 0.0, 3.0, 0.5, 0.3, 0.2, 0.4, -0.3};
  const InputVector u{0.8, -0.6, 0.4};
  const double horizon = 1.0;
  auto run = [&](int n) {
    StateVector s = s0;
    for (int i = 0; i < n; ++i)
    {
      s = mcbf::integrate_step(s, u, geom, horizon / n);
    }
    return s.to_vector();
  };
  const auto ref = run(4096);
  const double e1 = (run(8) - ref).norm();
  const double e2 = (run(16) - ref).norm();
  const double e3 = (run(32) - ref).norm();
  EXPECT_GT(std::log2(e1 / e2), 3.7);
  EXPECT_GT(std::log2(e2 / e3), 3.7);
}

TEST(IntegrateStep, AgreesWithFineEulerOracle)
{
  const RobotGeometry geom;
  const StateVector s0{1.0, 2.0, 4.0, -0.3, 1.0, -0.1, 0.2, 0.1};
  const InputVector u{-0.5, 0.3, -0.2};
  StateVector rk = mcbf::integrate_step(s0, u, geom, 0.2, 10);
  Eigen::VectorXd x = s0.to_vector();
  const double h = 1e-5;
  for (int i = 0; i < 20000; ++i)
  {
    x += h * mcbf::msttr_rhs(StateVector::from_vector(x), u, geom);
  }
  EXPECT_LT((rk.to_vector() - x).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(IntegrateStep, SubstepsMatchRepeatedSteps)
{
  const RobotGeometry geom;
  const StateVector s0{0.0, 0.0, 5.0, 0.2, 0.1, 0.05, 0.3, -0.2};
  const InputVector u{0.1, 0.2, 0.1};
  StateVector manual = s0;
  for (int i = 0; i < 10; ++i)
  {
    manual = mcbf::integrate_step(manual, u, geom, 0.02);
  }
  EXPECT_LT((mcbf::integrate_step(s0, u, geom, 0.2, 10).to_vector() - manual.to_vector()).norm(), 1e-13);
}

TEST(Footprint, ZeroStateIsAxisAligned)
{
  const RobotGeometry geom;
  const auto fp = mcbf::footprint(StateVector{}, geom);
  for (const auto& rect : {fp.tractor, fp.trailer})
  {
    for (std::size_t i = 0; i < 4; ++i)
    {
      const auto a = rect.corners[i];
      const auto b = rect.corners[(i + 1) % 4];
      EXPECT_TRUE(std::abs(a.x - b.x) < 1e-12 || std::abs(a.y - b.y) < 1e-12);
    }
  }
  // Rear edge sits rear_axle_offset behind the axle.
  EXPECT_NEAR(fp.tractor.corners[0].x, -0.6, 1e-12);
  EXPECT_NEAR(fp.tractor.corners[0].y, -1.0, 1e-12);
  EXPECT_NEAR(fp.trailer.corners[0].x, -5.5 - 1.0, 1e-12);
  EXPECT_NEAR(fp.trailer.corners[2].x, -5.5 + 6.0, 1e-12);
}

TEST(Footprint, HalfTurnIsRigidRotation)
{
  const RobotGeometry geom;
  StateVector s{2.0, 1.0, 0, 0, 0.3, 0.0, 0, 0};
  const auto a = mcbf::footprint(s, geom).tractor;
  s.theta += kPi;
  const auto b = mcbf::footprint(s, geom).tractor;
  for (std::size_t i = 0; i < 4; ++i)
  {
    // Rotating by π about the rear axle maps corner i to the reflection of corner i.
    EXPECT_NEAR(b.corners[i].x - 2.0, -(a.corners[i].x - 2.0), 1e-12);
    EXPECT_NEAR(b.corners[i].y - 1.0, -(a.corners[i].y - 1.0), 1e-12);
  }
}

TEST(Footprint, SignedDistanceMatchesPolygonOracle)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  const RobotGeometry geom;
  for (int i = 0; i < 200; ++i)
  {
    const StateVector s = random_state(rng);
    const auto fp = mcbf::footprint(s, geom);
    for (int j = 0; j < 10; ++j)
    {
      const mcbf::Point2 p{s.x1 + u(rng), s.y1 + u(rng)};
      ASSERT_NEAR(mcbf::signed_distance(fp.tractor, p), polygon_distance(fp.tractor.corners, p), 1e-9);
      ASSERT_NEAR(mcbf::signed_distance(fp.trailer, p), polygon_distance(fp.trailer.corners, p), 1e-9);
    }
  }
}

TEST(Footprint, ClearanceSubtractsRadius)
{
  const RobotGeometry geom;
  const auto fp = mcbf::footprint(StateVector{}, geom);
  // Tractor front edge at x = 3.1; obstacle centre 2 m ahead.
  EXPECT_NEAR(mcbf::clearance(fp.tractor, {5.1, 0.0, 0.5}), 1.5, 1e-12);
  EXPECT_LT(mcbf::clearance(fp.tractor, {3.5, 0.0, 0.5}), 0.0);
}

TEST(AffineDynamics, GenericStepMatchesTypedStep)
{
  const RobotGeometry geom;
  const auto dyn = mcbf::msttr_dynamics(geom);
  const StateVector s{0.0, 0.0, 3.0, 0.1, 0.2, 0.1, 0.1, 0.1};
  const InputVector u{0.3, 0.2, 0.1};
  const Eigen::VectorXd x = mcbf::integrate_step(dyn, s.to_vector(), u.to_vector(), 0.05);
  EXPECT_LT((x - mcbf::integrate_step(s, u, geom, 0.05).to_vector()).norm(), 1e-14);
}
