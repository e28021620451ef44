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

#include "mcbf/cli/commands.hpp"
#include "mcbf/cli/io.hpp"
#include "mcbf/cli/plot.hpp"
#include "mcbf/cli/scenario_io.hpp"
#include "mcbf/cli/toml.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using mcbf::cli::TomlError;

namespace
{

const std::string kScenarioDir = MCBF_SCENARIO_DIR;
const std::string kGoldenDir = MCBF_GOLDEN_DIR;

fs::path scratch_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("mcbf_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::pair<int, int> error_position(const std::string& text)
{
  try
  {
    mcbf::cli::scenario_from_toml(mcbf::cli::parse_toml(text, "s.toml"), "s.toml");
  }
  catch (const TomlError& e)
  {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

mcbf::TrajectoryLog random_log(mcbf::RobotKind robot, std::size_t n_obs, int rows)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 10.0);
  mcbf::TrajectoryLog log(robot, 0.2, n_obs);
  for (int i = 0; i < rows; ++i)
  {
    mcbf::LogEntry e;
    e.t = 0.2 * i;
    e.state = {g(rng), g(rng), g(rng), g(rng), g(rng), g(rng), g(rng), robot == mcbf::RobotKind::Ssttr ? 0.0 : g(rng)};
    e.u_nominal = {g(rng), g(rng), 1e-300 * g(rng)};
    e.u_safe = {g(rng) / 3.0, g(rng) * 1e12, 0.1};
    for (std::size_t k = 0; k < n_obs; ++k)
    {
      e.h_tractor.push_back(g(rng));
      e.h_trailer.push_back(g(rng));
    }
    e.filter_active = i % 3 == 0;
    e.min_clearance = i == 0 ? std::numeric_limits<double>::infinity() : g(rng);
    e.mpc_cost = g(rng);
    log.append(e);
  }
  return log;
}

int count(const std::string& text, const std::string& needle)
{
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
  {
    ++n;
  }
  return n;
}

}  // namespace

TEST(Toml, ParsesNestedTablesArraysAndComments)
{
  const auto doc = mcbf::cli::parse_toml(R"(
name = "a \"b\"" # trailing comment
[outer.inner]
xs = [1, 2.5,
      -3e2]  # spans lines
flag = true
[[items]]
v = 1_000
[[items]]
v = -inf
)",
                                         "t");
  EXPECT_EQ(doc.find("name")->string, "a \"b\"");
  const auto* inner = doc.find("outer")->find("inner");
  ASSERT_NE(inner, nullptr);
  ASSERT_EQ(inner->find("xs")->array.size(), 3u);
  EXPECT_EQ(inner->find("xs")->array[2].number, -300.0);
  EXPECT_TRUE(inner->find("flag")->boolean);
  const auto& items = doc.find("items")->array;
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].find("v")->number, 1000.0);
  EXPECT_TRUE(items[0].find("v")->integer);
  EXPECT_TRUE(std::isinf(items[1].find("v")->number));
}

TEST(Toml, SyntaxErrorsCarryLineAndColumn)
{
  try
  {
    mcbf::cli::parse_toml("a = 1\nb = [1, 2\nc = 3\n", "bad.toml");
    FAIL() << "expected a parse error";
  }
  catch (const TomlError& e)
  {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(std::string(e.what()).rfind("bad.toml:3:", 0), 0u) << e.what();
  }
  try
  {
    mcbf::cli::parse_toml("x = 1\nx = 2\n", "dup.toml");
    FAIL() << "expected a duplicate-key error";
  }
  catch (const TomlError& e)
  {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 1);
  }
  EXPECT_THROW(mcbf::cli::parse_toml("v = 1.2.3\n", "n"), TomlError);
  EXPECT_THROW(mcbf::cli::parse_toml("s = \"open\n", "n"), TomlError);
}

TEST(ScenarioToml, UnknownKeysAndWrongTypesArePinpointed)
{
  EXPECT_EQ(error_position("name = \"x\"\n[limits]\nv_max = 20.0\n  jerk_maxx = 2.5\n"), std::make_pair(4, 15));
  EXPECT_EQ(error_position("[mpc]\nhorizon = \"five\"\n"), std::make_pair(2, 11));
  EXPECT_EQ(error_position("[mpc]\nq_diag = [1.0, 2.0]\n"), std::make_pair(2, 10));
  EXPECT_EQ(error_position("robot = \"msttr\"\nfilter = \"ecbf\"\n").first, 1);
}

TEST(ScenarioToml, ShippedScenariosLoad)
{
  for (const char* name : {"turn90_msttr", "turn90_ssttr_ecbf", "cluttered_msttr"})
  {
    const mcbf::Scenario sc = mcbf::cli::load_scenario(kScenarioDir + "/" + name + ".toml");
    EXPECT_EQ(sc.name, name);
    EXPECT_EQ(sc.limits.jerk_max, 2.5);
    EXPECT_EQ(sc.limits.omega1_max, 1.5);
    EXPECT_EQ(sc.limits.omega2_max, 0.5);
    EXPECT_EQ(sc.geom.l1, 2.5);
    EXPECT_EQ(sc.geom.l2, 5.5);
    EXPECT_EQ(sc.ts(), 0.2);
    EXPECT_EQ(sc.dists.tractor, 4.6);
    EXPECT_EQ(sc.dists.trailer, 3.0);
  }
  const auto turn_m = mcbf::cli::load_scenario(kScenarioDir + "/turn90_msttr.toml");
  const auto turn_s = mcbf::cli::load_scenario(kScenarioDir + "/turn90_ssttr_ecbf.toml");
  ASSERT_EQ(turn_m.obstacles.size(), turn_s.obstacles.size());
  for (std::size_t k = 0; k < turn_m.obstacles.size(); ++k)
  {
    EXPECT_EQ(turn_m.obstacles[k].x, turn_s.obstacles[k].x);
    EXPECT_EQ(turn_m.obstacles[k].y, turn_s.obstacles[k].y);
    EXPECT_EQ(turn_m.obstacles[k].radius, turn_s.obstacles[k].radius);
  }
  EXPECT_EQ(mcbf::cli::load_scenario(kScenarioDir + "/cluttered_msttr.toml").obstacles.size(), 8u);
}

TEST(Csv, FormatDoubleRoundTrips)
{
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i)
  {
    double v = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(v))
    {
      continue;
    }
    EXPECT_EQ(std::stod(mcbf::cli::format_double(v)), v);
  }
  EXPECT_EQ(mcbf::cli::format_double(0.2), "0.2");
  EXPECT_EQ(mcbf::cli::format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, LogRoundTripIsLossless)
{
  for (auto robot : {mcbf::RobotKind::Msttr, mcbf::RobotKind::Ssttr})
  {
    const auto log = random_log(robot, 3, 25);
    const std::string csv = mcbf::cli::log_to_csv(log);
    const auto back = mcbf::cli::log_from_csv(csv);
    EXPECT_EQ(back, log);
    EXPECT_EQ(mcbf::cli::log_to_csv(back), csv);
  }
  const auto empty = mcbf::cli::log_from_csv(mcbf::cli::log_to_csv(mcbf::TrajectoryLog(mcbf::RobotKind::Msttr, 0.2, 2)));
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.n_obstacles(), 2u);
}

TEST(Csv, HeaderNamesEveryColumn)
{
  const std::string csv = mcbf::cli::log_to_csv(random_log(mcbf::RobotKind::Msttr, 2, 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "t,x1,y1,v,a,theta,psi,delta1,delta2,unom_jerk,unom_omega1,unom_omega2,usafe_jerk,usafe_omega1,"
            "usafe_omega2,h1_0,h1_1,h2_0,h2_1,filter_active,min_clearance,mpc_cost");
}

TEST(Csv, MalformedCellsReportPosition)
{
  std::string csv = mcbf::cli::log_to_csv(random_log(mcbf::RobotKind::Msttr, 1, 3));
  const std::size_t line4 = csv.find('\n', csv.find('\n', csv.find('\n') + 1) + 1) + 1;
  const std::size_t cell = csv.find(',', line4) + 1;
  csv.replace(cell, csv.find(',', cell) - cell, "abc");
  try
  {
    mcbf::cli::log_from_csv(csv, "log.csv");
    FAIL() << "expected a parse error";
  }
  catch (const std::runtime_error& e)
  {
    const std::string where = "log.csv:4:" + std::to_string(cell - line4 + 1) + ": ";
    EXPECT_EQ(std::string(e.what()).rfind(where, 0), 0u) << e.what();
  }
  EXPECT_THROW(mcbf::cli::log_from_csv("t,x1\n", "h.csv"), std::runtime_error);
}

TEST(Plot, EmptyLogGivesAxesOnly)
{
  const mcbf::TrajectoryLog log(mcbf::RobotKind::Msttr, 0.2, 0);
  for (auto kind : {mcbf::cli::PlotKind::Path, mcbf::cli::PlotKind::Inputs, mcbf::cli::PlotKind::Barriers,
                    mcbf::cli::PlotKind::Footprint})
  {
    const std::string svg = mcbf::cli::render_plot(log, kind, std::nullopt);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("class=\"axes\""), std::string::npos);
    EXPECT_EQ(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(Plot, InputLimitLinesSitAtTheBoxBounds)
{
  const auto log = random_log(mcbf::RobotKind::Msttr, 1, 10);
  const std::string svg = mcbf::cli::render_plot(log, mcbf::cli::PlotKind::Inputs, std::nullopt);
  EXPECT_EQ(count(svg, "stroke-dasharray=\"5 3\""), 6);
  EXPECT_NE(svg.find("J [m/s^3]"), std::string::npos);
  EXPECT_NE(svg.find("omega2 [rad/s]"), std::string::npos);
  EXPECT_EQ(mcbf::cli::parse_plot_kind("heatmap"), std::nullopt);
}

TEST(Commands, MissingScenarioFails)
{
  std::ostringstream out;
  std::ostringstream err;
  mcbf::cli::RunOptions opt;
  opt.scenario_path = "/nonexistent/scenario.toml";
  opt.out_dir = scratch_dir("missing").string();
  EXPECT_NE(mcbf::cli::cmd_run(opt, out, err), 0);
  EXPECT_NE(err.str().find("/nonexistent/scenario.toml"), std::string::npos);
}

TEST(Commands, RunWritesOutputsAndPlotsReadThem)
{
  const fs::path dir = scratch_dir("run");
  std::ostringstream out;
  std::ostringstream err;
  mcbf::cli::RunOptions opt;
  opt.scenario_path = kScenarioDir + "/turn90_msttr.toml";
  opt.out_dir = dir.string();
  ASSERT_EQ(mcbf::cli::cmd_run(opt, out, err), 0) << err.str();
  for (const char* f : {"trajectory.csv", "metrics.json", "audit.json", "scenario.json"})
  {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto metrics = nlohmann::json::parse(mcbf::cli::read_file((dir / "metrics.json").string()));
  EXPECT_FALSE(metrics.at("collision").get<bool>());
  const auto audit = nlohmann::json::parse(mcbf::cli::read_file((dir / "audit.json").string()));
  EXPECT_TRUE(audit.at("passed").get<bool>());

  for (const char* kind : {"path", "inputs", "barriers", "footprint"})
  {
    mcbf::cli::PlotOptions p{(dir / "trajectory.csv").string(), kind, (dir / (std::string(kind) + ".svg")).string(), ""};
    ASSERT_EQ(mcbf::cli::cmd_plot(p, out, err), 0) << err.str();
    const std::string svg = mcbf::cli::read_file(p.out_path);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    if (std::string(kind) == "path")
    {
      EXPECT_EQ(count(svg, "<circle"), 6);  // two obstacles, each with two distance circles
    }
  }
  mcbf::cli::PlotOptions bad{(dir / "trajectory.csv").string(), "heatmap", (dir / "x.svg").string(), ""};
  EXPECT_NE(mcbf::cli::cmd_plot(bad, out, err), 0);
}

TEST(Commands, SafeRunBarrierPlotStaysAboveZero)
{
  const fs::path dir = scratch_dir("barriers");
  std::ostringstream out;
  std::ostringstream err;
  mcbf::cli::RunOptions opt;
  opt.scenario_path = kScenarioDir + "/turn90_msttr.toml";
  opt.out_dir = dir.string();
  ASSERT_EQ(mcbf::cli::cmd_run(opt, out, err), 0);
  const auto log = mcbf::cli::log_from_csv(mcbf::cli::read_file((dir / "trajectory.csv").string()));
  for (const auto& e : log.entries())
  {
    for (std::size_t k = 0; k < log.n_obstacles(); ++k)
    {
      EXPECT_GE(e.h_tractor[k], 0.0);
      EXPECT_GE(e.h_trailer[k], 0.0);
    }
  }
}

TEST(Commands, MetricsMatchGoldenFiles)
{
  for (const char* name : {"turn90_msttr", "turn90_ssttr_ecbf", "cluttered_msttr"})
  {
    const fs::path dir = scratch_dir(std::string("golden_") + name);
    std::ostringstream out;
    std::ostringstream err;
    mcbf::cli::RunOptions opt;
    opt.scenario_path = kScenarioDir + "/" + name + ".toml";
    opt.out_dir = dir.string();
    ASSERT_EQ(mcbf::cli::cmd_run(opt, out, err), 0) << err.str();
    const auto got = nlohmann::json::parse(mcbf::cli::read_file((dir / "metrics.json").string()));
    const auto want = nlohmann::json::parse(mcbf::cli::read_file(kGoldenDir + "/" + name + ".metrics.json"));
    const auto flat_got = got.flatten();
    const auto flat_want = want.flatten();
    ASSERT_EQ(flat_got.size(), flat_want.size()) << name;
    for (const auto& [key, value] : flat_want.items())
    {
      ASSERT_TRUE(flat_got.contains(key)) << name << " " << key;
      const auto& g = flat_got.at(key);
      if (value.is_number_float())
      {
        EXPECT_NEAR(g.get<double>(), value.get<double>(), 1e-6 * std::max(1.0, std::abs(value.get<double>())))
            << name << " " << key;
      }
      else
      {
        EXPECT_EQ(g, value) << name << " " << key;
      }
    }
  }
}

TEST(Commands, RepeatedRunsAreByteIdentical)
{
  std::ostringstream out;
  std::ostringstream err;
  mcbf::cli::RunOptions opt;
  opt.scenario_path = kScenarioDir + "/turn90_ssttr_ecbf.toml";
  opt.out_dir = scratch_dir("det1").string();
  ASSERT_EQ(mcbf::cli::cmd_run(opt, out, err), 0);
  const std::string first = mcbf::cli::read_file(opt.out_dir + "/trajectory.csv");
  opt.out_dir = scratch_dir("det2").string();
  ASSERT_EQ(mcbf::cli::cmd_run(opt, out, err), 0);
  EXPECT_EQ(mcbf::cli::read_file(opt.out_dir + "/trajectory.csv"), first);
}

TEST(Commands, VerifyDetectsInjectedFault)
{
  mcbf::cli::VerifyOptions opt;
  opt.qp_problems = 20;
  opt.a57_offset = 1e-3;
  const auto results = mcbf::cli::run_verify(opt);
  bool a57_failed = false;
  for (const auto& r : results)
  {
    if (r.name.find("a_57") != std::string::npos)
    {
      a57_failed = !r.passed;
    }
  }
  EXPECT_TRUE(a57_failed);
  std::ostringstream out;
  EXPECT_NE(mcbf::cli::cmd_verify(opt, out), 0);
  EXPECT_NE(out.str().find("FAIL"), std::string::npos);
}
