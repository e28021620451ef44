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

#include "mcbf/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mcbf::cli
{

namespace
{

nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json optional_time(const std::optional<double>& t)
{
  return t ? nlohmann::json(*t) : nlohmann::json(nullptr);
}

[[noreturn]] void csv_fail(const std::string& source, int line, int column, const std::string& message)
{
  std::ostringstream os;
  os << source << ":" << line << ":" << column << ": " << message;
  throw std::runtime_error(os.str());
}

const char* const kStateNames[] = {"x1", "y1", "v", "a", "theta", "psi", "delta1", "delta2"};

}  // namespace

std::string format_double(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::string& path, const std::string& content)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw std::runtime_error(tmp.string() + ": cannot open for writing");
    }
    out << content;
    out.flush();
    if (!out)
    {
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp);
    throw std::runtime_error(path + ": rename failed: " + ec.message());
  }
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error(path + ": cannot open file");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string log_to_csv(const TrajectoryLog& log)
{
  const bool ssttr = log.robot() == RobotKind::Ssttr;
  const char* first_input = ssttr ? "accel" : "jerk";
  std::string out = "t";
  for (const char* n : kStateNames)
  {
    out += std::string(",") + n;
  }
  for (const char* prefix : {"unom_", "usafe_"})
  {
    out += std::string(",") + prefix + first_input + "," + prefix + "omega1," + prefix + "omega2";
  }
  for (std::size_t k = 0; k < log.n_obstacles(); ++k)
  {
    out += ",h1_" + std::to_string(k);
  }
  for (std::size_t k = 0; k < log.n_obstacles(); ++k)
  {
    out += ",h2_" + std::to_string(k);
  }
  out += ",filter_active,min_clearance,mpc_cost\n";

  for (const LogEntry& e : log.entries())
  {
    out += format_double(e.t);
    const Vector8 x = e.state.to_vector();
    for (int i = 0; i < 8; ++i)
    {
      out += "," + format_double(x(i));
    }
    for (const InputVector& u : {e.u_nominal, e.u_safe})
    {
      out += "," + format_double(u.jerk) + "," + format_double(u.omega1) + "," + format_double(u.omega2);
    }
    for (double h : e.h_tractor)
    {
      out += "," + format_double(h);
    }
    for (double h : e.h_trailer)
    {
      out += "," + format_double(h);
    }
    out += e.filter_active ? ",1," : ",0,";
    out += format_double(e.min_clearance) + "," + format_double(e.mpc_cost) + "\n";
  }
  return out;
}

TrajectoryLog log_from_csv(const std::string& text, const std::string& source)
{
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto split = [](const std::string& s) {
    std::vector<std::pair<std::string, int>> cells;
    std::size_t start = 0;
    while (true)
    {
      const std::size_t comma = s.find(',', start);
      cells.emplace_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start),
                         static_cast<int>(start) + 1);
      if (comma == std::string::npos)
      {
        break;
      }
      start = comma + 1;
    }
    return cells;
  };
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r')
    {
      s.pop_back();
    }
  };

  if (!std::getline(in, line))
  {
    csv_fail(source, 1, 1, "empty file, expected a header row");
  }
  ++line_no;
  strip_cr(line);
  const auto header = split(line);
  const std::size_t fixed = 1 + 8 + 6 + 3;
  if (header.size() < fixed || (header.size() - fixed) % 2 != 0)
  {
    csv_fail(source, 1, 1, "unexpected column count " + std::to_string(header.size()));
  }
  const std::size_t n_obs = (header.size() - fixed) / 2;
  RobotKind robot = RobotKind::Msttr;
  if (header[9].first == "unom_accel")
  {
    robot = RobotKind::Ssttr;
  }
  else if (header[9].first != "unom_jerk")
  {
    csv_fail(source, 1, header[9].second, "expected column 'unom_jerk' or 'unom_accel', found '" + header[9].first + "'");
  }
  std::vector<std::string> expected{"t"};
  for (const char* n : kStateNames)
  {
    expected.emplace_back(n);
  }
  const std::string first_input = robot == RobotKind::Ssttr ? "accel" : "jerk";
  for (const char* prefix : {"unom_", "usafe_"})
  {
    expected.push_back(prefix + first_input);
    expected.push_back(std::string(prefix) + "omega1");
    expected.push_back(std::string(prefix) + "omega2");
  }
  for (std::size_t k = 0; k < n_obs; ++k)
  {
    expected.push_back("h1_" + std::to_string(k));
  }
  for (std::size_t k = 0; k < n_obs; ++k)
  {
    expected.push_back("h2_" + std::to_string(k));
  }
  expected.insert(expected.end(), {"filter_active", "min_clearance", "mpc_cost"});
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    if (header[i].first != expected[i])
    {
      csv_fail(source, 1, header[i].second, "expected column '" + expected[i] + "', found '" + header[i].first + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  while (std::getline(in, line))
  {
    ++line_no;
    strip_cr(line);
    if (line.empty())
    {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != header.size())
    {
      csv_fail(source, line_no, 1,
               "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& [cell, col] : cells)
    {
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      const auto res = std::from_chars(first, last, v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != last)
      {
        csv_fail(source, line_no, col, "invalid number '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }

  const double ts = rows.size() >= 2 ? rows[1][0] - rows[0][0] : 0.2;
  TrajectoryLog log(robot, ts, n_obs);
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    const std::vector<double>& v = rows[r];
    LogEntry e;
    e.t = v[0];
    e.state = StateVector::from_vector(Eigen::Map<const Vector8>(v.data() + 1));
    e.u_nominal = {v[9], v[10], v[11]};
    e.u_safe = {v[12], v[13], v[14]};
    e.h_tractor.assign(v.begin() + 15, v.begin() + 15 + static_cast<std::ptrdiff_t>(n_obs));
    e.h_trailer.assign(v.begin() + 15 + static_cast<std::ptrdiff_t>(n_obs),
                       v.begin() + 15 + static_cast<std::ptrdiff_t>(2 * n_obs));
    const std::size_t tail = 15 + 2 * n_obs;
    e.filter_active = v[tail] != 0.0;
    e.min_clearance = v[tail + 1];
    e.mpc_cost = v[tail + 2];
    try
    {
      log.append(std::move(e));
    }
    catch (const std::exception& ex)
    {
      csv_fail(source, row_lines[r], 1, ex.what());
    }
  }
  return log;
}

nlohmann::json metrics_to_json(const RunResult& result, const Scenario& sc)
{
  using nlohmann::json;
  const RunMetrics& m = result.metrics;
  json per = json::array();
  for (const BarrierMinimum& b : m.min_h)
  {
    per.push_back({{"body", to_string(b.body)},
                   {"obstacle", b.obstacle_index},
                   {"min_h", finite_or_null(b.min_h)},
                   {"t_at_min", b.t_at_min}});
  }
  return json{{"schema_version", 1},
              {"scenario", sc.name},
              {"robot", to_string(sc.robot)},
              {"filter", to_string(sc.filter)},
              {"status", to_string(result.status)},
              {"error", result.error},
              {"steps", m.steps},
              {"collision", m.collision},
              {"min_footprint_clearance", finite_or_null(m.min_footprint_clearance)},
              {"min_clearance_tractor", finite_or_null(m.min_clearance_tractor)},
              {"min_clearance_trailer", finite_or_null(m.min_clearance_trailer)},
              {"min_h_tractor", finite_or_null(m.min_h_tractor)},
              {"min_h_trailer", finite_or_null(m.min_h_trailer)},
              {"min_h", per},
              {"rms_tracking_error", m.rms_tracking_error},
              {"rms_tracking_error_final_10s", m.rms_tracking_error_final_10s},
              {"filter_activation_count", m.filter_activation_count},
              {"filter_slack_total", m.filter_slack_total},
              {"mpc_slack_total", m.mpc_slack_total},
              {"mpc_softened_steps", m.mpc_softened_steps}};
}

nlohmann::json audit_to_json(const AuditReport& audit)
{
  using nlohmann::json;
  json barriers = json::array();
  for (const BarrierAudit& b : audit.barriers)
  {
    json levels = json::array();
    for (double v : b.min_m)
    {
      levels.push_back(finite_or_null(v));
    }
    barriers.push_back({{"body", to_string(b.body)},
                        {"obstacle", b.obstacle_index},
                        {"min_m", levels},
                        {"first_violation_t", optional_time(b.first_violation_t)}});
  }
  return json{{"schema_version", 1},
              {"passed", audit.passed()},
              {"tolerance", audit.tolerance},
              {"violation_count", audit.violation_count},
              {"first_violation_t", optional_time(audit.first_violation_t)},
              {"min_h", finite_or_null(audit.min_h)},
              {"min_cascade", finite_or_null(audit.min_cascade)},
              {"regularity",
               {{"checked", audit.regularity_checked},
                {"min_p_star", finite_or_null(audit.min_p_star)},
                {"nonpositive_count", audit.nonpositive_p_star}}},
              {"barriers", barriers}};
}

}  // namespace mcbf::cli
