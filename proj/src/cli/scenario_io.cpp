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

#include "mcbf/cli/scenario_io.hpp"

#include <cmath>
#include <set>

namespace mcbf::cli
{

namespace
{

/// Typed access to one table; remembers which keys were read so that
/// leftovers can be reported as unknown.
class TableReader
{
public:
  TableReader(const TomlValue& table, const std::string& source, std::string path)
    : table_(table), source_(source), path_(std::move(path))
  {
  }

  const TomlValue* get(const std::string& key)
  {
    used_.insert(key);
    return table_.find(key);
  }

  void number(const std::string& key, double& out)
  {
    if (const TomlValue* v = get(key))
    {
      out = as_number(*v, key);
    }
  }

  void integer(const std::string& key, int& out)
  {
    if (const TomlValue* v = get(key))
    {
      const double d = as_number(*v, key);
      if (!v->integer || d < -1e9 || d > 1e9)
      {
        fail(*v, "'" + qualified(key) + "' must be an integer");
      }
      out = static_cast<int>(d);
    }
  }

  void boolean(const std::string& key, bool& out)
  {
    if (const TomlValue* v = get(key))
    {
      expect(*v, TomlValue::Kind::Bool, key);
      out = v->boolean;
    }
  }

  void string(const std::string& key, std::string& out)
  {
    if (const TomlValue* v = get(key))
    {
      expect(*v, TomlValue::Kind::String, key);
      out = v->string;
    }
  }

  template <std::size_t N>
  void numbers(const std::string& key, std::array<double, N>& out)
  {
    if (const TomlValue* v = get(key))
    {
      const std::vector<double> xs = number_list(*v, key, static_cast<int>(N));
      std::copy(xs.begin(), xs.end(), out.begin());
    }
  }

  std::vector<double> number_list(const TomlValue& v, const std::string& key, int expected_len)
  {
    expect(v, TomlValue::Kind::Array, key);
    if (expected_len >= 0 && static_cast<int>(v.array.size()) != expected_len)
    {
      fail(v, "'" + qualified(key) + "' must have " + std::to_string(expected_len) + " entries, found " +
                  std::to_string(v.array.size()));
    }
    std::vector<double> out;
    for (const TomlValue& e : v.array)
    {
      out.push_back(as_number(e, key));
    }
    return out;
  }

  TableReader sub(const std::string& key)
  {
    static const TomlValue empty;
    const TomlValue* v = get(key);
    if (v == nullptr)
    {
      return TableReader(empty, source_, qualified(key));
    }
    expect(*v, TomlValue::Kind::Table, key);
    return TableReader(*v, source_, qualified(key));
  }

  /// Raises on the first key that was never read.
  void finish() const
  {
    for (const auto& [k, v] : table_.table)
    {
      if (!used_.contains(k))
      {
        fail(v, "unknown key '" + qualified(k) + "'");
      }
    }
  }

  [[noreturn]] void fail(const TomlValue& at, const std::string& message) const
  {
    throw TomlError(source_, at.line, at.column, message);
  }

  double as_number(const TomlValue& v, const std::string& key) const
  {
    expect(v, TomlValue::Kind::Number, key);
    return v.number;
  }

  void expect(const TomlValue& v, TomlValue::Kind kind, const std::string& key) const
  {
    if (v.kind != kind)
    {
      fail(v, "'" + qualified(key) + "' must be a " + to_string(kind) + ", found " + to_string(v.kind));
    }
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  const TomlValue& table_;
  const std::string& source_;
  std::string path_;
  std::set<std::string> used_;
};

template <int N>
void diag(TableReader& r, const std::string& key, Eigen::Matrix<double, N, N>& out)
{
  if (const TomlValue* v = r.get(key))
  {
    const std::vector<double> xs = r.number_list(*v, key, N);
    out = Eigen::Matrix<double, N, 1>(Eigen::Map<const Eigen::Matrix<double, N, 1>>(xs.data())).asDiagonal();
  }
}

void read_body(TableReader r, BodyRectangle& body)
{
  r.number("length", body.length);
  r.number("width", body.width);
  r.number("rear_axle_offset", body.rear_axle_offset);
  r.finish();
}

template <typename Config, int Nx, int Nu>
void read_mpc(TableReader& r, Config& cfg)
{
  r.integer("horizon", cfg.horizon);
  r.number("ts", cfg.ts);
  diag<Nx>(r, "q_diag", cfg.Q);
  diag<Nx>(r, "p_diag", cfg.P);
  diag<Nu>(r, "r_diag", cfg.R);
  r.boolean("hard_state_boxes", cfg.hard_state_boxes);
  r.number("state_slack_weight", cfg.state_slack_weight);
  r.boolean("linearize_at_state", cfg.linearize_at_state);
}

nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

template <typename M>
nlohmann::json diagonal(const M& m)
{
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    out.push_back(m(i, i));
  }
  return out;
}

}  // namespace

Scenario scenario_from_toml(const TomlValue& doc, const std::string& source)
{
  Scenario sc;
  TableReader root(doc, source, "");
  root.string("name", sc.name);

  std::string robot = "msttr";
  root.string("robot", robot);
  if (robot == "msttr")
  {
    sc.robot = RobotKind::Msttr;
  }
  else if (robot == "ssttr")
  {
    sc.robot = RobotKind::Ssttr;
  }
  else
  {
    root.fail(*root.get("robot"), "robot must be \"msttr\" or \"ssttr\"");
  }

  std::string filter = sc.robot == RobotKind::Msttr ? "multi_cbf" : "ecbf";
  root.string("filter", filter);
  if (filter == "multi_cbf")
  {
    sc.filter = FilterKind::MultiCbf;
  }
  else if (filter == "ecbf")
  {
    sc.filter = FilterKind::Ecbf;
  }
  else if (filter == "none")
  {
    sc.filter = FilterKind::None;
  }
  else
  {
    root.fail(*root.get("filter"), "filter must be \"multi_cbf\", \"ecbf\" or \"none\"");
  }
  root.number("duration", sc.duration);

  {
    TableReader g = root.sub("geometry");
    g.number("l1", sc.geom.l1);
    g.number("l2", sc.geom.l2);
    read_body(g.sub("tractor_body"), sc.geom.tractor_body);
    read_body(g.sub("trailer_body"), sc.geom.trailer_body);
    g.finish();
  }
  {
    TableReader l = root.sub("limits");
    l.number("v_max", sc.limits.v_max);
    l.number("a_max", sc.limits.a_max);
    l.number("psi_max", sc.limits.psi_max);
    l.number("delta1_max", sc.limits.delta1_max);
    l.number("delta2_max", sc.limits.delta2_max);
    l.number("jerk_max", sc.limits.jerk_max);
    l.number("omega1_max", sc.limits.omega1_max);
    l.number("omega2_max", sc.limits.omega2_max);
    l.finish();
  }
  {
    TableReader m = root.sub("mpc");
    if (sc.robot == RobotKind::Msttr)
    {
      read_mpc<MpcConfig, 8, 3>(m, sc.mpc);
    }
    else
    {
      read_mpc<SsttrMpcConfig, 6, 2>(m, sc.ssttr_mpc);
    }
    m.finish();
  }
  {
    TableReader s = root.sub("safety");
    s.numbers("k1", sc.gains.tractor);
    s.numbers("k2", sc.gains.trailer);
    s.numbers("k_ecbf", sc.ecbf_gains);
    s.number("d1", sc.dists.tractor);
    s.number("d2", sc.dists.trailer);
    s.number("margin", sc.filter_margin);
    s.boolean("slack", sc.filter_slack);
    s.boolean("input_boxes", sc.filter_input_boxes);
    s.finish();
  }
  {
    TableReader r = root.sub("reference");
    if (const TomlValue* w = r.get("waypoints"))
    {
      r.expect(*w, TomlValue::Kind::Array, "waypoints");
      sc.reference.waypoints.clear();
      for (const TomlValue& p : w->array)
      {
        const std::vector<double> xy = r.number_list(p, "waypoints", 2);
        sc.reference.waypoints.push_back({xy[0], xy[1]});
      }
    }
    if (const TomlValue* v = r.get("speeds"))
    {
      sc.reference.speeds = r.number_list(*v, "speeds", -1);
    }
    r.number("fillet_radius", sc.reference.fillet_radius);
    r.number("accel", sc.reference.accel);
    r.finish();
  }
  {
    TableReader i = root.sub("initial");
    i.number("lateral_offset", sc.initial_lateral_offset);
    if (const TomlValue* st = i.get("state"))
    {
      const std::vector<double> x = i.number_list(*st, "state", 8);
      sc.initial_state = StateVector::from_vector(Eigen::Map<const Vector8>(x.data()));
    }
    i.finish();
  }
  {
    TableReader s = root.sub("simulation");
    s.integer("substeps", sc.substeps);
    s.finish();
  }
  if (const TomlValue* obs = root.get("obstacles"))
  {
    root.expect(*obs, TomlValue::Kind::Array, "obstacles");
    for (const TomlValue& o : obs->array)
    {
      root.expect(o, TomlValue::Kind::Table, "obstacles");
      TableReader r(o, source, "obstacles");
      Obstacle ob;
      r.number("x", ob.x);
      r.number("y", ob.y);
      r.number("radius", ob.radius);
      r.finish();
      sc.obstacles.push_back(ob);
    }
  }
  root.finish();

  try
  {
    sc.validate();
  }
  catch (const std::invalid_argument& e)
  {
    throw TomlError(source, 1, 1, e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path)
{
  return scenario_from_toml(parse_toml_file(path), path);
}

nlohmann::json scenario_to_json(const Scenario& sc, const ReferenceTrajectory& ref)
{
  using nlohmann::json;
  auto body = [](const BodyRectangle& b) {
    return json{{"length", b.length}, {"width", b.width}, {"rear_axle_offset", b.rear_axle_offset}};
  };
  json j;
  j["name"] = sc.name;
  j["robot"] = to_string(sc.robot);
  j["filter"] = to_string(sc.filter);
  j["duration"] = sc.duration;
  j["geometry"] = {{"l1", sc.geom.l1},
                   {"l2", sc.geom.l2},
                   {"tractor_body", body(sc.geom.tractor_body)},
                   {"trailer_body", body(sc.geom.trailer_body)}};
  const Limits& l = sc.limits;
  j["limits"] = {{"v_max", l.v_max},           {"a_max", l.a_max},           {"psi_max", l.psi_max},
                 {"delta1_max", l.delta1_max}, {"delta2_max", l.delta2_max}, {"jerk_max", l.jerk_max},
                 {"omega1_max", l.omega1_max}, {"omega2_max", l.omega2_max}};
  if (sc.robot == RobotKind::Msttr)
  {
    j["mpc"] = {{"horizon", sc.mpc.horizon},
                {"ts", sc.mpc.ts},
                {"q_diag", diagonal(sc.mpc.Q)},
                {"p_diag", diagonal(sc.mpc.P)},
                {"r_diag", diagonal(sc.mpc.R)},
                {"hard_state_boxes", sc.mpc.hard_state_boxes},
                {"state_slack_weight", sc.mpc.state_slack_weight},
                {"linearize_at_state", sc.mpc.linearize_at_state}};
  }
  else
  {
    j["mpc"] = {{"horizon", sc.ssttr_mpc.horizon},
                {"ts", sc.ssttr_mpc.ts},
                {"q_diag", diagonal(sc.ssttr_mpc.Q)},
                {"p_diag", diagonal(sc.ssttr_mpc.P)},
                {"r_diag", diagonal(sc.ssttr_mpc.R)},
                {"hard_state_boxes", sc.ssttr_mpc.hard_state_boxes},
                {"state_slack_weight", sc.ssttr_mpc.state_slack_weight},
                {"linearize_at_state", sc.ssttr_mpc.linearize_at_state}};
  }
  j["safety"] = {{"k1", sc.gains.tractor},       {"k2", sc.gains.trailer},  {"k_ecbf", sc.ecbf_gains},
                 {"d1", sc.dists.tractor},       {"d2", sc.dists.trailer},  {"margin", sc.filter_margin},
                 {"slack", sc.filter_slack},     {"input_boxes", sc.filter_input_boxes}};
  json wps = json::array();
  for (const Point2& p : sc.reference.waypoints)
  {
    wps.push_back({p.x, p.y});
  }
  j["reference"] = {{"waypoints", wps},
                    {"speeds", sc.reference.speeds},
                    {"fillet_radius", sc.reference.fillet_radius},
                    {"accel", sc.reference.accel}};
  j["initial"] = {{"lateral_offset", sc.initial_lateral_offset}};
  if (sc.initial_state)
  {
    const Vector8 x = sc.initial_state->to_vector();
    j["initial"]["state"] = std::vector<double>(x.data(), x.data() + 8);
  }
  j["simulation"] = {{"substeps", sc.substeps}};
  json obs = json::array();
  for (const Obstacle& o : sc.obstacles)
  {
    obs.push_back({{"x", o.x}, {"y", o.y}, {"radius", o.radius}});
  }
  j["obstacles"] = obs;
  json path = json::array();
  for (const StateVector& s : ref.states)
  {
    path.push_back({finite_or_null(s.x1), finite_or_null(s.y1)});
  }
  j["reference_path"] = path;
  return j;
}

PlotContext plot_context_from_json(const nlohmann::json& j)
{
  PlotContext c;
  c.name = j.value("name", "");
  if (j.contains("geometry"))
  {
    const auto& g = j["geometry"];
    c.geom.l1 = g.value("l1", c.geom.l1);
    c.geom.l2 = g.value("l2", c.geom.l2);
    auto body = [](const nlohmann::json& b, BodyRectangle& out) {
      out.length = b.value("length", out.length);
      out.width = b.value("width", out.width);
      out.rear_axle_offset = b.value("rear_axle_offset", out.rear_axle_offset);
    };
    if (g.contains("tractor_body"))
    {
      body(g["tractor_body"], c.geom.tractor_body);
    }
    if (g.contains("trailer_body"))
    {
      body(g["trailer_body"], c.geom.trailer_body);
    }
  }
  if (j.contains("limits"))
  {
    const auto& l = j["limits"];
    c.limits.jerk_max = l.value("jerk_max", c.limits.jerk_max);
    c.limits.omega1_max = l.value("omega1_max", c.limits.omega1_max);
    c.limits.omega2_max = l.value("omega2_max", c.limits.omega2_max);
    c.limits.a_max = l.value("a_max", c.limits.a_max);
  }
  if (j.contains("safety"))
  {
    c.dists.tractor = j["safety"].value("d1", c.dists.tractor);
    c.dists.trailer = j["safety"].value("d2", c.dists.trailer);
  }
  for (const auto& o : j.value("obstacles", nlohmann::json::array()))
  {
    c.obstacles.push_back({o.at("x").get<double>(), o.at("y").get<double>(), o.value("radius", 0.0)});
  }
  for (const auto& p : j.value("reference_path", nlohmann::json::array()))
  {
    if (p.size() == 2 && p[0].is_number() && p[1].is_number())
    {
      c.reference_path.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  return c;
}

}  // namespace mcbf::cli
