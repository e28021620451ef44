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

#include "mcbf/cli/plot.hpp"

#include "mcbf/cli/io.hpp"
#include "mcbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace mcbf::cli
{

namespace
{

constexpr double kPanelWidth = 760.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 45.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                "#17becf"};

std::string num(double v)
{
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string escape(const std::string& text)
{
  std::string out;
  for (char c : text)
  {
    switch (c)
    {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

struct Range
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v)
  {
    if (std::isfinite(v))
    {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  Range padded(double fraction) const
  {
    Range r = *this;
    if (!(r.lo <= r.hi))
    {
      r.lo = 0.0;
      r.hi = 1.0;
    }
    if (r.hi - r.lo < 1e-9)
    {
      r.lo -= 0.5;
      r.hi += 0.5;
    }
    const double pad = (r.hi - r.lo) * fraction;
    r.lo -= pad;
    r.hi += pad;
    return r;
  }
};

std::vector<double> nice_ticks(double lo, double hi)
{
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
  {
    step = m * mag;
    if (step >= raw)
    {
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
  {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

/// One set of axes inside the document, mapping data to pixel coordinates.
class Panel
{
public:
  Panel(double top, double height, Range xr, Range yr, std::string title, std::string xlabel, std::string ylabel)
    : top_(top), height_(height), x_(xr), y_(yr), title_(std::move(title)), xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel))
  {
  }

  double px(double x) const { return kMarginLeft + (x - x_.lo) / (x_.hi - x_.lo) * plot_width(); }
  double py(double y) const { return top_ + kMarginTop + (y_.hi - y) / (y_.hi - y_.lo) * plot_height(); }
  double plot_width() const { return kPanelWidth - kMarginLeft - kMarginRight; }
  double plot_height() const { return height_ - kMarginTop - kMarginBottom; }
  double x_scale() const { return plot_width() / (x_.hi - x_.lo); }

  void axes(std::ostringstream& out) const
  {
    const double left = kMarginLeft;
    const double right = kMarginLeft + plot_width();
    const double top = top_ + kMarginTop;
    const double bottom = top + plot_height();
    out << "<g class=\"axes\">\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_width())
        << "\" height=\"" << num(plot_height()) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : nice_ticks(x_.lo, x_.hi))
    {
      out << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(px(t)) << "\" y2=\""
          << num(bottom + 5) << "\" stroke=\"#333\"/>";
      out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(bottom + 18)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    }
    for (double t : nice_ticks(y_.lo, y_.hi))
    {
      out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left) << "\" y2=\""
          << num(py(t)) << "\" stroke=\"#333\"/>";
      out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(t) + 4)
          << "\" font-size=\"11\" text-anchor=\"end\">" << num(t) << "</text>\n";
    }
    out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(top - 12)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(title_) << "</text>\n";
    out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 36)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(xlabel_) << "</text>\n";
    out << "<text x=\"16\" y=\"" << num((top + bottom) / 2) << "\" font-size=\"12\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 16 " << num((top + bottom) / 2) << ")\">" << escape(ylabel_) << "</text>\n";
    out << "</g>\n";
  }

  void polyline(std::ostringstream& out, const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, const std::string& extra = "") const
  {
    std::ostringstream pts;
    bool any = false;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
      if (std::isfinite(xs[i]) && std::isfinite(ys[i]))
      {
        pts << (any ? " " : "") << num(px(xs[i])) << "," << num(py(ys[i]));
        any = true;
      }
    }
    if (any)
    {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" " << extra << " points=\""
          << pts.str() << "\"/>\n";
    }
  }

  void hline(std::ostringstream& out, double y, const std::string& color, const std::string& dash) const
  {
    if (y < y_.lo || y > y_.hi)
    {
      return;
    }
    out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\""
        << num(kMarginLeft + plot_width()) << "\" y2=\"" << num(py(y)) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"" << dash << "\"/>\n";
  }

  void legend(std::ostringstream& out, const std::vector<std::pair<std::string, std::string>>& items) const
  {
    double y = top_ + kMarginTop + 14;
    const double x = kMarginLeft + plot_width() - 150;
    for (const auto& [label, color] : items)
    {
      out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(x + 20) << "\" y2=\""
          << num(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
      out << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y) << "\" font-size=\"11\">" << escape(label)
          << "</text>\n";
      y += 15;
    }
  }

private:
  double top_;
  double height_;
  Range x_;
  Range y_;
  std::string title_;
  std::string xlabel_;
  std::string ylabel_;
};

std::string document(double height, const std::string& body)
{
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kPanelWidth) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(kPanelWidth) << " " << num(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << body;
  out << "</svg>\n";
  return out.str();
}

std::vector<double> column(const TrajectoryLog& log, const std::function<double(const LogEntry&)>& f)
{
  std::vector<double> out;
  out.reserve(log.size());
  for (const LogEntry& e : log.entries())
  {
    out.push_back(f(e));
  }
  return out;
}

/// Equal-aspect range in the plane covering the log, reference and obstacles.
std::pair<Range, Range> plane_ranges(const TrajectoryLog& log, const PlotContext& ctx, double pad)
{
  Range xr;
  Range yr;
  for (const LogEntry& e : log.entries())
  {
    const TrailerPose tp = trailer_pose(e.state, ctx.geom);
    xr.add(e.state.x1);
    yr.add(e.state.y1);
    xr.add(tp.x2);
    yr.add(tp.y2);
  }
  for (const Point2& p : ctx.reference_path)
  {
    xr.add(p.x);
    yr.add(p.y);
  }
  for (const Obstacle& o : ctx.obstacles)
  {
    const double r = std::max({o.radius, ctx.dists.tractor, ctx.dists.trailer});
    xr.add(o.x - r);
    xr.add(o.x + r);
    yr.add(o.y - r);
    yr.add(o.y + r);
  }
  xr = xr.padded(pad);
  yr = yr.padded(pad);
  return {xr, yr};
}

double plane_height(const Range& xr, const Range& yr)
{
  const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
  const double plot_h = plot_w * (yr.hi - yr.lo) / (xr.hi - xr.lo);
  return std::clamp(plot_h, 120.0, 1400.0) + kMarginTop + kMarginBottom;
}

/// Grows one range so that both axes use the same metres-per-pixel scale.
void equalize(Range& xr, Range& yr, double plot_w, double plot_h)
{
  const double sx = (xr.hi - xr.lo) / plot_w;
  const double sy = (yr.hi - yr.lo) / plot_h;
  if (sx > sy)
  {
    const double grow = (sx * plot_h - (yr.hi - yr.lo)) / 2;
    yr.lo -= grow;
    yr.hi += grow;
  }
  else
  {
    const double grow = (sy * plot_w - (xr.hi - xr.lo)) / 2;
    xr.lo -= grow;
    xr.hi += grow;
  }
}

void draw_obstacles(std::ostringstream& out, const Panel& p, const PlotContext& ctx)
{
  out << "<g class=\"obstacles\">\n";
  for (const Obstacle& o : ctx.obstacles)
  {
    const double cx = p.px(o.x);
    const double cy = p.py(o.y);
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(o.radius * p.x_scale())
        << "\" fill=\"#888\" fill-opacity=\"0.6\" stroke=\"#444\"/>\n";
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(ctx.dists.tractor * p.x_scale())
        << "\" fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-dasharray=\"4 3\"/>\n";
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(ctx.dists.trailer * p.x_scale())
        << "\" fill=\"none\" stroke=\"" << kPalette[1] << "\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "</g>\n";
}

void draw_reference(std::ostringstream& out, const Panel& p, const PlotContext& ctx)
{
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Point2& q : ctx.reference_path)
  {
    xs.push_back(q.x);
    ys.push_back(q.y);
  }
  p.polyline(out, xs, ys, "#555", "stroke-dasharray=\"6 4\"");
}

void draw_rect(std::ostringstream& out, const Panel& p, const OrientedRect& r, const std::string& color)
{
  out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"" << color << "\" points=\"";
  for (std::size_t i = 0; i < r.corners.size(); ++i)
  {
    out << (i ? " " : "") << num(p.px(r.corners[i].x)) << "," << num(p.py(r.corners[i].y));
  }
  out << "\"/>\n";
}

std::string plane_plot(const TrajectoryLog& log, const PlotContext& ctx, bool footprints)
{
  auto [xr, yr] = plane_ranges(log, ctx, 0.05);
  const double height = plane_height(xr, yr);
  const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
  equalize(xr, yr, plot_w, height - kMarginTop - kMarginBottom);
  const std::string title = (footprints ? "Footprints" : "Path") + (ctx.name.empty() ? "" : ": " + ctx.name);
  Panel p(0.0, height, xr, yr, title, "x [m]", "y [m]");

  std::ostringstream out;
  p.axes(out);
  draw_obstacles(out, p, ctx);
  draw_reference(out, p, ctx);
  if (footprints && !log.empty())
  {
    const std::size_t stride = std::max<std::size_t>(1, log.size() / 25);
    out << "<g class=\"footprints\">\n";
    for (std::size_t i = 0; i < log.size(); i += stride)
    {
      const Footprint fp = footprint(log.entries()[i].state, ctx.geom);
      draw_rect(out, p, fp.trailer, kPalette[1]);
      draw_rect(out, p, fp.tractor, kPalette[0]);
    }
    out << "</g>\n";
  }
  const auto x2 = column(log, [&](const LogEntry& e) { return trailer_pose(e.state, ctx.geom).x2; });
  const auto y2 = column(log, [&](const LogEntry& e) { return trailer_pose(e.state, ctx.geom).y2; });
  p.polyline(out, column(log, [](const LogEntry& e) { return e.state.x1; }),
             column(log, [](const LogEntry& e) { return e.state.y1; }), kPalette[0]);
  p.polyline(out, x2, y2, kPalette[1]);
  p.legend(out, {{"tractor axle", kPalette[0]}, {"trailer axle", kPalette[1]}, {"reference", "#555"}});
  return document(height, out.str());
}

Range time_range(const TrajectoryLog& log)
{
  Range r;
  for (const LogEntry& e : log.entries())
  {
    r.add(e.t);
  }
  return r.padded(0.0);
}

std::string inputs_plot(const TrajectoryLog& log, const PlotContext& ctx)
{
  const bool ssttr = log.robot() == RobotKind::Ssttr;
  struct Channel
  {
    std::string label;
    double limit;
    std::function<double(const InputVector&)> get;
  };
  std::vector<Channel> channels;
  channels.push_back({ssttr ? "a [m/s^2]" : "J [m/s^3]", ssttr ? ctx.limits.a_max : ctx.limits.jerk_max,
                      [](const InputVector& u) { return u.jerk; }});
  channels.push_back({"omega1 [rad/s]", ctx.limits.omega1_max, [](const InputVector& u) { return u.omega1; }});
  if (!ssttr)
  {
    channels.push_back({"omega2 [rad/s]", ctx.limits.omega2_max, [](const InputVector& u) { return u.omega2; }});
  }

  const double panel_h = 220.0;
  const Range tr = time_range(log);
  std::ostringstream out;
  for (std::size_t c = 0; c < channels.size(); ++c)
  {
    const Channel& ch = channels[c];
    Range yr;
    yr.add(-ch.limit);
    yr.add(ch.limit);
    const auto nominal = column(log, [&](const LogEntry& e) { return ch.get(e.u_nominal); });
    const auto safe = column(log, [&](const LogEntry& e) { return ch.get(e.u_safe); });
    for (double v : nominal)
    {
      yr.add(v);
    }
    for (double v : safe)
    {
      yr.add(v);
    }
    Panel p(panel_h * static_cast<double>(c), panel_h, tr, yr.padded(0.08), c == 0 ? "Inputs" : "", "t [s]",
            ch.label);
    p.axes(out);
    p.hline(out, ch.limit, "#999", "5 3");
    p.hline(out, -ch.limit, "#999", "5 3");
    const auto t = column(log, [](const LogEntry& e) { return e.t; });
    p.polyline(out, t, nominal, kPalette[0], "stroke-dasharray=\"4 2\"");
    p.polyline(out, t, safe, kPalette[1]);
    if (c == 0)
    {
      p.legend(out, {{"nominal", kPalette[0]}, {"filtered", kPalette[1]}, {"limit", "#999"}});
    }
  }
  return document(panel_h * static_cast<double>(channels.size()), out.str());
}

std::string barriers_plot(const TrajectoryLog& log)
{
  const double panel_h = 300.0;
  const Range tr = time_range(log);
  const auto t = column(log, [](const LogEntry& e) { return e.t; });
  std::ostringstream out;
  for (int b = 0; b < 2; ++b)
  {
    const bool tractor = b == 0;
    Range yr;
    yr.add(0.0);
    std::vector<std::vector<double>> series;
    for (std::size_t k = 0; k < log.n_obstacles(); ++k)
    {
      series.push_back(column(log, [&](const LogEntry& e) { return tractor ? e.h_tractor[k] : e.h_trailer[k]; }));
      for (double v : series.back())
      {
        yr.add(v);
      }
    }
    Panel p(panel_h * b, panel_h, tr, yr.padded(0.05), tractor ? "Tractor barriers" : "Trailer barriers", "t [s]",
            tractor ? "h1 [m^2]" : "h2 [m^2]");
    p.axes(out);
    p.hline(out, 0.0, "#000", "2 2");
    std::vector<std::pair<std::string, std::string>> legend;
    for (std::size_t k = 0; k < series.size(); ++k)
    {
      const std::string color = kPalette[k % std::size(kPalette)];
      p.polyline(out, t, series[k], color);
      if (k < 8)
      {
        legend.emplace_back("obstacle " + std::to_string(k), color);
      }
    }
    p.legend(out, legend);
  }
  return document(2 * panel_h, out.str());
}

}  // namespace

std::optional<PlotKind> parse_plot_kind(const std::string& text)
{
  if (text == "path")
  {
    return PlotKind::Path;
  }
  if (text == "inputs")
  {
    return PlotKind::Inputs;
  }
  if (text == "barriers")
  {
    return PlotKind::Barriers;
  }
  if (text == "footprint")
  {
    return PlotKind::Footprint;
  }
  return std::nullopt;
}

std::string render_plot(const TrajectoryLog& log, PlotKind kind, const std::optional<PlotContext>& context)
{
  const PlotContext ctx = context.value_or(PlotContext{});
  switch (kind)
  {
  case PlotKind::Path: return plane_plot(log, ctx, false);
  case PlotKind::Footprint: return plane_plot(log, ctx, true);
  case PlotKind::Inputs: return inputs_plot(log, ctx);
  case PlotKind::Barriers: return barriers_plot(log);
  }
  return plane_plot(log, ctx, false);
}

}  // namespace mcbf::cli
