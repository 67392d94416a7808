#pragma once

// Minimal static SVG plots: trajectory projections and field heatmaps with
// contour lines. Fixed 800x600 viewport, linear axes.
//
// Heatmap colormap: viridis, sampled at 9 anchors and interpolated linearly
// in RGB. Colors are clamped to the 2nd..98th percentile of the finite cell
// values so that near-singular cells do not wash out the rest of the map.
// Masked (NaN) cells are drawn white with class "masked".

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qctrans/ensemble.hpp"
#include "qctrans/error.hpp"
#include "qctrans/field_grid.hpp"

namespace qct::svg {

inline constexpr int kWidth = 800;
inline constexpr int kHeight = 600;

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool mark_ends = true;  // small dot at the start, larger one at the end
};

struct Plot {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  std::string annotation;
  std::vector<Series> series;
  std::optional<FieldGrid> heatmap;
  int contour_levels = 12;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string rgb(double r, double g, double b) {
  char buf[16];
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

inline std::string viridis(double s) {
  static constexpr std::array<std::array<double, 3>, 9> anchors{{{0.267, 0.005, 0.329},
                                                                  {0.283, 0.141, 0.458},
                                                                  {0.254, 0.265, 0.530},
                                                                  {0.207, 0.372, 0.553},
                                                                  {0.164, 0.471, 0.558},
                                                                  {0.128, 0.567, 0.551},
                                                                  {0.135, 0.659, 0.518},
                                                                  {0.267, 0.749, 0.441},
                                                                  {0.993, 0.906, 0.144}}};
  s = std::clamp(s, 0.0, 1.0) * (anchors.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(s), anchors.size() - 2);
  const double f = s - static_cast<double>(k);
  const auto& a = anchors[k];
  const auto& b = anchors[k + 1];
  return rgb(a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2]));
}

inline const std::string& palette(std::size_t i) {
  static const std::array<std::string, 10> colors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % colors.size()];
}

inline double tick_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

inline std::pair<double, double> percentile_range(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return {0.0, 1.0};
  std::sort(v.begin(), v.end());
  auto pick = [&](double q) { return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))]; };
  double lo = pick(0.02), hi = pick(0.98);
  if (!(hi > lo)) {
    lo = v.front();
    hi = v.back();
  }
  if (!(hi > lo)) hi = lo + 1.0;
  return {lo, hi};
}

struct Frame {
  double x0, x1, y0, y1;
  double left = 80, right = 680, top = 60, bottom = 520;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
  double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

// Marching squares on one cell; emits the segments where the bilinear
// field crosses `level`.
inline void contour_cell(const FieldGrid& g, std::size_t i, std::size_t j, double level, const Frame& f,
                         std::ostringstream& path) {
  const double v[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
  for (double x : v)
    if (!std::isfinite(x)) return;
  const double xs[4] = {g.a[i], g.a[i + 1], g.a[i + 1], g.a[i]};
  const double ys[4] = {g.b[j], g.b[j], g.b[j + 1], g.b[j + 1]};
  std::vector<std::pair<double, double>> hits;
  for (int e = 0; e < 4; ++e) {
    const int n = (e + 1) % 4;
    const bool a_above = v[e] >= level, b_above = v[n] >= level;
    if (a_above == b_above) continue;
    const double s = (level - v[e]) / (v[n] - v[e]);
    hits.emplace_back(xs[e] + s * (xs[n] - xs[e]), ys[e] + s * (ys[n] - ys[e]));
  }
  for (std::size_t k = 0; k + 1 < hits.size(); k += 2)
    path << 'M' << num(f.px(hits[k].first)) << ' ' << num(f.py(hits[k].second)) << 'L'
         << num(f.px(hits[k + 1].first)) << ' ' << num(f.py(hits[k + 1].second));
}

}  // namespace detail

inline std::string render(const Plot& plot) {
  using detail::num;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  if (plot.heatmap) {
    extend(plot.heatmap->a.front(), plot.heatmap->b.front());
    extend(plot.heatmap->a.back(), plot.heatmap->b.back());
  } else {
    for (const auto& s : plot.series)
      for (const auto& [x, y] : s.points) extend(x, y);
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y0 -= 1, y1 += 1;
  if (!plot.heatmap) {
    const double px = 0.04 * (x1 - x0), py = 0.04 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
  }
  const detail::Frame f{x0, x1, y0, y1};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text class=\"title\" x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << detail::escape(plot.title) << "</text>\n";
  o << "<text class=\"annotation\" x=\"" << kWidth / 2 << "\" y=\"44\" text-anchor=\"middle\">"
    << detail::escape(plot.annotation) << "</text>\n";

  if (plot.heatmap) {
    const FieldGrid& g = *plot.heatmap;
    const auto [lo, hi] = detail::percentile_range(g.values);
    o << "<g class=\"heatmap\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t j = 0; j < g.b.size(); ++j) {
      const double yb = j == 0 ? g.b[0] : 0.5 * (g.b[j - 1] + g.b[j]);
      const double yt = j + 1 == g.b.size() ? g.b[j] : 0.5 * (g.b[j] + g.b[j + 1]);
      for (std::size_t i = 0; i < g.a.size(); ++i) {
        const double xl = i == 0 ? g.a[0] : 0.5 * (g.a[i - 1] + g.a[i]);
        const double xr = i + 1 == g.a.size() ? g.a[i] : 0.5 * (g.a[i] + g.a[i + 1]);
        const double v = g.at(i, j);
        o << "<rect x=\"" << num(f.px(xl)) << "\" y=\"" << num(f.py(yt)) << "\" width=\"" << num(f.px(xr) - f.px(xl))
          << "\" height=\"" << num(f.py(yb) - f.py(yt)) << "\"";
        if (std::isfinite(v))
          o << " fill=\"" << detail::viridis((v - lo) / (hi - lo)) << "\"/>";
        else
          o << " class=\"masked\" fill=\"#ffffff\"/>";
      }
      o << '\n';
    }
    o << "</g>\n";
    if (plot.contour_levels > 0 && g.a.size() > 1 && g.b.size() > 1) {
      std::ostringstream path;
      for (int k = 1; k <= plot.contour_levels; ++k) {
        const double level = lo + (hi - lo) * k / (plot.contour_levels + 1.0);
        for (std::size_t j = 0; j + 1 < g.b.size(); ++j)
          for (std::size_t i = 0; i + 1 < g.a.size(); ++i) detail::contour_cell(g, i, j, level, f, path);
      }
      o << "<path class=\"contours\" fill=\"none\" stroke=\"black\" stroke-width=\"0.6\" stroke-opacity=\"0.6\" d=\""
        << path.str() << "\"/>\n";
    }
    // Colorbar.
    o << "<g class=\"colorbar\">\n";
    for (int k = 0; k < 100; ++k) {
      const double y = f.bottom - (f.bottom - f.top) * (k + 1) / 100.0;
      o << "<rect x=\"700\" y=\"" << num(y) << "\" width=\"20\" height=\"" << num((f.bottom - f.top) / 100.0 + 0.5)
        << "\" fill=\"" << detail::viridis((k + 0.5) / 100.0) << "\"/>";
    }
    o << "\n<text x=\"726\" y=\"" << num(f.bottom) << "\">" << detail::label(lo) << "</text>";
    o << "<text x=\"726\" y=\"" << num(f.top + 10) << "\">" << detail::label(hi) << "</text>";
    o << "<text x=\"710\" y=\"" << num(f.top - 6) << "\" text-anchor=\"middle\">" << detail::escape(g.quantity)
      << "</text>\n</g>\n";
  }

  // Axes and ticks.
  o << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\""
    << f.right - f.left << "\" height=\"" << f.bottom - f.top << "\"/>\n";
  std::ostringstream ticks;
  const double sx = detail::tick_step(x1 - x0), sy = detail::tick_step(y1 - y0);
  for (double t = std::ceil(x0 / sx) * sx; t <= x1 + 1e-9 * sx; t += sx) {
    o << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << f.bottom << "\" x2=\"" << num(f.px(t)) << "\" y2=\""
      << f.bottom + 5 << "\"/>";
    ticks << "<text x=\"" << num(f.px(t)) << "\" y=\"" << f.bottom + 18 << "\" text-anchor=\"middle\">"
          << detail::label(t) << "</text>";
  }
  for (double t = std::ceil(y0 / sy) * sy; t <= y1 + 1e-9 * sy; t += sy) {
    o << "<line x1=\"" << f.left - 5 << "\" y1=\"" << num(f.py(t)) << "\" x2=\"" << f.left << "\" y2=\""
      << num(f.py(t)) << "\"/>";
    ticks << "<text x=\"" << f.left - 8 << "\" y=\"" << num(f.py(t) + 4) << "\" text-anchor=\"end\">"
          << detail::label(t) << "</text>";
  }
  o << "\n</g>\n<g class=\"ticks\">" << ticks.str() << "</g>\n";
  o << "<text class=\"xlabel\" x=\"" << (f.left + f.right) / 2 << "\" y=\"" << kHeight - 30
    << "\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(plot.x_label) << "</text>\n";
  o << "<text class=\"ylabel\" x=\"24\" y=\"" << (f.top + f.bottom) / 2 << "\" text-anchor=\"middle\" font-size=\"14\""
    << " transform=\"rotate(-90 24 " << (f.top + f.bottom) / 2 << ")\">" << detail::escape(plot.y_label)
    << "</text>\n";

  // Trajectories, clipped to the frame.
  o << "<clipPath id=\"frame\"><rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.right - f.left
    << "\" height=\"" << f.bottom - f.top << "\"/></clipPath>\n<g class=\"series\" clip-path=\"url(#frame)\">\n";
  for (const auto& s : plot.series) {
    if (s.points.empty()) continue;
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : s.points)
      if (std::isfinite(x) && std::isfinite(y)) o << num(f.px(x)) << ',' << num(f.py(y)) << ' ';
    o << "\"/>\n";
    if (s.mark_ends) {
      const auto& a = s.points.front();
      const auto& b = s.points.back();
      o << "<circle class=\"start\" cx=\"" << num(f.px(a.first)) << "\" cy=\"" << num(f.py(a.second))
        << "\" r=\"2\" fill=\"black\"/><circle class=\"end\" cx=\"" << num(f.px(b.first)) << "\" cy=\""
        << num(f.py(b.second)) << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    }
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

// Trajectory projection: x against t in 1D, the (x, y) plane in 2D, and the
// requested coordinate plane in 3D.
inline Plot trajectory_plot(const EnsembleResult& res, const std::optional<std::string>& plane, std::string title,
                            std::string annotation) {
  Plot p;
  p.title = std::move(title);
  p.annotation = std::move(annotation);
  int ia = 0, ib = 1;
  if (res.dim == 1) {
    p.x_label = "t";
    p.y_label = "x";
  } else if (res.dim == 2) {
    if (plane && *plane != "xy") throw InvalidParameter("2D trajectories only project onto the xy plane");
  } else {
    if (!plane) throw InvalidParameter("3D trajectories need an explicit projection plane (xy, xz or yz)");
    if (*plane != "xy" && *plane != "xz" && *plane != "yz") throw InvalidParameter("unknown plane " + *plane);
    ia = (*plane)[0] - 'x';
    ib = (*plane)[1] - 'x';
  }
  if (res.dim > 1) {
    p.x_label = std::string(1, static_cast<char>('x' + ia));
    p.y_label = std::string(1, static_cast<char>('x' + ib));
  }
  for (std::size_t k = 0; k < res.trajectories.size(); ++k) {
    Series s;
    s.color = detail::palette(k);
    for (const auto& st : res.trajectories[k].samples) {
      if (res.dim == 1)
        s.points.emplace_back(st.t, st.x[0]);
      else
        s.points.emplace_back(st.x[static_cast<std::size_t>(ia)], st.x[static_cast<std::size_t>(ib)]);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

inline Plot field_plot(FieldGrid grid, std::string title, std::string annotation) {
  Plot p;
  p.title = std::move(title);
  p.annotation = std::move(annotation);
  p.x_label = grid.a_label;
  p.y_label = grid.b_label;
  p.heatmap = std::move(grid);
  return p;
}

}  // namespace qct::svg
