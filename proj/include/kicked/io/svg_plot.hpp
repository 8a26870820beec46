#pragma once

// Minimal static SVG line/scatter plots. Plots only read already-written
// CSV files; they never compute physics.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kicked/io/csv.hpp"

namespace kicked::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dots = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Values above y_clip are drawn at the top edge (diverging densities).
  double y_clip = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.4g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series) {
  constexpr double width = 720, height = 480;
  constexpr double left = 80, right = 20, top = 40, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = std::min(s.y[i], spec.y_clip);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  ymin = std::min(ymin, 0.0);
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) {
    y = std::clamp(y, ymin, ymax);
    return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << detail::escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << detail::fmt(sx(xv), "%.1f") << "\" y=\"" << height - bottom + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt(xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(sy(yv) + 4, "%.1f")
       << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16
     << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(spec.x_label)
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 18 " << top + ph / 2 << ")\">" << detail::escape(spec.y_label)
     << "</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    if (s.dots) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || std::isnan(s.y[i])) continue;
        os << "<circle cx=\"" << detail::fmt(sx(s.x[i]), "%.2f") << "\" cy=\""
           << detail::fmt(sy(std::min(s.y[i], spec.y_clip)), "%.2f") << "\" r=\"2\" fill=\""
           << s.color << "\"/>\n";
      }
    } else {
      // Break the line at NaN (outside the curve's domain).
      std::string pts;
      auto flush = [&] {
        if (!pts.empty())
          os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
             << pts << "\"/>\n";
        pts.clear();
      };
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || std::isnan(s.y[i])) {
          flush();
          continue;
        }
        pts += detail::fmt(sx(s.x[i]), "%.2f") + "," +
               detail::fmt(sy(std::min(s.y[i], spec.y_clip)), "%.2f") + " ";
      }
      flush();
    }
    const double ly = top + 16 + 16 * legend++;
    os << "<rect x=\"" << left + 10 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"3\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << left + 28 << "\" y=\"" << ly << "\" font-size=\"12\">"
       << detail::escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

/// Variance against step, with the analytic line D N T read from the
/// metadata key "D_theory" (and "period") when present.
inline std::string plot_variance(const CsvTable& t) {
  const auto step = t.column("step");
  std::vector<double> var;
  if (t.has_column("var")) {
    var = t.column("var");
  } else {
    const auto p1 = t.column("p1"), p2 = t.column("p2");
    for (std::size_t i = 0; i < p1.size(); ++i) var.push_back(p2[i] - p1[i] * p1[i]);
  }
  std::vector<Series> s{{"simulated variance", step, var, "#1f77b4", false}};
  if (t.meta.count("D_theory") && !var.empty()) {
    const double d = t.meta_number("D_theory");
    const double period = t.meta.count("period") ? t.meta_number("period") : 1.0;
    std::vector<double> line;
    for (double n : step) line.push_back(var.front() + d * n * period);
    s.push_back({"D N T", step, line, "#d62728", false});
  }
  PlotSpec spec{"Momentum variance", "kick N", "<dp^2>_N"};
  return render_svg(spec, s);
}

/// Transition probabilities against momentum transfer in units of hbar.
inline std::string plot_kernel_compare(const CsvTable& t) {
  const auto nu = t.column("nu");
  const auto wq = t.column("w_quantum");
  double peak = 0.0;
  for (double w : wq) peak = std::max(peak, w);
  PlotSpec spec{"Momentum transition probabilities", "(p - p')/hbar", "W", 3.0 * peak};
  std::vector<Series> s{
      {"classical", nu, t.column("w_classical"), "#000000", false},
      {"semiclassical (|dp| < lambda)", nu, t.column("w_semiclassical_osc"), "#2ca02c", false},
      {"semiclassical (|dp| > lambda)", nu, t.column("w_semiclassical_tail"), "#ff7f0e", false},
      {"quantum", nu, wq, "#1f77b4", true},
  };
  return render_svg(spec, s);
}

}  // namespace kicked::io
