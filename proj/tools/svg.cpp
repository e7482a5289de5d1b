#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fth::cli {
namespace {

constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round-number tick spacing covering [lo, hi] in about five steps.
double tick_step(double lo, double hi) {
  const double span = std::max(hi - lo, 1e-12);
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

struct Axes {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void header(std::string& s, const std::string& title) {
  s += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", kW, kH, kW, kH);
  s += "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>)",
                   kW / 2, escape(title));
  s += "\n";
}

void y_axis(std::string& s, const Axes& a, const std::string& label) {
  const double step = tick_step(a.y0, a.y1);
  for (double v = std::ceil(a.y0 / step) * step; v <= a.y1 + 1e-9 * step; v += step) {
    s += fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="#ddd"/>)", kLeft, a.py(v),
                     kW - kRight, a.py(v));
    s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="11" text-anchor="end">{:g}</text>)",
                     kLeft - 6, a.py(v) + 4, std::abs(v) < 1e-12 * step ? 0.0 : v);
    s += "\n";
  }
  s += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)", kLeft, kTop, kH - kBottom);
  s += fmt::format(R"svg(<text x="16" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1f})">{}</text>)svg",
                   kH / 2, kH / 2, escape(label));
  s += "\n";
}

void x_base(std::string& s) {
  s += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)", kLeft, kH - kBottom, kW - kRight);
  s += "\n";
}

void legend(std::string& s, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 8 + 16.0 * static_cast<double>(i);
    s += fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="10" height="10" fill="{}"/>)", kW - kRight - 120, y - 9,
                     kPalette[i % 6]);
    s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="11">{}</text>)",
                     kW - kRight - 105, y, escape(names[i]));
    s += "\n";
  }
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 1.0, hi + 1.0};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string render_svg(const LineChart& c) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& se : c.series)
    for (auto [x, y] : se.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!(x1 > x0)) x1 = x0 + 1;
  const auto [ya, yb] = padded(y0, y1);
  const Axes a{x0, x1, ya, yb};

  std::string s;
  header(s, c.title);
  y_axis(s, a, c.y_label);
  x_base(s);
  const double step = tick_step(x0, x1);
  for (double v = std::ceil(x0 / step) * step; v <= x1 + 1e-9 * step; v += step)
    s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="11" text-anchor="middle">{:g}</text>)""\n",
                     a.px(v), kH - kBottom + 16, std::abs(v) < 1e-12 * step ? 0.0 : v);
  s += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>)""\n",
                   (kLeft + kW - kRight) / 2, kH - 20, escape(c.x_label));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < c.series.size(); ++i) {
    std::string pts;
    for (auto [x, y] : c.series[i].points) pts += fmt::format("{:.2f},{:.2f} ", a.px(x), a.py(y));
    if (!pts.empty()) pts.pop_back();
    s += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)""\n", kPalette[i % 6], pts);
    names.push_back(c.series[i].name);
  }
  if (names.size() > 1 || (names.size() == 1 && !names[0].empty())) legend(s, names);
  s += "</svg>\n";
  return s;
}

std::string render_svg(const BarChart& c) {
  double y1 = 0.0, y0 = 0.0;
  for (const auto& g : c.values)
    for (double v : g)
      if (std::isfinite(v)) {
        y1 = std::max(y1, v);
        y0 = std::min(y0, v);
      }
  if (!(y1 > y0)) y1 = y0 + 1;
  const Axes a{0, 1, y0, y1 * 1.1};

  std::string s;
  header(s, c.title);
  y_axis(s, a, c.y_label);
  x_base(s);
  const double plot_w = kW - kLeft - kRight;
  const std::size_t n = std::max<std::size_t>(1, c.categories.size());
  const std::size_t groups = std::max<std::size_t>(1, c.groups.size());
  const double slot = plot_w / static_cast<double>(n);
  const double bar = slot * 0.7 / static_cast<double>(groups);
  for (std::size_t k = 0; k < c.categories.size(); ++k) {
    const double left = kLeft + slot * static_cast<double>(k) + slot * 0.15;
    for (std::size_t g = 0; g < c.values.size(); ++g) {
      const double v = k < c.values[g].size() ? c.values[g][k] : 0.0;
      if (!std::isfinite(v)) continue;
      const double top = a.py(std::max(v, 0.0)), base = a.py(std::min(v, 0.0));
      s += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)""\n",
                       left + bar * static_cast<double>(g), top, bar * 0.95, base - top, kPalette[g % 6]);
      s += fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.3g}</text>)""\n",
                       left + bar * (static_cast<double>(g) + 0.5), top - 4, v);
    }
    s += fmt::format(R"(<text x="{:.2f}" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>)""\n",
                     kLeft + slot * (static_cast<double>(k) + 0.5), kH - kBottom + 18, escape(c.categories[k]));
  }
  if (c.groups.size() > 1) legend(s, c.groups);
  s += "</svg>\n";
  return s;
}

}  // namespace fth::cli
