#include "aci/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace aci::svg {

namespace {

constexpr const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3a7d44",
                                    "#8e5fa2", "#c77b30", "#4a4a4a"};
constexpr int kPaletteSize = 6;

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 18.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 42.0;

std::string esc(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) { return fmt::format("{:.6g}", v); }

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  bool seen = false;

  void add(double v) {
    if (!std::isfinite(v)) return;
    if (!seen) {
      lo = hi = v;
      seen = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  void pad() {
    if (!seen) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    if (lo == hi) {
      const double d = lo == 0.0 ? 0.5 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    } else {
      const double d = (hi - lo) * 0.05;
      lo -= d;
      hi += d;
    }
  }
};

}  // namespace

std::string render(const std::vector<Panel>& panels, int width,
                   int panel_height) {
  if (panels.empty()) throw std::invalid_argument("no panels to render");
  const int height = panel_height * static_cast<int>(panels.size());
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n"
      "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      width, height, width, height, width, height);

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double top = pi * panel_height + kMarginTop;
    const double bottom = (pi + 1) * panel_height - kMarginBottom;
    const double left = kMarginLeft;
    const double right = width - kMarginRight;

    Range xr, yr;
    for (const Series& s : panel.series) {
      const size_t n = std::min(s.x.size(), s.y.size());
      for (size_t i = 0; i < n; ++i) {
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
          xr.add(s.x[i]);
          yr.add(s.y[i]);
        }
      }
    }
    if (panel.include_zero) yr.add(0.0);
    xr.pad();
    yr.pad();

    auto mapx = [&](double v) {
      const double f = (v - xr.lo) / (xr.hi - xr.lo);
      return panel.reverse_x ? right - f * (right - left)
                             : left + f * (right - left);
    };
    auto mapy = [&](double v) {
      const double f = (v - yr.lo) / (yr.hi - yr.lo);
      return panel.reverse_y ? top + f * (bottom - top)
                             : bottom - f * (bottom - top);
    };

    out += fmt::format("<!-- panel {} -->\n", pi);
    if (!panel.title.empty())
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"13\" font-weight=\"bold\">"
          "{}</text>\n",
          px(left), px(top - 12.0), esc(panel.title));

    constexpr int kTicks = 5;
    for (int i = 0; i < kTicks; ++i) {
      const double f = static_cast<double>(i) / (kTicks - 1);
      const double xv = xr.lo + f * (xr.hi - xr.lo);
      const double yv = yr.lo + f * (yr.hi - yr.lo);
      const double gx = mapx(xv);
      const double gy = mapy(yv);
      out += fmt::format(
          "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" "
          "stroke-width=\"1\"/>\n",
          px(gx), px(top), px(gx), px(bottom));
      out += fmt::format(
          "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" "
          "stroke-width=\"1\"/>\n",
          px(left), px(gy), px(right), px(gy));
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">"
          "{}</text>\n",
          px(gx), px(bottom + 14.0), fmt::format("{:.4g}", xv));
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">"
          "{}</text>\n",
          px(left - 6.0), px(gy + 3.5), fmt::format("{:.4g}", yv));
    }

    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
        "stroke=\"#444444\" stroke-width=\"1\"/>\n",
        px(left), px(top), px(right - left), px(bottom - top));
    if (!panel.x_label.empty())
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">"
          "{}</text>\n",
          px((left + right) / 2.0), px(bottom + 30.0), esc(panel.x_label));
    if (!panel.y_label.empty())
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 {} {})\">{}</text>\n",
          px(14.0), px((top + bottom) / 2.0), px(14.0),
          px((top + bottom) / 2.0), esc(panel.y_label));

    for (size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const char* color = kPalette[si % kPaletteSize];
      std::vector<std::pair<double, double>> pts;
      const size_t n = std::min(s.x.size(), s.y.size());
      for (size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          pts.emplace_back(mapx(s.x[i]), mapy(s.y[i]));

      if (pts.size() == 1) {
        out += fmt::format(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
            px(pts[0].first), px(pts[0].second), color);
      } else if (pts.size() > 1) {
        std::string poly;
        for (const auto& [gx, gy] : pts)
          poly += fmt::format("{},{} ", px(gx), px(gy));
        poly.pop_back();
        out += fmt::format(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" "
            "stroke-width=\"1.4\"/>\n",
            poly, color);
      }

      if (!s.label.empty()) {
        const double ly = top + 14.0 + 14.0 * static_cast<double>(si);
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
            "stroke-width=\"2\"/>\n",
            px(right - 130.0), px(ly - 4.0), px(right - 112.0), px(ly - 4.0),
            color);
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
            px(right - 107.0), px(ly), esc(s.label));
      }
    }
  }

  out += "</svg>\n";
  return out;
}

void write(const std::string& path, const std::vector<Panel>& panels,
           int width, int panel_height) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SVG '" + path + "'");
  out << render(panels, width, panel_height);
}

}  // namespace aci::svg
