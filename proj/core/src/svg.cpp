#include "efo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace efo::svg {

namespace {

constexpr double kWidth = 960;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
                                "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"};

const char* color(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  if (x == 0.0 || (std::abs(x) >= 0.01 && std::abs(x) < 1e4)) {
    std::snprintf(buf, sizeof buf, "%.3g", x);
  } else {
    std::snprintf(buf, sizeof buf, "%.1e", x);
  }
  return buf;
}

std::size_t steps_of(const std::vector<Series>& series) {
  std::size_t n = 0;
  for (const auto& s : series) n = std::max(n, s.values.size());
  return n;
}

struct Frame {
  double y_min;
  double y_max;
  std::size_t steps;

  double plot_w() const { return kWidth - kLeft - kRight; }
  double plot_h() const { return kHeight - kTop - kBottom; }
  double band() const { return plot_w() / static_cast<double>(std::max<std::size_t>(steps, 1)); }
  double x(double step) const { return kLeft + step * band(); }
  double y(double v) const { return kTop + (y_max - v) / (y_max - y_min) * plot_h(); }
};

void open(std::ostringstream& out, const std::string& title, const std::string& y_label, const Frame& f) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  // y axis with five ticks
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    const double y = f.y(v);
    out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + f.plot_w()) << "\" y1=\"" << num(y) << "\" y2=\""
        << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }
  const std::size_t every = f.steps > 20 ? 5 : 1;
  for (std::size_t h = 0; h < f.steps; h += every) {
    out << "<text x=\"" << num(f.x(h + 0.5)) << "\" y=\"" << num(kTop + f.plot_h() + 16)
        << "\" text-anchor=\"middle\">" << h << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + f.plot_w() / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">step</text>\n";
  out << "<text transform=\"translate(16," << num(kTop + f.plot_h() / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(f.plot_w()) << "\" height=\""
      << num(f.plot_h()) << "\" fill=\"none\" stroke=\"#404040\"/>\n";
}

void legend(std::ostringstream& out, const std::vector<Series>& series) {
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 8 + 18.0 * static_cast<double>(i);
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\"" << color(i)
        << "\"/>\n";
    out << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(series[i].label) << "</text>\n";
  }
}

Frame signed_frame(const std::vector<Series>& series) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  return {lo < 0.0 ? lo - pad : 0.0, hi > 0.0 ? hi + pad : 0.0, steps_of(series)};
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string stacked_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series) {
  const std::size_t steps = steps_of(series);
  double top = 1.0;
  for (std::size_t h = 0; h < steps; ++h) {
    double sum = 0.0;
    for (const auto& s : series) {
      if (h < s.values.size()) sum += std::max(s.values[h], 0.0);
    }
    top = std::max(top, sum);
  }
  const Frame f{0.0, top, steps};
  std::ostringstream out;
  open(out, title, y_label, f);
  const double width = f.band() * 0.8;
  for (std::size_t h = 0; h < steps; ++h) {
    double base = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double v = h < series[k].values.size() ? std::max(series[k].values[h], 0.0) : 0.0;
      if (v <= 0.0) continue;
      const double y0 = f.y(base + v);
      const double y1 = f.y(base);
      out << "<rect x=\"" << num(f.x(h) + 0.1 * f.band()) << "\" y=\"" << num(y0) << "\" width=\"" << num(width)
          << "\" height=\"" << num(y1 - y0) << "\" fill=\"" << color(k) << "\"><title>" << escape(series[k].label)
          << " @ " << h << ": " << tick_label(v) << "</title></rect>\n";
      base += v;
    }
  }
  legend(out, series);
  out << "</svg>\n";
  return out.str();
}

std::string grouped_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series) {
  const Frame f = signed_frame(series);
  std::ostringstream out;
  open(out, title, y_label, f);
  const double group = f.band() * 0.85;
  const double bar = group / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t h = 0; h < f.steps; ++h) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (h >= series[k].values.size() || !std::isfinite(series[k].values[h])) continue;
      const double v = series[k].values[h];
      if (v == 0.0) continue;
      const double y0 = f.y(std::max(v, 0.0));
      const double y1 = f.y(std::min(v, 0.0));
      out << "<rect x=\"" << num(f.x(h) + 0.075 * f.band() + bar * static_cast<double>(k)) << "\" y=\"" << num(y0)
          << "\" width=\"" << num(bar) << "\" height=\"" << num(y1 - y0) << "\" fill=\"" << color(k) << "\"><title>"
          << escape(series[k].label) << " @ " << h << ": " << tick_label(v) << "</title></rect>\n";
    }
  }
  out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + f.plot_w()) << "\" y1=\"" << num(f.y(0)) << "\" y2=\""
      << num(f.y(0)) << "\" stroke=\"black\"/>\n";
  legend(out, series);
  out << "</svg>\n";
  return out.str();
}

std::string line_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series) {
  const Frame f = signed_frame(series);
  std::ostringstream out;
  open(out, title, y_label, f);
  out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + f.plot_w()) << "\" y1=\"" << num(f.y(0)) << "\" y2=\""
      << num(f.y(0)) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out << "<polyline fill=\"none\" stroke=\"" << color(k) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t h = 0; h < series[k].values.size(); ++h) {
      if (h) out << ' ';
      out << num(f.x(h + 0.5)) << ',' << num(f.y(series[k].values[h]));
    }
    out << "\"/>\n";
    for (std::size_t h = 0; h < series[k].values.size(); ++h) {
      out << "<circle cx=\"" << num(f.x(h + 0.5)) << "\" cy=\"" << num(f.y(series[k].values[h]))
          << "\" r=\"2.5\" fill=\"" << color(k) << "\"><title>" << h << ": " << tick_label(series[k].values[h])
          << "</title></circle>\n";
    }
  }
  legend(out, series);
  out << "</svg>\n";
  return out.str();
}

}  // namespace efo::svg
