#pragma once

#include <string>
#include <vector>

namespace efo::svg {

struct Series {
  std::string label;
  std::vector<double> values;
};

/// Per-step stacked bars (e.g. event probabilities summing to one).
std::string stacked_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series);

/// Per-step grouped bars around a zero baseline (e.g. expected reward components).
std::string grouped_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series);

/// Polyline per series with markers and a zero reference line.
std::string line_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series);

/// Escapes &, <, >, and quotes for attribute and text content.
std::string escape(const std::string& text);

}  // namespace efo::svg
