#pragma once

#include <span>
#include <string>
#include <vector>

#include "momo/calendar.hpp"

namespace momo {

/// Standalone SVG line chart of a value series over dates (equity curves).
std::string svg_line_chart(std::span<const Date> dates, std::span<const double> values,
                           const std::string& title);

/// Standalone SVG scatter plot (dispersion studies).
std::string svg_scatter(std::span<const double> xs, std::span<const double> ys,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label);

}  // namespace momo
