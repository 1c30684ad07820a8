#include "momo/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "momo/errors.hpp"

namespace momo {
namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Scale {
  double lo, hi;
  double pix_lo, pix_hi;
  double operator()(double v) const {
    if (hi == lo) return (pix_lo + pix_hi) / 2.0;
    return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
  }
};

std::string header(const std::string& title) {
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
       "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
       " " + std::to_string(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(kWidth / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
       "</text>\n";
  return s;
}

std::string axes(const Scale& x, const Scale& y, const std::string& x_lo_label,
                 const std::string& x_hi_label) {
  std::string s;
  s += "<line x1=\"" + coord(x.pix_lo) + "\" y1=\"" + coord(y.pix_lo) + "\" x2=\"" +
       coord(x.pix_hi) + "\" y2=\"" + coord(y.pix_lo) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + coord(x.pix_lo) + "\" y1=\"" + coord(y.pix_lo) + "\" x2=\"" +
       coord(x.pix_lo) + "\" y2=\"" + coord(y.pix_hi) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + coord(x.pix_lo) + "\" y=\"" + coord(y.pix_lo + 20) +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + x_lo_label + "</text>\n";
  s += "<text x=\"" + coord(x.pix_hi) + "\" y=\"" + coord(y.pix_lo + 20) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + x_hi_label +
       "</text>\n";
  s += "<text x=\"" + coord(x.pix_lo - 8) + "\" y=\"" + coord(y.pix_lo) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(y.lo) +
       "</text>\n";
  s += "<text x=\"" + coord(x.pix_lo - 8) + "\" y=\"" + coord(y.pix_hi + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(y.hi) +
       "</text>\n";
  return s;
}

}  // namespace

std::string svg_line_chart(std::span<const Date> dates, std::span<const double> values,
                           const std::string& title) {
  if (dates.size() != values.size() || values.empty()) {
    throw DataError("svg_line_chart: empty or mismatched series");
  }
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const Scale x{0.0, static_cast<double>(values.size() - 1),
                static_cast<double>(kMarginLeft), static_cast<double>(kWidth - kMarginRight)};
  const Scale y{*min_it, *max_it, static_cast<double>(kHeight - kMarginBottom),
                static_cast<double>(kMarginTop)};

  std::string s = header(title);
  s += axes(x, y, dates.front().to_string(), dates.back().to_string());
  s += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s.push_back(' ');
    s += coord(x(static_cast<double>(i))) + "," + coord(y(values[i]));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

std::string svg_scatter(std::span<const double> xs, std::span<const double> ys,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw DataError("svg_scatter: empty or mismatched series");
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  const Scale x{*xmin, *xmax, static_cast<double>(kMarginLeft),
                static_cast<double>(kWidth - kMarginRight)};
  const Scale y{*ymin, *ymax, static_cast<double>(kHeight - kMarginBottom),
                static_cast<double>(kMarginTop)};

  std::string s = header(title);
  s += axes(x, y, fmt(*xmin) + " " + x_label, fmt(*xmax) + " " + x_label);
  s += "<text x=\"20\" y=\"" + coord((y.pix_lo + y.pix_hi) / 2) +
       "\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 20 " +
       coord((y.pix_lo + y.pix_hi) / 2) + ")\">" + y_label + "</text>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s += "<circle cx=\"" + coord(x(xs[i])) + "\" cy=\"" + coord(y(ys[i])) +
         "\" r=\"3\" fill=\"#c23b22\" fill-opacity=\"0.7\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace momo
