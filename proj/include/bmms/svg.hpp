#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmms/errors.hpp"

namespace bmms {

// One panel of the decomposition figure: posterior mean with a shaded
// credible band and an optional overlaid reference curve.
struct SeriesPanel {
  std::string title;
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd truth;  // empty when absent
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

}  // namespace detail

// Static stacked-panel SVG, deterministic output for fixed inputs.
inline void write_decomposition_svg(const std::filesystem::path& path,
                                    const std::vector<SeriesPanel>& panels) {
  if (panels.empty()) throw InvalidInput("svg: no panels");
  const double panel_w = 640.0, panel_h = 150.0, margin = 42.0, gap = 26.0;
  const double width = panel_w + 2.0 * margin;
  const double height =
      margin + static_cast<double>(panels.size()) * (panel_h + gap);

  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << detail::svg_num(width) << "\" height=\"" << detail::svg_num(height)
      << "\" viewBox=\"0 0 " << detail::svg_num(width) << ' '
      << detail::svg_num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& p = panels[k];
    const auto n = p.mean.size();
    if (n < 2 || p.lower.size() != n || p.upper.size() != n ||
        (p.truth.size() != 0 && p.truth.size() != n)) {
      throw InvalidDimension("svg: panel series length mismatch");
    }
    double lo = p.lower.minCoeff(), hi = p.upper.maxCoeff();
    if (p.truth.size() > 0) {
      lo = std::min(lo, p.truth.minCoeff());
      hi = std::max(hi, p.truth.maxCoeff());
    }
    if (hi - lo < 1e-12) {
      hi += 0.5;
      lo -= 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double top = margin / 2.0 + static_cast<double>(k) * (panel_h + gap);
    const auto xmap = [&](Eigen::Index i) {
      return margin + panel_w * static_cast<double>(i) /
                          static_cast<double>(n - 1);
    };
    const auto ymap = [&](double v) {
      return top + panel_h * (1.0 - (v - lo) / (hi - lo));
    };

    out << "<rect x=\"" << detail::svg_num(margin) << "\" y=\""
        << detail::svg_num(top) << "\" width=\"" << detail::svg_num(panel_w)
        << "\" height=\"" << detail::svg_num(panel_h)
        << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.8\"/>\n";
    out << "<text x=\"" << detail::svg_num(margin + 4.0) << "\" y=\""
        << detail::svg_num(top + 13.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">"
        << p.title << "</text>\n";

    if (lo < 0.0 && hi > 0.0) {
      out << "<line x1=\"" << detail::svg_num(margin) << "\" y1=\""
          << detail::svg_num(ymap(0.0)) << "\" x2=\""
          << detail::svg_num(margin + panel_w) << "\" y2=\""
          << detail::svg_num(ymap(0.0))
          << "\" stroke=\"#cccccc\" stroke-width=\"0.6\"/>\n";
    }

    out << "<polygon fill=\"#c6dbef\" stroke=\"none\" points=\"";
    for (Eigen::Index i = 0; i < n; ++i) {
      out << detail::svg_num(xmap(i)) << ',' << detail::svg_num(ymap(p.upper(i)))
          << ' ';
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      out << detail::svg_num(xmap(i)) << ',' << detail::svg_num(ymap(p.lower(i)))
          << ' ';
    }
    out << "\"/>\n";

    if (p.truth.size() > 0) {
      out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.0\" "
             "points=\"";
      for (Eigen::Index i = 0; i < n; ++i) {
        out << detail::svg_num(xmap(i)) << ','
            << detail::svg_num(ymap(p.truth(i))) << ' ';
      }
      out << "\"/>\n";
    }

    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" "
           "points=\"";
    for (Eigen::Index i = 0; i < n; ++i) {
      out << detail::svg_num(xmap(i)) << ',' << detail::svg_num(ymap(p.mean(i)))
          << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace bmms
