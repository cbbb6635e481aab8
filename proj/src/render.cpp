#include "dvspix/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dvspix/io.hpp"

namespace dvspix {

namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 64, kRight = 16, kTop = 28, kBottom = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

std::string render_cell_svg(const CellStats& cell) {
  const TriggerTimeHistogram& h = cell.histogram;
  const double x_max = h.origin + static_cast<double>(h.counts.size()) * h.bin_width;
  const double y_max = static_cast<double>(std::max<std::uint64_t>(h.peak(), 1));
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - h.origin) / (x_max - h.origin) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / (y_max * 1.05) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  svg << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";

  // bars
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    const double x0 = px(h.origin + static_cast<double>(i) * h.bin_width);
    const double x1 = px(h.origin + static_cast<double>(i + 1) * h.bin_width);
    const double y = py(static_cast<double>(h.counts[i]));
    svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\""
        << num(std::max(x1 - x0 - 0.5, 0.5)) << "\" height=\"" << num(kTop + plot_h - y)
        << "\" fill=\"#4878cf\"/>\n";
  }

  // raw inverse-Gaussian overlay, scaled to the count area
  if (std::isfinite(cell.fit_raw.shape) && cell.fit_raw.shape > 0.0) {
    const double area = static_cast<double>(h.total()) * h.bin_width;
    svg << "<polyline fill=\"none\" stroke=\"#d43d3d\" stroke-width=\"1.8\" "
           "stroke-dasharray=\"7,4\" points=\"";
    const int steps = 256;
    for (int i = 0; i <= steps; ++i) {
      const double x = h.origin + (x_max - h.origin) * i / steps;
      const double y = area * inverse_gaussian_pdf(x, cell.fit_raw.mean, cell.fit_raw.shape);
      svg << num(px(x)) << "," << num(py(std::min(y, y_max * 1.05))) << " ";
    }
    svg << "\"/>\n";
  }

  // gap end marker
  if (cell.gap.gap_length > 0.0) {
    const double gx = px(cell.gap.gap_start + cell.gap.gap_length);
    svg << "<line x1=\"" << num(gx) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(gx)
        << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"#444444\" stroke-width=\"1\" "
           "stroke-dasharray=\"3,3\"/>\n";
    svg << "<text x=\"" << num(gx + 4) << "\" y=\"" << num(kTop + 14)
        << "\" font-size=\"12\" fill=\"#444444\">gap " << sci(cell.gap.gap_length)
        << " s</text>\n";
  }

  // axes
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
      << num(kLeft + plot_w) << "\" y2=\"" << num(kTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = h.origin + (x_max - h.origin) * i / 5;
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << sci(x) << "</text>\n";
    const double y = y_max * i / 5;
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << sci(y) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kH - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">inter-event interval [s]</text>\n";
  svg << "<text x=\"14\" y=\"" << num(kTop + plot_h / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(kTop + plot_h / 2) << ")\">events per bin</text>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"18\" font-size=\"13\">mu=" << sci(cell.mu_center)
      << " units/s, L=" << sci(cell.l_center) << ", n=" << cell.n_samples
      << ", gap*mu=" << sci(cell.product) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_cell_svg(const std::filesystem::path& path, const CellStats& cell) {
  atomic_write(path, render_cell_svg(cell));
}

}  // namespace dvspix
