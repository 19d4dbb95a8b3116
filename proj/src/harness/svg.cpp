#include <algorithm>
#include <cmath>
#include <cstdio>

#include "toriclab/harness/run.hpp"

namespace toriclab::harness {

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x, const std::vector<double>& y, bool log_y,
                     const std::string& hash) {
  const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> yy(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) yy[i] = log_y ? std::log10(std::max(y[i], 1e-300)) : y[i];
  auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  auto [ymin_it, ymax_it] = std::minmax_element(yy.begin(), yy.end());
  double x0 = x.empty() ? 0 : *xmin_it, x1 = x.empty() ? 1 : *xmax_it;
  double y0 = yy.empty() ? 0 : *ymin_it, y1 = yy.empty() ? 1 : *ymax_it;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" font-family=\"sans-serif\" "
                "font-size=\"12\">\n",
                W, H);
  s += buf;
  s += "<!-- config_hash=" + hash + " -->\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">", W / 2);
  s += buf + title + "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                L, H - B, W - R, H - B, L, H - B, L, T);
  s += buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%.4g</text>\n", px(xv),
                  H - B + 16, xv);
    s += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s%.3g</text>\n", L - 6,
                  py(yv) + 4, log_y ? "1e" : "", yv);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">", (L + W - R) / 2, H - 12);
  s += buf + x_label + "</text>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"16\" y=\"%g\" transform=\"rotate(-90 16 %g)\" text-anchor=\"middle\">",
                (T + H - B) / 2, (T + H - B) / 2);
  s += buf + y_label + (log_y ? " (log10)" : "") + "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(x[i]), py(yy[i]));
    s += buf;
  }
  s += "\"/>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#1f5fa8\"/>\n", px(x[i]), py(yy[i]));
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace toriclab::harness
