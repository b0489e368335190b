#include "pnp/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pnp {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

bool usable(double x, double y, bool log_y) { return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0); }

// Roughly five round-numbered ticks covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double left = 80, right = 150, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i], opt.log_y)) continue;
      const double y = opt.log_y ? std::log10(s.y[i]) : s.y[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  const bool empty = !std::isfinite(xmin);
  if (empty) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (opt.log_y) {
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax == ymin) ymax = ymin + 1;
  } else if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      opt.width, opt.height, opt.width, opt.height);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", opt.width, opt.height);
  out += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     left + pw / 2, escape(opt.title));
  out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                     left, top, pw, ph);

  // y ticks
  if (opt.log_y) {
    const int decades = static_cast<int>(ymax - ymin);
    const int every = std::max(1, decades / 8);
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += every) {
      const double y = py(e);
      out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", left, y,
                         left + pw, y);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n",
                         left - 6, y + 4, e);
    }
  } else {
    for (double t : linear_ticks(ymin, ymax)) {
      const double y = py(t);
      out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", left, y,
                         left + pw, y);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:g}</text>\n",
                         left - 6, y + 4, t);
    }
  }
  for (double t : linear_ticks(xmin, xmax)) {
    const double x = px(t);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:g}</text>\n",
                       x, top + ph + 16, t);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     left + pw / 2, top + ph + 38, escape(opt.x_label));
  out += fmt::format("<text x=\"18\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}</text>\n",
                     top + ph / 2, top + ph / 2, escape(opt.y_label + (opt.log_y ? " (log)" : "")));

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i], opt.log_y)) continue;
      const double y = opt.log_y ? std::log10(s.y[i]) : s.y[i];
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(y));
    }
    if (!pts.empty()) pts.pop_back();
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", color,
                       s.dashed ? " stroke-dasharray=\"6 3\"" : "", pts);
    const double ly = top + 14 + 16.0 * static_cast<double>(si);
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                       left + pw + 10, ly, left + pw + 30, ly, color, s.dashed ? " stroke-dasharray=\"6 3\"" : "");
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                       left + pw + 35, ly + 4, escape(s.name));
  }
  out += "</svg>\n";
  return out;
}

std::vector<double> trace_column(const ParsedTrace& trace, const std::string& column) {
  std::vector<double> v;
  v.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    if (column == "k") v.push_back(r.k);
    else if (column == "dist") v.push_back(r.dist);
    else if (column == "snr_db") v.push_back(r.snr_db);
    else if (column == "elapsed_s") v.push_back(r.elapsed_seconds);
    else throw ConfigError("trace_column: unknown column '" + column + "'");
  }
  return v;
}

std::string svg_from_trace_csvs(const std::vector<std::pair<std::string, std::string>>& named_csvs,
                                const std::string& x_column, const std::string& y_column, PlotOptions options) {
  std::vector<PlotSeries> series;
  for (const auto& [name, text] : named_csvs) {
    const ParsedTrace t = parse_trace_csv(text);
    PlotSeries s;
    s.name = name;
    s.x = trace_column(t, x_column);
    s.y = trace_column(t, y_column);
    s.dashed = name.find("acc") != std::string::npos;
    series.push_back(std::move(s));
  }
  if (options.x_label.empty() || options.x_label == "iteration") options.x_label = x_column == "k" ? "iteration" : x_column;
  options.y_label = y_column;
  return render_svg(series, options);
}

}  // namespace pnp
