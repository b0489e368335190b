#pragma once

#include "pnp/trace_csv.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pnp {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "dist";
  bool log_y = true;
  int width = 640;
  int height = 400;
};

/// Line plot; points that are non-finite (or nonpositive on a log axis) are skipped.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Column k, dist, snr_db or elapsed_s of a parsed trace.
std::vector<double> trace_column(const ParsedTrace& trace, const std::string& column);

/// Plot of y_column against x_column for each (name, csv text); a pure function of the CSVs.
std::string svg_from_trace_csvs(const std::vector<std::pair<std::string, std::string>>& named_csvs,
                                const std::string& x_column, const std::string& y_column,
                                PlotOptions options);

}  // namespace pnp
