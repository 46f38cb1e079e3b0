#pragma once

#include <string>
#include <vector>

namespace sigmax {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Line plot; an empty series list still renders labeled axes.
std::string svg_lines(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

/// Heatmap of counts(i, q) on the given bin edges, I horizontal.
std::string svg_heatmap(const std::vector<double>& i_edges, const std::vector<double>& q_edges,
                        const std::vector<std::vector<long>>& counts, const std::string& title);

/// Renders every output listed in dir/manifest.json that has a known layout.
/// Returns the written SVG paths. Throws MissingOutput if the manifest or a listed file is absent.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace sigmax
