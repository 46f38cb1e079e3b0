#include "sigmax/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "sigmax/errors.hpp"
#include "sigmax/scenario.hpp"

namespace sigmax {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  double to_px(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

Axis make_axis(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0, 1};
  if (hi <= lo) {
    const double pad = lo == 0 ? 1 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.04;
  return {lo - pad, hi + pad};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(4) << v;
  return ss.str();
}

void frame(std::ostringstream& o, const Axis& x, const Axis& y, const std::string& title,
           const std::string& xl, const std::string& yl) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  o << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x.lo + (x.hi - x.lo) * k / 4, vy = y.lo + (y.hi - y.lo) * k / 4;
    const double px = x.to_px(vx, x0, x1), py = y.to_px(vy, y0, y1);
    o << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
      << "\" stroke=\"#333\"/><text x=\"" << px << "\" y=\"" << y0 + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(vx) << "</text>\n";
    o << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
      << "\" stroke=\"#333\"/><text x=\"" << x0 - 8 << "\" y=\"" << py + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(vy) << "</text>\n";
  }
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">"
    << escape(title) << "</text>\n";
  o << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
    << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"12\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << escape(yl) << "</text>\n";
}

std::string open_svg() {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return o.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : int(it - header.begin());
  }
  std::vector<double> numbers(int col) const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r.at(col)));
    return out;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

Csv read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingOutput("missing output " + path.string());
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

bool numeric(const Csv& csv, int col) {
  if (csv.rows.empty()) return false;
  try {
    std::size_t used = 0;
    std::stod(csv.rows[0].at(col), &used);
    return used == csv.rows[0][col].size();
  } catch (...) {
    return false;
  }
}

void save(const fs::path& path, const std::string& svg, std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out) throw MissingOutput("cannot write " + path.string());
  out << svg;
  written.push_back(path.string());
}

// Edges from evenly spaced bin centers.
std::vector<double> edges_from_centers(std::vector<double> c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  const double w = c.size() > 1 ? (c.back() - c.front()) / double(c.size() - 1) : 1.0;
  std::vector<double> e;
  for (double v : c) e.push_back(v - w / 2);
  e.push_back(c.back() + w / 2);
  return e;
}

std::string heatmap_from_csv(const Csv& csv, const std::string& title) {
  const std::vector<double> ic = csv.numbers(0), qc = csv.numbers(1), n = csv.numbers(2);
  const std::vector<double> ie = edges_from_centers(ic), qe = edges_from_centers(qc);
  std::vector<std::vector<long>> counts(ie.size() - 1, std::vector<long>(qe.size() - 1, 0));
  auto locate = [](const std::vector<double>& e, double v) {
    const auto it = std::upper_bound(e.begin(), e.end(), v);
    return std::clamp(int(it - e.begin()) - 1, 0, int(e.size()) - 2);
  };
  for (std::size_t k = 0; k < n.size(); ++k) counts[locate(ie, ic[k])][locate(qe, qc[k])] = long(n[k]);
  return svg_heatmap(ie, qe, counts, title);
}

std::string sweep_plot(const Csv& csv, const std::string& title, const std::string& y_label) {
  std::vector<Series> series;
  const std::vector<double> x = csv.numbers(0);
  for (int c = 1; c < int(csv.header.size()); ++c) {
    if (!numeric(csv, c)) continue;
    series.push_back({csv.header[c], x, csv.numbers(c)});
  }
  return svg_lines(series, title, csv.header[0], y_label);
}

}  // namespace

std::string svg_lines(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xlo = std::min(xlo, s.x[k]);
      xhi = std::max(xhi, s.x[k]);
      ylo = std::min(ylo, s.y[k]);
      yhi = std::max(yhi, s.y[k]);
    }
  }
  const Axis x = make_axis(xlo, xhi), y = make_axis(ylo, yhi);
  std::ostringstream o;
  o << open_svg();
  frame(o, x, y, title, x_label, y_label);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(series[s].x.size(), series[s].y.size()); ++k) {
      if (!std::isfinite(series[s].x[k]) || !std::isfinite(series[s].y[k])) continue;
      o << x.to_px(series[s].x[k], x0, x1) << ',' << y.to_px(series[s].y[k], y0, y1) << ' ';
    }
    o << "\"/>\n";
    o << "<text x=\"" << x1 - 6 << "\" y=\"" << y1 + 16 + 15 * s << "\" font-size=\"11\" fill=\""
      << color << "\" text-anchor=\"end\">" << escape(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_heatmap(const std::vector<double>& i_edges, const std::vector<double>& q_edges,
                        const std::vector<std::vector<long>>& counts, const std::string& title) {
  if (i_edges.size() < 2 || q_edges.size() < 2 || counts.size() != i_edges.size() - 1) {
    throw DimensionMismatch("svg_heatmap: counts do not match the bin edges");
  }
  long peak = 1;
  for (const auto& row : counts) {
    if (row.size() != q_edges.size() - 1) throw DimensionMismatch("svg_heatmap: ragged counts");
    for (long v : row) peak = std::max(peak, v);
  }
  const Axis x{i_edges.front(), i_edges.back()}, y{q_edges.front(), q_edges.back()};
  std::ostringstream o;
  o << open_svg();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t i = 0; i + 1 < i_edges.size(); ++i) {
    for (std::size_t q = 0; q + 1 < q_edges.size(); ++q) {
      if (counts[i][q] == 0) continue;
      // log color scale so that the tails stay visible
      const double level = std::log1p(double(counts[i][q])) / std::log1p(double(peak));
      const int shade = int(std::lround(255 * (1 - level)));
      const double px = x.to_px(i_edges[i], x0, x1), pw = x.to_px(i_edges[i + 1], x0, x1) - px;
      const double py = y.to_px(q_edges[q + 1], y0, y1), ph = y.to_px(q_edges[q], y0, y1) - py;
      o << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw + 0.3 << "\" height=\""
        << ph + 0.3 << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
    }
  }
  frame(o, x, y, title, "I (sqrt photon)", "Q (sqrt photon)");
  o << "</svg>\n";
  return o.str();
}

std::vector<std::string> emit_plots(const std::string& dir) {
  const RunManifest m = read_manifest(dir);
  const fs::path base(dir);
  std::vector<std::string> written;
  for (const auto& out : m.outputs) {
    const fs::path src = base / out.path;
    const std::string stem = src.stem().string();
    if (src.extension() != ".csv") {
      if (!fs::exists(src)) throw MissingOutput("missing output " + src.string());
      continue;
    }
    const Csv csv = read_csv(src);
    const fs::path svg = base / (stem + ".svg");
    if (stem.rfind("fig2_omega_", 0) == 0) {
      save(svg, heatmap_from_csv(csv, "IQ histogram, Omega_R/2pi = " + stem.substr(11) + " MHz"), written);
    } else if (stem == "fig3_sweeps") {
      std::map<std::string, Csv> planes;
      for (const auto& row : csv.rows) {
        Csv& c = planes[row.at(0)];
        if (c.header.empty()) c.header = {csv.header.begin() + 1, csv.header.end()};
        c.rows.emplace_back(row.begin() + 1, row.end());
      }
      for (const auto& [plane, c] : planes) {
        save(base / ("fig3_" + plane + ".svg"),
             sweep_plot(c, "<sigma_x> after preparation, " + plane + " plane", "<sigma_x>"), written);
      }
    } else if (stem.size() > 6 && stem.substr(stem.size() - 6) == "_trace") {
      const std::vector<double> t = csv.numbers(csv.column("t_us"));
      std::vector<Series> s{{"psi", t, csv.numbers(csv.column("psi"))}};
      save(svg, svg_lines(s, "Phase angle trace", "t (us)", "psi (rad)"), written);
    } else if (stem == "fig2_summary") {
      save(svg, sweep_plot(csv, "Bimodality", "coefficient"), written);
    } else if (stem.rfind("supp1", 0) == 0) {
      save(svg, sweep_plot(csv, stem, stem == "supp1a_zeta" ? "MHz" : "value"), written);
    }
  }
  return written;
}

}  // namespace sigmax
