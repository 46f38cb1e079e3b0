#include "sigmax/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sigmax {

Histogram2D histogram_iq(const std::vector<cplx>& samples, int bins_i, int bins_q,
                         std::optional<IQRange> range) {
  if (samples.empty()) throw EmptyRecord("histogram_iq: no samples");
  if (bins_i < 2 || bins_q < 2) throw InvalidParams("histogram_iq: need at least 2 bins per axis");
  IQRange r;
  if (range) {
    r = *range;
  } else {
    r = {samples[0].real(), samples[0].real(), samples[0].imag(), samples[0].imag()};
    for (const cplx& s : samples) {
      r.i_min = std::min(r.i_min, s.real());
      r.i_max = std::max(r.i_max, s.real());
      r.q_min = std::min(r.q_min, s.imag());
      r.q_max = std::max(r.q_max, s.imag());
    }
  }
  // a degenerate span still needs finite bins
  if (!(r.i_max > r.i_min)) { r.i_min -= 0.5; r.i_max += 0.5; }
  if (!(r.q_max > r.q_min)) { r.q_min -= 0.5; r.q_max += 0.5; }

  Histogram2D h;
  h.i_edges.resize(bins_i + 1);
  h.q_edges.resize(bins_q + 1);
  for (int k = 0; k <= bins_i; ++k) h.i_edges[k] = r.i_min + (r.i_max - r.i_min) * k / bins_i;
  for (int k = 0; k <= bins_q; ++k) h.q_edges[k] = r.q_min + (r.q_max - r.q_min) * k / bins_q;
  h.counts = Eigen::MatrixXi::Zero(bins_i, bins_q);
  const double wi = (r.i_max - r.i_min) / bins_i, wq = (r.q_max - r.q_min) / bins_q;
  for (const cplx& s : samples) {
    const int i = std::clamp(int(std::floor((s.real() - r.i_min) / wi)), 0, bins_i - 1);
    const int q = std::clamp(int(std::floor((s.imag() - r.q_min) / wq)), 0, bins_q - 1);
    ++h.counts(i, q);
  }
  return h;
}

double bimodality_coefficient(const std::vector<cplx>& samples) {
  const double n = double(samples.size());
  if (samples.size() < 4) throw EmptyRecord("bimodality_coefficient: need at least 4 samples");
  cplx mean = 0;
  for (const cplx& s : samples) mean += s;
  mean /= n;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const cplx& s : samples) {
    const Eigen::Vector2d d(s.real() - mean.real(), s.imag() - mean.imag());
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov / n);
  const Eigen::Vector2d axis = es.eigenvectors().col(1);
  double m2 = 0, m3 = 0, m4 = 0;
  for (const cplx& s : samples) {
    const double x = axis(0) * (s.real() - mean.real()) + axis(1) * (s.imag() - mean.imag());
    m2 += x * x;
    m3 += x * x * x;
    m4 += x * x * x * x;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 == 0) return 0;
  const double skew = m3 / std::pow(m2, 1.5);
  const double kurt = m4 / (m2 * m2) - 3;
  return (skew * skew + 1) / (kurt + 3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3)));
}

// ---------------------------------------------------------------------------
// Mixture fit

namespace {

struct Point {
  Eigen::Vector2d x;
  double w;
};

Eigen::Vector2d vec(cplx c) { return {c.real(), c.imag()}; }

std::vector<Eigen::Vector2d> kmeans(const std::vector<Point>& pts, int k) {
  std::vector<Eigen::Vector2d> centers;
  auto heaviest = std::max_element(pts.begin(), pts.end(),
                                   [](const Point& a, const Point& b) { return a.w < b.w; });
  centers.push_back(heaviest->x);
  while (int(centers.size()) < k) {
    double best = -1;
    Eigen::Vector2d pick = centers[0];
    for (const Point& p : pts) {
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) dmin = std::min(dmin, (p.x - c).squaredNorm());
      if (p.w * dmin > best) {
        best = p.w * dmin;
        pick = p.x;
      }
    }
    centers.push_back(pick);
  }
  for (int it = 0; it < 100; ++it) {
    std::vector<Eigen::Vector2d> sum(k, Eigen::Vector2d::Zero());
    std::vector<double> mass(k, 0);
    for (const Point& p : pts) {
      int arg = 0;
      for (int j = 1; j < k; ++j) {
        if ((p.x - centers[j]).squaredNorm() < (p.x - centers[arg]).squaredNorm()) arg = j;
      }
      sum[arg] += p.w * p.x;
      mass[arg] += p.w;
    }
    bool moved = false;
    for (int j = 0; j < k; ++j) {
      if (mass[j] == 0) continue;
      const Eigen::Vector2d c = sum[j] / mass[j];
      moved = moved || (c - centers[j]).norm() > 1e-12;
      centers[j] = c;
    }
    if (!moved) break;
  }
  return centers;
}

double log_gauss(const Eigen::Vector2d& d, const Eigen::Matrix2d& inv, double log_det) {
  return -0.5 * d.dot(inv * d) - 0.5 * log_det - std::log(2 * std::numbers::pi);
}

}  // namespace

FitResult fit_components(const Histogram2D& hist, int k, const std::vector<cplx>& init,
                         const FitOptions& options) {
  if (k < 1 || k > 3) throw InvalidParams("fit_components: k must be 1, 2 or 3");
  if (!init.empty() && int(init.size()) != k) {
    throw InvalidParams("fit_components: init must supply k means");
  }
  std::vector<Point> pts;
  double total = 0;
  for (int i = 0; i < hist.bins_i(); ++i) {
    for (int q = 0; q < hist.bins_q(); ++q) {
      if (hist.counts(i, q) == 0) continue;
      pts.push_back({vec(hist.center(i, q)), double(hist.counts(i, q))});
      total += hist.counts(i, q);
    }
  }
  if (pts.empty()) throw EmptyRecord("fit_components: empty histogram");

  std::vector<Eigen::Vector2d> mu;
  if (init.empty()) {
    mu = kmeans(pts, k);
  } else {
    for (const cplx& c : init) mu.push_back(vec(c));
  }

  Eigen::Vector2d overall = Eigen::Vector2d::Zero();
  for (const Point& p : pts) overall += p.w * p.x;
  overall /= total;
  Eigen::Matrix2d spread = Eigen::Matrix2d::Zero();
  for (const Point& p : pts) spread += p.w * (p.x - overall) * (p.x - overall).transpose();
  spread /= total;
  const double wi = hist.i_edges[1] - hist.i_edges[0], wq = hist.q_edges[1] - hist.q_edges[0];
  const Eigen::Matrix2d floor = Eigen::Vector2d(wi * wi, wq * wq).asDiagonal() * (1.0 / 12);
  Eigen::Matrix2d start = spread / (k * k) + floor;

  std::vector<Eigen::Matrix2d> cov(k, start);
  std::vector<double> weight(k, 1.0 / k);
  std::vector<double> resp(pts.size() * k);

  FitResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  double previous = -std::numeric_limits<double>::infinity();
  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations; ++it) {
    std::vector<Eigen::Matrix2d> inv(k);
    std::vector<double> log_det(k);
    for (int j = 0; j < k; ++j) {
      inv[j] = cov[j].inverse();
      log_det[j] = std::log(cov[j].determinant());
    }
    double ll = 0;
    for (std::size_t b = 0; b < pts.size(); ++b) {
      double lmax = -std::numeric_limits<double>::infinity();
      double* r = &resp[b * k];
      for (int j = 0; j < k; ++j) {
        r[j] = std::log(std::max(weight[j], 1e-300)) + log_gauss(pts[b].x - mu[j], inv[j], log_det[j]);
        lmax = std::max(lmax, r[j]);
      }
      double s = 0;
      for (int j = 0; j < k; ++j) s += (r[j] = std::exp(r[j] - lmax));
      for (int j = 0; j < k; ++j) r[j] /= s;
      ll += pts[b].w * (lmax + std::log(s));
    }
    ll /= total;

    if (ll > best.log_likelihood) {
      best.components.clear();
      for (int j = 0; j < k; ++j) {
        best.components.push_back({cplx(mu[j](0), mu[j](1)), cov[j], weight[j]});
      }
      best.log_likelihood = ll;
    }
    if (std::abs(ll - previous) < options.tolerance) {
      converged = true;
      break;
    }
    previous = ll;

    Eigen::Matrix2d pooled = Eigen::Matrix2d::Zero();
    for (int j = 0; j < k; ++j) {
      double mass = 0;
      Eigen::Vector2d m = Eigen::Vector2d::Zero();
      for (std::size_t b = 0; b < pts.size(); ++b) {
        const double rw = resp[b * k + j] * pts[b].w;
        mass += rw;
        m += rw * pts[b].x;
      }
      if (mass <= 0) continue;
      m /= mass;
      Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
      for (std::size_t b = 0; b < pts.size(); ++b) {
        const Eigen::Vector2d d = pts[b].x - m;
        c += resp[b * k + j] * pts[b].w * d * d.transpose();
      }
      pooled += c;
      mu[j] = m;
      cov[j] = c / mass + 1e-12 * Eigen::Matrix2d::Identity();
      weight[j] = mass / total;
    }
    if (options.shared_covariance) {
      for (int j = 0; j < k; ++j) cov[j] = pooled / total + 1e-12 * Eigen::Matrix2d::Identity();
    }
  }

  best.iterations = it;
  best.converged = converged;
  if (options.sheppard_correction) {
    for (auto& c : best.components) {
      const Eigen::Matrix2d corrected = c.covariance - floor;
      if (corrected.determinant() > 0 && corrected(0, 0) > 0) c.covariance = corrected;
    }
  }
  return best;
}

double extract_zeta(cplx mean_plus, cplx mean_minus, double kappa, double tol) {
  if (std::abs(mean_plus.imag()) <= tol * std::abs(mean_plus) ||
      std::abs(mean_minus.imag()) <= tol * std::abs(mean_minus) || mean_plus == 0.0 ||
      mean_minus == 0.0) {
    throw DegenerateGeometry("extract_zeta: pointer state with vanishing imaginary part");
  }
  return kappa / 2 *
         (mean_plus.real() / mean_plus.imag() - mean_minus.real() / mean_minus.imag());
}

Separatrix separatrix(cplx first, cplx second) {
  if (first == second) throw DegenerateGeometry("separatrix: coincident means");
  const cplx d = first - second;
  return {(first + second) / 2.0, d / std::abs(d)};
}

// ---------------------------------------------------------------------------
// Jump detection

JumpTrace two_point_filter(const std::vector<cplx>& samples, const std::vector<cplx>& centers,
                           const FilterParams& params) {
  if (centers.size() < 2) throw InvalidParams("two_point_filter: need at least 2 centers");
  if (params.latch < 1) throw InvalidParams("two_point_filter: latch must be >= 1");
  JumpTrace out{std::vector<int>(samples.size(), kUndecided), params};
  if (samples.empty()) return out;

  const double radius = params.radius_sigmas * params.sigma;
  auto nearest = [&](cplx x, double& dist) {
    int arg = 0;
    dist = std::abs(x - centers[0]);
    for (std::size_t j = 1; j < centers.size(); ++j) {
      const double d = std::abs(x - centers[j]);
      if (d < dist) {
        dist = d;
        arg = int(j);
      }
    }
    return arg;
  };

  double dist = 0;
  int state = nearest(samples[0], dist);
  out.states[0] = state;
  int candidate = kUndecided, run = 0;
  for (std::size_t n = 1; n < samples.size(); ++n) {
    const int c = nearest(samples[n], dist);
    if (dist < radius && c != state) {
      run = c == candidate ? run + 1 : 1;
      candidate = c;
    } else {
      candidate = kUndecided;
      run = 0;
    }
    if (run >= params.latch) {
      state = candidate;
      if (params.backfill) {
        for (int k = 1; k < params.latch; ++k) out.states[n - k] = state;
      }
      candidate = kUndecided;
      run = 0;
    }
    out.states[n] = state;
  }
  return out;
}

double agreement(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("agreement: length mismatch");
  if (a.empty()) throw EmptyRecord("agreement: empty sequences");
  std::size_t same = 0;
  for (std::size_t k = 0; k < a.size(); ++k) same += a[k] == b[k];
  return double(same) / a.size();
}

DwellStatistics dwell_statistics(const std::vector<int>& states, double t_m, int n_states,
                                 const DwellOptions& options) {
  if (states.size() < 100) throw EmptyRecord("dwell_statistics: need at least 100 bins");
  if (!(t_m > 0)) throw InvalidParams("dwell_statistics: t_m must be > 0");

  struct Run {
    int state;
    long length;
  };
  std::vector<Run> runs;
  for (int s : states) {
    if (s >= n_states) throw InvalidParams("dwell_statistics: state index out of range");
    if (!runs.empty() && runs.back().state == s) ++runs.back().length;
    else runs.push_back({s, 1});
  }

  DwellStatistics out;
  out.n_states = n_states;
  out.transitions = Eigen::MatrixXi::Zero(n_states, n_states);
  out.occupancy = Eigen::VectorXd::Zero(n_states);
  out.naive_mean_dwell = Eigen::VectorXd::Constant(n_states, std::numeric_limits<double>::quiet_NaN());
  out.exit_rate = Eigen::VectorXd::Zero(n_states);
  out.rates = Eigen::MatrixXd::Zero(n_states, n_states);

  Eigen::VectorXd exposure = Eigen::VectorXd::Zero(n_states);
  Eigen::VectorXd exits = Eigen::VectorXd::Zero(n_states);
  Eigen::VectorXd complete_len = Eigen::VectorXd::Zero(n_states);
  Eigen::VectorXi complete_n = Eigen::VectorXi::Zero(n_states);
  long valid_bins = 0;
  const long dead = options.dead_bins;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const Run& r = runs[k];
    if (r.state < 0) continue;
    out.occupancy(r.state) += r.length;
    valid_bins += r.length;
    const bool first = k == 0, last = k + 1 == runs.size();
    const bool exit_seen = !last && runs[k + 1].state >= 0;
    // the start of a first run is not a detected switch, so no dead time applies to it
    const long shift = first ? 0 : dead;
    exposure(r.state) += std::max(0L, r.length - shift);
    if (exit_seen) {
      exits(r.state) += 1;
      ++out.transitions(r.state, runs[k + 1].state);
    }
    if (!first && !last) {
      complete_len(r.state) += r.length;
      ++complete_n(r.state);
    }
  }
  if (valid_bins > 0) out.occupancy /= double(valid_bins);
  for (int i = 0; i < n_states; ++i) {
    if (complete_n(i) > 0) out.naive_mean_dwell(i) = complete_len(i) / complete_n(i) * t_m;
    if (exposure(i) <= 0 || exits(i) == 0) continue;
    const double q = std::min(exits(i) / exposure(i), 1.0 - 1e-12);
    out.exit_rate(i) = -std::log1p(-q) / t_m;
    for (int j = 0; j < n_states; ++j) {
      out.rates(i, j) = out.exit_rate(i) * out.transitions(i, j) / exits(i);
    }
  }

  if (options.missed_event_correction && dead > 0) {
    const Eigen::MatrixXd raw = out.rates;
    const double tau = dead * t_m;
    Eigen::VectorXd lambda = raw.rowwise().sum();
    for (int it = 0; it < 100; ++it) {
      Eigen::MatrixXd next = raw;
      for (int i = 0; i < n_states; ++i) {
        for (int j = 0; j < n_states; ++j) next(i, j) *= std::exp(lambda(j) * tau);
      }
      const Eigen::VectorXd updated = next.rowwise().sum();
      out.rates = next;
      if ((updated - lambda).cwiseAbs().maxCoeff() <= 1e-12 * updated.cwiseAbs().maxCoeff()) break;
      lambda = updated;
    }
    out.exit_rate = out.rates.rowwise().sum();
  }
  out.insufficient_jumps = out.transitions.sum() < 10;
  return out;
}

double expectation_sigma_x(double w_plus, double w_minus) {
  if (w_plus < 0 || w_minus < 0) throw InvalidParams("expectation_sigma_x: negative weight");
  const double total = w_plus + w_minus;
  if (total == 0) throw EmptyRecord("expectation_sigma_x: no plus or minus weight");
  return (w_plus - w_minus) / total;
}

double expectation_sigma_x(const std::vector<int>& states) {
  double plus = 0, minus = 0;
  for (int s : states) {
    if (s == 1) plus += 1;
    else if (s == 0) minus += 1;
  }
  return expectation_sigma_x(plus, minus);
}

cplx circumcenter(cplx a, cplx b, cplx c) {
  const double ax = a.real(), ay = a.imag(), bx = b.real(), by = b.imag();
  const double cx = c.real(), cy = c.imag();
  const double d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  const double scale = std::max({std::abs(a - b), std::abs(b - c), std::abs(c - a)});
  if (scale == 0 || std::abs(d) <= 1e-12 * scale * scale) {
    throw CollinearCenters("circumcenter: centers are collinear");
  }
  const double a2 = std::norm(a), b2 = std::norm(b), c2 = std::norm(c);
  const double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
  const double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
  return {ux, uy};
}

PhaseAngleTrace phase_angle_trace(const std::vector<cplx>& samples, cplx c0, cplx c1, cplx c2) {
  PhaseAngleTrace out;
  out.circumcenter = circumcenter(c0, c1, c2);
  out.psi.reserve(samples.size());
  for (const cplx& s : samples) {
    double a = std::arg(s - out.circumcenter);
    if (a <= -std::numbers::pi) a = std::numbers::pi;
    out.psi.push_back(a);
  }
  return out;
}

}  // namespace sigmax
