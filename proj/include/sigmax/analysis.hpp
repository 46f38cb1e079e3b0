#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "sigmax/operators.hpp"

namespace sigmax {

struct Histogram2D {
  std::vector<double> i_edges, q_edges;
  Eigen::MatrixXi counts;  ///< counts(i_bin, q_bin)

  int bins_i() const { return int(i_edges.size()) - 1; }
  int bins_q() const { return int(q_edges.size()) - 1; }
  long total() const { return counts.cast<long>().sum(); }
  cplx center(int i, int q) const {
    return {(i_edges[i] + i_edges[i + 1]) / 2, (q_edges[q] + q_edges[q + 1]) / 2};
  }
};

struct IQRange {
  double i_min, i_max, q_min, q_max;
};

/// Bins the samples on a regular grid; without `range` the grid spans the data.
/// Samples outside an explicit range are clamped into the edge bins.
Histogram2D histogram_iq(const std::vector<cplx>& samples, int bins_i, int bins_q,
                         std::optional<IQRange> range = {});

/// (skew^2 + 1) / (excess kurtosis + 3 (n-1)^2 / ((n-2)(n-3))) of the samples projected on their
/// principal axis. Values above 5/9 indicate bimodality.
double bimodality_coefficient(const std::vector<cplx>& samples);

struct GaussianComponent {
  cplx mean;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  double weight = 0;
};

struct FitOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;       ///< on the change of mean log-likelihood per sample
  bool shared_covariance = false;
  bool sheppard_correction = true;  ///< remove the bin-width variance w^2/12
};

struct FitResult {
  std::vector<GaussianComponent> components;
  double log_likelihood = 0;   ///< per sample
  int iterations = 0;
  bool converged = false;      ///< false reports NonConvergence; the best fit so far is returned
};

/// Gaussian mixture by expectation maximization on the histogram bin centers weighted by counts.
/// Initial means come from `init` or from deterministic k-means.
FitResult fit_components(const Histogram2D& hist, int k, const std::vector<cplx>& init = {},
                         const FitOptions& options = {});

/// zeta = (kappa/2)(Re a+/Im a+ - Re a-/Im a-); throws DegenerateGeometry if either Im part
/// is below `tol` relative to the magnitude.
double extract_zeta(cplx mean_plus, cplx mean_minus, double kappa, double tol = 1e-12);

/// Perpendicular bisector of two means.
struct Separatrix {
  cplx point;
  cplx normal;  ///< points toward `first`
  /// true on the side of the first mean
  bool first_side(cplx x) const {
    return ((x - point) * std::conj(normal)).real() > 0;
  }
};

Separatrix separatrix(cplx first, cplx second);

struct FilterParams {
  double sigma = 0.70710678118654752;  ///< per-quadrature width of the components
  double radius_sigmas = 3.0;
  int latch = 2;          ///< consecutive bins needed to switch
  bool backfill = true;   ///< assign a confirmed switch to the first bin of the run
};

constexpr int kUndecided = -1;

struct JumpTrace {
  std::vector<int> states;
  FilterParams params;
};

/// Latching estimator: switch only after `latch` consecutive samples fall within the radius of
/// the same different center. The initial state is the nearest center.
JumpTrace two_point_filter(const std::vector<cplx>& samples, const std::vector<cplx>& centers,
                           const FilterParams& params = {});

/// Fraction of positions where the two sequences agree.
double agreement(const std::vector<int>& a, const std::vector<int>& b);

struct DwellOptions {
  int dead_bins = 1;              ///< visits of this many bins or fewer go undetected
  bool missed_event_correction = true;
};

struct DwellStatistics {
  int n_states = 0;
  Eigen::MatrixXi transitions;    ///< transitions(i, j) from i to j
  Eigen::VectorXd occupancy;      ///< fraction of bins per state
  Eigen::VectorXd naive_mean_dwell;  ///< mean length of completed visits, seconds
  Eigen::VectorXd exit_rate;      ///< 1/s
  Eigen::MatrixXd rates;          ///< rates(i, j), 1/s
  bool insufficient_jumps = false;   ///< fewer than 10 transitions

  double mean_dwell(int state) const { return 1.0 / exit_rate(state); }
  double transition_time(int from, int to) const { return 1.0 / rates(from, to); }
};

/// Geometric maximum likelihood per state over completed and censored visits, shifted by the
/// dead time, with an iterated first-order correction for visits too short to be detected.
DwellStatistics dwell_statistics(const std::vector<int>& states, double t_m, int n_states,
                                 const DwellOptions& options = {});

struct Imperfection {
  double scale = 0.88;
  double shift = -0.02;
  double apply(double x) const { return scale * x + shift; }
};

/// (w_plus - w_minus) / (w_plus + w_minus); f weight is excluded by the renormalization.
double expectation_sigma_x(double w_plus, double w_minus);

/// Same, from assigned states (minus = 0, plus = 1, others ignored).
double expectation_sigma_x(const std::vector<int>& states);

struct PhaseAngleTrace {
  std::vector<double> psi;
  cplx circumcenter;
};

cplx circumcenter(cplx a, cplx b, cplx c);

/// Angle of every sample about the circumcenter of the three centers, in (-pi, pi].
PhaseAngleTrace phase_angle_trace(const std::vector<cplx>& samples, cplx c0, cplx c1, cplx c2);

}  // namespace sigmax
