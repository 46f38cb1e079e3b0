#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sigmax/hamiltonians.hpp"
#include "sigmax/lindblad.hpp"
#include "sigmax/params.hpp"
#include "sigmax/units.hpp"

namespace sigmax {

struct ReadoutModel {
  double epsilon_r = 0;
  double Delta_r = 0;
  double t_m = units::ns(400);
  double eta = 1.0;
  double gamma_m = units::mhz(2.8);   ///< informational; sets the Zeno rate of the sigma_z regime
  double signal_scale = 1.0;          ///< excess separation factor of the amplifier chain
  double noise_sigma = 0.70710678118654752;  ///< per-quadrature bin noise, sqrt(photon)

  void validate() const;
};

/// Readout drive and detuning taken from the device parameters.
ReadoutModel default_readout(const SystemParams& p);

struct PointerStates {
  cplx a_minus, a_plus, a_f;
};

/// a_{-+} = -eps_r / (-+ zeta/2 + Delta_r - i kappa/2); a_f = -eps_r / (delta_f + Delta_r - i kappa/2).
/// delta_f is the phenomenological f-state pull; 0 places a_f on the symmetry axis of a_{+-}.
PointerStates pointer_states(const SystemParams& p, double zeta, const ReadoutModel& r,
                             double delta_f = 0);

struct IntegratedSignals {
  cplx s_minus, s_plus, s_f;
};

/// sqrt(eta kappa t_m) * signal_scale * a for each branch.
IntegratedSignals integrated_signal(const PointerStates& pointer, const ReadoutModel& r,
                                    double kappa);

/// |s_plus - s_minus| / noise_sigma.
double separation_in_sigma(const IntegratedSignals& s, const ReadoutModel& r);

/// signal_scale that yields `target` sigma separation for these pointer states.
double calibrate_signal_scale(const PointerStates& pointer, ReadoutModel r, double kappa,
                              double target);

// ---------------------------------------------------------------------------
// Markov emitter

enum MarkovState : int { minus = 0, plus = 1, f_state = 2 };

struct MarkovEmitter {
  Eigen::Matrix3d generator = Eigen::Matrix3d::Zero();  ///< Q(i, j) = rate i -> j, rows sum to 0
  std::array<cplx, 3> signal{};                         ///< integrated bin signal of each state
  std::array<std::string, 3> labels{"minus", "plus", "f"};
  int n_states = 3;
  bool mix_within_bin = false;  ///< emit the occupation-weighted signal of each bin

  void validate() const;
  Eigen::Vector3d stationary() const;
};

/// Rate matrix from the six transition rates (from x to y).
Eigen::Matrix3d markov_generator(double pm, double mp, double mf, double pf, double fm, double fp);

struct FLevelRates {
  double entry = 0;   ///< from each of |-> and |+>
  double exit = 0;    ///< to each of |-> and |+>
};

/// Symmetric entry, exit_total = 2/T1 split evenly, entry set for stationary f fraction `population`.
FLevelRates f_rates_for_population(double population, double T1);

/// Three-state sigma_x emitter: golden-rule rates, zeta pointers, f rates from `f`.
MarkovEmitter sigma_x_emitter(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f);

/// Emitter for the regime set by Omega_R. In the dispersive sigma_x regime (|Delta| >= 5 g_eff)
/// this is sigma_x_emitter; otherwise a two-state g/e emitter with chi pointers, thermal T1
/// rates and a Zeno flip rate Omega_R^2 / (2 gamma_m), mixed within each bin.
MarkovEmitter regime_emitter(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f);

struct IQRecord {
  std::vector<cplx> samples;
  double t_m = 0;
  std::uint64_t seed = 0;
  std::uint64_t params_hash = 0;
  std::map<std::string, double> metadata;
};

struct MarkovTrace {
  IQRecord record;
  std::vector<int> hidden;
};

/// Samples the chain once per bin (or in continuous time if mix_within_bin) and adds complex
/// Gaussian noise. initial_state < 0 draws from the stationary distribution.
MarkovTrace simulate_markov_trace(const MarkovEmitter& emitter, const ReadoutModel& r,
                                  double duration, std::uint64_t seed, int initial_state = -1);

// ---------------------------------------------------------------------------
// Diffusive heterodyne unraveling

/// Readout-frame model used by the diffusive engine on a 2-level qubit:
/// Delta_r d^dag d + ((Omega_R + zeta'/2)/2) sx + (zeta/2) d^dag d sx + Kerr + eps_r (d + d^dag),
/// with sqrt(kappa) d first among the collapse operators, golden-rule sx-ladder channels and the
/// bare qubit channels.
struct ReadoutFrameModel {
  Operator hamiltonian;
  std::vector<CollapseOperator> collapse;
  int measured_channel = 0;
};

ReadoutFrameModel readout_frame_model(const SystemParams& p, const ReadoutModel& r,
                                      const HilbertSpace& space);

/// Longest record the diffusive engine accepts.
inline constexpr double kMaxDiffusiveDuration = units::us(100);

struct DiffusiveOptions {
  double dt = units::ns(2);
  std::vector<double> checkpoints;  ///< times at which conditional states are stored
  int measured_channel = 0;
};

struct DiffusiveTrajectory {
  IQRecord record;
  std::vector<double> sigma_x;        ///< conditional <sx> at the end of every bin
  std::vector<Matrix> checkpoint_states;
};

/// Heterodyne SME with efficiency eta, stepped with the exact Lindblad propagator over dt
/// plus the two innovation terms. t_m must be a multiple of dt.
/// Throws StepFailure if the conditional state loses its trace and InvalidParams above
/// kMaxDiffusiveDuration.
DiffusiveTrajectory simulate_diffusive_trajectory(const Operator& h,
                                                  const std::vector<CollapseOperator>& collapse,
                                                  const ReadoutModel& r, const DensityMatrix& rho0,
                                                  double duration, std::uint64_t seed,
                                                  const DiffusiveOptions& options = {});

// ---------------------------------------------------------------------------
// State preparation

struct PrepOptions {
  double sigma = units::ns(4);
  double width_sigmas = 4;    ///< the pulse spans +- width_sigmas * sigma
  double cubic = 0;           ///< applied angle = theta + cubic * theta^3
  int n_cavity = 8;
  bool dissipation = true;
};

struct PreparedState {
  HamiltonianModel model;
  std::vector<CollapseOperator> collapse;
  double duration = 0;
  double peak_amplitude = 0;
  DensityMatrix rho;
};

/// Gaussian resonant pulse to the Bloch angles (theta, phi), evolved in the displaced frame with
/// the sideband on and the Rabi tone off. The start state is the sideband steady state
/// postselected on |g>; theta = 0 returns it without evolution.
PreparedState state_prep_sequence(double theta, double phi, const SystemParams& p,
                                  const PrepOptions& options = {});

}  // namespace sigmax
