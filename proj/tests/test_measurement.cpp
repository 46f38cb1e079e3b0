#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "sigmax/analysis.hpp"
#include "sigmax/measurement.hpp"
#include "sigmax/rates.hpp"

using namespace sigmax;
using units::mhz;
using units::us;

namespace {

ReadoutModel readout_for(const SystemParams& p) { return default_readout(p); }

MarkovEmitter two_state(double pm, double mp) {
  MarkovEmitter e;
  e.n_states = 2;
  e.generator = markov_generator(pm, mp, 0, 0, 0, 0);
  e.signal = {cplx(-1, 1), cplx(1, 1), cplx(0, 0)};
  return e;
}

// Generator recovered from the empirical one-bin transition matrix.
Eigen::MatrixXd empirical_generator(const std::vector<int>& hidden, int n, double t_m) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k < hidden.size(); ++k) counts(hidden[k - 1], hidden[k]) += 1;
  for (int i = 0; i < n; ++i) counts.row(i) /= counts.row(i).sum();
  return Eigen::MatrixXd(counts.log()) / t_m;
}

}  // namespace

TEST(Pointers, ZeroReadoutDrive) {
  SystemParams p = reference_device();
  p.epsilon_r = 0;
  const PointerStates ps = pointer_states(p, mhz(1.91), readout_for(p));
  EXPECT_EQ(std::abs(ps.a_minus) + std::abs(ps.a_plus) + std::abs(ps.a_f), 0.0);
}

TEST(Pointers, AngularSeparation) {
  SystemParams p = reference_device();
  const double zeta = mhz(1.91);
  p.Delta_r = 0;
  p.epsilon_r = std::sqrt(0.9 * (zeta * zeta + p.kappa * p.kappa) / 4);
  const PointerStates ps = pointer_states(p, zeta, readout_for(p));
  EXPECT_NEAR(std::norm(ps.a_plus), 0.9, 1e-12);
  EXPECT_NEAR(std::norm(ps.a_minus), 0.9, 1e-12);
  EXPECT_NEAR(std::abs(ps.a_plus + std::conj(ps.a_minus)), 0, 1e-12);  // mirror images about the Q axis
  const double angle = std::abs(std::arg(ps.a_plus / ps.a_minus)) * 180 / std::numbers::pi;
  EXPECT_NEAR(angle, 2 * std::atan(zeta / p.kappa) * 180 / std::numbers::pi, 1e-9);
  EXPECT_NEAR(angle, 51, 0.5);
}

TEST(Pointers, NoShiftNoContrast) {
  const SystemParams p = reference_device();
  const PointerStates ps = pointer_states(p, 0, readout_for(p));
  EXPECT_EQ(ps.a_plus, ps.a_minus);
}

TEST(Signals, Scaling) {
  const SystemParams p = reference_device();
  ReadoutModel r = readout_for(p);
  const PointerStates ps{cplx(1, 0), cplx(0, 1), cplx(0, 0)};
  const IntegratedSignals s = integrated_signal(ps, r, p.kappa);
  EXPECT_NEAR(p.kappa * r.t_m, 10.05, 0.01);
  EXPECT_NEAR(std::abs(s.s_minus), 3.17, 0.01);
  r.t_m = 1e-15;
  EXPECT_LT(std::abs(integrated_signal(ps, r, p.kappa).s_plus), 1e-3);
}

TEST(Signals, CalibratedSeparation) {
  const SystemParams p = reference_device();
  const ReadoutModel r = readout_for(p);
  const PointerStates ps = pointer_states(p, derive(p).zeta, r);
  ReadoutModel cal = r;
  cal.signal_scale = calibrate_signal_scale(ps, r, p.kappa, 5.4);
  EXPECT_NEAR(separation_in_sigma(integrated_signal(ps, cal, p.kappa), cal), 5.4, 1e-9);
  EXPECT_THROW(calibrate_signal_scale({cplx(1), cplx(1), cplx(0)}, r, p.kappa, 5.4), DegenerateGeometry);
}

TEST(Emitter, GeneratorRowsSumToZero) {
  const SystemParams p = reference_device();
  const MarkovEmitter e = sigma_x_emitter(p, readout_for(p), f_rates_for_population(0.08, p.T1));
  EXPECT_LT(e.generator.rowwise().sum().cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NO_THROW(e.validate());
  const TransitionRates g = golden_rule_rates(p, derive(p));
  EXPECT_NEAR(e.generator(plus, minus), g.gamma_plus_minus, 1e-9);
  EXPECT_NEAR(e.generator(minus, plus), g.gamma_minus_plus, 1e-9);
  EXPECT_NEAR(e.stationary()(f_state), 0.08, 1e-9);

  MarkovEmitter bad = e;
  bad.generator(0, 1) = -1;
  bad.generator(0, 0) = 1;
  EXPECT_THROW(bad.validate(), InvalidParams);
}

TEST(MarkovTrace, SeedDeterminism) {
  const MarkovEmitter e = two_state(2.5e5, 2.5e5);
  const ReadoutModel r;
  const auto a = simulate_markov_trace(e, r, us(200), 7);
  const auto b = simulate_markov_trace(e, r, us(200), 7);
  const auto c = simulate_markov_trace(e, r, us(200), 8);
  ASSERT_EQ(a.record.samples.size(), 500u);
  EXPECT_EQ(a.record.samples, b.record.samples);
  EXPECT_EQ(a.hidden, b.hidden);
  EXPECT_NE(a.record.samples, c.record.samples);
}

TEST(MarkovTrace, NoJumpMean) {
  const MarkovEmitter e = two_state(0, 0);
  const ReadoutModel r;
  const auto t = simulate_markov_trace(e, r, 0.01, 3, minus);
  cplx mean = 0;
  for (const cplx& s : t.record.samples) mean += s;
  mean /= double(t.record.samples.size());
  for (int h : t.hidden) ASSERT_EQ(h, minus);
  const double bound = 3 * r.noise_sigma / std::sqrt(double(t.record.samples.size()));
  EXPECT_LT(std::abs(mean.real() - e.signal[minus].real()), bound);
  EXPECT_LT(std::abs(mean.imag() - e.signal[minus].imag()), bound);
}

TEST(MarkovTrace, DwellTimeFromSymmetricRates) {
  const MarkovEmitter e = two_state(1 / us(4), 1 / us(4));
  const ReadoutModel r;
  const auto t = simulate_markov_trace(e, r, 1.0, 11);
  const Eigen::MatrixXd q = empirical_generator(t.hidden, 2, r.t_m);
  EXPECT_NEAR(-1 / q(plus, plus), us(4), us(0.4));
  EXPECT_NEAR(-1 / q(minus, minus), us(4), us(0.4));
}

TEST(MarkovTrace, OccupancyMatchesDetailedBalance) {
  const double pm = 1 / us(3.9), mp = 1 / us(9.4);
  const MarkovEmitter e = two_state(pm, mp);
  const auto t = simulate_markov_trace(e, ReadoutModel{}, 1.0, 12);
  double plus_fraction = 0;
  for (int h : t.hidden) plus_fraction += h == plus;
  plus_fraction /= double(t.hidden.size());
  EXPECT_NEAR(plus_fraction, mp / (pm + mp), 0.02);
}

TEST(MarkovTrace, NoiseVariance) {
  MarkovEmitter e = two_state(0, 0);
  e.signal = {};
  const ReadoutModel r;
  const auto t = simulate_markov_trace(e, r, 1e6 * r.t_m, 5, minus);
  ASSERT_EQ(t.record.samples.size(), 1'000'000u);
  double vi = 0, vq = 0;
  for (const cplx& s : t.record.samples) {
    vi += s.real() * s.real();
    vq += s.imag() * s.imag();
  }
  const double expected = r.noise_sigma * r.noise_sigma * 1e6;
  EXPECT_NEAR(vi / expected, 1, 0.01);
  EXPECT_NEAR(vq / expected, 1, 0.01);
}

// Chi-square on the off-diagonal one-bin transition counts, expected counts from exp(Q t_m).
TEST(MarkovTrace, TransitionCountsChiSquare) {
  const SystemParams p = reference_device();
  const ReadoutModel r = readout_for(p);
  const MarkovEmitter e = sigma_x_emitter(p, r, f_rates_for_population(0.08, p.T1));
  const auto t = simulate_markov_trace(e, r, 0.2, 21);
  const Eigen::Matrix3d step = (e.generator * r.t_m).exp();
  Eigen::Matrix3d observed = Eigen::Matrix3d::Zero();
  Eigen::Vector3d visits = Eigen::Vector3d::Zero();
  for (std::size_t k = 1; k < t.hidden.size(); ++k) {
    observed(t.hidden[k - 1], t.hidden[k]) += 1;
    visits(t.hidden[k - 1]) += 1;
  }
  double chi2 = 0, jumps = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double expected = visits(i) * step(i, j);
      chi2 += std::pow(observed(i, j) - expected, 2) / expected;
      jumps += observed(i, j);
    }
  EXPECT_GE(jumps, 1e4);
  EXPECT_LT(chi2, 16.81);  // 1% point of chi-square with 6 degrees of freedom
}

TEST(Diffusive, UninformativeRecordFollowsMasterEquation) {
  const SystemParams p = reference_device();
  ReadoutModel r = readout_for(p);
  r.eta = 1e-16;  // backaction scales as sqrt(eta kappa)
  const HilbertSpace s(2, 5);
  const ReadoutFrameModel m = readout_frame_model(p, r, s);
  const auto rho0 = DensityMatrix::pure(named_state(s, NamedState::plus));
  const std::vector<double> times{us(0.8), us(2)};
  const auto traj = simulate_diffusive_trajectory(m.hamiltonian, m.collapse, r, rho0, us(2), 4,
                                                  {.checkpoints = times});
  const auto me = evolve(m.hamiltonian, m.collapse, rho0,
                         {.t_final = us(2), .rel_tol = 1e-11, .abs_tol = 1e-13}, times);
  ASSERT_EQ(traj.checkpoint_states.size(), 2u);
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_LT(trace_distance(traj.checkpoint_states[k], me.states[k].matrix()), 1e-6);
  }
}

TEST(Diffusive, LatchesNearSigmaXEigenstates) {
  const SystemParams p = reference_device();
  const ReadoutModel r = readout_for(p);
  const HilbertSpace s(2, 6);
  const ReadoutFrameModel m = readout_frame_model(p, r, s);
  const auto traj = simulate_diffusive_trajectory(
      m.hamiltonian, m.collapse, r, DensityMatrix::pure(named_state(s, NamedState::minus)), us(60), 2);
  double latched = 0;
  for (double x : traj.sigma_x) latched += std::abs(x) > 0.8;
  EXPECT_GT(latched / traj.sigma_x.size(), 0.7);
}

// Filtered dwell times from chained 100 us diffusive segments against the Markov engine
// driven by the same emitter rates and read out with the same filter.
TEST(Diffusive, DwellMatchesMarkovEngine) {
  const SystemParams p = reference_device();
  const ReadoutModel r = readout_for(p);
  const HilbertSpace s(2, 6);
  const ReadoutFrameModel m = readout_frame_model(p, r, s);
  const MarkovEmitter e = sigma_x_emitter(p, r, f_rates_for_population(0, p.T1));
  const std::vector<cplx> centers{e.signal[0], e.signal[1]};

  std::vector<cplx> record;
  for (int chain = 0; chain < 3; ++chain) {
    DensityMatrix rho = DensityMatrix::pure(named_state(s, NamedState::minus));
    for (int seg = 0; seg < 5; ++seg) {
      const auto t = simulate_diffusive_trajectory(m.hamiltonian, m.collapse, r, rho, us(100),
                                                   100 * chain + seg, {.checkpoints = {us(100)}});
      record.insert(record.end(), t.record.samples.begin(), t.record.samples.end());
      rho = DensityMatrix::unchecked(s, t.checkpoint_states.back());
    }
  }
  const auto fd = two_point_filter(record, centers, {.sigma = r.noise_sigma});
  const auto dd = dwell_statistics(fd.states, r.t_m, 2);

  MarkovEmitter e2 = e;
  e2.n_states = 2;
  e2.generator = markov_generator(e.generator(1, 0), e.generator(0, 1), 0, 0, 0, 0);
  const auto mt = simulate_markov_trace(e2, r, 0.2, 5);
  const auto fm = two_point_filter(mt.record.samples, centers, {.sigma = r.noise_sigma});
  const auto dm = dwell_statistics(fm.states, r.t_m, 2);

  EXPECT_NEAR(dd.transition_time(1, 0) / dm.transition_time(1, 0), 1.0, 0.2);
  EXPECT_NEAR(dd.transition_time(0, 1) / dm.transition_time(0, 1), 1.0, 0.2);
}

TEST(Diffusive, Guards) {
  const SystemParams p = reference_device();
  const ReadoutModel r = readout_for(p);
  const HilbertSpace s(2, 3);
  const ReadoutFrameModel m = readout_frame_model(p, r, s);
  const auto rho0 = DensityMatrix::pure(basis_state(s, 0));
  EXPECT_THROW(simulate_diffusive_trajectory(m.hamiltonian, m.collapse, r, rho0, us(150), 1), InvalidParams);
  EXPECT_THROW(simulate_diffusive_trajectory(m.hamiltonian, m.collapse, r, rho0, us(1), 1, {.dt = 3e-9}),
               InvalidParams);
}

TEST(StatePrep, GroundTargetNeedsNoPulse) {
  const SystemParams p = reference_device();
  const PreparedState ps = state_prep_sequence(0, 0, p);
  EXPECT_EQ(ps.peak_amplitude, 0.0);
  EXPECT_NEAR(ps.rho.level_population(0), 1, 1e-12);
}

TEST(StatePrep, PulseAxesWithoutSideband) {
  SystemParams p = reference_device();
  p.epsilon_sb = 0;
  p.Delta_q = 0;
  const PrepOptions o{.n_cavity = 2, .dissipation = false};
  const auto s = sigma_ops(HilbertSpace(2, 2));
  for (double phi : {0.0, std::numbers::pi / 2, std::numbers::pi}) {
    const double theta = std::numbers::pi / 2;
    const PreparedState ps = state_prep_sequence(theta, phi, p, o);
    const Matrix target = bloch_state(HilbertSpace(2, 2), theta, phi).projector();
    EXPECT_LT(trace_distance(ps.rho.matrix(), target), 1e-6) << "phi " << phi;
  }
  const PreparedState plus = state_prep_sequence(std::numbers::pi / 2, 0, p, o);
  EXPECT_NEAR(expectation(s.sx, plus.rho).real(), 1, 1e-6);
}

// With the sideband on, the cavity follows the qubit-conditioned displacement during the pulse,
// which costs contrast; the prepared state still points along -x.
TEST(StatePrep, NegativeAngleGivesMinus) {
  const SystemParams p = reference_device();
  const PreparedState ps = state_prep_sequence(std::numbers::pi / 2, std::numbers::pi, p);
  const auto s = sigma_ops(ps.rho.space());
  EXPECT_LT(expectation(s.sx, ps.rho).real(), -0.4);
  EXPECT_NEAR(ps.rho.trace().real(), 1, 1e-6);
  EXPECT_GT(ps.rho.min_eigenvalue(), -1e-6);
}
