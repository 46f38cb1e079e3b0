#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sigmax/analysis.hpp"
#include "sigmax/measurement.hpp"

using namespace sigmax;
using units::mhz;
using units::us;

namespace {

std::vector<cplx> gaussian_mixture(const std::vector<cplx>& means, const std::vector<double>& weights,
                                   double sigma, std::size_t n, std::uint64_t seed,
                                   std::vector<int>* labels = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, sigma);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<cplx> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int c = pick(rng);
    if (labels) labels->push_back(c);
    out.push_back(means[c] + cplx(g(rng), g(rng)));
  }
  return out;
}

MarkovEmitter reference_emitter(double separation = 5.4) {
  const SystemParams p = reference_device();
  ReadoutModel r = default_readout(p);
  r.signal_scale = calibrate_signal_scale(pointer_states(p, derive(p).zeta, r), r, p.kappa, separation);
  return sigma_x_emitter(p, r, f_rates_for_population(0.08, p.T1));
}

}  // namespace

TEST(Histogram, SingleSampleFillsOneBin) {
  const std::vector<cplx> s(50, cplx(0.3, -0.2));
  const Histogram2D h = histogram_iq(s, 8, 8, IQRange{-1, 1, -1, 1});
  EXPECT_EQ(h.total(), 50);
  EXPECT_EQ(h.counts.maxCoeff(), 50);
  EXPECT_THROW(histogram_iq({}, 8, 8), EmptyRecord);
  EXPECT_THROW(histogram_iq(s, 1, 8), InvalidParams);
}

TEST(Histogram, ClampsOutsideSamples) {
  const Histogram2D h = histogram_iq({cplx(5, 5), cplx(-5, -5), cplx(0, 0)}, 4, 4, IQRange{-1, 1, -1, 1});
  EXPECT_EQ(h.total(), 3);
  EXPECT_EQ(h.counts(3, 3), 1);
  EXPECT_EQ(h.counts(0, 0), 1);
}

TEST(Histogram, TwoStateWeightsMatchOccupancy) {
  MarkovEmitter e;
  e.n_states = 2;
  e.generator = markov_generator(1 / us(4), 1 / us(9), 0, 0, 0, 0);
  e.signal = {cplx(0, -2.5), cplx(0, 2.5), cplx(0)};
  const MarkovTrace t = simulate_markov_trace(e, ReadoutModel{}, 0.04, 2);
  const Histogram2D h = histogram_iq(t.record.samples, 60, 60);
  const FitResult f = fit_components(h, 2, {e.signal[0], e.signal[1]}, {.shared_covariance = true});
  double plus = 0;
  for (int s : t.hidden) plus += s;
  plus /= double(t.hidden.size());
  EXPECT_NEAR(f.components[1].weight, plus, 0.02);
}

TEST(Bimodality, SeparatesOneAndTwoPeaks) {
  const auto one = gaussian_mixture({cplx(0)}, {1}, 1, 20000, 3);
  const auto two = gaussian_mixture({cplx(-3, 0), cplx(3, 0)}, {0.5, 0.5}, 1, 20000, 4);
  EXPECT_LT(bimodality_coefficient(one), 5.0 / 9);
  EXPECT_GT(bimodality_coefficient(two), 5.0 / 9);
}

TEST(Fit, SingleGaussian) {
  const double sigma = 0.7;
  const std::size_t n = 200000;
  const auto s = gaussian_mixture({cplx(1, -2)}, {1}, sigma, n, 5);
  const FitResult f = fit_components(histogram_iq(s, 80, 80), 1);
  ASSERT_EQ(f.components.size(), 1u);
  EXPECT_TRUE(f.converged);
  const auto& c = f.components[0];
  EXPECT_LT(std::abs(c.mean.real() - 1), 3 * sigma / std::sqrt(double(n)));
  EXPECT_LT(std::abs(c.mean.imag() + 2), 3 * sigma / std::sqrt(double(n)));
  EXPECT_NEAR(c.covariance(0, 0) / (sigma * sigma), 1, 0.05);
  EXPECT_NEAR(c.covariance(1, 1) / (sigma * sigma), 1, 0.05);
  EXPECT_NEAR(c.weight, 1, 1e-9);
}

TEST(Fit, ThreeComponentWeights) {
  const std::vector<cplx> means{cplx(-2, 2.5), cplx(2, 2.5), cplx(0, 0.5)};
  const std::vector<double> w{0.6, 0.32, 0.08};
  const auto s = gaussian_mixture(means, w, 0.7071, 200000, 6);
  const FitResult f = fit_components(histogram_iq(s, 80, 80), 3, means);
  double total = 0;
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(f.components[k].weight, w[k], 0.02);
    total += f.components[k].weight;
  }
  EXPECT_NEAR(total, 1, 1e-6);
}

TEST(Fit, SingleComponentOnBimodalDataFitsWorse) {
  const auto s = gaussian_mixture({cplx(-2, 0), cplx(2, 0)}, {0.5, 0.5}, 0.7, 50000, 7);
  const Histogram2D h = histogram_iq(s, 60, 60);
  EXPECT_LT(fit_components(h, 1).log_likelihood + 0.1, fit_components(h, 2).log_likelihood);
}

TEST(Fit, Deterministic) {
  const auto s = gaussian_mixture({cplx(-2, 0), cplx(2, 0)}, {0.4, 0.6}, 0.7, 20000, 8);
  const Histogram2D h = histogram_iq(s, 40, 40);
  const FitResult a = fit_components(h, 2), b = fit_components(h, 2);
  EXPECT_EQ(a.components[0].mean, b.components[0].mean);
  EXPECT_EQ(a.log_likelihood, b.log_likelihood);
}

TEST(Zeta, NoiselessRoundTrip) {
  SystemParams p = reference_device();
  p.Delta_r = 0;
  const ReadoutModel r = default_readout(p);
  const double zeta = mhz(1.91);
  const PointerStates ps = pointer_states(p, zeta, r);
  EXPECT_NEAR(extract_zeta(ps.a_plus, ps.a_minus, p.kappa) / zeta, 1, 1e-10);
  // the sqrt(eta kappa t_m) scale cancels
  EXPECT_NEAR(extract_zeta(3.7 * ps.a_plus, 3.7 * ps.a_minus, p.kappa) / zeta, 1, 1e-10);
  const PointerStates flat = pointer_states(p, 0, r);
  EXPECT_NEAR(extract_zeta(flat.a_plus, flat.a_minus, p.kappa), 0, 1e-6);
  EXPECT_THROW(extract_zeta(cplx(1, 0), cplx(1, 1), p.kappa), DegenerateGeometry);
}

TEST(Filter, NoiselessAlternatingRecord) {
  const std::vector<cplx> centers{cplx(-1, 0), cplx(1, 0)};
  std::vector<int> hidden;
  std::vector<cplx> s;
  for (int k = 0; k < 406; ++k) {
    hidden.push_back((k / 7) % 2);
    s.push_back(centers[hidden.back()]);
  }
  const JumpTrace t = two_point_filter(s, centers, {.sigma = 0.1});
  EXPECT_EQ(t.states, hidden);
  const JumpTrace causal = two_point_filter(s, centers, {.sigma = 0.1, .backfill = false});
  for (std::size_t k = 0; k < s.size(); ++k) {
    // at most one bin of lag at each switch
    if (causal.states[k] != hidden[k]) EXPECT_EQ(causal.states[k], hidden[k - 1]);
  }
}

TEST(Filter, SingleBinExcursionIgnored) {
  const std::vector<cplx> centers{cplx(-1, 0), cplx(1, 0)};
  std::vector<cplx> s(100, centers[0]);
  s[40] = centers[1];
  s[70] = centers[1];
  const JumpTrace t = two_point_filter(s, centers, {.sigma = 0.1});
  for (int st : t.states) EXPECT_EQ(st, 0);
}

TEST(Filter, CausalWithoutBackfill) {
  const MarkovEmitter e = reference_emitter();
  const MarkovTrace tr = simulate_markov_trace(e, ReadoutModel{}, us(400), 9);
  const std::vector<cplx> centers(e.signal.begin(), e.signal.end());
  const FilterParams fp{.backfill = false};
  const JumpTrace full = two_point_filter(tr.record.samples, centers, fp);
  for (std::size_t cut : {100u, 517u, 800u}) {
    const std::vector<cplx> prefix(tr.record.samples.begin(), tr.record.samples.begin() + cut);
    const JumpTrace part = two_point_filter(prefix, centers, fp);
    EXPECT_TRUE(std::equal(part.states.begin(), part.states.end(), full.states.begin()));
  }
}

TEST(Filter, AccuracyAtReferenceSeparation) {
  const MarkovEmitter e = reference_emitter();
  const ReadoutModel r;
  const MarkovTrace tr = simulate_markov_trace(e, r, 0.05, 10);
  const std::vector<cplx> centers(e.signal.begin(), e.signal.end());
  const JumpTrace t = two_point_filter(tr.record.samples, centers, {.sigma = r.noise_sigma});
  EXPECT_GE(agreement(t.states, tr.hidden), 0.95);
}

TEST(Dwell, PeriodicSwitching) {
  std::vector<int> s;
  for (int k = 0; k < 1000; ++k) s.push_back((k / 10) % 2);
  const DwellStatistics d = dwell_statistics(s, 4e-7, 2, {.dead_bins = 0});
  EXPECT_NEAR(d.naive_mean_dwell(0), 10 * 4e-7, 1e-18);
  EXPECT_NEAR(d.naive_mean_dwell(1), 10 * 4e-7, 1e-18);
  EXPECT_EQ(d.transitions(0, 1), 50);
  EXPECT_EQ(d.transitions(1, 0), 49);
  EXPECT_FALSE(d.insufficient_jumps);
  EXPECT_THROW(dwell_statistics(std::vector<int>(50, 0), 4e-7, 2), EmptyRecord);
}

TEST(Dwell, FewJumpsFlagged) {
  std::vector<int> s(500, 0);
  std::fill(s.begin() + 200, s.begin() + 300, 1);
  EXPECT_TRUE(dwell_statistics(s, 4e-7, 2).insufficient_jumps);
}

TEST(Dwell, KnownRateRecovered) {
  MarkovEmitter e;
  e.n_states = 2;
  e.generator = markov_generator(1 / us(4), 1 / us(4), 0, 0, 0, 0);
  const MarkovTrace t = simulate_markov_trace(e, ReadoutModel{}, 1.0, 12);
  const DwellStatistics d = dwell_statistics(t.hidden, 4e-7, 2, {.dead_bins = 0});
  EXPECT_NEAR(d.mean_dwell(plus), us(4), us(0.4));
  EXPECT_NEAR(d.mean_dwell(minus), us(4), us(0.4));
}

TEST(Dwell, ErrorShrinksWithJumpCount) {
  MarkovEmitter e;
  e.n_states = 2;
  e.generator = markov_generator(1 / us(4), 1 / us(4), 0, 0, 0, 0);
  auto spread = [&](double duration) {
    double sum = 0, sum2 = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const MarkovTrace t = simulate_markov_trace(e, ReadoutModel{}, duration, 100 + seed);
      const double x = dwell_statistics(t.hidden, 4e-7, 2, {.dead_bins = 0}).mean_dwell(plus);
      sum += x;
      sum2 += x * x;
    }
    return std::sqrt(sum2 / 20 - std::pow(sum / 20, 2));
  };
  // sixteen times the jumps, a quarter of the spread
  EXPECT_NEAR(spread(0.016) / spread(0.001), 0.25, 0.12);
}

TEST(Dwell, FOccupancy) {
  const MarkovEmitter e = reference_emitter();
  const MarkovTrace t = simulate_markov_trace(e, ReadoutModel{}, 0.5, 13);
  const DwellStatistics d = dwell_statistics(t.hidden, 4e-7, 3, {.dead_bins = 0});
  EXPECT_NEAR(d.occupancy(f_state), 0.08, 0.01);
}

TEST(SigmaX, Expectations) {
  EXPECT_EQ(expectation_sigma_x(0.5, 0.5), 0.0);
  EXPECT_NEAR(expectation_sigma_x(0.1, 0.9), -0.8, 1e-12);
  EXPECT_NEAR(expectation_sigma_x(std::vector<int>{0, 0, 0, 1, 2, 2}), -0.5, 1e-12);
  for (double a : {0.0, 0.2, 1.0})
    for (double b : {0.1, 0.7}) {
      const double x = expectation_sigma_x(a, b);
      EXPECT_LE(std::abs(x), 1.0);
    }
  const Imperfection imp;
  EXPECT_NEAR(imp.apply(1), 0.86, 1e-12);
  EXPECT_NEAR(imp.apply(-1), -0.90, 1e-12);
}

TEST(Geometry, Circumcenter) {
  const double third = 2 * std::numbers::pi / 3;
  const cplx a = std::polar(1.0, 0.3), b = std::polar(1.0, 0.3 + third), c = std::polar(1.0, 0.3 - third);
  EXPECT_LT(std::abs(circumcenter(a, b, c)), 1e-12);
  const PhaseAngleTrace t = phase_angle_trace({a, b, c}, a, b, c);
  EXPECT_NEAR(std::remainder(t.psi[1] - t.psi[0], 2 * std::numbers::pi), third, 1e-12);
  EXPECT_NEAR(std::remainder(t.psi[0] - t.psi[2], 2 * std::numbers::pi), third, 1e-12);

  const cplx p(0.3, 1.1), q(-2.0, 0.4), r(1.7, -0.6);
  const cplx cc = circumcenter(p, q, r);
  EXPECT_NEAR(std::abs(cc - p), std::abs(cc - q), 1e-10);
  EXPECT_NEAR(std::abs(cc - p), std::abs(cc - r), 1e-10);
  EXPECT_THROW(circumcenter(cplx(0, 0), cplx(1, 1), cplx(2, 2)), CollinearCenters);
}

TEST(Geometry, PhaseAnglesInRangeWithThreeLobes) {
  const MarkovEmitter e = reference_emitter();
  const MarkovTrace tr = simulate_markov_trace(e, ReadoutModel{}, 0.02, 14);
  const PhaseAngleTrace t = phase_angle_trace(tr.record.samples, e.signal[0], e.signal[1], e.signal[2]);
  for (double x : t.psi) {
    ASSERT_GT(x, -std::numbers::pi);
    ASSERT_LE(x, std::numbers::pi);
  }
  // the hidden state's center angle is where each lobe sits
  for (int s = 0; s < 3; ++s) {
    const double center = std::arg(e.signal[s] - t.circumcenter);
    double mean_sin = 0, mean_cos = 0;
    for (std::size_t k = 0; k < t.psi.size(); ++k) {
      if (tr.hidden[k] != s) continue;
      mean_sin += std::sin(t.psi[k] - center);
      mean_cos += std::cos(t.psi[k] - center);
    }
    EXPECT_LT(std::abs(std::atan2(mean_sin, mean_cos)), 0.15) << "state " << s;
  }
}

TEST(Geometry, Separatrix) {
  const Separatrix s = separatrix(cplx(0, 2), cplx(0, -2));
  EXPECT_TRUE(s.first_side(cplx(5, 0.1)));
  EXPECT_FALSE(s.first_side(cplx(-5, -0.1)));
  EXPECT_NEAR(std::abs(s.point), 0, 1e-12);
}
