#include "sigmax/rates.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "sigmax/errors.hpp"

namespace sigmax {

NoiseSpectrum sideband_spectrum(const SystemParams& p) {
  return {std::norm(steady_state_amplitude(p)), p.kappa, p.Delta_c};
}

double s_nn(const NoiseSpectrum& s, double omega) {
  const double x = omega - s.Delta_c;
  return s.n_bar * s.kappa / (x * x + s.kappa * s.kappa / 4);
}

std::pair<double, double> purcell_rates(const SystemParams& p, const DerivedParams& d) {
  if (d.Delta == 0 || d.Sigma == 0) throw DivisionByZero("purcell_rates: Delta or Sigma is zero");
  const double c = p.chi * std::abs(d.a_bar) / 2;
  return {p.kappa * std::pow(c / d.Delta, 2), p.kappa * std::pow(c / d.Sigma, 2)};
}

double sideband_induced_t2(const SystemParams& p) {
  const double s0 = s_nn(sideband_spectrum(p), 0.0);
  const double rate = p.chi * p.chi * s0;
  if (rate == 0) return std::numeric_limits<double>::infinity();
  return 2.0 / rate;
}

TransitionRates golden_rule_rates(const SystemParams& p, const DerivedParams& d) {
  const NoiseSpectrum s{d.n_bar_sb, p.kappa, p.Delta_c};
  const double c = p.chi * p.chi / 4;
  TransitionRates r;
  r.gamma_plus_minus = c * s_nn(s, p.Omega_R);
  r.gamma_minus_plus = c * s_nn(s, -p.Omega_R);
  r.t2_sideband = sideband_induced_t2(p);
  if (d.Delta != 0 && d.Sigma != 0) {
    std::tie(r.gamma_purcell_pm, r.gamma_purcell_mp) = purcell_rates(p, d);
  }
  return r;
}

double fidelity_composition(double t_m, double t_jump, double overlap_error) {
  if (!(t_m > 0) || !(t_jump > 0)) throw InvalidParams("fidelity_composition: times must be > 0");
  if (overlap_error < 0 || overlap_error >= 1) {
    throw InvalidParams("fidelity_composition: overlap_error must lie in [0, 1)");
  }
  return std::exp(-t_m / t_jump) * (1 - overlap_error);
}

}  // namespace sigmax
