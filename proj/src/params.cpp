#include "sigmax/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sigmax/errors.hpp"
#include "sigmax/units.hpp"

namespace sigmax {

std::complex<double> steady_state_amplitude(const SystemParams& p) {
  return -p.epsilon_sb / std::complex<double>(p.Delta_c, -p.kappa / 2);
}

double sideband_amplitude_for_photons(double n_bar, double Delta_c, double kappa) {
  return std::sqrt(n_bar * (Delta_c * Delta_c + kappa * kappa / 4));
}

double readout_amplitude_for_photons(double n_bar, double Delta_r, double kappa) {
  return sideband_amplitude_for_photons(n_bar, Delta_r, kappa);
}

double pure_dephasing_time(const SystemParams& p) {
  const double rate = 1.0 / p.T2R - 1.0 / (2.0 * p.T1);
  if (rate <= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / rate;
}

SystemParams sync_pump_frequencies(SystemParams p) {
  p.omega_sb = p.omega_c - p.Delta_c;
  p.omega_qp = p.omega_q - p.Delta_q;
  return p;
}

SystemParams frame_matched(SystemParams p) {
  p.Delta_q = -std::norm(steady_state_amplitude(p)) * p.chi;
  p.frame_matched = true;
  return sync_pump_frequencies(p);
}

void validate(const SystemParams& p) {
  if (!(p.kappa > 0)) throw InvalidParams("kappa must be > 0");
  if (!(p.T1 > 0)) throw InvalidParams("T1 must be > 0");
  if (!(p.T2R > 0)) throw InvalidParams("T2R must be > 0");
  // small slack so that T2R = 2 T1 exactly is accepted
  if (1.0 / p.T2R < (1.0 - 1e-12) / (2.0 * p.T1)) {
    throw InvalidParams("1/T2R must be >= 1/(2 T1) (T2R <= 2 T1)");
  }
  if (p.p_e_thermal < 0 || p.p_e_thermal >= 0.5) {
    throw InvalidParams("p_e_thermal must lie in [0, 0.5)");
  }
  if (p.frame_matched) {
    const double target = -std::norm(steady_state_amplitude(p)) * p.chi;
    const double scale = std::max({std::abs(target), std::abs(p.chi), 1.0});
    if (std::abs(p.Delta_q - target) > 1e-6 * scale) {
      throw InvalidParams("frame_matched is set but Delta_q != -n_sb chi");
    }
  }
}

DerivedParams derive(const SystemParams& p) {
  DerivedParams d;
  d.a_bar = steady_state_amplitude(p);
  d.n_bar_sb = std::norm(d.a_bar);
  d.g_eff = std::abs(p.chi * d.a_bar) / 2;
  d.Delta = p.Omega_R - p.Delta_c;
  d.Sigma = p.Omega_R + p.Delta_c;
  if (d.Delta != 0 && d.Sigma != 0 && p.Omega_R != 0) {
    const double c = p.chi * p.chi / 2;
    d.zeta_prime = c * (d.n_bar_sb / d.Delta + d.n_bar_sb / d.Sigma);
    d.zeta = d.zeta_prime + c / p.Omega_R;
  } else {
    d.zeta = d.zeta_prime = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

SystemParams reference_device() {
  using namespace units;
  SystemParams p;
  p.omega_c = ghz(7.48);
  p.omega_q = ghz(4.9);
  p.chi = mhz(-3.2);
  p.kappa = mhz(4);
  p.Omega_R = mhz(70);
  p.Delta_c = mhz(15);
  p.epsilon_sb = sideband_amplitude_for_photons(12.0, p.Delta_c, p.kappa);
  p.Delta_r = 0;
  p.epsilon_r = readout_amplitude_for_photons(0.9, p.Delta_r, p.kappa);
  p.alpha_anh = mhz(-200);
  p.T1 = us(90);
  p.T2R = us(40);
  p.p_e_thermal = 0.12;
  return frame_matched(p);
}

}  // namespace sigmax
