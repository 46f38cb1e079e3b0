#pragma once

#include <utility>

#include "sigmax/params.hpp"

namespace sigmax {

/// Photon-number noise of a coherently driven cavity.
struct NoiseSpectrum {
  double n_bar = 0;
  double kappa = 0;
  double Delta_c = 0;
};

NoiseSpectrum sideband_spectrum(const SystemParams& p);

/// n_bar kappa / ((omega - Delta_c)^2 + (kappa/2)^2)
double s_nn(const NoiseSpectrum& s, double omega);

struct TransitionRates {
  double gamma_plus_minus = 0;   ///< |+> -> |->
  double gamma_minus_plus = 0;   ///< |-> -> |+>
  double t2_sideband = 0;
  double gamma_purcell_pm = 0;
  double gamma_purcell_mp = 0;
};

/// Gamma_{+-} = (chi/2)^2 S_nn[Omega_R], Gamma_{-+} = (chi/2)^2 S_nn[-Omega_R].
/// The chi ~ kappa correction to the shot-noise dephasing is neglected.
/// The Purcell-form rates and sideband T2 are filled in as well.
TransitionRates golden_rule_rates(const SystemParams& p, const DerivedParams& d);

/// kappa (chi |a_bar| / 2 Delta)^2 and kappa (chi |a_bar| / 2 Sigma)^2.
std::pair<double, double> purcell_rates(const SystemParams& p, const DerivedParams& d);

/// 2 / (chi^2 S_nn[0]); infinity without sideband photons.
double sideband_induced_t2(const SystemParams& p);

/// exp(-t_m / t_jump) (1 - overlap_error)
double fidelity_composition(double t_m, double t_jump, double overlap_error);

}  // namespace sigmax
