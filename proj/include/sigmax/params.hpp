#pragma once

#include <complex>

namespace sigmax {

/// Device and drive parameters. Frequencies are angular (rad/s), times in seconds.
struct SystemParams {
  double omega_c = 0;      ///< cavity frequency
  double omega_q = 0;      ///< qubit frequency
  double chi = 0;          ///< dispersive shift (negative for the reference device)
  double kappa = 0;        ///< cavity energy decay rate
  double Omega_R = 0;      ///< Rabi drive amplitude
  double epsilon_sb = 0;   ///< sideband drive amplitude
  double omega_sb = 0;     ///< sideband pump frequency
  double omega_qp = 0;     ///< qubit pump frequency
  double Delta_c = 0;      ///< omega_c - omega_sb
  double Delta_q = 0;      ///< omega_q - omega_qp
  double epsilon_r = 0;    ///< readout drive amplitude
  double Delta_r = 0;      ///< readout detuning in the effective frame
  double alpha_anh = 0;    ///< transmon anharmonicity
  double T1 = 0;
  double T2R = 0;
  double p_e_thermal = 0;  ///< thermal excited-state population of the bare qubit
  bool frame_matched = true;  ///< Delta_q tracks -n_sb * chi

  bool operator==(const SystemParams&) const = default;
};

/// Quantities that follow from SystemParams.
struct DerivedParams {
  std::complex<double> a_bar;  ///< steady sideband amplitude of the cavity
  double n_bar_sb = 0;         ///< |a_bar|^2
  double g_eff = 0;            ///< |chi a_bar| / 2
  double Delta = 0;            ///< Omega_R - Delta_c
  double Sigma = 0;            ///< Omega_R + Delta_c
  double zeta = 0;             ///< dispersive sigma_x shift; NaN when undefined
  double zeta_prime = 0;       ///< Lamb shift; NaN when undefined
};

/// a_bar = -epsilon_sb / (Delta_c - i kappa/2).
std::complex<double> steady_state_amplitude(const SystemParams& p);

/// Sideband amplitude that yields n_bar photons at detuning Delta_c.
double sideband_amplitude_for_photons(double n_bar, double Delta_c, double kappa);

/// Readout amplitude giving n_bar photons in the bare cavity driven at detuning Delta_r.
double readout_amplitude_for_photons(double n_bar, double Delta_r, double kappa);

/// Pure-dephasing time from 1/T2R = 1/(2 T1) + 1/Tphi; infinity when T2R = 2 T1.
double pure_dephasing_time(const SystemParams& p);

/// Sets Delta_q = -n_bar_sb * chi (the sigma_z-cancelling qubit pump detuning) and refreshes
/// omega_sb, omega_qp from the detunings.
SystemParams frame_matched(SystemParams p);

/// omega_sb = omega_c - Delta_c and omega_qp = omega_q - Delta_q.
SystemParams sync_pump_frequencies(SystemParams p);

/// Throws InvalidParams on kappa <= 0, T1 <= 0, 1/T2R < 1/(2 T1), p_e outside [0, 0.5),
/// or a frame-matched flag whose Delta_q condition does not hold.
void validate(const SystemParams& p);

DerivedParams derive(const SystemParams& p);

/// Reference device: omega_c/2pi = 7.48 GHz, omega_q/2pi = 4.9 GHz, chi/2pi = -3.2 MHz,
/// kappa/2pi = 4 MHz, T1 = 90 us, T2R = 40 us, p_e = 0.12, Delta_c/2pi = 15 MHz with 12
/// sideband photons, Omega_R/2pi = 70 MHz, 0.9 bare readout photons, alpha/2pi = -200 MHz.
SystemParams reference_device();

}  // namespace sigmax
