#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sigmax/operators.hpp"
#include "sigmax/params.hpp"

namespace sigmax {

enum class Frame { Lab, Rotating, DisplacedJC, Dispersive };

std::string to_string(Frame f);

/// coefficient(t) * op, with a real coefficient.
struct DriveTerm {
  Operator op;
  std::function<double(double)> coefficient;
  std::string label;
};

struct HamiltonianModel {
  Frame frame = Frame::Rotating;
  bool include_f_level = false;
  Operator static_part;
  std::vector<DriveTerm> time_dependent_parts;
  std::vector<std::string> warnings;

  bool is_time_dependent() const { return !time_dependent_parts.empty(); }
  Operator at(double t) const;
  const HilbertSpace& space() const { return static_part.space(); }
};

struct ZetaShift {
  double zeta = 0;
  double zeta_prime = 0;
};

/// zeta = (chi^2/2)(n/Delta + n/Sigma + 1/Omega_R), zeta' = (chi^2/2)(n/Delta + n/Sigma).
/// Throws DivisionByZero when Delta, Sigma or Omega_R vanishes.
ZetaShift zeta(const SystemParams& p, const DerivedParams& d);

/// Leading-order g_eff^2 / (Omega_R - Delta_c). A rough estimate only: it is a factor of two
/// below the leading term of zeta().
double zeta_rough_estimate(const DerivedParams& d);

/// Warnings for |Delta|, |Sigma| < 5 g_eff or Omega_R < 5 |chi|/2.
std::vector<std::string> dispersive_validity_warnings(const SystemParams& p,
                                                      const DerivedParams& d);

/// omega_c a^dag a + qubit ladder + chi (level - 1/2) a^dag a, with the drives
/// Omega_R cos(omega_qp t) X and epsilon_sb cos(omega_sb t)(a + a^dag) as time-dependent parts.
/// For n_qubit >= 3 the f level sits at 3 omega_q / 2 + alpha and X carries an e-f element
/// that reduces to the f-correction coupling under the rotating-wave approximation.
HamiltonianModel build_lab_hamiltonian(const SystemParams& p, const HilbertSpace& space);

/// Delta_c a^dag a + (Delta_q/2) sz + (chi/2) a^dag a sz + (Omega_R/2) sx + eps_sb (a + a^dag).
/// n_qubit == 3 adds the f level consistently with build_f_correction after displacement.
HamiltonianModel build_rotating_hamiltonian(const SystemParams& p, const HilbertSpace& space);

struct JcOptions {
  bool rotating_wave = false;      ///< keep only a_bar^* d sx+ + a_bar d^dag sx- (no d^dag d sz)
  double frame_tolerance = 1e-6;   ///< relative tolerance on Delta_q = -n_sb chi
};

/// Displaced-frame Hamiltonian
/// Delta_c d^dag d + (Omega_R/2) sx + (chi/2)(a_bar^* d + a_bar d^dag + d^dag d)(sx+ + sx-).
/// For n_qubit >= 3 the f correction is added. Throws FrameMismatch unless
/// Delta_q = -n_sb chi.
HamiltonianModel build_jc_hamiltonian(const SystemParams& p, const DerivedParams& d,
                                      const HilbertSpace& space, JcOptions options = {});

/// Delta_c d^dag d + ((Omega_R + zeta'/2)/2) sx + (zeta/2) d^dag d sx
///   + (chi^2 / 4 Omega_R) d^dag d^dag d d sx.
/// Two-level qubit only. Validity warnings are attached to the model.
HamiltonianModel build_dispersive_hamiltonian(const SystemParams& p, const DerivedParams& d,
                                              const HilbertSpace& space);

/// alpha |f><f| + sqrt2 Omega_R (|e><f| + |f><e|) + (3 chi/2)(a_bar^* d + a_bar d^dag + d^dag d)|f><f|.
HamiltonianModel build_f_correction(const SystemParams& p, const HilbertSpace& space);

/// Displaced-frame transmon ladder with n_levels levels:
/// Delta_c d^dag d + (alpha/2) N(N-1) + (Omega_R/2)(b + b^dag)
///   + chi (a_bar^* d + a_bar d^dag + d^dag d)(N - 1/2).
HamiltonianModel build_n_level_transmon(const SystemParams& p, int n_levels,
                                        const HilbertSpace& space);

/// Generators S and unitaries U = exp(S) of the three dispersive transformations.
struct SchriefferWolff {
  Operator S, S_prime, S_double_prime;
  Operator U, U_prime, U_double_prime;

  /// U'' U' U H U^dag U'^dag U''^dag
  Operator transform(const Operator& h) const;
};

SchriefferWolff schrieffer_wolff_generators(const SystemParams& p, const DerivedParams& d,
                                            const HilbertSpace& space);

}  // namespace sigmax
