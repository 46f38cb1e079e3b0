#include "sigmax/hamiltonians.hpp"

#include <cmath>
#include <sstream>

#include "sigmax/units.hpp"

namespace sigmax {

namespace {

void require_qubit_levels(const HilbertSpace& space, int lo, int hi, const char* who) {
  if (space.n_qubit() < lo || space.n_qubit() > hi) {
    std::ostringstream msg;
    msg << who << ": n_qubit = " << space.n_qubit() << " outside [" << lo << ", " << hi << "]";
    throw DimensionError(msg.str());
  }
}

void require_frame_matched(const SystemParams& p, const DerivedParams& d, double tol,
                           const char* who) {
  const double target = -d.n_bar_sb * p.chi;
  const double scale = std::max(std::abs(target), std::abs(p.chi));
  if (std::abs(p.Delta_q - target) > tol * scale) {
    std::ostringstream msg;
    msg << who << ": Delta_q/2pi = " << units::to_mhz(p.Delta_q)
        << " MHz but the displaced frame needs -n_sb chi/2pi = " << units::to_mhz(target) << " MHz";
    throw FrameMismatch(msg.str());
  }
}

// (a_bar^* d + a_bar d^dag + d^dag d): the cavity part of every displaced dispersive coupling.
Operator displaced_pull(const HilbertSpace& space, std::complex<double> a_bar) {
  const Operator d = annihilation(space);
  const Operator dd = dagger(d);
  return std::conj(a_bar) * d + a_bar * dd + dd * d;
}

}  // namespace

std::string to_string(Frame f) {
  switch (f) {
    case Frame::Lab: return "lab";
    case Frame::Rotating: return "rotating";
    case Frame::DisplacedJC: return "displaced-jc";
    case Frame::Dispersive: return "dispersive";
  }
  return "unknown";
}

Operator HamiltonianModel::at(double t) const {
  Operator h = static_part;
  for (const auto& term : time_dependent_parts) {
    h += cplx(term.coefficient(t)) * term.op;
  }
  return h;
}

ZetaShift zeta(const SystemParams& p, const DerivedParams& d) {
  if (d.Delta == 0 || d.Sigma == 0 || p.Omega_R == 0) {
    throw DivisionByZero("zeta: Delta, Sigma and Omega_R must all be nonzero");
  }
  const double c = p.chi * p.chi / 2;
  ZetaShift z;
  z.zeta_prime = c * (d.n_bar_sb / d.Delta + d.n_bar_sb / d.Sigma);
  z.zeta = z.zeta_prime + c / p.Omega_R;
  return z;
}

double zeta_rough_estimate(const DerivedParams& d) {
  if (d.Delta == 0) throw DivisionByZero("zeta_rough_estimate: Delta = 0");
  return d.g_eff * d.g_eff / d.Delta;
}

std::vector<std::string> dispersive_validity_warnings(const SystemParams& p,
                                                      const DerivedParams& d) {
  constexpr double ratio = 5.0;
  std::vector<std::string> out;
  if (std::abs(d.Delta) < ratio * d.g_eff) {
    out.push_back("|Omega_R - Delta_c| < 5 g_eff: not dispersive");
  }
  if (std::abs(d.Sigma) < ratio * d.g_eff) {
    out.push_back("|Omega_R + Delta_c| < 5 g_eff: counter-rotating coupling not perturbative");
  }
  if (std::abs(p.Omega_R) < ratio * std::abs(p.chi) / 2) {
    out.push_back("Omega_R < 5 |chi|/2: Kerr-type transformation not perturbative");
  }
  return out;
}

HamiltonianModel build_lab_hamiltonian(const SystemParams& p, const HilbertSpace& space) {
  require_qubit_levels(space, 2, 3, "build_lab_hamiltonian");
  const Operator a = annihilation(space);
  const Operator n = number(space);
  const auto s = sigma_ops(space);

  Operator h = cplx(p.omega_c) * n + cplx(p.omega_q / 2) * s.sz + cplx(p.chi / 2) * (n * s.sz);
  Operator drive = s.sx;
  if (space.n_qubit() == 3) {
    const Operator pf = level_projector(space, 2);
    h += cplx(1.5 * p.omega_q + p.alpha_anh) * pf + cplx(1.5 * p.chi) * (n * pf);
    // RWA of Omega_R cos(wt) * 2 sqrt2 (|e><f| + h.c.) gives sqrt2 Omega_R (|e><f| + h.c.)
    drive += cplx(2.0 * std::sqrt(2.0)) * (transition(space, 1, 2) + transition(space, 2, 1));
  }

  HamiltonianModel model{.frame = Frame::Lab,
                         .include_f_level = space.n_qubit() == 3,
                         .static_part = h};
  const double omega_r = p.Omega_R, w_qp = p.omega_qp;
  const double eps = p.epsilon_sb, w_sb = p.omega_sb;
  model.time_dependent_parts.push_back(
      {drive, [omega_r, w_qp](double t) { return omega_r * std::cos(w_qp * t); }, "rabi"});
  model.time_dependent_parts.push_back(
      {a + dagger(a), [eps, w_sb](double t) { return eps * std::cos(w_sb * t); }, "sideband"});
  return model;
}

HamiltonianModel build_rotating_hamiltonian(const SystemParams& p, const HilbertSpace& space) {
  require_qubit_levels(space, 2, 3, "build_rotating_hamiltonian");
  const Operator a = annihilation(space);
  const Operator n = number(space);
  const auto s = sigma_ops(space);

  Operator h = cplx(p.Delta_c) * n + cplx(p.Delta_q / 2) * s.sz + cplx(p.chi / 2) * (n * s.sz) +
               cplx(p.Omega_R / 2) * s.sx + cplx(p.epsilon_sb) * (a + dagger(a));
  if (space.n_qubit() == 3) {
    const Operator pf = level_projector(space, 2);
    h += cplx(1.5 * p.Delta_q + p.alpha_anh) * pf + cplx(1.5 * p.chi) * (n * pf) +
         cplx(std::sqrt(2.0) * p.Omega_R) * (transition(space, 1, 2) + transition(space, 2, 1));
  }
  return {.frame = Frame::Rotating, .include_f_level = space.n_qubit() == 3, .static_part = h};
}

HamiltonianModel build_jc_hamiltonian(const SystemParams& p, const DerivedParams& d,
                                      const HilbertSpace& space, JcOptions options) {
  require_qubit_levels(space, 2, 3, "build_jc_hamiltonian");
  require_frame_matched(p, d, options.frame_tolerance, "build_jc_hamiltonian");

  const Operator dm = annihilation(space);
  const Operator dd = dagger(dm);
  const auto s = sigma_ops(space);

  Operator h = cplx(p.Delta_c) * (dd * dm) + cplx(p.Omega_R / 2) * s.sx;
  if (options.rotating_wave) {
    h += cplx(p.chi / 2) * (std::conj(d.a_bar) * (dm * s.sx_plus) + d.a_bar * (dd * s.sx_minus));
  } else {
    h += cplx(p.chi / 2) * (displaced_pull(space, d.a_bar) * (s.sx_plus + s.sx_minus));
  }

  HamiltonianModel model{.frame = Frame::DisplacedJC, .include_f_level = false, .static_part = h};
  if (space.n_qubit() == 3) {
    model.static_part += build_f_correction(p, space).static_part;
    model.include_f_level = true;
  }
  return model;
}

HamiltonianModel build_dispersive_hamiltonian(const SystemParams& p, const DerivedParams& d,
                                              const HilbertSpace& space) {
  require_qubit_levels(space, 2, 2, "build_dispersive_hamiltonian");
  const ZetaShift z = zeta(p, d);
  const Operator dm = annihilation(space);
  const Operator dd = dagger(dm);
  const auto s = sigma_ops(space);
  const Operator n = dd * dm;

  Operator h = cplx(p.Delta_c) * n + cplx((p.Omega_R + z.zeta_prime / 2) / 2) * s.sx +
               cplx(z.zeta / 2) * (n * s.sx) +
               cplx(p.chi * p.chi / (4 * p.Omega_R)) * (dd * dd * dm * dm * s.sx);
  return {.frame = Frame::Dispersive,
          .include_f_level = false,
          .static_part = h,
          .time_dependent_parts = {},
          .warnings = dispersive_validity_warnings(p, d)};
}

HamiltonianModel build_f_correction(const SystemParams& p, const HilbertSpace& space) {
  if (space.n_qubit() < 3) throw DimensionError("build_f_correction: n_qubit must be >= 3");
  const std::complex<double> a_bar = steady_state_amplitude(p);
  const Operator pf = level_projector(space, 2);
  Operator h = cplx(p.alpha_anh) * pf +
               cplx(std::sqrt(2.0) * p.Omega_R) * (transition(space, 1, 2) + transition(space, 2, 1)) +
               cplx(1.5 * p.chi) * (displaced_pull(space, a_bar) * pf);
  return {.frame = Frame::DisplacedJC, .include_f_level = true, .static_part = h};
}

HamiltonianModel build_n_level_transmon(const SystemParams& p, int n_levels,
                                        const HilbertSpace& space) {
  if (n_levels < 3 || n_levels > 7) {
    throw DimensionError("build_n_level_transmon: n_levels must lie in [3, 7]");
  }
  if (space.n_qubit() != n_levels) {
    throw DimensionError("build_n_level_transmon: space must have n_qubit == n_levels");
  }
  const DerivedParams d = derive(p);
  require_frame_matched(p, d, 1e-6, "build_n_level_transmon");

  Matrix b = Matrix::Zero(n_levels, n_levels);
  Matrix level = Matrix::Zero(n_levels, n_levels);
  Matrix kerr = Matrix::Zero(n_levels, n_levels);
  for (int k = 0; k < n_levels; ++k) {
    if (k > 0) b(k - 1, k) = std::sqrt(double(k));
    level(k, k) = k - 0.5;
    kerr(k, k) = 0.5 * k * (k - 1);
  }
  const Operator dm = annihilation(space);
  Operator h = cplx(p.Delta_c) * (dagger(dm) * dm) + cplx(p.alpha_anh) * on_qubit(space, kerr) +
               cplx(p.Omega_R / 2) * on_qubit(space, Matrix(b + b.adjoint())) +
               cplx(p.chi) * (displaced_pull(space, d.a_bar) * on_qubit(space, level));
  return {.frame = Frame::DisplacedJC, .include_f_level = true, .static_part = h};
}

Operator SchriefferWolff::transform(const Operator& h) const {
  const Matrix u = U_double_prime.matrix() * U_prime.matrix() * U.matrix();
  return {h.space(), u * h.matrix() * u.adjoint()};
}

SchriefferWolff schrieffer_wolff_generators(const SystemParams& p, const DerivedParams& d,
                                            const HilbertSpace& space) {
  require_qubit_levels(space, 2, 2, "schrieffer_wolff_generators");
  if (d.Delta == 0 || d.Sigma == 0 || p.Omega_R == 0) {
    throw DivisionByZero("schrieffer_wolff_generators: resonant parameters");
  }
  const Operator dm = annihilation(space);
  const Operator dd = dagger(dm);
  const auto s = sigma_ops(space);
  const std::complex<double> ab = d.a_bar, abc = std::conj(d.a_bar);

  Operator S = cplx(p.chi / (2 * d.Delta)) * (abc * (dm * s.sx_plus) - ab * (dd * s.sx_minus));
  Operator S1 = cplx(p.chi / (2 * d.Sigma)) * (ab * (dd * s.sx_plus) - abc * (dm * s.sx_minus));
  Operator S2 = cplx(p.chi / (2 * p.Omega_R)) * ((dd * dm) * (s.sx_plus - s.sx_minus));

  const cplx one(1);
  Operator U = matrix_exponential(S, one);
  Operator U1 = matrix_exponential(S1, one);
  Operator U2 = matrix_exponential(S2, one);
  return {std::move(S), std::move(S1), std::move(S2), std::move(U), std::move(U1), std::move(U2)};
}

}  // namespace sigmax
