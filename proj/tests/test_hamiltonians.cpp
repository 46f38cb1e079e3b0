#include <gtest/gtest.h>

#include <algorithm>

#include "sigmax/hamiltonians.hpp"
#include "sigmax/units.hpp"

using namespace sigmax;
using units::mhz;
using units::to_mhz;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd spectrum(const Operator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  return es.eigenvalues();
}

SystemParams undriven() {
  SystemParams p = reference_device();
  p.Omega_R = 0;
  p.epsilon_sb = 0;
  p.Delta_q = 0;
  return p;
}

}  // namespace

TEST(Params, ReferenceDevice) {
  const SystemParams p = reference_device();
  EXPECT_NO_THROW(validate(p));
  const DerivedParams d = derive(p);
  EXPECT_NEAR(d.n_bar_sb, 12, 1e-9);
  EXPECT_NEAR(to_mhz(d.g_eff), 5.5, 0.05);
  EXPECT_NEAR(to_mhz(d.Delta), 55, 1e-9);
  EXPECT_NEAR(to_mhz(d.Sigma), 85, 1e-9);
  EXPECT_NEAR(to_mhz(p.Delta_q), -12 * to_mhz(p.chi), 1e-9);
}

TEST(Params, SteadyStateAmplitude) {
  SystemParams p = reference_device();
  const cplx expected = -p.epsilon_sb / cplx(p.Delta_c, -p.kappa / 2);
  EXPECT_NEAR(std::abs(steady_state_amplitude(p) - expected), 0, 1e-12);
  EXPECT_NEAR(to_mhz(p.epsilon_sb), std::sqrt(12.0 * 229.0), 1e-9);
  EXPECT_NEAR(to_mhz(p.epsilon_sb), 52.5, 0.1);
  p.epsilon_sb = 0;
  EXPECT_EQ(steady_state_amplitude(p), cplx(0));
}

TEST(Params, PureDephasingTime) {
  EXPECT_NEAR(units::to_us(pure_dephasing_time(reference_device())), 360.0 / 7.0, 1e-9);
}

TEST(Params, Validation) {
  SystemParams p = reference_device();
  p.kappa = -1;
  EXPECT_THROW(validate(p), InvalidParams);
  p = reference_device();
  p.T2R = 3 * p.T1;
  EXPECT_THROW(validate(p), InvalidParams);
  p = reference_device();
  p.Delta_q += mhz(1);
  EXPECT_THROW(validate(p), InvalidParams);
}

TEST(LabHamiltonian, QubitConditionedCavityFrequency) {
  const SystemParams p = undriven();
  const HilbertSpace s(2, 4);
  const Matrix h = build_lab_hamiltonian(p, s).static_part.matrix();
  EXPECT_NEAR(h(s.index(1, 1), s.index(1, 1)).real() - h(s.index(1, 0), s.index(1, 0)).real(),
              p.omega_c + p.chi / 2, 1e-3);
  EXPECT_NEAR(h(s.index(0, 1), s.index(0, 1)).real() - h(s.index(0, 0), s.index(0, 0)).real(),
              p.omega_c - p.chi / 2, 1e-3);
}

TEST(LabHamiltonian, UncoupledTensorSum) {
  SystemParams p = undriven();
  p.chi = 0;
  const HilbertSpace s(2, 5);
  std::vector<double> expected;
  for (int n = 0; n < 5; ++n) {
    for (int q : {-1, 1}) expected.push_back(p.omega_c * n + p.omega_q * q / 2);
  }
  std::sort(expected.begin(), expected.end());
  const Eigen::VectorXd ev = spectrum(build_lab_hamiltonian(p, s).static_part);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(ev(k), expected[k], 1e-3);
}

TEST(LabHamiltonian, MatchesRotatingFrameAtZeroPumps) {
  SystemParams p = undriven();
  p.Delta_c = p.omega_c;
  p.Delta_q = p.omega_q;
  const HilbertSpace s(2, 5);
  const HamiltonianModel lab = build_lab_hamiltonian(p, s);
  const HamiltonianModel rot = build_rotating_hamiltonian(p, s);
  EXPECT_LT(max_abs(lab.static_part.matrix() - rot.static_part.matrix()), 1e-3);
  EXPECT_EQ(lab.time_dependent_parts.size(), 2u);
}

TEST(RotatingHamiltonian, UndrivenLimit) {
  const SystemParams p = undriven();
  const HilbertSpace s(2, 6);
  const Operator n = number(s);
  const Operator expected = cplx(p.Delta_c) * n + cplx(p.chi / 2) * (n * sigma_ops(s).sz);
  const HamiltonianModel m = build_rotating_hamiltonian(p, s);
  EXPECT_LT(max_abs(m.static_part.matrix() - expected.matrix()), 1e-6);
  EXPECT_TRUE(m.static_part.is_hermitian());
}

TEST(RotatingHamiltonian, DisplacementGivesJaynesCummings) {
  // D^dag H_rot D plus the kappa commutator term equals the displaced-frame Hamiltonian
  const SystemParams p = reference_device();
  const DerivedParams d = derive(p);
  const HilbertSpace big(2, 70);
  const Matrix u = displacement_unitary(big, d.a_bar).matrix();
  const Operator dm = annihilation(big);
  Matrix h = u.adjoint() * build_rotating_hamiltonian(p, big).static_part.matrix() * u;
  h += (cplx(0, p.kappa / 2) * (std::conj(d.a_bar) * dm.matrix() - d.a_bar * dm.matrix().adjoint()));
  const Matrix jc = build_jc_hamiltonian(p, d, big).static_part.matrix();
  const int lo = 12;
  const cplx offset = h(0, 0) - jc(0, 0);
  double worst = 0, scale = 0;
  for (int q1 = 0; q1 < 2; ++q1)
    for (int n1 = 0; n1 < lo; ++n1)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int n2 = 0; n2 < lo; ++n2) {
          const int i = big.index(q1, n1), j = big.index(q2, n2);
          const cplx diff = h(i, j) - jc(i, j) - (i == j ? offset : cplx(0));
          worst = std::max(worst, std::abs(diff));
          scale = std::max(scale, std::abs(jc(i, j)));
        }
  EXPECT_LT(worst / scale, 1e-6);
}

TEST(JcHamiltonian, NoSidebandLimit) {
  const SystemParams p = undriven();
  const HilbertSpace s(2, 6);
  const auto sig = sigma_ops(s);
  const Operator n = number(s);
  SystemParams q = p;
  q.Omega_R = mhz(30);
  const Operator expected = cplx(q.Delta_c) * n + cplx(q.Omega_R / 2) * sig.sx +
                            cplx(q.chi / 2) * (n * sig.sz);
  EXPECT_LT(max_abs(build_jc_hamiltonian(q, derive(q), s).static_part.matrix() - expected.matrix()), 1e-6);
}

TEST(JcHamiltonian, RotatingWaveForm) {
  const SystemParams p = reference_device();
  const DerivedParams d = derive(p);
  const HilbertSpace s(2, 6);
  const auto sig = sigma_ops(s);
  const Operator dm = annihilation(s);
  const Operator expected = cplx(p.Delta_c) * number(s) + cplx(p.Omega_R / 2) * sig.sx +
                            cplx(p.chi / 2) * (std::conj(d.a_bar) * (dm * sig.sx_plus) +
                                               d.a_bar * (dagger(dm) * sig.sx_minus));
  const HamiltonianModel m = build_jc_hamiltonian(p, d, s, {.rotating_wave = true});
  EXPECT_LT(max_abs(m.static_part.matrix() - expected.matrix()), 1e-6);
}

TEST(JcHamiltonian, VacuumRabiSplitting) {
  SystemParams p = reference_device();
  p.Omega_R = p.Delta_c;
  const DerivedParams d = derive(p);
  const HilbertSpace s(2, 5);
  const Eigen::VectorXd ev = spectrum(build_jc_hamiltonian(p, d, s, {.rotating_wave = true}).static_part);
  // ground |-,0> at -Omega_R/2, then the single-excitation doublet around Omega_R/2
  EXPECT_NEAR(ev(0), -p.Omega_R / 2, 1e-3);
  EXPECT_NEAR(ev(2) - ev(1), 2 * d.g_eff, 1e-3);
  EXPECT_NEAR((ev(1) + ev(2)) / 2, p.Omega_R / 2, 1e-3);
}

TEST(JcHamiltonian, FrameMismatch) {
  SystemParams p = reference_device();
  p.Delta_q = 0;
  EXPECT_THROW(build_jc_hamiltonian(p, derive(p), HilbertSpace(2, 4)), FrameMismatch);
}

TEST(Zeta, ReferencePoint) {
  const SystemParams p = reference_device();
  const ZetaShift z = zeta(p, derive(p));
  EXPECT_NEAR(to_mhz(z.zeta), 1.91, 0.01);
  EXPECT_NEAR(to_mhz(z.zeta), 3.2 * 3.2 / 2 * (12.0 / 55 + 12.0 / 85 + 1.0 / 70), 1e-9);
  EXPECT_GT(z.zeta, 0);
  EXPECT_NEAR(to_mhz(z.zeta_prime), 3.2 * 3.2 / 2 * (12.0 / 55 + 12.0 / 85), 1e-9);
}

TEST(Zeta, NoSidebandLimit) {
  SystemParams p = reference_device();
  p.epsilon_sb = 0;
  p.Delta_q = 0;
  const ZetaShift z = zeta(p, derive(p));
  EXPECT_NEAR(z.zeta, p.chi * p.chi / (2 * p.Omega_R), 1e-6);
  EXPECT_EQ(z.zeta_prime, 0);
}

TEST(Zeta, MonotoneOverDispersiveGrid) {
  SystemParams p = reference_device();
  double last = std::numeric_limits<double>::infinity();
  for (double f = 40; f <= 100; f += 2.5) {
    p.Omega_R = mhz(f);
    const double z = zeta(p, derive(p)).zeta;
    EXPECT_LT(z, last);
    last = z;
  }
}

TEST(Zeta, SingleTermLimits) {
  // only the Delta term survives when Sigma and Omega_R are sent far away
  SystemParams p = reference_device();
  DerivedParams d = derive(p);
  d.Sigma = 1e30;
  SystemParams q = p;
  q.Omega_R = 1e30;
  EXPECT_NEAR(zeta(q, d).zeta, p.chi * p.chi / 2 * d.n_bar_sb / d.Delta, 1e-6);
}

TEST(Zeta, ResonanceThrows) {
  SystemParams p = reference_device();
  p.Omega_R = p.Delta_c;
  EXPECT_THROW(zeta(p, derive(p)), DivisionByZero);
  p.Omega_R = 0;
  EXPECT_THROW(zeta(p, derive(p)), DivisionByZero);
}

TEST(Zeta, RoughEstimateIsHalfTheLeadingTerm) {
  const SystemParams p = reference_device();
  const DerivedParams d = derive(p);
  const double leading = p.chi * p.chi * d.n_bar_sb / (2 * d.Delta);
  EXPECT_NEAR(zeta_rough_estimate(d), 0.5 * leading, 1e-9 * leading);
}

TEST(DispersiveHamiltonian, PhotonShiftAndKerr) {
  const SystemParams p = reference_device();
  const DerivedParams d = derive(p);
  const HilbertSpace s(2, 5);
  const HamiltonianModel m = build_dispersive_hamiltonian(p, d, s);
  EXPECT_TRUE(m.static_part.is_hermitian());
  EXPECT_TRUE(m.warnings.empty());
  const Matrix h = m.static_part.matrix();
  const Vector plus0 = named_state(s, NamedState::plus, 0).amplitudes();
  const Vector plus1 = named_state(s, NamedState::plus, 1).amplitudes();
  const Vector minus0 = named_state(s, NamedState::minus, 0).amplitudes();
  const Vector minus1 = named_state(s, NamedState::minus, 1).amplitudes();
  const auto e = [&](const Vector& v) { return v.dot(h * v).real(); };
  const double z = zeta(p, d).zeta;
  EXPECT_NEAR((e(plus1) - e(plus0)) - p.Delta_c, z / 2, 1e-3);
  EXPECT_NEAR((e(minus1) - e(minus0)) - p.Delta_c, -z / 2, 1e-3);

  const Operator dm = annihilation(s);
  const Matrix kerr = (dagger(dm) * dagger(dm) * dm * dm).matrix();
  for (int n = 0; n < 2; ++n) {
    EXPECT_EQ(kerr(s.index(0, n), s.index(0, n)), cplx(0));
    EXPECT_EQ(kerr(s.index(1, n), s.index(1, n)), cplx(0));
  }
}

TEST(DispersiveHamiltonian, WarnsOutsideDispersiveRegime) {
  SystemParams p = reference_device();
  p.Omega_R = mhz(20);
  EXPECT_FALSE(build_dispersive_hamiltonian(p, derive(p), HilbertSpace(2, 3)).warnings.empty());
}

TEST(SchriefferWolff, GeneratorsAntiHermitian) {
  const SystemParams p = reference_device();
  const SchriefferWolff sw = schrieffer_wolff_generators(p, derive(p), HilbertSpace(2, 6));
  for (const Operator* g : {&sw.S, &sw.S_prime, &sw.S_double_prime}) {
    EXPECT_LT(max_abs(g->matrix() + g->matrix().adjoint()), 1e-12);
  }
  EXPECT_LT(unitarity_error<double>(sw.U.matrix()), 1e-8);
}

TEST(SchriefferWolff, IdentityWithoutCoupling) {
  SystemParams p = reference_device();
  p.chi = 0;
  p.Delta_q = 0;
  const HilbertSpace s(2, 6);
  const SchriefferWolff sw = schrieffer_wolff_generators(p, derive(p), s);
  const Matrix id = Matrix::Identity(s.dim(), s.dim());
  EXPECT_LT(max_abs(sw.U.matrix() - id), 1e-15);
  EXPECT_LT(max_abs(sw.U_prime.matrix() - id), 1e-15);
  EXPECT_LT(max_abs(sw.U_double_prime.matrix() - id), 1e-15);
}

namespace {

// Largest off-diagonal element of the transformed JC Hamiltonian among the lowest three photon
// levels, in the sigma_x (x) Fock basis, relative to g_eff.
double sw_residual(const SystemParams& p, bool transform = true) {
  const DerivedParams d = derive(p);
  const HilbertSpace s(2, 12);
  const SchriefferWolff sw = schrieffer_wolff_generators(p, d, s);
  const Operator jc = build_jc_hamiltonian(p, d, s).static_part;
  const Matrix h = transform ? sw.transform(jc).matrix() : jc.matrix();
  Matrix basis = Matrix::Zero(s.dim(), s.dim());
  for (int n = 0; n < s.n_cavity(); ++n) {
    basis.col(s.index(0, n)) = named_state(s, NamedState::minus, n).amplitudes();
    basis.col(s.index(1, n)) = named_state(s, NamedState::plus, n).amplitudes();
  }
  const Matrix hb = basis.adjoint() * h * basis;
  double worst = 0;
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = 0; j < s.dim(); ++j) {
      if (i == j || i % s.n_cavity() > 2 || j % s.n_cavity() > 2) continue;
      worst = std::max(worst, std::abs(hb(i, j)));
    }
  }
  return worst / d.g_eff;
}

}  // namespace

TEST(SchriefferWolff, OffDiagonalResidualIsSecondOrderInCoupling) {
  // The first-order couplings (size g_eff) are removed; what is left are second-order terms,
  // mostly two-photon d^2 terms of size ~ g_eff^2 / Delta.
  const SystemParams p = reference_device();
  const DerivedParams d = derive(p);
  const double before = sw_residual(p, false);
  const double after = sw_residual(p);
  EXPECT_GE(before, 1.0);
  EXPECT_LT(after, 2 * d.g_eff / d.Delta);
}

TEST(FCorrection, Structure) {
  SystemParams p = reference_device();
  const HilbertSpace s(3, 4);
  EXPECT_THROW(build_f_correction(p, HilbertSpace(2, 4)), DimensionError);
  const Matrix h = build_f_correction(p, s).static_part.matrix();
  // 3 chi / 2 pull on the f photon number
  EXPECT_NEAR(h(s.index(2, 1), s.index(2, 1)).real() - h(s.index(2, 0), s.index(2, 0)).real(), 1.5 * p.chi, 1e-6);
  EXPECT_NEAR(h(s.index(1, 0), s.index(2, 0)).real(), std::sqrt(2.0) * p.Omega_R, 1e-6);

  p.Omega_R = 0;
  const Matrix h0 = build_jc_hamiltonian(p, derive(p), s).static_part.matrix();
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 4; ++m) {
      EXPECT_EQ(h0(s.index(0, n), s.index(2, m)), cplx(0));
      EXPECT_EQ(h0(s.index(1, n), s.index(2, m)), cplx(0));
    }
  }
}

TEST(NLevelTransmon, ThreeLevelsMatchFCorrectionWithoutDrive) {
  SystemParams p = reference_device();
  p.Omega_R = 0;
  const HilbertSpace s(3, 5);
  const Matrix ladder = build_n_level_transmon(p, 3, s).static_part.matrix();
  const Matrix jc = build_jc_hamiltonian(p, derive(p), s).static_part.matrix();
  EXPECT_LT(max_abs(ladder - jc), 1e-6);
}

TEST(NLevelTransmon, Errors) {
  const SystemParams p = reference_device();
  EXPECT_THROW(build_n_level_transmon(p, 8, HilbertSpace(8, 2)), DimensionError);
  EXPECT_THROW(build_n_level_transmon(p, 5, HilbertSpace(4, 2)), DimensionError);
  const HamiltonianModel m = build_n_level_transmon(p, 7, HilbertSpace(7, 3));
  EXPECT_TRUE(m.static_part.is_hermitian());
}
