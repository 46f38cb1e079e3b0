#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "sigmax/measurement.hpp"
#include "sigmax/rates.hpp"

namespace sigmax {

ReadoutFrameModel readout_frame_model(const SystemParams& p, const ReadoutModel& r,
                                      const HilbertSpace& space) {
  if (space.n_qubit() != 2) throw DimensionError("readout_frame_model: n_qubit must be 2");
  const DerivedParams d = derive(p);
  const ZetaShift z = zeta(p, d);
  const TransitionRates g = golden_rule_rates(p, d);
  const Operator dm = annihilation(space);
  const Operator dd = dagger(dm);
  const auto s = sigma_ops(space);

  Operator h = cplx(r.Delta_r) * (dd * dm) + cplx((p.Omega_R + z.zeta_prime / 2) / 2) * s.sx +
               cplx(z.zeta / 2) * (dd * dm * s.sx) +
               cplx(p.chi * p.chi / (4 * p.Omega_R)) * (dd * dd * dm * dm * s.sx) +
               cplx(r.epsilon_r) * (dm + dd);

  ReadoutFrameModel out{std::move(h), dissipator_set(p, Frame::Dispersive, space), 0};
  out.collapse.insert(out.collapse.begin() + 1,
                      {{s.sx_minus, g.gamma_plus_minus, "sx lowering"},
                       {s.sx_plus, g.gamma_minus_plus, "sx raising"}});
  return out;
}

DiffusiveTrajectory simulate_diffusive_trajectory(const Operator& h,
                                                  const std::vector<CollapseOperator>& collapse,
                                                  const ReadoutModel& r, const DensityMatrix& rho0,
                                                  double duration, std::uint64_t seed,
                                                  const DiffusiveOptions& options) {
  r.validate();
  if (!(duration > 0) || !(options.dt > 0)) throw InvalidParams("diffusive: duration, dt must be > 0");
  if (duration > kMaxDiffusiveDuration * (1 + 1e-9)) {
    throw InvalidParams("diffusive: duration above the 100 us limit; use the markov engine");
  }
  if (options.measured_channel < 0 || options.measured_channel >= int(collapse.size())) {
    throw InvalidParams("diffusive: measured channel out of range");
  }
  const long per_bin = std::lround(r.t_m / options.dt);
  if (per_bin < 1 || std::abs(per_bin * options.dt - r.t_m) > 1e-9 * r.t_m) {
    throw InvalidParams("diffusive: t_m must be a multiple of dt");
  }
  const long bins = std::lround(duration / r.t_m);
  const int n = h.dim();

  const auto& channel = collapse[options.measured_channel];
  const Matrix c = std::sqrt(channel.rate) * channel.op.matrix();
  // The measurement operator below supplies an eta share of c rho c^dag, so the propagator
  // keeps only (1 - eta) of it: vec(c rho c^dag) = (conj(c) (x) c) vec(rho).
  const Matrix sandwich = Eigen::kroneckerProduct(c.conjugate(), c).eval();
  const Matrix prop = ((liouvillian(h, collapse) - r.eta * sandwich) * options.dt).exp();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix sx = sigma_ops(h.space()).sx.matrix();
  const double gain = std::sqrt(r.eta / 2);
  const double drift = std::sqrt(2 * r.eta) * options.dt;
  const double sqrt_dt = std::sqrt(options.dt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  DiffusiveTrajectory out;
  out.record.t_m = r.t_m;
  out.record.seed = seed;
  out.record.samples.reserve(bins);
  out.sigma_x.reserve(bins);

  std::vector<double> checkpoints = options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;

  Matrix rho = rho0.matrix();
  Vector v(n * n);

  long step = 0;
  auto store_checkpoints = [&](double t) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t + 1e-6 * options.dt) {
      out.checkpoint_states.push_back(rho);
      ++next_cp;
    }
  };
  store_checkpoints(0);

  for (long b = 0; b < bins; ++b) {
    cplx integrated = 0;
    for (long k = 0; k < per_bin; ++k) {
      const cplx mean_c = (c.cwiseProduct(rho.transpose())).sum();
      // record increments in units of the noise, then the Kraus update they imply
      const double dyi = sqrt_dt * normal(rng) + drift * mean_c.real();
      const double dyq = sqrt_dt * normal(rng) + drift * mean_c.imag();
      integrated += cplx(dyi, dyq) / std::sqrt(2.0);

      v = prop * Eigen::Map<const Vector>(rho.data(), n * n);
      const Matrix m = identity + gain * cplx(dyi, -dyq) * c;
      rho = m * Eigen::Map<const Matrix>(v.data(), n, n) * m.adjoint();
      rho = (rho + rho.adjoint()).eval() / 2.0;
      const double tr = rho.trace().real();
      if (!(tr > 0) || !std::isfinite(tr)) throw StepFailure("diffusive: conditional trace lost");
      rho /= tr;
      ++step;
      store_checkpoints(step * options.dt);
    }
    out.record.samples.push_back(integrated / std::sqrt(r.t_m));
    out.sigma_x.push_back((sx.cwiseProduct(rho.transpose())).sum().real());
  }
  return out;
}

}  // namespace sigmax
