#include "sigmax/measurement.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "sigmax/rates.hpp"
#include <limits>

namespace sigmax {

void ReadoutModel::validate() const {
  if (!(t_m > 0)) throw InvalidParams("ReadoutModel: t_m must be > 0");
  if (!(eta > 0) || eta > 1) throw InvalidParams("ReadoutModel: eta must lie in (0, 1]");
  if (!(noise_sigma > 0)) throw InvalidParams("ReadoutModel: noise_sigma must be > 0");
  if (!(signal_scale > 0)) throw InvalidParams("ReadoutModel: signal_scale must be > 0");
}

ReadoutModel default_readout(const SystemParams& p) {
  ReadoutModel r;
  r.epsilon_r = p.epsilon_r;
  r.Delta_r = p.Delta_r;
  return r;
}

PointerStates pointer_states(const SystemParams& p, double zeta, const ReadoutModel& r,
                             double delta_f) {
  if (!(p.kappa > 0)) throw InvalidParams("pointer_states: kappa must be > 0");
  auto amp = [&](double shift) { return -r.epsilon_r / cplx(shift + r.Delta_r, -p.kappa / 2); };
  return {amp(-zeta / 2), amp(zeta / 2), amp(delta_f)};
}

IntegratedSignals integrated_signal(const PointerStates& pointer, const ReadoutModel& r,
                                    double kappa) {
  const double s = std::sqrt(r.eta * kappa * r.t_m) * r.signal_scale;
  return {s * pointer.a_minus, s * pointer.a_plus, s * pointer.a_f};
}

double separation_in_sigma(const IntegratedSignals& s, const ReadoutModel& r) {
  return std::abs(s.s_plus - s.s_minus) / r.noise_sigma;
}

double calibrate_signal_scale(const PointerStates& pointer, ReadoutModel r, double kappa,
                              double target) {
  r.signal_scale = 1.0;
  const double base = separation_in_sigma(integrated_signal(pointer, r, kappa), r);
  if (base == 0) throw DegenerateGeometry("calibrate_signal_scale: pointer states coincide");
  return target / base;
}

// ---------------------------------------------------------------------------

void MarkovEmitter::validate() const {
  if (n_states < 1 || n_states > 3) throw InvalidParams("MarkovEmitter: n_states must be 1..3");
  for (int i = 0; i < n_states; ++i) {
    double row = 0;
    for (int j = 0; j < n_states; ++j) {
      if (i != j && generator(i, j) < 0) throw InvalidParams("MarkovEmitter: negative rate");
      row += generator(i, j);
    }
    const double scale = std::max(1.0, -generator(i, i));
    if (std::abs(row) > 1e-9 * scale) throw InvalidParams("MarkovEmitter: rows must sum to 0");
  }
}

Eigen::Vector3d MarkovEmitter::stationary() const {
  const int n = n_states;
  Eigen::MatrixXd a = generator.topLeftCorner(n, n).transpose();
  a.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1;
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  out.head(n) = a.fullPivLu().solve(b);
  return out;
}

Eigen::Matrix3d markov_generator(double pm, double mp, double mf, double pf, double fm, double fp) {
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  q(plus, minus) = pm;
  q(minus, plus) = mp;
  q(minus, f_state) = mf;
  q(plus, f_state) = pf;
  q(f_state, minus) = fm;
  q(f_state, plus) = fp;
  for (int i = 0; i < 3; ++i) q(i, i) = -q.row(i).sum();
  return q;
}

FLevelRates f_rates_for_population(double population, double T1) {
  if (population < 0 || population >= 1) throw InvalidParams("f population must lie in [0, 1)");
  if (!(T1 > 0)) throw InvalidParams("T1 must be > 0");
  const double exit_total = 2.0 / T1;
  return {exit_total * population / (1 - population), exit_total / 2};
}

MarkovEmitter sigma_x_emitter(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f) {
  const DerivedParams d = derive(p);
  const ZetaShift z = zeta(p, d);
  const TransitionRates g = golden_rule_rates(p, d);
  const IntegratedSignals s = integrated_signal(pointer_states(p, z.zeta, r), r, p.kappa);
  MarkovEmitter e;
  e.generator = markov_generator(g.gamma_plus_minus, g.gamma_minus_plus, f.entry, f.entry, f.exit,
                                 f.exit);
  e.signal = {s.s_minus, s.s_plus, s.s_f};
  e.n_states = f.entry > 0 || f.exit > 0 ? 3 : 2;
  if (e.n_states == 2) e.generator.row(2).setZero();
  return e;
}

MarkovEmitter regime_emitter(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f) {
  const DerivedParams d = derive(p);
  if (p.Omega_R > 0 && std::abs(d.Delta) >= 5 * d.g_eff) return sigma_x_emitter(p, r, f);

  // sigma_z regime: the readout sees g and e through the bare dispersive pull +-chi/2
  auto amp = [&](double shift) { return -r.epsilon_r / cplx(shift + r.Delta_r, -p.kappa / 2); };
  const double scale = std::sqrt(r.eta * p.kappa * r.t_m) * r.signal_scale;
  const double zeno = r.gamma_m > 0 ? p.Omega_R * p.Omega_R / (2 * r.gamma_m) : 0.0;
  MarkovEmitter e;
  e.labels = {"g", "e", ""};
  e.n_states = 2;
  e.generator(0, 1) = p.p_e_thermal / p.T1 + zeno;
  e.generator(1, 0) = (1 - p.p_e_thermal) / p.T1 + zeno;
  e.generator(0, 0) = -e.generator(0, 1);
  e.generator(1, 1) = -e.generator(1, 0);
  e.signal = {scale * amp(-p.chi / 2), scale * amp(p.chi / 2), cplx(0)};
  e.mix_within_bin = true;
  return e;
}

// ---------------------------------------------------------------------------

namespace {

int draw(const double* probs, int n, double u) {
  double acc = 0;
  for (int i = 0; i < n - 1; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace

MarkovTrace simulate_markov_trace(const MarkovEmitter& emitter, const ReadoutModel& r,
                                  double duration, std::uint64_t seed, int initial_state) {
  emitter.validate();
  r.validate();
  if (!(duration > 0)) throw InvalidParams("simulate_markov_trace: duration must be > 0");
  const int n = emitter.n_states;
  const auto bins = static_cast<std::size_t>(std::llround(duration / r.t_m));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, r.noise_sigma);

  MarkovTrace out;
  out.record.t_m = r.t_m;
  out.record.seed = seed;
  out.record.samples.reserve(bins);
  out.hidden.reserve(bins);

  int state = initial_state;
  if (state < 0) {
    const Eigen::Vector3d pi = emitter.stationary();
    state = draw(pi.data(), n, uniform(rng));
  }
  if (state >= n) throw InvalidParams("simulate_markov_trace: initial state out of range");

  if (!emitter.mix_within_bin) {
    const Eigen::Matrix3d q = emitter.generator;
    Eigen::MatrixXd qn = q.topLeftCorner(n, n);
    const Eigen::MatrixXd step = (qn * r.t_m).exp();
    // row-major copy so each row is contiguous for draw()
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pr = step;
    for (std::size_t b = 0; b < bins; ++b) {
      if (b > 0) state = draw(pr.row(state).data(), n, uniform(rng));
      const double ni = noise(rng), nq = noise(rng);
      out.record.samples.push_back(emitter.signal[state] + cplx(ni, nq));
      out.hidden.push_back(state);
    }
    return out;
  }

  double next_jump = 0;
  auto schedule = [&](double now) {
    const double rate = -emitter.generator(state, state);
    next_jump = rate > 0 ? now - std::log(1.0 - uniform(rng)) / rate
                         : std::numeric_limits<double>::infinity();
  };
  schedule(0);
  for (std::size_t b = 0; b < bins; ++b) {
    const double t0 = b * r.t_m, t1 = t0 + r.t_m;
    std::array<double, 3> occupation{};
    double t = t0;
    while (next_jump < t1) {
      occupation[state] += next_jump - t;
      t = next_jump;
      std::array<double, 3> probs{};
      const double rate = -emitter.generator(state, state);
      for (int j = 0; j < n; ++j) probs[j] = j == state ? 0.0 : emitter.generator(state, j) / rate;
      state = draw(probs.data(), n, uniform(rng));
      schedule(t);
    }
    occupation[state] += t1 - t;
    cplx signal = 0;
    int majority = 0;
    for (int j = 0; j < n; ++j) {
      signal += occupation[j] / r.t_m * emitter.signal[j];
      if (occupation[j] > occupation[majority]) majority = j;
    }
    const double ni = noise(rng), nq = noise(rng);
    out.record.samples.push_back(signal + cplx(ni, nq));
    out.hidden.push_back(majority);
  }
  return out;
}

// ---------------------------------------------------------------------------

PreparedState state_prep_sequence(double theta, double phi, const SystemParams& p,
                                  const PrepOptions& options) {
  if (!(options.sigma > 0) || !(options.width_sigmas > 0)) {
    throw InvalidParams("state_prep_sequence: pulse width must be > 0");
  }
  SystemParams q = p;
  q.Omega_R = 0;
  const HilbertSpace space(2, options.n_cavity);
  const DerivedParams d = derive(q);

  PreparedState out{.model = build_jc_hamiltonian(q, d, space),
                    .collapse = dissipator_set(q, Frame::DisplacedJC, space),
                    .duration = 2 * options.width_sigmas * options.sigma,
                    .peak_amplitude = 0,
                    .rho = DensityMatrix::pure(basis_state(space, 0))};
  // The sideband is on before the pulse: start from the driven steady state postselected on |g>,
  // so the cavity already sits in its g-conditioned state.
  const Matrix pg = level_projector(space, 0).matrix();
  Matrix start = pg * steady_state(out.model.static_part, out.collapse).matrix() * pg;
  start /= start.trace();
  out.rho = DensityMatrix::unchecked(space, (start + start.adjoint()) / 2.0);
  if (!options.dissipation) out.collapse.clear();

  const double angle = theta + options.cubic * theta * theta * theta;
  if (angle == 0) return out;

  const double sigma = options.sigma, t0 = options.width_sigmas * sigma;
  const double area = sigma * std::sqrt(2 * std::numbers::pi) *
                      std::erf(options.width_sigmas / std::numbers::sqrt2);
  const double amp = angle / area;
  out.peak_amplitude = amp;
  // exp(-i angle/2 (cos a sx + sin a sy))|g> equals bloch_state(angle, phi) for a = -phi - pi/2
  const double axis = -phi - std::numbers::pi / 2;
  const auto s = sigma_ops(space);
  auto envelope = [amp, t0, sigma](double t) {
    const double x = (t - t0) / sigma;
    return 0.5 * amp * std::exp(-0.5 * x * x);
  };
  const double cx = std::cos(axis), cy = std::sin(axis);
  out.model.time_dependent_parts.push_back(
      {s.sx, [envelope, cx](double t) { return cx * envelope(t); }, "prep x"});
  out.model.time_dependent_parts.push_back(
      {s.sy, [envelope, cy](double t) { return cy * envelope(t); }, "prep y"});

  EvolutionConfig cfg;
  cfg.t_final = out.duration;
  cfg.dt_max = sigma / 8;
  const EvolutionResult res = evolve(out.model, out.collapse, out.rho, cfg);
  out.rho = res.states.back();
  return out;
}

}  // namespace sigmax
