#include "sigmax/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sigmax {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix, NoCheck)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw DimensionMismatch("DensityMatrix: dimension does not match space " + describe(space_));
  }
}

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix)
    : DensityMatrix(space, std::move(matrix), NoCheck{}) {
  if (hermiticity_error() > 1e-9) throw InvalidParams("DensityMatrix: not Hermitian");
  if (std::abs(trace() - 1.0) > 1e-8) throw InvalidParams("DensityMatrix: trace != 1");
  if (min_eigenvalue() < -1e-8) throw InvalidParams("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::unchecked(HilbertSpace space, Matrix matrix) {
  return DensityMatrix(space, std::move(matrix), NoCheck{});
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.space(), psi.projector());
}

DensityMatrix DensityMatrix::mixture(const HilbertSpace& space,
                                     const std::vector<StateVector>& states,
                                     const std::vector<double>& weights) {
  if (states.size() != weights.size() || states.empty()) {
    throw InvalidParams("DensityMatrix::mixture: states and weights must be nonempty and match");
  }
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  double total = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (weights[k] < 0) throw InvalidParams("DensityMatrix::mixture: negative weight");
    m += weights[k] * states[k].projector();
    total += weights[k];
  }
  return DensityMatrix(space, m / total);
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix h = (matrix_ + matrix_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::level_population(int level) const {
  if (level < 0 || level >= space_.n_qubit()) throw DimensionError("level_population: bad level");
  double p = 0;
  for (int n = 0; n < space_.n_cavity(); ++n) {
    const int i = space_.index(level, n);
    p += matrix_(i, i).real();
  }
  return p;
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  const Matrix diff = rho - sigma;
  const Matrix h = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Dissipators

std::vector<CollapseOperator> dissipator_set(const SystemParams& p, Frame frame,
                                             const HilbertSpace& space,
                                             DissipatorOptions options) {
  if (!(p.T1 > 0) || !(p.T2R > 0)) throw InvalidParams("dissipator_set: T1, T2R must be > 0");
  if (1.0 / p.T2R < (1.0 - 1e-12) / (2.0 * p.T1)) {
    throw InvalidParams("dissipator_set: 1/T2R < 1/(2 T1)");
  }
  if (!(p.kappa > 0)) throw InvalidParams("dissipator_set: kappa must be > 0");

  std::vector<CollapseOperator> out;
  const bool displaced = frame == Frame::DisplacedJC || frame == Frame::Dispersive;
  out.push_back({annihilation(space), p.kappa, displaced ? "cavity d" : "cavity a"});

  const Operator lower = qubit_lowering(space);
  out.push_back({lower, (1.0 - p.p_e_thermal) / p.T1, "qubit relaxation"});
  if (p.p_e_thermal > 0) {
    out.push_back({dagger(lower), p.p_e_thermal / p.T1, "thermal excitation"});
  }
  const double tphi = pure_dephasing_time(p);
  if (options.include_dephasing && std::isfinite(tphi)) {
    out.push_back({sigma_ops(space).sz, 1.0 / (2.0 * tphi), "dephasing"});
  }
  for (int k = 2; k < space.n_qubit(); ++k) {
    const double rate = 0.5 * k * options.f_decay_scale / p.T1;
    out.push_back({transition(space, k - 1, k), rate, "ladder decay " + std::to_string(k)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

using Sparse = Eigen::SparseMatrix<cplx>;

// Operator stored sparse when mostly zero; all products are with dense density matrices.
class KernelOp {
 public:
  explicit KernelOp(const Matrix& m) {
    const Eigen::Index nnz = (m.array() != cplx(0)).count();
    sparse_ = nnz < m.size() / 5;
    if (sparse_) {
      s_ = m.sparseView(cplx(0), 0.0);
      s_.makeCompressed();
    } else {
      d_ = m;
    }
  }

  // out += scale * M x
  void left(const Matrix& x, Matrix& out, cplx scale) const {
    if (sparse_) out.noalias() += scale * (s_ * x);
    else out.noalias() += scale * (d_ * x);
  }
  // out += scale * x M
  void right(const Matrix& x, Matrix& out, cplx scale) const {
    if (sparse_) out.noalias() += scale * (x * s_);
    else out.noalias() += scale * (x * d_);
  }
  Matrix times(const Matrix& x) const {
    if (sparse_) return s_ * x;
    return d_ * x;
  }

 private:
  bool sparse_ = false;
  Sparse s_;
  Matrix d_;
};

class Generator {
 public:
  Generator(const HamiltonianModel& model, const std::vector<CollapseOperator>& collapse)
      : dim_(model.static_part.dim()),
        heff_(effective(model.static_part, collapse)),
        heff_dag_(Matrix(effective(model.static_part, collapse).adjoint())) {
    for (const auto& c : collapse) {
      if (c.op.dim() != dim_) throw DimensionMismatch("lindblad: collapse operator dimension");
      if (c.rate < 0) throw InvalidParams("lindblad: negative collapse rate");
      if (c.rate == 0) continue;
      const Matrix l = std::sqrt(c.rate) * c.op.matrix();
      jumps_.emplace_back(l);
      jumps_dag_.emplace_back(Matrix(l.adjoint()));
    }
    for (const auto& term : model.time_dependent_parts) {
      if (term.op.dim() != dim_) throw DimensionMismatch("lindblad: drive dimension");
      drives_.emplace_back(term.op.matrix());
      coefficients_.push_back(term.coefficient);
    }
    scale_ = model.static_part.matrix().cwiseAbs().rowwise().sum().maxCoeff();
    for (const auto& c : collapse) scale_ += c.rate * c.op.matrix().cwiseAbs2().sum();
  }

  int dim() const { return dim_; }
  double scale() const { return scale_; }

  void apply(double t, const Matrix& rho, Matrix& out) const {
    const cplx i(0, 1);
    out.setZero(dim_, dim_);
    heff_.left(rho, out, -i);
    heff_dag_.right(rho, out, i);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const Matrix tmp = jumps_[k].times(rho);
      jumps_dag_[k].right(tmp, out, cplx(1));
    }
    for (std::size_t k = 0; k < drives_.size(); ++k) {
      const double c = coefficients_[k](t);
      if (c == 0) continue;
      drives_[k].left(rho, out, -i * c);
      drives_[k].right(rho, out, i * c);
    }
  }

 private:
  static Matrix effective(const Operator& h, const std::vector<CollapseOperator>& collapse) {
    Matrix m = h.matrix();
    for (const auto& c : collapse) {
      m -= cplx(0, 0.5 * c.rate) * (c.op.matrix().adjoint() * c.op.matrix());
    }
    return m;
  }

  int dim_;
  KernelOp heff_;
  KernelOp heff_dag_;
  std::vector<KernelOp> jumps_, jumps_dag_, drives_;
  std::vector<std::function<double(double)>> coefficients_;
  double scale_ = 0;
};

HamiltonianModel static_model(const Operator& h) {
  return {.frame = Frame::Rotating, .include_f_level = false, .static_part = h};
}

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rel, double abs) {
  double worst = 0;
  for (Eigen::Index k = 0; k < err.size(); ++k) {
    const double tol = abs + rel * std::max(std::abs(y0(k)), std::abs(y1(k)));
    worst = std::max(worst, std::abs(err(k)) / tol);
  }
  return worst;
}

}  // namespace

Matrix lindblad_rhs(const Operator& h, const std::vector<CollapseOperator>& collapse,
                    const Matrix& rho) {
  if (rho.rows() != h.dim() || rho.cols() != h.dim()) {
    throw DimensionMismatch("lindblad_rhs: rho dimension does not match H");
  }
  const cplx i(0, 1);
  Matrix out = -i * (h.matrix() * rho - rho * h.matrix());
  for (const auto& c : collapse) {
    if (c.op.dim() != h.dim()) throw DimensionMismatch("lindblad_rhs: collapse dimension");
    const Matrix& l = c.op.matrix();
    const Matrix ldl = l.adjoint() * l;
    out += c.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Matrix liouvillian(const Operator& h, const std::vector<CollapseOperator>& collapse) {
  const int n = h.dim();
  const Matrix id = Matrix::Identity(n, n);
  const cplx i(0, 1);
  // vec(A X B) = (B^T (x) A) vec(X)
  Matrix l = -i * (kron<double>(id, h.matrix()) - kron<double>(h.matrix().transpose(), id));
  for (const auto& c : collapse) {
    if (c.op.dim() != n) throw DimensionMismatch("liouvillian: collapse dimension");
    const Matrix& a = c.op.matrix();
    const Matrix ada = a.adjoint() * a;
    l += c.rate * (kron<double>(a.conjugate(), a) - 0.5 * kron<double>(id, ada) -
                   0.5 * kron<double>(ada.transpose(), id));
  }
  return l;
}

// ---------------------------------------------------------------------------
// Time integration

EvolutionResult evolve(const HamiltonianModel& model, const std::vector<CollapseOperator>& collapse,
                       const DensityMatrix& rho0, const EvolutionConfig& config,
                       std::vector<double> times) {
  if (!(config.t_final > 0)) throw InvalidParams("evolve: t_final must be > 0");
  if (!(config.rel_tol > 0) || !(config.abs_tol > 0)) throw InvalidParams("evolve: tolerances must be > 0");
  if (!(rho0.space() == model.space())) throw DimensionMismatch("evolve: rho0 space mismatch");
  if (times.empty()) times.push_back(config.t_final);
  std::sort(times.begin(), times.end());
  if (times.front() < 0 || times.back() > config.t_final * (1 + 1e-12)) {
    throw InvalidParams("evolve: output times must lie in [0, t_final]");
  }

  const Generator gen(model, collapse);
  const int n = gen.dim();
  const double dt_cap = config.dt_max > 0 ? config.dt_max : config.t_final / 100;

  EvolutionResult result;
  Matrix y = rho0.matrix();
  double t = 0;
  auto record = [&](double at) {
    result.times.push_back(at);
    Matrix h = (y + y.adjoint()) / 2.0;
    result.states.push_back(DensityMatrix::unchecked(rho0.space(), std::move(h)));
  };

  std::vector<Matrix> k(7, Matrix(n, n));
  Matrix tmp(n, n), y5(n, n), err(n, n);

  if (config.method == Integrator::RK4) {
    for (double target : times) {
      while (t < target) {
        const double h = std::min(dt_cap, target - t);
        gen.apply(t, y, k[0]);
        tmp = y + (h / 2) * k[0];
        gen.apply(t + h / 2, tmp, k[1]);
        tmp = y + (h / 2) * k[1];
        gen.apply(t + h / 2, tmp, k[2]);
        tmp = y + h * k[2];
        gen.apply(t + h, tmp, k[3]);
        y += (h / 6) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
        t = (target - t - h) < 1e-15 * target ? target : t + h;
        if (++result.steps > config.max_steps) throw StepFailure("evolve: max_steps exceeded");
      }
      record(target);
    }
    return result;
  }

  // Dormand-Prince 5(4)
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  double h = std::min(dt_cap, 0.05 / std::max(gen.scale(), 1e-300));
  bool have_k0 = false;
  for (double target : times) {
    while (t < target) {
      if (!have_k0) {
        gen.apply(t, y, k[0]);
        have_k0 = true;
      }
      bool clipped = false;
      double step = std::min(h, dt_cap);
      // stretch slightly rather than leave a sliver before the output time
      if (t + step * (1 + 1e-6) >= target) {
        step = target - t;
        clipped = true;
      }
      if (step <= 1e-14 * std::max(target, 1e-300)) {
        if (clipped) {
          t = target;
          continue;
        }
        std::ostringstream msg;
        msg << "evolve: step size underflow at t = " << t << " s";
        throw StepFailure(msg.str());
      }
      tmp = y + step * a21 * k[0];
      gen.apply(t + c2 * step, tmp, k[1]);
      tmp = y + step * (a31 * k[0] + a32 * k[1]);
      gen.apply(t + c3 * step, tmp, k[2]);
      tmp = y + step * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
      gen.apply(t + c4 * step, tmp, k[3]);
      tmp = y + step * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
      gen.apply(t + c5 * step, tmp, k[4]);
      tmp = y + step * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
      gen.apply(t + step, tmp, k[5]);
      y5 = y + step * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
      gen.apply(t + step, y5, k[6]);
      err = step * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);

      const double en = error_norm(err, y, y5, config.rel_tol, config.abs_tol);
      if (++result.steps > config.max_steps) throw StepFailure("evolve: max_steps exceeded");
      if (en <= 1.0) {
        t = clipped ? target : t + step;
        y.swap(y5);
        k[0].swap(k[6]);
        const double grow = en == 0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // a step clipped to hit an output time says little about the natural step size
        if (!clipped || grow < 1) h = step * grow;
      } else {
        ++result.rejected;
        h = step * std::clamp(0.9 * std::pow(en, -0.25), 0.1, 0.9);
      }
    }
    record(target);
  }
  return result;
}

EvolutionResult evolve(const Operator& h, const std::vector<CollapseOperator>& collapse,
                       const DensityMatrix& rho0, const EvolutionConfig& config,
                       std::vector<double> times) {
  return evolve(static_model(h), collapse, rho0, config, std::move(times));
}

// ---------------------------------------------------------------------------
// Steady state

DensityMatrix steady_state(const Operator& h, const std::vector<CollapseOperator>& collapse,
                           SteadyStateOptions options) {
  const int n = h.dim();
  const Matrix l = liouvillian(h, collapse);
  Matrix a = l;
  // tr(rho) = 1 replaces the (0,0) row, which is a combination of the other diagonal rows
  a.row(0).setZero();
  for (int i = 0; i < n; ++i) a(0, i * n + i) = 1.0;
  Vector rhs = Vector::Zero(n * n);
  rhs(0) = 1.0;

  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  // rcond is an estimate; tiny pivots catch exact degeneracy it can miss
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() / std::max(pivots.maxCoeff(), 1e-300);
  if (!(rcond > options.degeneracy_rcond) || !(pivot_ratio > options.degeneracy_rcond)) {
    std::ostringstream msg;
    msg << "steady_state: Liouvillian null space is degenerate (rcond = " << rcond << ")";
    throw DegenerateSteadyState(msg.str());
  }
  const Vector x = lu.solve(rhs);
  Matrix rho = Eigen::Map<const Matrix>(x.data(), n, n);
  rho = (rho + rho.adjoint()) / 2.0;
  rho /= rho.trace();

  const Vector vr = Eigen::Map<const Vector>(rho.data(), n * n);
  const double lnorm = l.norm();
  const double residual = (l * vr).norm() / std::max(lnorm, 1e-300);
  if (residual > options.residual_tol) {
    std::ostringstream msg;
    msg << "steady_state: residual " << residual << " above tolerance";
    throw DegenerateSteadyState(msg.str());
  }
  return DensityMatrix::unchecked(h.space(), std::move(rho));
}

}  // namespace sigmax
