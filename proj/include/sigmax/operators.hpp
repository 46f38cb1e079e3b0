#pragma once

// Dense operators on a truncated qubit (x) cavity Hilbert space.
//
// Composite index ordering is qubit-major: |level, n> -> level * n_cavity + n.
// Qubit levels are ordered g, e, f, ... and sigma_z = |e><e| - |g><g|.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>

#include "sigmax/errors.hpp"

namespace sigmax {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using Matrix = CMatrix<double>;
using Vector = CVector<double>;

enum class QubitLevel : int { g = 0, e = 1, f = 2 };

class HilbertSpace {
 public:
  HilbertSpace(int n_qubit, int n_cavity) : n_qubit_(n_qubit), n_cavity_(n_cavity) {
    if (n_qubit < 2) throw DimensionError("HilbertSpace: n_qubit must be >= 2");
    if (n_cavity < 1) throw DimensionError("HilbertSpace: n_cavity must be >= 1");
  }

  int n_qubit() const { return n_qubit_; }
  int n_cavity() const { return n_cavity_; }
  int dim() const { return n_qubit_ * n_cavity_; }
  int index(int level, int fock) const { return level * n_cavity_ + fock; }

  bool operator==(const HilbertSpace&) const = default;

 private:
  int n_qubit_;
  int n_cavity_;
};

inline std::string describe(const HilbertSpace& s) {
  return std::to_string(s.n_qubit()) + "x" + std::to_string(s.n_cavity());
}

template <typename Real>
class BasicOperator {
 public:
  using Scalar = std::complex<Real>;
  using MatrixType = CMatrix<Real>;

  BasicOperator(HilbertSpace space, MatrixType matrix)
      : space_(space), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
      throw DimensionMismatch("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", space " +
                              describe(space_) + " needs " + std::to_string(space_.dim()));
    }
  }

  static BasicOperator zero(const HilbertSpace& space) {
    return {space, MatrixType::Zero(space.dim(), space.dim())};
  }
  static BasicOperator identity(const HilbertSpace& space) {
    return {space, MatrixType::Identity(space.dim(), space.dim())};
  }

  const HilbertSpace& space() const { return space_; }
  const MatrixType& matrix() const { return matrix_; }
  int dim() const { return space_.dim(); }

  /// max |M - M^dagger|
  Real hermiticity_error() const {
    if (matrix_.size() == 0) return Real(0);
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(Real tol = Real(1e-10)) const {
    const Real scale = std::max<Real>(Real(1), matrix_.cwiseAbs().maxCoeff());
    return hermiticity_error() <= tol * scale;
  }

  BasicOperator& operator+=(const BasicOperator& o) {
    check_same(o);
    matrix_ += o.matrix_;
    return *this;
  }
  BasicOperator& operator-=(const BasicOperator& o) {
    check_same(o);
    matrix_ -= o.matrix_;
    return *this;
  }
  BasicOperator& operator*=(Scalar s) {
    matrix_ *= s;
    return *this;
  }

  void check_same(const BasicOperator& o) const {
    if (!(space_ == o.space_)) {
      throw DimensionMismatch("Operator: incompatible spaces " + describe(space_) + " and " +
                              describe(o.space_));
    }
  }

 private:
  HilbertSpace space_;
  MatrixType matrix_;
};

template <typename Real>
BasicOperator<Real> operator+(BasicOperator<Real> a, const BasicOperator<Real>& b) {
  return a += b;
}
template <typename Real>
BasicOperator<Real> operator-(BasicOperator<Real> a, const BasicOperator<Real>& b) {
  return a -= b;
}
template <typename Real>
BasicOperator<Real> operator-(BasicOperator<Real> a) {
  return a *= std::complex<Real>(-1);
}
template <typename Real>
BasicOperator<Real> operator*(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  a.check_same(b);
  return {a.space(), a.matrix() * b.matrix()};
}
template <typename Real>
BasicOperator<Real> operator*(std::complex<Real> s, BasicOperator<Real> a) {
  return a *= s;
}
template <typename Real>
BasicOperator<Real> operator*(Real s, BasicOperator<Real> a) {
  return a *= std::complex<Real>(s);
}

template <typename Real>
class BasicStateVector {
 public:
  using VectorType = CVector<Real>;

  BasicStateVector(HilbertSpace space, VectorType amplitudes)
      : space_(space), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dim()) {
      throw DimensionMismatch("StateVector: length does not match space " + describe(space_));
    }
    if (std::abs(amplitudes_.norm() - Real(1)) > Real(1e-10)) {
      throw InvalidParams("StateVector: amplitudes are not unit norm");
    }
  }

  /// Normalizes before validation.
  static BasicStateVector normalized(const HilbertSpace& space, VectorType amplitudes) {
    const Real n = amplitudes.norm();
    if (n == Real(0)) throw InvalidParams("StateVector: zero vector");
    return {space, amplitudes / n};
  }

  const HilbertSpace& space() const { return space_; }
  const VectorType& amplitudes() const { return amplitudes_; }

  CMatrix<Real> projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  HilbertSpace space_;
  VectorType amplitudes_;
};

using Operator = BasicOperator<double>;
using StateVector = BasicStateVector<double>;

// ---------------------------------------------------------------------------
// Factor-local building blocks

template <typename Real = double>
CMatrix<Real> kron(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  CMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Operator A (x) B with A on the qubit factor and B on the cavity factor.
template <typename Real = double>
BasicOperator<Real> tensor(const HilbertSpace& space, const CMatrix<Real>& qubit_part,
                           const CMatrix<Real>& cavity_part) {
  if (qubit_part.rows() != space.n_qubit() || qubit_part.cols() != space.n_qubit() ||
      cavity_part.rows() != space.n_cavity() || cavity_part.cols() != space.n_cavity()) {
    throw DimensionMismatch("tensor: factor shapes do not match space " + describe(space));
  }
  return {space, kron<Real>(qubit_part, cavity_part)};
}

template <typename Real = double>
BasicOperator<Real> on_qubit(const HilbertSpace& space, const CMatrix<Real>& qubit_part) {
  return tensor<Real>(space, qubit_part, CMatrix<Real>::Identity(space.n_cavity(), space.n_cavity()));
}

template <typename Real = double>
BasicOperator<Real> on_cavity(const HilbertSpace& space, const CMatrix<Real>& cavity_part) {
  return tensor<Real>(space, CMatrix<Real>::Identity(space.n_qubit(), space.n_qubit()), cavity_part);
}

/// Bare cavity lowering matrix on the Fock factor alone.
template <typename Real = double>
CMatrix<Real> fock_lowering(int n_cavity) {
  CMatrix<Real> a = CMatrix<Real>::Zero(n_cavity, n_cavity);
  for (int n = 1; n < n_cavity; ++n) a(n - 1, n) = std::sqrt(Real(n));
  return a;
}

/// |i><j| on the qubit factor alone.
template <typename Real = double>
CMatrix<Real> level_matrix(int n_qubit, int i, int j) {
  if (i < 0 || j < 0 || i >= n_qubit || j >= n_qubit) {
    throw DimensionError("level_matrix: level outside qubit space");
  }
  CMatrix<Real> m = CMatrix<Real>::Zero(n_qubit, n_qubit);
  m(i, j) = Real(1);
  return m;
}

// ---------------------------------------------------------------------------
// Named operators on the composite space

/// Cavity annihilation a (identity on the qubit factor).
template <typename Real = double>
BasicOperator<Real> annihilation(const HilbertSpace& space) {
  return on_cavity<Real>(space, fock_lowering<Real>(space.n_cavity()));
}

template <typename Real = double>
BasicOperator<Real> creation(const HilbertSpace& space) {
  return on_cavity<Real>(space, fock_lowering<Real>(space.n_cavity()).adjoint());
}

template <typename Real = double>
BasicOperator<Real> number(const HilbertSpace& space) {
  const CMatrix<Real> a = fock_lowering<Real>(space.n_cavity());
  return on_cavity<Real>(space, a.adjoint() * a);
}

/// |i><j| (x) identity.
template <typename Real = double>
BasicOperator<Real> transition(const HilbertSpace& space, int i, int j) {
  return on_qubit<Real>(space, level_matrix<Real>(space.n_qubit(), i, j));
}

template <typename Real = double>
BasicOperator<Real> level_projector(const HilbertSpace& space, int level) {
  return transition<Real>(space, level, level);
}

/// Pauli operators on the g,e subspace plus the sigma_x ladder operators
/// sigma_x^{+-} = (sigma_z -+ i sigma_y) / 2, which satisfy sigma_x^+ + sigma_x^- = sigma_z.
template <typename Real>
struct SigmaOps {
  BasicOperator<Real> sx, sy, sz, sx_plus, sx_minus;
};

template <typename Real = double>
SigmaOps<Real> sigma_ops(const HilbertSpace& space) {
  using C = std::complex<Real>;
  const int nq = space.n_qubit();
  CMatrix<Real> x = CMatrix<Real>::Zero(nq, nq), y = x, z = x;
  x(0, 1) = x(1, 0) = C(1);
  // right-handed with sigma_z = |e><e| - |g><g|: sigma_x sigma_y = i sigma_z
  y(0, 1) = C(0, 1);
  y(1, 0) = C(0, -1);
  z(0, 0) = C(-1);
  z(1, 1) = C(1);
  const C i(0, 1);
  CMatrix<Real> plus = (z - i * y) / Real(2);
  CMatrix<Real> minus = (z + i * y) / Real(2);
  return {on_qubit<Real>(space, x), on_qubit<Real>(space, y), on_qubit<Real>(space, z),
          on_qubit<Real>(space, plus), on_qubit<Real>(space, minus)};
}

/// sigma_- = |g><e| (energy lowering on the g,e subspace).
template <typename Real = double>
BasicOperator<Real> qubit_lowering(const HilbertSpace& space) {
  return transition<Real>(space, 0, 1);
}

// ---------------------------------------------------------------------------
// Algebra

template <typename Real>
BasicOperator<Real> dagger(const BasicOperator<Real>& op) {
  return {op.space(), op.matrix().adjoint()};
}

template <typename Real>
BasicOperator<Real> commutator(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  a.check_same(b);
  return {a.space(), a.matrix() * b.matrix() - b.matrix() * a.matrix()};
}

template <typename Real>
BasicOperator<Real> anticommutator(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  a.check_same(b);
  return {a.space(), a.matrix() * b.matrix() + b.matrix() * a.matrix()};
}

/// exp(scale * op), scaling-and-squaring Pade.
template <typename Real>
BasicOperator<Real> matrix_exponential(const BasicOperator<Real>& op, std::complex<Real> scale) {
  CMatrix<Real> m = op.matrix() * scale;
  return {op.space(), m.exp()};
}

template <typename Real>
std::complex<Real> expectation(const BasicOperator<Real>& op, const BasicStateVector<Real>& psi) {
  if (!(op.space() == psi.space())) throw DimensionMismatch("expectation: space mismatch");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

/// tr(op * rho) for a raw density matrix of matching dimension.
template <typename Real>
std::complex<Real> expectation(const BasicOperator<Real>& op, const CMatrix<Real>& rho) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) {
    throw DimensionMismatch("expectation: density matrix dimension mismatch");
  }
  return (op.matrix().cwiseProduct(rho.transpose())).sum();
}

template <typename Real>
BasicStateVector<Real> apply(const BasicOperator<Real>& op, const BasicStateVector<Real>& psi) {
  if (!(op.space() == psi.space())) throw DimensionMismatch("apply: space mismatch");
  return BasicStateVector<Real>::normalized(op.space(), op.matrix() * psi.amplitudes());
}

/// Maximum deviation of U^dagger U from the identity.
template <typename Real>
Real unitarity_error(const CMatrix<Real>& u) {
  return (u.adjoint() * u - CMatrix<Real>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Displacement D(alpha) = exp(alpha a^dagger - alpha^* a).
///
/// D(alpha)|0> = |alpha> and D^dagger a D = a + alpha; the frame change into the displaced
/// frame is therefore U_d = D(alpha)^dagger = exp(alpha^* a - alpha a^dagger).
/// Requires |alpha|^2 <= n_cavity / 4 so that the coherent tail beyond the truncation stays
/// negligible.
template <typename Real = double>
BasicOperator<Real> displacement_unitary(const HilbertSpace& space, std::complex<Real> alpha) {
  if (std::norm(alpha) > Real(space.n_cavity()) / Real(4)) {
    throw TruncationError("displacement_unitary: |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                          " exceeds n_cavity/4 = " + std::to_string(space.n_cavity() / 4.0));
  }
  const CMatrix<Real> a = fock_lowering<Real>(space.n_cavity());
  CMatrix<Real> gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return on_cavity<Real>(space, gen.exp());
}

// ---------------------------------------------------------------------------
// States

enum class NamedState { g, e, f, plus, minus, i_state };

template <typename Real = double>
BasicStateVector<Real> basis_state(const HilbertSpace& space, int level, int fock = 0) {
  if (level < 0 || level >= space.n_qubit() || fock < 0 || fock >= space.n_cavity()) {
    throw DimensionError("basis_state: index outside space");
  }
  CVector<Real> v = CVector<Real>::Zero(space.dim());
  v(space.index(level, fock)) = Real(1);
  return {space, v};
}

/// Qubit state |g>, |e>, |f>, |+-> = (|g> +- |e>)/sqrt2 or |i> = (|g> + i|e>)/sqrt2,
/// times the Fock state |fock>.
template <typename Real = double>
BasicStateVector<Real> named_state(const HilbertSpace& space, NamedState which, int fock = 0) {
  using C = std::complex<Real>;
  CVector<Real> v = CVector<Real>::Zero(space.dim());
  const int g = space.index(0, fock), e = space.index(1, fock);
  const Real r = Real(1) / std::sqrt(Real(2));
  switch (which) {
    case NamedState::g: v(g) = 1; break;
    case NamedState::e: v(e) = 1; break;
    case NamedState::f:
      if (space.n_qubit() < 3) throw DimensionError("named_state: |f> needs n_qubit >= 3");
      v(space.index(2, fock)) = 1;
      break;
    case NamedState::plus: v(g) = r; v(e) = r; break;
    case NamedState::minus: v(g) = r; v(e) = -r; break;
    case NamedState::i_state: v(g) = r; v(e) = C(0, r); break;
  }
  return {space, v};
}

/// Qubit Bloch state cos(theta/2)|g> + e^{i phi} sin(theta/2)|e> in the Fock state |fock>.
/// theta = 0 is |g>; (theta, phi) = (pi/2, 0) is |+>.
template <typename Real = double>
BasicStateVector<Real> bloch_state(const HilbertSpace& space, Real theta, Real phi, int fock = 0) {
  CVector<Real> v = CVector<Real>::Zero(space.dim());
  v(space.index(0, fock)) = std::cos(theta / 2);
  v(space.index(1, fock)) = std::polar(std::sin(theta / 2), phi);
  return {space, v};
}

/// Coherent state |alpha> of the cavity with the qubit in `level`.
template <typename Real = double>
BasicStateVector<Real> coherent_state(const HilbertSpace& space, std::complex<Real> alpha,
                                      int level = 0) {
  const BasicOperator<Real> d = displacement_unitary<Real>(space, alpha);
  return BasicStateVector<Real>::normalized(space, d.matrix() * basis_state<Real>(space, level).amplitudes());
}

}  // namespace sigmax
