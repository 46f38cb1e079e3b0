#pragma once

#include <string>
#include <vector>

#include "sigmax/hamiltonians.hpp"
#include "sigmax/operators.hpp"
#include "sigmax/params.hpp"

namespace sigmax {

/// rate * D[op] with D[L] rho = L rho L^dag - {L^dag L, rho}/2.
struct CollapseOperator {
  Operator op;
  double rate = 0;
  std::string label;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-9), unit trace (1e-8) and eigenvalues >= -1e-8.
  DensityMatrix(HilbertSpace space, Matrix matrix);

  /// No positivity or normalization checks; for conditional and intermediate states.
  static DensityMatrix unchecked(HilbertSpace space, Matrix matrix);
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix mixture(const HilbertSpace& space, const std::vector<StateVector>& states,
                               const std::vector<double>& weights);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }

  cplx trace() const { return matrix_.trace(); }
  double min_eigenvalue() const;
  double hermiticity_error() const;

  /// Population of qubit level `level`, traced over the cavity.
  double level_population(int level) const;

 private:
  struct NoCheck {};
  DensityMatrix(HilbertSpace space, Matrix matrix, NoCheck);

  HilbertSpace space_;
  Matrix matrix_;
};

inline cplx expectation(const Operator& op, const DensityMatrix& rho) {
  return expectation(op, rho.matrix());
}

/// 1/2 sum |eig(rho - sigma)|
double trace_distance(const Matrix& rho, const Matrix& sigma);

struct DissipatorOptions {
  double f_decay_scale = 2.0;   ///< level k decays to k-1 at rate (k / 2) * f_decay_scale / T1 for k >= 2
  bool include_dephasing = true;
};

/// Cavity decay sqrt(kappa) a (lab/rotating) or sqrt(kappa) d (displaced frames); qubit
/// relaxation (1-p_e)/T1 sigma_-; thermal excitation p_e/T1 sigma_+; dephasing 1/(2 Tphi) sigma_z;
/// and ladder decay for levels above e. Throws InvalidParams if 1/T2R < 1/(2 T1).
std::vector<CollapseOperator> dissipator_set(const SystemParams& p, Frame frame,
                                             const HilbertSpace& space,
                                             DissipatorOptions options = {});

/// -i[H, rho] + sum rate D[op] rho.
Matrix lindblad_rhs(const Operator& h, const std::vector<CollapseOperator>& collapse,
                    const Matrix& rho);

/// Column-stacked superoperator: vec(L rho) = liouvillian * vec(rho).
Matrix liouvillian(const Operator& h, const std::vector<CollapseOperator>& collapse);

enum class Integrator { RK4, RK45 };

struct EvolutionConfig {
  double t_final = 0;
  double dt_max = 0;        ///< step cap (RK45) or fixed step (RK4); 0 means t_final / 100
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  Integrator method = Integrator::RK45;
  long max_steps = 50'000'000;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  long steps = 0;
  long rejected = 0;
};

/// Integrates the master equation from t = 0, recording the state at each entry of `times`
/// (sorted, within [0, t_final]); empty `times` records t_final only.
/// Throws StepFailure if the adaptive controller cannot meet the tolerance.
EvolutionResult evolve(const HamiltonianModel& model, const std::vector<CollapseOperator>& collapse,
                       const DensityMatrix& rho0, const EvolutionConfig& config,
                       std::vector<double> times = {});

EvolutionResult evolve(const Operator& h, const std::vector<CollapseOperator>& collapse,
                       const DensityMatrix& rho0, const EvolutionConfig& config,
                       std::vector<double> times = {});

struct SteadyStateOptions {
  double degeneracy_rcond = 1e-14;
  double residual_tol = 1e-10;  ///< on ||L rho|| / ||L||
};

/// Null vector of the vectorized Liouvillian normalized to unit trace.
/// Throws DegenerateSteadyState if the null space is not one-dimensional.
DensityMatrix steady_state(const Operator& h, const std::vector<CollapseOperator>& collapse,
                           SteadyStateOptions options = {});

}  // namespace sigmax
