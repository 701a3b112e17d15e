#pragma once

#include <cstddef>
#include <vector>

#include "tomonet/linalg.hpp"
#include "tomonet/random.hpp"

namespace tomonet {

/// Normalized pure state on n qubits; qubit 0 is the most significant bit of
/// the basis index.
struct StateVector {
  std::size_t n_qubits = 0;
  std::vector<Complex> amplitudes;
};

/// Hermitian, unit-trace, positive semidefinite 2^n x 2^n matrix.
class DensityMatrix {
 public:
  /// Validates against the density-matrix invariants (tolerance 1e-10) and
  /// throws InvalidArgument on violation.
  DensityMatrix(std::size_t n_qubits, ComplexMatrix mat);

  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  struct Unchecked {};
  DensityMatrix(std::size_t n_qubits, ComplexMatrix mat, Unchecked);
  friend DensityMatrix make_unchecked_density(std::size_t, ComplexMatrix);

  std::size_t n_qubits_;
  ComplexMatrix mat_;
};

/// Builds a DensityMatrix without the eigenvalue check. For producers whose
/// output is valid by construction (Kraus maps, R R^dagger / tr).
DensityMatrix make_unchecked_density(std::size_t n_qubits, ComplexMatrix mat);

struct DensityCheck {
  double hermitian_defect;
  double trace_error;
  double min_eigenvalue;

  bool ok(double tol = 1e-10) const {
    return hermitian_defect <= tol && trace_error <= tol && min_eigenvalue >= -tol;
  }
};

DensityCheck check_density(const ComplexMatrix& m);

StateVector ghz_like(std::size_t n, double theta);
StateVector dicke(std::size_t n, std::size_t k);
/// Hilbert-Schmidt random mixed state G G^dagger / tr(G G^dagger).
DensityMatrix random_mixed_hs(std::size_t n, RandomStream& rng);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double purity(const DensityMatrix& a);

/// Transposes the first `cut` qubits.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t n_qubits, std::size_t cut);
/// (||rho^T_A||_1 - 1) / 2 for the bipartition (first `cut` qubits | rest).
double negativity(const DensityMatrix& a, std::size_t cut = 1);

struct MetricDeviations {
  double purity;
  double negativity;
};

MetricDeviations metric_deviations(const DensityMatrix& ori, const DensityMatrix& rec);

std::size_t binomial_coefficient(std::size_t n, std::size_t k);

}  // namespace tomonet
