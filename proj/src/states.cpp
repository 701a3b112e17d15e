#include "tomonet/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "tomonet/error.hpp"

namespace tomonet {

namespace {

std::size_t dim_for(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > 10) throw Error(ErrorKind::InvalidArgument, "qubit count must be in [1, 10]");
  return std::size_t{1} << n_qubits;
}

void require_same_dims(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "density matrices have different dimensions");
}

}  // namespace

DensityCheck check_density(const ComplexMatrix& m) {
  DensityCheck c{hermitian_defect(m), std::abs(m.trace() - Complex(1.0)), 0.0};
  c.min_eigenvalue = hermitian_eig(hermitian_part(m)).eigenvalues.front();
  return c;
}

DensityMatrix::DensityMatrix(std::size_t n_qubits, ComplexMatrix mat)
    : n_qubits_(n_qubits), mat_(std::move(mat)) {
  if (mat_.rows() != dim_for(n_qubits) || !mat_.is_square())
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be 2^n x 2^n");
  const auto c = check_density(mat_);
  if (!c.ok()) {
    std::ostringstream os;
    os << "not a density matrix (hermitian defect " << c.hermitian_defect << ", trace error " << c.trace_error
       << ", min eigenvalue " << c.min_eigenvalue << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

DensityMatrix::DensityMatrix(std::size_t n_qubits, ComplexMatrix mat, Unchecked)
    : n_qubits_(n_qubits), mat_(std::move(mat)) {
  if (mat_.rows() != dim_for(n_qubits) || !mat_.is_square())
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be 2^n x 2^n");
}

DensityMatrix make_unchecked_density(std::size_t n_qubits, ComplexMatrix mat) {
  return DensityMatrix(n_qubits, std::move(mat), DensityMatrix::Unchecked{});
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const std::size_t d = dim_for(psi.n_qubits);
  if (psi.amplitudes.size() != d) throw Error(ErrorKind::DimensionMismatch, "amplitude count must be 2^n");
  ComplexMatrix m(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = psi.amplitudes[r] * std::conj(psi.amplitudes[c]);
  return make_unchecked_density(psi.n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
  const std::size_t d = dim_for(n_qubits);
  return make_unchecked_density(n_qubits, ComplexMatrix::identity(d) * Complex(1.0 / static_cast<double>(d)));
}

StateVector ghz_like(std::size_t n, double theta) {
  const std::size_t d = dim_for(n);
  StateVector s{n, std::vector<Complex>(d)};
  s.amplitudes.front() = std::cos(theta);
  s.amplitudes.back() += std::sin(theta);
  return s;
}

std::size_t binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

StateVector dicke(std::size_t n, std::size_t k) {
  const std::size_t d = dim_for(n);
  if (k > n) throw Error(ErrorKind::InvalidArgument, "Dicke excitation count exceeds qubit count");
  const double amp = 1.0 / std::sqrt(static_cast<double>(binomial_coefficient(n, k)));
  StateVector s{n, std::vector<Complex>(d)};
  for (std::size_t i = 0; i < d; ++i)
    if (static_cast<std::size_t>(std::popcount(i)) == k) s.amplitudes[i] = amp;
  return s;
}

DensityMatrix random_mixed_hs(std::size_t n, RandomStream& rng) {
  const std::size_t d = dim_for(n);
  ComplexMatrix g(d, d);
  for (auto& z : g.entries()) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  ComplexMatrix rho = hermitian_part(g * g.adjoint());
  rho *= 1.0 / rho.trace().real();
  return make_unchecked_density(n, std::move(rho));
}

double purity(const DensityMatrix& a) {
  const auto& m = a.matrix();
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return s;
}

namespace {

constexpr double kPureTol = 1e-12;

/// <psi| b |psi> for the dominant eigenvector of a (nearly) pure state a.
double pure_overlap(const DensityMatrix& pure, const DensityMatrix& other) {
  const auto eig = hermitian_eig(pure.matrix());
  const std::size_t d = pure.dim();
  const std::size_t top = d - 1;
  const auto& b = other.matrix();
  Complex s = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    Complex row = 0.0;
    for (std::size_t c = 0; c < d; ++c) row += b(r, c) * eig.eigenvectors(c, top);
    s += std::conj(eig.eigenvectors(r, top)) * row;
  }
  return s.real() * eig.eigenvalues[top];
}

}  // namespace

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dims(a, b);
  double f;
  if (purity(a) >= 1.0 - kPureTol) {
    f = pure_overlap(a, b);
  } else if (purity(b) >= 1.0 - kPureTol) {
    f = pure_overlap(b, a);
  } else {
    const ComplexMatrix root = matrix_sqrt_psd(a.matrix());
    const auto eig = hermitian_eig(hermitian_part(root * b.matrix() * root));
    double s = 0.0;
    for (double l : eig.eigenvalues) s += std::sqrt(std::max(l, 0.0));
    f = s * s;
  }
  return std::clamp(f, 0.0, 1.0);
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t n_qubits, std::size_t cut) {
  const std::size_t d = dim_for(n_qubits);
  if (m.rows() != d || !m.is_square()) throw Error(ErrorKind::DimensionMismatch, "matrix is not 2^n x 2^n");
  if (cut < 1 || cut >= n_qubits) throw Error(ErrorKind::InvalidArgument, "cut must satisfy 1 <= cut < n");
  const std::size_t shift = n_qubits - cut;
  const std::size_t low = (std::size_t{1} << shift) - 1;
  ComplexMatrix out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      // swap the subsystem-A indices of row and column
      const std::size_t r2 = ((c >> shift) << shift) | (r & low);
      const std::size_t c2 = ((r >> shift) << shift) | (c & low);
      out(r, c) = m(r2, c2);
    }
  return out;
}

double negativity(const DensityMatrix& a, std::size_t cut) {
  const double norm = trace_norm(partial_transpose(a.matrix(), a.n_qubits(), cut));
  return std::max(0.0, 0.5 * (norm - 1.0));
}

MetricDeviations metric_deviations(const DensityMatrix& ori, const DensityMatrix& rec) {
  require_same_dims(ori, rec);
  MetricDeviations d{std::abs(purity(rec) - purity(ori)), 0.0};
  if (ori.n_qubits() >= 2) d.negativity = std::abs(negativity(rec) - negativity(ori));
  return d;
}

}  // namespace tomonet
