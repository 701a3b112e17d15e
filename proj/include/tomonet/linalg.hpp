#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tomonet {

using Complex = std::complex<double>;

inline constexpr double kPsdTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-wise literal, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  /// Largest absolute entry.
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |a_ij - b_ij|; throws DimensionMismatch on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |a_ij - conj(a_ji)|.
double hermitian_defect(const ComplexMatrix& a);

/// (a + a^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns
};

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
/// Throws NonSquare, or NotHermitian when the asymmetry exceeds kHermitianTol
/// relative to max(1, |a|_max).
HermitianEigen hermitian_eig(const ComplexMatrix& a);

/// Lower-triangular R with real non-negative diagonal and R R^dagger = a.
/// Columns whose pivot falls in [-tol, tol] are zeroed; a pivot below -tol
/// throws NotPSD.
ComplexMatrix psd_cholesky(const ComplexMatrix& a, double tol = kPsdTol);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const ComplexMatrix& a);

/// Principal square root of a PSD matrix; negative round-off eigenvalues are
/// clipped to zero.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a);

}  // namespace tomonet
