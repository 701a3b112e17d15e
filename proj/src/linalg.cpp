#include "tomonet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tomonet/error.hpp"

namespace tomonet {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw Error(ErrorKind::InvalidArgument, "matrix dimensions must be >= 1");
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorKind::DimensionMismatch, "entry count does not match rows*cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw Error(ErrorKind::InvalidArgument, "matrix dimensions must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

void require_square(const ComplexMatrix& a) {
  if (!a.is_square()) throw Error(ErrorKind::NonSquare, "matrix is not square");
}

}  // namespace

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "inner dimensions differ in product");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double hermitian_defect(const ComplexMatrix& a) {
  require_square(a);
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - std::conj(a(c, r))));
  return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  require_square(a);
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    out(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < a.cols(); ++c) {
      const Complex v = 0.5 * (a(r, c) + std::conj(a(c, r)));
      out(r, c) = v;
      out(c, r) = std::conj(v);
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

HermitianEigen hermitian_eig(const ComplexMatrix& input) {
  require_square(input);
  const double scale = std::max(1.0, input.max_abs());
  if (hermitian_defect(input) > kHermitianTol * scale)
    throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian within tolerance");

  const std::size_t n = input.rows();
  ComplexMatrix a = hermitian_part(input);
  ComplexMatrix v = ComplexMatrix::identity(n);

  double frob = 0.0;
  for (const auto& z : a.entries()) frob += std::norm(z);
  frob = std::sqrt(frob);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= 1e-15 * frob || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double b = std::abs(apq);
        if (b == 0.0) continue;
        const Complex phase = apq / b;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * b);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G acts on the (p, q) plane: [[c, s], [-s conj(phase), c conj(phase)]].
        const Complex gqp = -s * std::conj(phase);
        const Complex gqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * c + akq * gqp;
          a(k, q) = akp * s + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(gqp) * aqk;
          a(q, k) = s * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * c + vkq * gqp;
          v(k, q) = vkp * s + vkq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

ComplexMatrix psd_cholesky(const ComplexMatrix& a, double tol) {
  require_square(a);
  if (hermitian_defect(a) > kHermitianTol * std::max(1.0, a.max_abs()))
    throw Error(ErrorKind::NotHermitian, "cholesky input is not Hermitian");

  const std::size_t n = a.rows();
  ComplexMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(r(j, k));
    if (pivot < -tol) {
      std::ostringstream os;
      os << "negative pivot " << pivot << " at column " << j;
      throw Error(ErrorKind::NotPSD, os.str());
    }
    if (pivot <= tol) continue;  // rank-deficient direction: column stays zero
    const double d = std::sqrt(pivot);
    r(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= r(i, k) * std::conj(r(j, k));
      r(i, j) = s / d;
    }
  }
  return r;
}

double trace_norm(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a);
  double s = 0.0;
  for (double l : eig.eigenvalues) s += std::abs(l);
  return s;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a);
  const std::size_t n = a.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double root = std::sqrt(std::max(eig.eigenvalues[k], 0.0));
    if (root == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.eigenvectors(r, k) * root;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.eigenvectors(c, k));
    }
  }
  return hermitian_part(out);
}

}  // namespace tomonet
