#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "tomonet/linalg.hpp"
#include "tomonet/random.hpp"
#include "tomonet/states.hpp"

namespace tomonet::test {

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, RandomStream& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.entries()) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim, RandomStream& rng) {
  return hermitian_part(random_complex(dim, dim, rng));
}

/// G G^dagger / tr, optionally rank-limited.
inline ComplexMatrix random_psd(std::size_t dim, RandomStream& rng, std::size_t rank = 0) {
  const ComplexMatrix g = random_complex(dim, rank ? rank : dim, rng);
  ComplexMatrix a = hermitian_part(g * g.adjoint());
  a *= 1.0 / a.trace().real();
  return a;
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m{{0, 1}, {1, 0}};
  return m;
}
inline const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m{{0, Complex(0, -1)}, {Complex(0, 1), 0}};
  return m;
}
inline const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m{{1, 0}, {0, -1}};
  return m;
}

inline DensityMatrix bell_state() {
  const double h = 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(StateVector{2, {h, 0, 0, h}});
}

}  // namespace tomonet::test
