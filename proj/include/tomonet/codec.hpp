#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomonet/states.hpp"

namespace tomonet {

/// Independent real parameters of the lower-triangular Cholesky factor R of
/// a state: the d real diagonal entries first, then (re, im) pairs of the
/// strictly-lower triangle in row-major order. Length d^2.
struct ParamVector {
  std::size_t n_qubits = 0;
  std::vector<double> alpha;
};

/// Per-component encoding interval.
struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const { return lo.size(); }
  void validate() const;
};

/// Concatenated blocks, one per parameter, each of length n_sec + 1.
struct EncodedVector {
  std::size_t n_sec = 0;
  std::vector<double> values;

  std::size_t block_len() const { return n_sec + 1; }
  std::size_t block_count() const { return values.size() / block_len(); }
  std::span<const double> block(std::size_t i) const {
    return std::span<const double>(values).subspan(i * block_len(), block_len());
  }
};

inline constexpr double kDefaultBoundsMargin = 0.05;
inline constexpr std::size_t kDefaultSectors = 20;

std::size_t param_count(std::size_t n_qubits);

/// Index of the real part of R(i, j), i > j, inside alpha.
std::size_t lower_entry_offset(std::size_t dim, std::size_t i, std::size_t j);

ParamVector state_to_params(const DensityMatrix& state);
/// Lower-triangular R assembled from alpha.
ComplexMatrix params_to_cholesky(const ParamVector& p);
/// R R^dagger / tr(R R^dagger); valid for any finite alpha except all-zero
/// (ZeroTrace).
DensityMatrix params_to_state(const ParamVector& p);

/// Per-component min/max widened by margin * (max - min); degenerate
/// components are widened to +-1e-6.
Bounds estimate_bounds(std::span<const ParamVector> params, double margin = kDefaultBoundsMargin);

EncodedVector onehot_encode(const ParamVector& p, const Bounds& b, std::size_t n_sec = kDefaultSectors);

/// Inverts onehot_encode: picks the adjacent pair (j, j+1) with the largest
/// mass (lowest j on ties) and reads alpha = lo + width * (j + Y_j / (Y_j + Y_j+1)).
ParamVector onehot_decode(const EncodedVector& y, const Bounds& b, std::size_t n_qubits);

}  // namespace tomonet
