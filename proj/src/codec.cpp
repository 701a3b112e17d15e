#include "tomonet/codec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tomonet/error.hpp"

namespace tomonet {

namespace {

constexpr double kDegenerateWidth = 1e-6;
constexpr double kZeroTrace = 1e-300;

std::size_t dim_of(std::size_t n_qubits) { return std::size_t{1} << n_qubits; }

}  // namespace

std::size_t param_count(std::size_t n_qubits) {
  const std::size_t d = dim_of(n_qubits);
  return d * d;
}

std::size_t lower_entry_offset(std::size_t dim, std::size_t i, std::size_t j) {
  // rows 1..i-1 contribute 1 + 2 + ... + (i-1) entries before row i
  return dim + 2 * (i * (i - 1) / 2 + j);
}

void Bounds::validate() const {
  if (lo.size() != hi.size() || lo.empty()) throw Error(ErrorKind::InvalidArgument, "malformed bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) {
      std::ostringstream os;
      os << "bounds component " << i << " has lo >= hi";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
}

ParamVector state_to_params(const DensityMatrix& state) {
  const std::size_t d = state.dim();
  const ComplexMatrix r = psd_cholesky(state.matrix(), kPsdTol);
  ParamVector p{state.n_qubits(), std::vector<double>(d * d)};
  for (std::size_t i = 0; i < d; ++i) p.alpha[i] = r(i, i).real();
  for (std::size_t i = 1; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const std::size_t o = lower_entry_offset(d, i, j);
      p.alpha[o] = r(i, j).real();
      p.alpha[o + 1] = r(i, j).imag();
    }
  return p;
}

ComplexMatrix params_to_cholesky(const ParamVector& p) {
  const std::size_t d = dim_of(p.n_qubits);
  if (p.alpha.size() != d * d) throw Error(ErrorKind::DimensionMismatch, "parameter vector length must be 4^n");
  ComplexMatrix r(d, d);
  for (std::size_t i = 0; i < d; ++i) r(i, i) = p.alpha[i];
  for (std::size_t i = 1; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const std::size_t o = lower_entry_offset(d, i, j);
      r(i, j) = Complex(p.alpha[o], p.alpha[o + 1]);
    }
  return r;
}

DensityMatrix params_to_state(const ParamVector& p) {
  const ComplexMatrix r = params_to_cholesky(p);
  // Rescale before squaring so huge inputs cannot overflow.
  const double scale = r.max_abs();
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::ZeroTrace, "parameter vector is all-zero or non-finite");
  const ComplexMatrix rs = r * Complex(1.0 / scale);
  ComplexMatrix rho = hermitian_part(rs * rs.adjoint());
  const double tr = rho.trace().real();
  if (tr <= kZeroTrace) throw Error(ErrorKind::ZeroTrace, "tr(R R^dagger) vanishes");
  rho *= 1.0 / tr;
  return make_unchecked_density(p.n_qubits, std::move(rho));
}

Bounds estimate_bounds(std::span<const ParamVector> params, double margin) {
  if (params.empty()) throw Error(ErrorKind::InvalidArgument, "cannot estimate bounds from an empty sample");
  const std::size_t k = params.front().alpha.size();
  Bounds b{params.front().alpha, params.front().alpha};
  for (const auto& p : params) {
    if (p.alpha.size() != k) throw Error(ErrorKind::DimensionMismatch, "parameter vectors differ in length");
    for (std::size_t i = 0; i < k; ++i) {
      b.lo[i] = std::min(b.lo[i], p.alpha[i]);
      b.hi[i] = std::max(b.hi[i], p.alpha[i]);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double span = b.hi[i] - b.lo[i];
    if (span <= 0.0) {
      b.lo[i] -= kDegenerateWidth;
      b.hi[i] += kDegenerateWidth;
    } else {
      b.lo[i] -= margin * span;
      b.hi[i] += margin * span;
    }
  }
  return b;
}

EncodedVector onehot_encode(const ParamVector& p, const Bounds& b, std::size_t n_sec) {
  if (n_sec < 2) throw Error(ErrorKind::InvalidArgument, "need at least two sectors");
  b.validate();
  if (b.size() != p.alpha.size()) throw Error(ErrorKind::DimensionMismatch, "bounds and parameters differ in length");
  const std::size_t len = n_sec + 1;
  EncodedVector y{n_sec, std::vector<double>(p.alpha.size() * len, 0.0)};
  for (std::size_t i = 0; i < p.alpha.size(); ++i) {
    const double a = std::clamp(p.alpha[i], b.lo[i], b.hi[i]);
    const double width = (b.hi[i] - b.lo[i]) / static_cast<double>(n_sec);
    const double pos = (a - b.lo[i]) / width;
    const auto ind = static_cast<std::size_t>(
        std::clamp(std::floor(pos), 0.0, static_cast<double>(n_sec - 1)));
    const double frac = std::clamp((a - b.lo[i] - static_cast<double>(ind) * width) / width, 0.0, 1.0);
    y.values[i * len + ind] = frac;
    y.values[i * len + ind + 1] = 1.0 - frac;
  }
  return y;
}

ParamVector onehot_decode(const EncodedVector& y, const Bounds& b, std::size_t n_qubits) {
  b.validate();
  const std::size_t len = y.block_len();
  if (y.n_sec < 2 || y.values.size() % len != 0 || y.block_count() != b.size())
    throw Error(ErrorKind::DimensionMismatch, "encoded vector does not match bounds");
  ParamVector p{n_qubits, std::vector<double>(b.size())};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto block = y.block(i);
    double total = 0.0;
    for (double v : block) total += v;
    if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "encoded block has no mass");

    std::size_t best = 0;
    double best_mass = -1.0;
    for (std::size_t j = 0; j + 1 < len; ++j) {
      const double mass = block[j] + block[j + 1];
      if (mass > best_mass) {
        best_mass = mass;
        best = j;
      }
    }
    const double w = best_mass > 0.0 ? block[best] / best_mass : 0.5;
    const double width = (b.hi[i] - b.lo[i]) / static_cast<double>(y.n_sec);
    p.alpha[i] = b.lo[i] + width * (static_cast<double>(best) + w);
  }
  return p;
}

}  // namespace tomonet
