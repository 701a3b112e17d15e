#include "tomonet/noise.hpp"

#include <cmath>
#include <sstream>

#include "tomonet/error.hpp"

namespace tomonet {

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::White: return "white";
    case ChannelKind::BitFlip: return "bitflip";
    case ChannelKind::PhaseFlip: return "phaseflip";
    case ChannelKind::AmplitudeDamping: return "ampdamp";
  }
  return "unknown";
}

namespace {

void require_strength(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "noise strength " << p << " outside [0, 1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

const ComplexMatrix kI{{1, 0}, {0, 1}};
const ComplexMatrix kX{{0, 1}, {1, 0}};
const ComplexMatrix kY{{0, Complex(0, -1)}, {Complex(0, 1), 0}};
const ComplexMatrix kZ{{1, 0}, {0, -1}};

}  // namespace

std::vector<ComplexMatrix> kraus_ops(ChannelKind kind, double p) {
  require_strength(p);
  switch (kind) {
    case ChannelKind::White:
      return {kI * Complex(std::sqrt(1.0 - 0.75 * p)), kX * Complex(std::sqrt(p / 4)),
              kY * Complex(std::sqrt(p / 4)), kZ * Complex(std::sqrt(p / 4))};
    case ChannelKind::BitFlip:
      return {kI * Complex(std::sqrt(1.0 - p)), kX * Complex(std::sqrt(p))};
    case ChannelKind::PhaseFlip:
      return {kI * Complex(std::sqrt(1.0 - p)), kZ * Complex(std::sqrt(p))};
    case ChannelKind::AmplitudeDamping:
      return {ComplexMatrix{{1, 0}, {0, std::sqrt(1.0 - p)}}, ComplexMatrix{{0, std::sqrt(p)}, {0, 0}}};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown channel kind");
}

ComplexMatrix apply_local_kraus(const ComplexMatrix& rho, std::size_t n_qubits, std::size_t qubit,
                                const std::vector<ComplexMatrix>& ops) {
  const std::size_t d = rho.rows();
  const std::size_t bit = std::size_t{1} << (n_qubits - 1 - qubit);
  ComplexMatrix out(d, d);
  ComplexMatrix left(d, d);
  for (const auto& k : ops) {
    // left = (K on qubit) * rho
    for (std::size_t r0 = 0; r0 < d; ++r0) {
      if (r0 & bit) continue;
      const std::size_t r1 = r0 | bit;
      for (std::size_t c = 0; c < d; ++c) {
        const Complex a = rho(r0, c), b = rho(r1, c);
        left(r0, c) = k(0, 0) * a + k(0, 1) * b;
        left(r1, c) = k(1, 0) * a + k(1, 1) * b;
      }
    }
    // out += left * (K on qubit)^dagger
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c0 = 0; c0 < d; ++c0) {
        if (c0 & bit) continue;
        const std::size_t c1 = c0 | bit;
        const Complex a = left(r, c0), b = left(r, c1);
        out(r, c0) += a * std::conj(k(0, 0)) + b * std::conj(k(0, 1));
        out(r, c1) += a * std::conj(k(1, 0)) + b * std::conj(k(1, 1));
      }
    }
  }
  return out;
}

DensityMatrix apply_channel(const DensityMatrix& state, ChannelKind kind, double p) {
  require_strength(p);
  if (p == 0.0) return state;
  const std::size_t n = state.n_qubits();
  if (kind == ChannelKind::White) {
    ComplexMatrix m = state.matrix() * Complex(1.0 - p);
    const double mix = p / static_cast<double>(state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) m(i, i) += mix;
    return make_unchecked_density(n, std::move(m));
  }
  const auto ops = kraus_ops(kind, p);
  ComplexMatrix m = state.matrix();
  for (std::size_t q = 0; q < n; ++q) m = apply_local_kraus(m, n, q, ops);
  return make_unchecked_density(n, hermitian_part(m));
}

void NoiseConfig::validate() const {
  for (double p : p_max)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Config, "noise p_max must lie in [0, 1]");
  if (!(f_min >= 0.0 && f_min <= 1.0)) throw Error(ErrorKind::Config, "noise f_min must lie in [0, 1]");
}

CorruptedState corrupt(const DensityMatrix& state, const NoiseConfig& cfg, RandomStream& rng) {
  cfg.validate();
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    NoiseDraw draw;
    for (ChannelKind kind : kChannelOrder) {
      const auto i = static_cast<std::size_t>(kind);
      if (cfg.enabled[i] && cfg.p_max[i] > 0.0) draw.strength[i] = rng.uniform(0.0, cfg.p_max[i]);
    }
    DensityMatrix noisy = state;
    for (ChannelKind kind : kChannelOrder) noisy = apply_channel(noisy, kind, draw[kind]);
    const double f = fidelity(state, noisy);
    if (f >= cfg.f_min) return {std::move(noisy), draw, f};
  }
  throw Error(ErrorKind::RejectionExhausted, "no noise draw reached the fidelity floor within 100 attempts");
}

}  // namespace tomonet
