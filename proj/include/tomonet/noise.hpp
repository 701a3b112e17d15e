#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "tomonet/linalg.hpp"
#include "tomonet/random.hpp"
#include "tomonet/states.hpp"

namespace tomonet {

/// Channels in the order `corrupt` applies them.
enum class ChannelKind { White = 0, BitFlip = 1, PhaseFlip = 2, AmplitudeDamping = 3 };

inline constexpr std::array<ChannelKind, 4> kChannelOrder = {
    ChannelKind::White, ChannelKind::BitFlip, ChannelKind::PhaseFlip, ChannelKind::AmplitudeDamping};

std::string_view to_string(ChannelKind kind);

/// Single-qubit Kraus operators. For White this is the one-qubit depolarizing
/// set; on n qubits `apply_channel` uses the global form instead.
std::vector<ComplexMatrix> kraus_ops(ChannelKind kind, double strength);

DensityMatrix apply_channel(const DensityMatrix& state, ChannelKind kind, double strength);

/// Applies a 2x2 Kraus set to one qubit of an n-qubit matrix.
ComplexMatrix apply_local_kraus(const ComplexMatrix& rho, std::size_t n_qubits, std::size_t qubit,
                                const std::vector<ComplexMatrix>& ops);

struct NoiseDraw {
  std::array<double, 4> strength{};  // indexed by ChannelKind

  double operator[](ChannelKind k) const { return strength[static_cast<std::size_t>(k)]; }
};

struct NoiseConfig {
  std::array<double, 4> p_max{0.04, 0.04, 0.04, 0.04};
  std::array<bool, 4> enabled{true, true, true, true};
  double f_min = 0.75;

  void validate() const;
};

inline constexpr int kMaxRejectionAttempts = 100;

struct CorruptedState {
  DensityMatrix state;
  NoiseDraw draw;
  double fidelity;  // F(ideal, noisy)
};

/// Draws strengths uniformly in [0, p_max] for every enabled channel, applies
/// them in kChannelOrder and rejection-samples until F >= f_min.
CorruptedState corrupt(const DensityMatrix& state, const NoiseConfig& cfg, RandomStream& rng);

}  // namespace tomonet
