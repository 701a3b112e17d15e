#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tomonet/codec.hpp"
#include "tomonet/random.hpp"

namespace tomonet {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultLeak = 0.01;
inline constexpr double kLogEps = 1e-12;

/// Fully connected network. Layer l maps x (length in) to
/// f(W_l^T [x; 1]) where W_l is (in + 1) x out and its last row holds the
/// bias. Hidden layers use leaky ReLU; the output is a per-block softmax over
/// `block_count` blocks of `block_len` entries.
struct MlpModel {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;
  double leak = kDefaultLeak;
  std::size_t n_sec = kDefaultSectors;
  Bounds bounds;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  std::size_t block_len() const { return n_sec + 1; }
  std::size_t block_count() const { return output_dim() / block_len(); }
  std::size_t parameter_count() const;

  /// Throws DimensionMismatch if the weight shapes do not chain.
  void validate() const;
};

/// 100 * 2^ceil((n - 4) / 2), exponent floored at zero.
std::size_t hidden_width(std::size_t n_qubits);

/// He-normal weights (variance 2 / fan_in), zero biases.
MlpModel init_model(std::span<const std::size_t> layer_dims, std::size_t n_sec, RandomStream& rng,
                    double leak = kDefaultLeak);

/// Network for `n_qubits` with `hidden_layers` layers of hidden_width(n).
MlpModel init_model(std::size_t input_dim, std::size_t n_qubits, std::size_t n_sec, RandomStream& rng,
                    std::size_t hidden_layers = 3, double leak = kDefaultLeak);

double leaky_relu(double t, double leak);

/// Batch forward pass; rows of `inputs` are samples. Returns block softmax
/// probabilities, one row per sample.
Matrix forward_batch(const MlpModel& m, const Matrix& inputs);
EncodedVector forward(const MlpModel& m, std::span<const double> x);

/// In-place softmax over each block of each row.
void block_softmax(Matrix& logits, std::size_t block_len);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<Matrix> grads;
};

/// Mean over the batch of the summed per-block cross-entropy
/// -sum Y_t log(Y_p + 1e-12), with exact gradients.
LossAndGrad loss_and_grad(const MlpModel& m, const Matrix& inputs, const Matrix& targets);
double loss_only(const MlpModel& m, const Matrix& inputs, const Matrix& targets);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<Matrix> first;
  std::vector<Matrix> second;
  std::uint64_t step = 0;

  static AdamState for_model(const MlpModel& m);
};

void adam_step(MlpModel& m, const std::vector<Matrix>& grads, AdamState& state, const TrainConfig& cfg);

inline constexpr char kCheckpointMagic[] = "TOMONET1";
inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  std::size_t n_qubits = 0;
  std::vector<std::string> measurement_labels;
  std::optional<std::uint64_t> selection_seed;
  std::size_t subset_size = 0;
  std::uint64_t train_seed = 0;
  std::size_t epochs = 0;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;
  std::string config_hash;
};

struct Checkpoint {
  MlpModel model;
  CheckpointMeta meta;
};

/// Layout: 8-byte magic, u64 LE header length, JSON header, little-endian
/// f64 weight payload (layer by layer, row-major), u32 LE CRC-32 of payload.
std::string serialize_checkpoint(const Checkpoint& ck);
Checkpoint deserialize_checkpoint(std::string_view bytes);
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tomonet
