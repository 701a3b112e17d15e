#include "tomonet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tomonet/error.hpp"

namespace tomonet {

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  return n;
}

void MlpModel::validate() const {
  if (layer_dims.size() < 2 || weights.size() + 1 != layer_dims.size())
    throw Error(ErrorKind::DimensionMismatch, "layer dims and weights disagree");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (static_cast<std::size_t>(weights[l].rows()) != layer_dims[l] + 1 ||
        static_cast<std::size_t>(weights[l].cols()) != layer_dims[l + 1]) {
      std::ostringstream os;
      os << "layer " << l << " weights are " << weights[l].rows() << "x" << weights[l].cols() << ", expected "
         << layer_dims[l] + 1 << "x" << layer_dims[l + 1];
      throw Error(ErrorKind::DimensionMismatch, os.str());
    }
  }
  if (n_sec < 2 || output_dim() % block_len() != 0)
    throw Error(ErrorKind::DimensionMismatch, "output width is not a whole number of blocks");
}

std::size_t hidden_width(std::size_t n_qubits) {
  const long excess = static_cast<long>(n_qubits) - 4;
  const long exponent = excess <= 0 ? 0 : (excess + 1) / 2;
  return std::size_t{100} << exponent;
}

MlpModel init_model(std::span<const std::size_t> layer_dims, std::size_t n_sec, RandomStream& rng, double leak) {
  MlpModel m;
  m.layer_dims.assign(layer_dims.begin(), layer_dims.end());
  m.leak = leak;
  m.n_sec = n_sec;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t in = layer_dims[l], out = layer_dims[l + 1];
    if (in == 0 || out == 0) throw Error(ErrorKind::InvalidArgument, "layer widths must be >= 1");
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(in + 1), static_cast<Eigen::Index>(out));
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (std::size_t r = 0; r < in; ++r)
      for (std::size_t c = 0; c < out; ++c)
        w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rng.normal(0.0, stddev);
    m.weights.push_back(std::move(w));
  }
  m.validate();
  return m;
}

MlpModel init_model(std::size_t input_dim, std::size_t n_qubits, std::size_t n_sec, RandomStream& rng,
                    std::size_t hidden_layers, double leak) {
  std::vector<std::size_t> dims{input_dim};
  for (std::size_t i = 0; i < hidden_layers; ++i) dims.push_back(hidden_width(n_qubits));
  dims.push_back(param_count(n_qubits) * (n_sec + 1));
  return init_model(dims, n_sec, rng, leak);
}

double leaky_relu(double t, double leak) { return t >= 0.0 ? t : leak * t; }

void block_softmax(Matrix& logits, std::size_t block_len) {
  const auto len = static_cast<Eigen::Index>(block_len);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index b = 0; b < logits.cols(); b += len) {
      auto seg = logits.row(r).segment(b, len);
      seg.array() -= seg.maxCoeff();
      seg.array() = seg.array().exp();
      seg /= seg.sum();
    }
  }
}

namespace {

void require_input(const MlpModel& m, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != m.input_dim()) {
    std::ostringstream os;
    os << "input width " << inputs.cols() << " does not match model input " << m.input_dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

Matrix affine(const Matrix& x, const Matrix& w) {
  const Eigen::Index in = w.rows() - 1;
  Matrix z(x.rows(), w.cols());
  z.noalias() = x * w.topRows(in);
  z.rowwise() += w.row(in);
  return z;
}

void activate(Matrix& z, double leak) {
  z = z.unaryExpr([leak](double t) { return leaky_relu(t, leak); });
}

struct ForwardTrace {
  std::vector<Matrix> activations;  // input and every hidden output
  std::vector<Matrix> preacts;      // hidden pre-activations
  Matrix probs;
};

ForwardTrace trace_forward(const MlpModel& m, const Matrix& inputs) {
  require_input(m, inputs);
  ForwardTrace t;
  t.activations.push_back(inputs);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Matrix z = affine(t.activations.back(), m.weights[l]);
    if (l + 1 == m.weights.size()) {
      block_softmax(z, m.block_len());
      t.probs = std::move(z);
    } else {
      t.preacts.push_back(z);
      activate(z, m.leak);
      t.activations.push_back(std::move(z));
    }
  }
  return t;
}

double cross_entropy(const Matrix& probs, const Matrix& targets) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r)
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      const double t = targets(r, c);
      if (t != 0.0) loss -= t * std::log(probs(r, c) + kLogEps);
    }
  return loss / static_cast<double>(probs.rows());
}

void require_targets(const MlpModel& m, const Matrix& inputs, const Matrix& targets) {
  if (inputs.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty batch");
  if (targets.rows() != inputs.rows() || static_cast<std::size_t>(targets.cols()) != m.output_dim())
    throw Error(ErrorKind::DimensionMismatch, "targets do not match batch or output width");
}

}  // namespace

Matrix forward_batch(const MlpModel& m, const Matrix& inputs) {
  Matrix h = inputs;
  require_input(m, h);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    h = affine(h, m.weights[l]);
    if (l + 1 == m.weights.size()) block_softmax(h, m.block_len());
    else activate(h, m.leak);
  }
  return h;
}

EncodedVector forward(const MlpModel& m, std::span<const double> x) {
  Matrix in(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) in(0, static_cast<Eigen::Index>(i)) = x[i];
  const Matrix out = forward_batch(m, in);
  return EncodedVector{m.n_sec, std::vector<double>(out.data(), out.data() + out.size())};
}

double loss_only(const MlpModel& m, const Matrix& inputs, const Matrix& targets) {
  require_targets(m, inputs, targets);
  return cross_entropy(forward_batch(m, inputs), targets);
}

LossAndGrad loss_and_grad(const MlpModel& m, const Matrix& inputs, const Matrix& targets) {
  require_targets(m, inputs, targets);
  const ForwardTrace t = trace_forward(m, inputs);
  LossAndGrad out;
  out.loss = cross_entropy(t.probs, targets);

  // dL/dz for block softmax + cross-entropy with the log epsilon kept exact:
  // g_j = p_j * (S - t_j / (p_j + eps)), S = sum_i t_i p_i / (p_i + eps).
  const auto len = static_cast<Eigen::Index>(m.block_len());
  const double inv_batch = 1.0 / static_cast<double>(inputs.rows());
  Matrix delta(t.probs.rows(), t.probs.cols());
  for (Eigen::Index r = 0; r < t.probs.rows(); ++r) {
    for (Eigen::Index b = 0; b < t.probs.cols(); b += len) {
      double s = 0.0;
      for (Eigen::Index j = b; j < b + len; ++j) s += targets(r, j) * t.probs(r, j) / (t.probs(r, j) + kLogEps);
      for (Eigen::Index j = b; j < b + len; ++j) {
        const double p = t.probs(r, j);
        delta(r, j) = inv_batch * p * (s - targets(r, j) / (p + kLogEps));
      }
    }
  }

  out.grads.resize(m.weights.size());
  for (std::size_t l = m.weights.size(); l-- > 0;) {
    const Matrix& x = t.activations[l];
    const Eigen::Index in = m.weights[l].rows() - 1;
    Matrix g(m.weights[l].rows(), m.weights[l].cols());
    g.topRows(in).noalias() = x.transpose() * delta;
    g.row(in) = delta.colwise().sum();
    out.grads[l] = std::move(g);
    if (l == 0) break;
    Matrix back(delta.rows(), in);
    back.noalias() = delta * m.weights[l].topRows(in).transpose();
    const Matrix& z = t.preacts[l - 1];
    const double leak = m.leak;
    delta = back.array() * z.unaryExpr([leak](double v) { return v >= 0.0 ? 1.0 : leak; }).array();
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw Error(ErrorKind::Config, "Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Config, "Adam epsilon must be positive");
  if (batch_size == 0) throw Error(ErrorKind::Config, "batch size must be >= 1");
}

AdamState AdamState::for_model(const MlpModel& m) {
  AdamState s;
  for (const auto& w : m.weights) {
    s.first.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.second.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  return s;
}

void adam_step(MlpModel& m, const std::vector<Matrix>& grads, AdamState& state, const TrainConfig& cfg) {
  if (grads.size() != m.weights.size() || state.first.size() != m.weights.size())
    throw Error(ErrorKind::DimensionMismatch, "gradient/state layer count mismatch");
  for (std::size_t l = 0; l < grads.size(); ++l)
    if (grads[l].rows() != m.weights[l].rows() || grads[l].cols() != m.weights[l].cols())
      throw Error(ErrorKind::DimensionMismatch, "gradient shape mismatch");

  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < grads.size(); ++l) {
    auto& mom = state.first[l];
    auto& vel = state.second[l];
    mom = cfg.beta1 * mom + (1.0 - cfg.beta1) * grads[l];
    vel = cfg.beta2 * vel + (1.0 - cfg.beta2) * grads[l].cwiseProduct(grads[l]);
    m.weights[l].array() -=
        cfg.learning_rate * (mom.array() / bc1) / ((vel.array() / bc2).sqrt() + cfg.epsilon);
  }
}

}  // namespace tomonet
