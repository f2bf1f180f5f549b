// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <utility>

#include "fadecast/rng.hpp"

namespace fadecast::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Stacked unidirectional LSTM followed by a linear dense head.
struct NetShape {
  std::size_t input_size = 1;
  std::size_t hidden_size = 100;
  std::size_t num_layers = 1;
  std::size_t output_size = 1;

  std::size_t layer_input(std::size_t layer) const {
    return layer == 0 ? input_size : hidden_size;
  }
  std::size_t param_count() const;
  bool operator==(const NetShape&) const = default;
};

/// Read-only view of one LSTM layer. Gate blocks are stacked in the row
/// order input, forget, cell, output; each gate has an input-side and a
/// recurrent-side bias.
struct LstmCellView {
  Eigen::Map<const Matrix> w_ih;  // 4H x in
  Eigen::Map<const Matrix> w_hh;  // 4H x H
  Eigen::Map<const Vector> b_ih;  // 4H
  Eigen::Map<const Vector> b_hh;  // 4H
  std::size_t hidden_size() const { return static_cast<std::size_t>(w_hh.cols()); }
};

struct DenseView {
  Eigen::Map<const Matrix> weights;  // out x in
  Eigen::Map<const Vector> bias;     // out
};

/// Parameter block offsets into the flat vector. Layout, per layer in
/// order: w_ih, w_hh, b_ih, b_hh; then dense weights, dense bias. Matrices
/// are column-major.
struct LayerOffsets {
  std::size_t w_ih, w_hh, b_ih, b_hh;
};

/// LSTM stack + dense head with all parameters in one flat vector, so the
/// optimizer, gradient and serializer share one layout.
class SequenceNet {
public:
  SequenceNet() : SequenceNet(NetShape{}) {}
  explicit SequenceNet(const NetShape& shape);

  const NetShape& shape() const { return shape_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  LstmCellView layer(std::size_t l) const;
  DenseView head() const;
  LayerOffsets layer_offsets(std::size_t l) const { return offsets_[l]; }
  std::size_t head_weights_offset() const { return head_w_; }
  std::size_t head_bias_offset() const { return head_b_; }

  /// Uniform in [-1/sqrt(H), 1/sqrt(H)] for every weight and bias.
  void init_uniform(Rng& rng);

private:
  NetShape shape_;
  Vector params_;
  std::vector<LayerOffsets> offsets_;
  std::size_t head_w_ = 0;
  std::size_t head_b_ = 0;
};

struct LstmState {
  Matrix s;  // hidden state, H x batch
  Matrix c;  // cell state,   H x batch
};

/// One LSTM step over a batch (columns). Shapes are checked; a mismatch
/// throws DomainError.
LstmState lstm_forward(const LstmCellView& cell, const Matrix& x,
                       const Matrix& s_prev, const Matrix& c_prev);

/// W x + b (linear activation), batch in columns.
Matrix dense_forward(const DenseView& layer, const Matrix& x);

/// Mean squared difference and its gradient with respect to x_hat.
std::pair<double, Vector> mse_loss(const Vector& x_hat, const Vector& x);

/// Closed-loop rollout: the window (W x batch) is fed chronologically, the
/// head then emits n_preds outputs. Each output is fed back as the next
/// input; where `teacher` is given and teacher(k, b) is set, targets(k, b)
/// is fed instead of output k. Returns n_preds x batch (input/output size 1).
Matrix rollout(const SequenceNet& net, const Matrix& window, std::size_t n_preds,
               const Matrix* targets = nullptr, const MaskMatrix* teacher = nullptr);

struct LossGrad {
  double loss = 0.0;
  Vector grad;  // flat, same layout as SequenceNet::params()
};

/// Exact gradient of the mean squared error of the rollout against
/// `targets` (N x batch), through every feedback edge that is not replaced
/// by a teacher-forced target. `teacher` is (N-1) x batch or empty.
LossGrad bptt(const SequenceNet& net, const Matrix& window, const Matrix& targets,
              const MaskMatrix& teacher);

struct AdamState {
  Vector m;
  Vector v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(Vector::Zero(static_cast<Eigen::Index>(n))),
                                          v(Vector::Zero(static_cast<Eigen::Index>(n))) {}
};

/// Bias-corrected Adam update. Throws DivergenceError on a non-finite
/// gradient (parameters are left untouched).
void adam_step(Vector& params, const Vector& grads, AdamState& state, double lr);

}  // namespace fadecast::nn
