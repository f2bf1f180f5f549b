// SPDX-License-Identifier: Apache-2.0
#include "fadecast/nn.hpp"

#include <cmath>
#include <vector>

#include "fadecast/error.hpp"

namespace fadecast::nn {
namespace {

using Index = Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

Eigen::Map<const Matrix> cmat(const Vector& p, std::size_t off, std::size_t rows, std::size_t cols) {
  return {p.data() + off, ix(rows), ix(cols)};
}
Eigen::Map<const Vector> cvec(const Vector& p, std::size_t off, std::size_t n) {
  return {p.data() + off, ix(n)};
}
Eigen::Map<Matrix> mat(Vector& p, std::size_t off, std::size_t rows, std::size_t cols) {
  return {p.data() + off, ix(rows), ix(cols)};
}
Eigen::Map<Vector> vec(Vector& p, std::size_t off, std::size_t n) {
  return {p.data() + off, ix(n)};
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& z) {
  return 1.0 / (1.0 + (-z).exp());
}

// Activated gates (4H x B) for one step; returns post-activation gates.
void lstm_step(const LstmCellView& cell, const Matrix& x, const Matrix& s_prev,
               const Matrix& c_prev, Matrix& gates, Matrix& c, Matrix& tc, Matrix& s) {
  const Index h = ix(cell.hidden_size());
  gates.noalias() = cell.w_ih * x;
  gates.noalias() += cell.w_hh * s_prev;
  gates.colwise() += cell.b_ih + cell.b_hh;
  gates.topRows(2 * h) = sigmoid(gates.topRows(2 * h).array()).matrix();
  gates.middleRows(2 * h, h) = gates.middleRows(2 * h, h).array().tanh().matrix();
  gates.bottomRows(h) = sigmoid(gates.bottomRows(h).array()).matrix();
  c = (gates.middleRows(h, h).array() * c_prev.array() +
       gates.topRows(h).array() * gates.middleRows(2 * h, h).array())
          .matrix();
  tc = c.array().tanh().matrix();
  s = (gates.bottomRows(h).array() * tc.array()).matrix();
}

void check_rollout_shape(const SequenceNet& net, const Matrix& window) {
  const NetShape& sh = net.shape();
  require(sh.input_size == 1 && sh.output_size == 1,
          "rollout: feedback requires input and output size 1");
  require(window.rows() >= 1, "rollout: empty input window");
}

}  // namespace

std::size_t NetShape::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < num_layers; ++l)
    n += 4 * hidden_size * (layer_input(l) + hidden_size + 2);
  return n + output_size * hidden_size + output_size;
}

SequenceNet::SequenceNet(const NetShape& shape) : shape_(shape) {
  require(shape.input_size >= 1 && shape.hidden_size >= 1 && shape.num_layers >= 1 &&
              shape.output_size >= 1,
          "SequenceNet: all dimensions must be positive");
  const std::size_t h4 = 4 * shape.hidden_size;
  std::size_t off = 0;
  for (std::size_t l = 0; l < shape.num_layers; ++l) {
    LayerOffsets o{};
    o.w_ih = off;
    off += h4 * shape.layer_input(l);
    o.w_hh = off;
    off += h4 * shape.hidden_size;
    o.b_ih = off;
    off += h4;
    o.b_hh = off;
    off += h4;
    offsets_.push_back(o);
  }
  head_w_ = off;
  off += shape.output_size * shape.hidden_size;
  head_b_ = off;
  off += shape.output_size;
  params_ = Vector::Zero(ix(off));
}

LstmCellView SequenceNet::layer(std::size_t l) const {
  require(l < shape_.num_layers, "SequenceNet::layer: index out of range");
  const std::size_t h = shape_.hidden_size;
  const LayerOffsets& o = offsets_[l];
  return {cmat(params_, o.w_ih, 4 * h, shape_.layer_input(l)), cmat(params_, o.w_hh, 4 * h, h),
          cvec(params_, o.b_ih, 4 * h), cvec(params_, o.b_hh, 4 * h)};
}

DenseView SequenceNet::head() const {
  return {cmat(params_, head_w_, shape_.output_size, shape_.hidden_size),
          cvec(params_, head_b_, shape_.output_size)};
}

void SequenceNet::init_uniform(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape_.hidden_size));
  for (Index i = 0; i < params_.size(); ++i) params_[i] = bound * (2.0 * rng.uniform() - 1.0);
}

LstmState lstm_forward(const LstmCellView& cell, const Matrix& x, const Matrix& s_prev,
                       const Matrix& c_prev) {
  const Index h = ix(cell.hidden_size());
  require(x.rows() == cell.w_ih.cols(), "lstm_forward: input size mismatch");
  require(s_prev.rows() == h && c_prev.rows() == h, "lstm_forward: state size mismatch");
  require(s_prev.cols() == x.cols() && c_prev.cols() == x.cols(), "lstm_forward: batch mismatch");
  Matrix gates(4 * h, x.cols());
  LstmState out;
  Matrix tc;
  lstm_step(cell, x, s_prev, c_prev, gates, out.c, tc, out.s);
  return out;
}

Matrix dense_forward(const DenseView& layer, const Matrix& x) {
  require(x.rows() == layer.weights.cols(), "dense_forward: input size mismatch");
  Matrix y = layer.weights * x;
  y.colwise() += layer.bias;
  return y;
}

std::pair<double, Vector> mse_loss(const Vector& x_hat, const Vector& x) {
  require(x_hat.size() == x.size() && x.size() > 0, "mse_loss: length mismatch");
  const Vector diff = x_hat - x;
  const double n = static_cast<double>(x.size());
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

Matrix rollout(const SequenceNet& net, const Matrix& window, std::size_t n_preds,
               const Matrix* targets, const MaskMatrix* teacher) {
  check_rollout_shape(net, window);
  const NetShape& sh = net.shape();
  const Index batch = window.cols();
  const Index h = ix(sh.hidden_size);
  const std::size_t layers = sh.num_layers;
  if (teacher != nullptr && teacher->rows() > 0) {
    require(targets != nullptr && targets->cols() == batch && teacher->cols() == batch &&
                static_cast<std::size_t>(teacher->rows()) + 1 >= n_preds &&
                static_cast<std::size_t>(targets->rows()) >= n_preds,
            "rollout: teacher mask / target shape mismatch");
  }

  std::vector<LstmCellView> cells;
  for (std::size_t l = 0; l < layers; ++l) cells.push_back(net.layer(l));
  const DenseView head = net.head();

  std::vector<Matrix> s(layers, Matrix::Zero(h, batch));
  std::vector<Matrix> c(layers, Matrix::Zero(h, batch));
  Matrix gates(4 * h, batch), tc(h, batch), c_new(h, batch), s_new(h, batch);

  auto step = [&](const Matrix& x0) {
    const Matrix* x = &x0;
    for (std::size_t l = 0; l < layers; ++l) {
      lstm_step(cells[l], *x, s[l], c[l], gates, c_new, tc, s_new);
      c[l].swap(c_new);
      s[l].swap(s_new);
      x = &s[l];
    }
  };

  Matrix x(1, batch);
  for (Index t = 0; t < window.rows(); ++t) {
    x = window.row(t);
    step(x);
  }
  Matrix out(ix(n_preds), batch);
  for (std::size_t k = 0; k < n_preds; ++k) {
    if (k > 0) {
      x = out.row(ix(k - 1));
      if (teacher != nullptr && teacher->rows() > 0)
        for (Index b = 0; b < batch; ++b)
          if ((*teacher)(ix(k - 1), b)) x(0, b) = (*targets)(ix(k - 1), b);
      step(x);
    }
    out.row(ix(k)).noalias() = head.weights * s[layers - 1];
    out.row(ix(k)).array() += head.bias(0);
  }
  return out;
}

LossGrad bptt(const SequenceNet& net, const Matrix& window, const Matrix& targets,
              const MaskMatrix& teacher) {
  check_rollout_shape(net, window);
  const NetShape& sh = net.shape();
  const std::size_t n = static_cast<std::size_t>(targets.rows());
  const Index batch = window.cols();
  require(targets.cols() == batch, "bptt: target batch mismatch");
  const bool forced = teacher.rows() > 0;
  if (forced)
    require(teacher.cols() == batch && static_cast<std::size_t>(teacher.rows()) + 1 >= n,
            "bptt: teacher mask shape mismatch");

  LossGrad result;
  result.grad = Vector::Zero(net.params().size());
  if (n == 0) return result;

  const Index h = ix(sh.hidden_size);
  const std::size_t layers = sh.num_layers;
  const std::size_t w = static_cast<std::size_t>(window.rows());
  const std::size_t steps = w + n - 1;

  struct LayerCache {
    Matrix x, gates, c, tc, s;
  };
  std::vector<std::vector<LayerCache>> cache(steps, std::vector<LayerCache>(layers));
  std::vector<LstmCellView> cells;
  for (std::size_t l = 0; l < layers; ++l) cells.push_back(net.layer(l));
  const DenseView head = net.head();
  const Matrix zero = Matrix::Zero(h, batch);

  Matrix y(ix(n), batch);
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix x0(1, batch);
    if (t < w) {
      x0 = window.row(ix(t));
    } else {
      const Index k = ix(t - w);  // input after output k
      x0 = y.row(k);
      if (forced)
        for (Index b = 0; b < batch; ++b)
          if (teacher(k, b)) x0(0, b) = targets(k, b);
    }
    for (std::size_t l = 0; l < layers; ++l) {
      LayerCache& lc = cache[t][l];
      lc.x = l == 0 ? x0 : cache[t][l - 1].s;
      const Matrix& s_prev = t > 0 ? cache[t - 1][l].s : zero;
      const Matrix& c_prev = t > 0 ? cache[t - 1][l].c : zero;
      lc.gates.resize(4 * h, batch);
      lstm_step(cells[l], lc.x, s_prev, c_prev, lc.gates, lc.c, lc.tc, lc.s);
    }
    if (t + 1 >= w) {
      const Index k = ix(t + 1 - w);
      y.row(k).noalias() = head.weights * cache[t][layers - 1].s;
      y.row(k).array() += head.bias(0);
    }
  }

  const Matrix diff = y - targets;
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(batch));
  result.loss = diff.squaredNorm() * scale;

  Vector& g = result.grad;
  auto gw_head = mat(g, net.head_weights_offset(), sh.output_size, sh.hidden_size);
  auto gb_head = vec(g, net.head_bias_offset(), sh.output_size);

  std::vector<Matrix> ds(layers, zero);
  std::vector<Matrix> dc(layers, zero);
  Matrix feedback = Matrix::Zero(1, batch);
  Matrix dz(4 * h, batch);

  for (std::size_t tt = steps; tt-- > 0;) {
    if (tt + 1 >= w) {
      const Index k = ix(tt + 1 - w);
      Matrix dy = 2.0 * scale * diff.row(k) + feedback;
      gw_head.noalias() += dy * cache[tt][layers - 1].s.transpose();
      gb_head(0) += dy.sum();
      ds[layers - 1].noalias() += head.weights.transpose() * dy;
    }
    feedback.setZero();

    for (std::size_t l = layers; l-- > 0;) {
      const LayerCache& lc = cache[tt][l];
      const Matrix& s_prev = tt > 0 ? cache[tt - 1][l].s : zero;
      const Matrix& c_prev = tt > 0 ? cache[tt - 1][l].c : zero;
      const auto gi = lc.gates.topRows(h).array();
      const auto gf = lc.gates.middleRows(h, h).array();
      const auto gg = lc.gates.middleRows(2 * h, h).array();
      const auto go = lc.gates.bottomRows(h).array();
      const auto tca = lc.tc.array();

      const Eigen::ArrayXXd dct =
          dc[l].array() + ds[l].array() * go * (1.0 - tca.square());
      dz.topRows(h) = (dct * gg * gi * (1.0 - gi)).matrix();
      dz.middleRows(h, h) = (dct * c_prev.array() * gf * (1.0 - gf)).matrix();
      dz.middleRows(2 * h, h) = (dct * gi * (1.0 - gg.square())).matrix();
      dz.bottomRows(h) = (ds[l].array() * tca * go * (1.0 - go)).matrix();
      dc[l] = (dct * gf).matrix();

      const LayerOffsets& o = net.layer_offsets(l);
      const std::size_t in = sh.layer_input(l);
      mat(g, o.w_ih, 4 * sh.hidden_size, in).noalias() += dz * lc.x.transpose();
      mat(g, o.w_hh, 4 * sh.hidden_size, sh.hidden_size).noalias() += dz * s_prev.transpose();
      const Vector db = dz.rowwise().sum();
      vec(g, o.b_ih, 4 * sh.hidden_size) += db;
      vec(g, o.b_hh, 4 * sh.hidden_size) += db;

      ds[l].noalias() = cells[l].w_hh.transpose() * dz;
      if (l > 0) {
        ds[l - 1].noalias() += cells[l].w_ih.transpose() * dz;
      } else if (tt >= w) {
        const Index k = ix(tt - w);
        feedback.noalias() = cells[0].w_ih.transpose() * dz;
        if (forced)
          for (Index b = 0; b < batch; ++b)
            if (teacher(k, b)) feedback(0, b) = 0.0;
      }
    }
  }
  return result;
}

void adam_step(Vector& params, const Vector& grads, AdamState& state, double lr) {
  require(params.size() == grads.size(), "adam_step: gradient size mismatch");
  require(lr > 0.0, "adam_step: learning rate must be positive");
  if (!grads.allFinite()) throw DivergenceError("adam_step: non-finite gradient");
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace fadecast::nn
