#include "doctest.h"

#include <cmath>
#include <vector>

#include "fadecast/error.hpp"
#include "fadecast/nn.hpp"

using namespace fadecast;
using namespace fadecast::nn;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

SequenceNet random_net(std::size_t hidden, std::size_t layers, std::uint64_t seed,
                       double scale = 1.0) {
  SequenceNet net(NetShape{1, hidden, layers, 1});
  Rng rng(seed);
  for (Eigen::Index i = 0; i < net.params().size(); ++i)
    net.params()[i] = scale * (2.0 * rng.uniform() - 1.0);
  return net;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
  return m;
}

double rollout_loss(const SequenceNet& net, const Matrix& window, const Matrix& targets,
                    const MaskMatrix& teacher) {
  const auto y = rollout(net, window, static_cast<std::size_t>(targets.rows()), &targets,
                         teacher.rows() > 0 ? &teacher : nullptr);
  return (y - targets).squaredNorm() / static_cast<double>(targets.size());
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(NetShape{1, 100, 1, 1}.param_count() == 41301);
  CHECK(NetShape{1, 100, 2, 1}.param_count() == 122101);
  CHECK(NetShape{1, 100, 3, 1}.param_count() == 202901);
  CHECK(SequenceNet(NetShape{1, 100, 1, 1}).params().size() == 41301);
  CHECK(SequenceNet(NetShape{1, 100, 3, 1}).params().size() == 202901);
}

TEST_CASE("init_uniform bounds") {
  SequenceNet net(NetShape{1, 16, 2, 1});
  Rng rng(1);
  net.init_uniform(rng);
  CHECK(net.params().cwiseAbs().maxCoeff() <= 0.25);
  CHECK(net.params().cwiseAbs().maxCoeff() > 0.2);
}

TEST_CASE("lstm_forward: zero parameters") {
  SequenceNet net(NetShape{1, 4, 1, 1});
  const auto cell = net.layer(0);
  Matrix x(1, 2);
  x << 3.0, -7.0;
  Matrix c_prev(4, 2), s_prev(4, 2);
  c_prev << 1, 2, -1, 0.5, 3, -2, 0, 4;
  s_prev.setConstant(0.3);
  const auto out = lstm_forward(cell, x, s_prev, c_prev);
  for (Eigen::Index i = 0; i < c_prev.size(); ++i) {
    CHECK(out.c.data()[i] == doctest::Approx(0.5 * c_prev.data()[i]).epsilon(1e-15));
    CHECK(out.s.data()[i] ==
          doctest::Approx(0.5 * std::tanh(0.5 * c_prev.data()[i])).epsilon(1e-15));
  }
}

TEST_CASE("lstm_forward: saturated forget gate carries memory") {
  SequenceNet net(NetShape{1, 3, 1, 1});
  const auto o = net.layer_offsets(0);
  for (int j = 0; j < 3; ++j) {
    net.params()[static_cast<Eigen::Index>(o.b_ih + j)] = -40.0;     // input gate shut
    net.params()[static_cast<Eigen::Index>(o.b_ih + 3 + j)] = 40.0;  // forget gate open
  }
  Matrix x(1, 1);
  x << 2.0;
  Matrix c_prev(3, 1);
  c_prev << 0.7, -1.3, 2.2;
  const auto out = lstm_forward(net.layer(0), x, Matrix::Zero(3, 1), c_prev);
  for (int j = 0; j < 3; ++j) CHECK(std::fabs(out.c(j, 0) - c_prev(j, 0)) < 1e-6);
}

TEST_CASE("lstm_forward: hand-computed gates") {
  const auto net = random_net(3, 1, 77, 0.8);
  const auto cell = net.layer(0);
  Rng rng(8);
  const Matrix x = random_matrix(1, 1, rng);
  const Matrix s_prev = random_matrix(3, 1, rng);
  const Matrix c_prev = random_matrix(3, 1, rng);
  const auto out = lstm_forward(cell, x, s_prev, c_prev);

  const double* p = net.params().data();
  const auto o = net.layer_offsets(0);
  for (int j = 0; j < 3; ++j) {
    double z[4];
    for (int gate = 0; gate < 4; ++gate) {
      const int row = gate * 3 + j;
      double v = p[o.w_ih + row] * x(0, 0);  // w_ih is 12 x 1
      for (int k = 0; k < 3; ++k) v += p[o.w_hh + k * 12 + row] * s_prev(k, 0);
      v += p[o.b_ih + row] + p[o.b_hh + row];
      z[gate] = v;
    }
    const double i = sig(z[0]), f = sig(z[1]), g = std::tanh(z[2]), og = sig(z[3]);
    const double c = f * c_prev(j, 0) + i * g;
    const double s = og * std::tanh(c);
    CHECK(std::fabs(out.c(j, 0) - c) < 1e-12);
    CHECK(std::fabs(out.s(j, 0) - s) < 1e-12);
  }

  CHECK_THROWS_AS(lstm_forward(cell, Matrix::Zero(2, 1), s_prev, c_prev), DomainError);
  CHECK_THROWS_AS(lstm_forward(cell, x, Matrix::Zero(2, 1), c_prev), DomainError);
  CHECK_THROWS_AS(lstm_forward(cell, x, s_prev, Matrix::Zero(3, 2)), DomainError);
}

TEST_CASE("dense_forward") {
  Vector p(3 * 4 + 3);
  Rng rng(2);
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.gaussian();
  DenseView layer{Eigen::Map<const Matrix>(p.data(), 3, 4), Eigen::Map<const Vector>(p.data() + 12, 3)};
  const Matrix x = random_matrix(4, 1, rng);
  const Matrix y = dense_forward(layer, x);
  for (int r = 0; r < 3; ++r) {
    double v = p[12 + r];
    for (int c = 0; c < 4; ++c) v += p[c * 3 + r] * x(c, 0);
    CHECK(std::fabs(y(r, 0) - v) < 1e-12);
  }

  Vector ident(4 * 4 + 4);
  ident.setZero();
  for (int i = 0; i < 4; ++i) ident[i * 4 + i] = 1.0;
  DenseView id{Eigen::Map<const Matrix>(ident.data(), 4, 4), Eigen::Map<const Vector>(ident.data() + 16, 4)};
  CHECK(dense_forward(id, x) == x);

  Vector bias_only = Vector::Zero(3 * 4 + 3);
  bias_only.tail(3) << 1.0, -2.0, 0.5;
  DenseView b{Eigen::Map<const Matrix>(bias_only.data(), 3, 4), Eigen::Map<const Vector>(bias_only.data() + 12, 3)};
  CHECK(dense_forward(b, x) == Matrix(bias_only.tail(3)));

  CHECK_THROWS_AS(dense_forward(layer, Matrix::Zero(3, 1)), DomainError);
}

TEST_CASE("mse_loss") {
  Vector a(3);
  a << 1, 2, 3;
  const auto [l0, g0] = mse_loss(a, a);
  CHECK(l0 == 0.0);
  CHECK(g0.isZero());

  Vector xh(1), x1(1);
  xh << 3.0;
  x1 << 1.0;
  const auto [l1, g1] = mse_loss(xh, x1);
  CHECK(l1 == 4.0);
  CHECK(g1[0] == 4.0);

  Rng rng(3);
  Vector p(10), q(10);
  for (int i = 0; i < 10; ++i) {
    p[i] = rng.gaussian();
    q[i] = rng.gaussian();
  }
  const auto [l, g] = mse_loss(p, q);
  for (int i = 0; i < 10; ++i) {
    const double h = 1e-6;
    Vector up = p, dn = p;
    up[i] += h;
    dn[i] -= h;
    const double fd = (mse_loss(up, q).first - mse_loss(dn, q).first) / (2 * h);
    CHECK(std::fabs(fd - g[i]) <= 1e-8 * std::max(1.0, std::fabs(g[i])));
  }
  CHECK_THROWS_AS(mse_loss(p, Vector(3)), DomainError);
}

TEST_CASE("rollout feeds outputs back") {
  const auto net = random_net(5, 1, 4, 0.5);
  Rng rng(6);
  const Matrix window = random_matrix(4, 3, rng);
  const Matrix y = rollout(net, window, 6);
  CHECK(y.rows() == 6);
  CHECK(y.cols() == 3);
  // Appending the first k outputs to the window reproduces output k.
  for (int k = 1; k < 6; ++k) {
    Matrix longer(4 + k, 3);
    longer << window, y.topRows(k);
    const Matrix one = rollout(net, longer, 1);
    for (int b = 0; b < 3; ++b) CHECK(std::fabs(one(0, b) - y(k, b)) < 1e-12);
  }
  CHECK(rollout(net, window, 6) == y);
}

TEST_CASE("bptt: zero-length horizon") {
  const auto net = random_net(4, 1, 1);
  const auto r = bptt(net, Matrix::Ones(3, 2), Matrix(0, 2), MaskMatrix());
  CHECK(r.loss == 0.0);
  CHECK(r.grad.size() == net.params().size());
  CHECK(r.grad.isZero());
}

TEST_CASE("bptt: loss matches rollout") {
  const auto net = random_net(6, 2, 12, 0.6);
  Rng rng(13);
  const Matrix window = random_matrix(4, 5, rng);
  const Matrix targets = random_matrix(7, 5, rng);
  MaskMatrix teacher(6, 5);
  for (Eigen::Index i = 0; i < teacher.size(); ++i) teacher.data()[i] = rng.bernoulli(0.3);
  const auto r = bptt(net, window, targets, teacher);
  CHECK(r.loss == doctest::Approx(rollout_loss(net, window, targets, teacher)).epsilon(1e-13));
}

TEST_CASE("bptt: gradient vs central differences") {
  // hidden 8, window 4, horizon 6, plus smaller mixes with teacher masks and stacking.
  struct Case {
    std::size_t hidden, layers, window, horizon, batch;
    double teacher_p;
  };
  const std::vector<Case> cases{{8, 1, 4, 6, 1, 0.0}, {8, 1, 4, 6, 3, 0.3}, {5, 2, 3, 8, 2, 0.0},
                                {4, 3, 2, 5, 2, 0.5}};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Case& cs = cases[seed % cases.size()];
    auto net = random_net(cs.hidden, cs.layers, 1000 + seed, 0.7);
    Rng rng(seed);
    const Matrix window = random_matrix(static_cast<Eigen::Index>(cs.window),
                                        static_cast<Eigen::Index>(cs.batch), rng);
    const Matrix targets = random_matrix(static_cast<Eigen::Index>(cs.horizon),
                                         static_cast<Eigen::Index>(cs.batch), rng);
    MaskMatrix teacher;
    if (cs.teacher_p > 0.0) {
      teacher.resize(static_cast<Eigen::Index>(cs.horizon - 1), static_cast<Eigen::Index>(cs.batch));
      for (Eigen::Index i = 0; i < teacher.size(); ++i) teacher.data()[i] = rng.bernoulli(cs.teacher_p);
    }
    const auto r = bptt(net, window, targets, teacher);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < net.params().size(); ++i) {
      const double keep = net.params()[i];
      net.params()[i] = keep + h;
      const double up = rollout_loss(net, window, targets, teacher);
      net.params()[i] = keep - h;
      const double dn = rollout_loss(net, window, targets, teacher);
      net.params()[i] = keep;
      const double fd = (up - dn) / (2 * h);
      const double rel = std::fabs(fd - r.grad[i]) / std::max(1e-6, std::fabs(fd) + std::fabs(r.grad[i]));
      worst = std::max(worst, rel);
    }
  }
  MESSAGE("max relative gradient error " << worst);
  CHECK(worst <= 1e-4);
}

TEST_CASE("bptt: all steps forced equals the sum of one-step gradients") {
  const auto net = random_net(6, 1, 31, 0.6);
  Rng rng(32);
  const Eigen::Index w = 4, n = 5, b = 2;
  const Matrix window = random_matrix(w, b, rng);
  const Matrix targets = random_matrix(n, b, rng);
  MaskMatrix all(n - 1, b);
  all.setConstant(true);
  const auto full = bptt(net, window, targets, all);

  Vector sum = Vector::Zero(net.params().size());
  double loss = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix longer(w + k, b);
    longer << window, targets.topRows(k);
    const auto one = bptt(net, longer, targets.middleRows(k, 1), MaskMatrix());
    sum += one.grad / static_cast<double>(n);
    loss += one.loss / static_cast<double>(n);
  }
  CHECK(full.loss == doctest::Approx(loss).epsilon(1e-13));
  CHECK((full.grad - sum).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("bptt: shape errors") {
  const auto net = random_net(4, 1, 1);
  CHECK_THROWS_AS(bptt(net, Matrix::Ones(3, 2), Matrix::Ones(4, 3), MaskMatrix()), DomainError);
  MaskMatrix bad(1, 2);
  CHECK_THROWS_AS(bptt(net, Matrix::Ones(3, 2), Matrix::Ones(4, 2), bad), DomainError);
  SequenceNet wide(NetShape{2, 4, 1, 1});
  CHECK_THROWS_AS(rollout(wide, Matrix::Ones(3, 1), 2), DomainError);
}

TEST_CASE("adam_step") {
  Vector w(3);
  w << 1.0, -2.0, 0.5;
  AdamState st(3);
  Vector before = w;
  adam_step(w, Vector::Zero(3), st, 0.01);
  CHECK(w == before);

  AdamState fresh(3);
  Vector g(3);
  g << 0.3, -5.0, 1e-3;
  adam_step(w, g, fresh, 0.01);
  for (int i = 0; i < 3; ++i) {
    const double expect = 0.01 * g[i] / (std::fabs(g[i]) + 1e-8);
    CHECK(std::fabs((before[i] - w[i]) - expect) < 1e-9);
  }

  Vector x(1);
  x << 0.0;
  AdamState s1(1);
  for (int t = 0; t < 100; ++t) {
    Vector grad(1);
    grad << 2.0 * (x[0] - 3.0);
    adam_step(x, grad, s1, 0.1);
  }
  MESSAGE("w after 100 steps " << x[0]);
  CHECK(std::fabs(x[0] - 3.0) < 0.05);

  Vector bad(1);
  bad << std::nan("");
  Vector keep = x;
  CHECK_THROWS_AS(adam_step(x, bad, s1, 0.1), DivergenceError);
  CHECK(x == keep);
  CHECK_THROWS_AS(adam_step(x, Vector::Zero(2), s1, 0.1), DomainError);
}
