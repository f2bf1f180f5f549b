#include "doctest.h"

#include <cmath>

#include "fadecast/error.hpp"
#include "fadecast/estimation.hpp"
#include "fadecast/modem.hpp"

using namespace fadecast;

TEST_CASE("lmmse arithmetic") {
  const Complex p(1.0, 0.0);
  CHECK(lmmse(Complex(0.5, 0.5), p, 1.0).value == Complex(0.25, 0.25));
  const Complex q = pilot_symbol();
  const Complex y(0.3, -1.2);
  const auto noiseless = lmmse(y, q, 0.0).value;
  CHECK(std::abs(noiseless - y / q) < 1e-15);
  CHECK(std::abs(lmmse(y, q, 1e12).value) < 1e-11);
  CHECK_THROWS_AS(lmmse(y, Complex(0, 0), 0.1), DomainError);
  CHECK_THROWS_AS(lmmse(y, q, -0.1), DomainError);

  const auto e = lmmse(y, q, 0.2, 7, EstimateSource::Predicted);
  CHECK(e.time_index == 7);
  CHECK(e.source == EstimateSource::Predicted);
}

TEST_CASE("lmmse is linear in the observation") {
  const Complex p = pilot_symbol();
  const Complex a(0.4, 1.1), b(-2.0, 0.3), alpha(1.7, -0.2);
  const auto lhs = lmmse(a + alpha * b, p, 0.3).value;
  const auto rhs = lmmse(a, p, 0.3).value + alpha * lmmse(b, p, 0.3).value;
  CHECK(std::abs(lhs - rhs) < 1e-14);
}

TEST_CASE("lmmse_target_mse against Monte-Carlo") {
  CHECK(lmmse_target_mse(0.0, Complex(1, 0)) == 0.0);
  CHECK(lmmse_target_mse(0.1, Complex(1, 0)) == doctest::Approx(0.1 / 1.1));
  CHECK(lmmse_target_mse(1.0, Complex(1, 0)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(lmmse_target_mse(0.1, Complex(0, 0)), DomainError);

  const Complex p = pilot_symbol();
  Rng rng(101);
  for (double sigma2 : {0.01, 0.1, 1.0}) {
    double acc = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      const Complex h = rng.complex_gaussian(1.0);
      const Complex y = h * p + rng.complex_gaussian(sigma2);
      acc += std::norm(lmmse(y, p, sigma2).value - h);
    }
    const double mc = acc / trials;
    const double target = lmmse_target_mse(sigma2, p);
    MESSAGE("sigma2 " << sigma2 << ": " << mc << " vs " << target);
    CHECK(std::fabs(mc - target) / target < 0.02);
  }
}

TEST_CASE("mse") {
  const std::vector<Complex> a{{1, 2}, {3, 4}, {-1, 0}};
  CHECK(mse(a, a) == 0.0);
  std::vector<Complex> b = a;
  for (auto& v : b) v += 1.0;
  CHECK(mse(b, a) == doctest::Approx(1.0));

  Rng rng(9);
  std::vector<Complex> x(5), y(5);
  std::vector<double> xr(5), yr(5);
  for (int i = 0; i < 5; ++i) {
    x[i] = rng.complex_gaussian(1.0);
    y[i] = rng.complex_gaussian(1.0);
    xr[i] = rng.gaussian();
    yr[i] = rng.gaussian();
  }
  double s = 0.0, sr = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double dr = x[i].real() - y[i].real(), di = x[i].imag() - y[i].imag();
    s += dr * dr + di * di;
    sr += (xr[i] - yr[i]) * (xr[i] - yr[i]);
  }
  CHECK(std::fabs(mse(x, y) - s / 5) < 1e-12);
  CHECK(std::fabs(mse(xr, yr) - sr / 5) < 1e-12);

  CHECK_THROWS_AS(mse(std::vector<Complex>{}, std::vector<Complex>{}), DomainError);
  CHECK_THROWS_AS(mse(a, std::vector<Complex>(2)), DomainError);
}

TEST_CASE("pilot layout") {
  PilotLayout layout{3, 2, Complex(1, 0)};
  CHECK(layout.sequence_length() == 3);
  CHECK(layout.total_length() == 9);
  const auto s = layout.symbols();
  const std::vector<Complex> expect{0, 1, 0, 0, 1, 0, 0, 1, 0};
  CHECK(s == expect);
}

namespace {

// Convolves the pilot stream with a channel held constant per sequence.
std::vector<Complex> through_taps(const PilotLayout& layout,
                                  const std::vector<std::vector<Complex>>& taps) {
  const auto x = layout.symbols();
  const std::size_t len = layout.sequence_length();
  std::vector<Complex> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t seq = i / len;
    for (std::size_t l = 0; l < layout.taps && l <= i; ++l)
      y[i] += taps[l][seq] * x[i - l];
  }
  return y;
}

}  // namespace

TEST_CASE("estimate_multipath") {
  const Complex p = pilot_symbol();
  Rng rng(4);

  PilotLayout single{5, 1, p};
  std::vector<Complex> y(5);
  for (auto& v : y) v = rng.complex_gaussian(1.0);
  const auto one = estimate_multipath(y, single, 0.3);
  REQUIRE(one.size() == 1);
  for (std::size_t j = 0; j < 5; ++j) CHECK(one[0][j].value == lmmse(y[j], p, 0.3).value);

  PilotLayout two{4, 2, p};
  std::vector<std::vector<Complex>> taps(2, std::vector<Complex>(4));
  for (auto& t : taps)
    for (auto& v : t) v = rng.complex_gaussian(1.0);
  const auto rx = through_taps(two, taps);
  const auto est = estimate_multipath(rx, two, 0.0);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(est[l][j].value - taps[l][j]) < 1e-12);

  CHECK_THROWS_AS(estimate_multipath(std::vector<Complex>(5), two, 0.1), DomainError);
}

TEST_CASE("estimate_multipath per-tap MSE") {
  const Complex p = pilot_symbol();
  const double sigma2 = 0.1;
  const std::vector<double> power{0.7, 0.3};
  PilotLayout layout{1, 2, p};
  Rng rng(55);
  std::vector<double> acc(2, 0.0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<Complex>> taps(2, std::vector<Complex>(1));
    for (int l = 0; l < 2; ++l) taps[l][0] = rng.complex_gaussian(power[l]);
    auto rx = through_taps(layout, taps);
    for (auto& v : rx) v += rng.complex_gaussian(sigma2);
    const auto est = estimate_multipath(rx, layout, sigma2);
    for (int l = 0; l < 2; ++l) acc[l] += std::norm(est[l][0].value - taps[l][0]);
  }
  for (int l = 0; l < 2; ++l) {
    // Estimator assumes a unit prior: error = (a-1)^2 P + a^2 sigma2, a = 1/(1+sigma2).
    const double a = 1.0 / (1.0 + sigma2);
    const double oracle = (a - 1.0) * (a - 1.0) * power[l] + a * a * sigma2;
    const double mc = acc[l] / trials;
    MESSAGE("tap " << l << ": " << mc << " vs " << oracle);
    CHECK(std::fabs(mc - oracle) / oracle < 0.02);
  }
}
