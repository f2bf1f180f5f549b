// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fadecast/error.hpp"
#include "fadecast/fading.hpp"
#include "stats.hpp"

using namespace fadecast;
using fadecast::testing::empirical_acf;

TEST_CASE("max_doppler") {
  CHECK(max_doppler(0.0, 2e9) == 0.0);
  CHECK(max_doppler(29.9792458, 1e9) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(max_doppler(30.0, 2e9) == doctest::Approx(200.13845711889124).epsilon(1e-13));
  CHECK_THROWS_AS(max_doppler(-1.0, 2e9), DomainError);
  CHECK_THROWS_AS(max_doppler(1.0, 0.0), DomainError);
}

TEST_CASE("bessel J0 against the standard library") {
  for (double x = 0.0; x < 200.0; x += 0.173) {
    CAPTURE(x);
    CHECK(std::fabs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-10);
  }
  for (double x : {11.99, 12.0, 12.01, 1e3, 2e4}) {
    CAPTURE(x);
    CHECK(std::fabs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-10);
  }
}

TEST_CASE("jakes_acf") {
  CHECK(jakes_acf(0.0, 73.0) == 1.0);
  CHECK(jakes_acf(1.0, 0.0) == 1.0);
  const double first_zero = 2.404825557695773;
  const double fd = 50.0;
  CHECK(std::fabs(jakes_acf(first_zero / (2.0 * std::numbers::pi * fd), fd)) < 1e-8);
  CHECK_THROWS_AS(jakes_acf(1.0, -1.0), DomainError);
}

TEST_CASE("jakes_psd") {
  CHECK(jakes_psd(0.0, 100.0) == doctest::Approx(0.0031830988618379067).epsilon(1e-14));
  CHECK(jakes_psd(150.0, 100.0) == 0.0);
  CHECK(jakes_psd(-150.0, 100.0) == 0.0);
  CHECK(jakes_psd(50.0, 100.0) == doctest::Approx(0.003675525969478614).epsilon(1e-13));
  const double edge = jakes_psd(100.0, 100.0);
  CHECK(std::isfinite(edge));
  CHECK(edge > 1.0);
  CHECK_THROWS_AS(jakes_psd(0.0, 0.0), DomainError);
  // The arcsine CDF integrates the density to one.
  CHECK(jakes_mass(-100.0, 100.0, 100.0) == doctest::Approx(1.0));
}

TEST_CASE("generate_fading preconditions and determinism") {
  CHECK_THROWS_AS(generate_fading(0, 50.0, 1e-4, 1), DomainError);
  CHECK_THROWS_AS(generate_fading(16, 5000.0, 1e-4, 1), ConfigError);
  const auto a = generate_fading(4096, 50.0, 1e-4, 11);
  const auto b = generate_fading(4096, 50.0, 1e-4, 11);
  const auto c = generate_fading(4096, 50.0, 1e-4, 12);
  CHECK(a.gains == b.gains);
  CHECK(a.gains != c.gains);
  CHECK(a.gains.size() == 4096);
  CHECK(a.doppler_hz == 50.0);
  CHECK(a.seed == 11);
  for (const auto& g : a.gains) CHECK(std::isfinite(std::abs(g)));
}

TEST_CASE("generate_fading: ACF and power at f_D = 50 Hz, T_s = 1e-4") {
  const std::size_t n = std::size_t{1} << 20;
  const double fd = 50.0, ts = 1e-4;
  const auto h = generate_fading(n, fd, ts, 7);
  double power = 0.0;
  for (const auto& g : h.gains) power += std::norm(g);
  CHECK(power / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.01));

  const std::size_t lags = 4000;
  const auto acf = empirical_acf(h.gains, lags);
  double worst = 0.0;
  for (std::size_t k = 0; k < lags; ++k) {
    const double ref = jakes_acf(static_cast<double>(k) * ts, fd);
    if (std::fabs(ref) >= 0.1) worst = std::max(worst, std::fabs(acf[k] - ref));
  }
  MESSAGE("max |ACF - J0| = " << worst);
  CHECK(worst <= 0.02);
}

TEST_CASE("generate_fading: quasi-static limit") {
  const auto h = generate_fading(1000, 1e-3, 1e-4, 3);
  double worst = 0.0;
  for (const auto& g : h.gains) worst = std::max(worst, std::abs(g - h.gains[0]));
  CHECK(worst < 0.01 * std::abs(h.gains[0]));
}

TEST_CASE("generate_fading: Gaussian marginals and band limit") {
  const std::size_t n = std::size_t{1} << 20;
  const double fd = 100.0, ts = 4e-3;
  const auto h = generate_fading(n, fd, ts, 21);
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = h.gains[i].real();
    im[i] = h.gains[i].imag();
  }
  for (const auto& part : {re, im}) {
    const auto m = fadecast::testing::moments(part);
    CHECK(std::fabs(m.skew) < 0.02);
    CHECK(std::fabs(m.excess_kurtosis) < 0.05);
  }
  const auto shorter = generate_fading(std::size_t{1} << 16, 50.0, 1e-3, 5);
  CHECK(fadecast::testing::out_of_band_fraction(shorter.gains, 50.0 * 1e-3) < 0.01);
}

TEST_CASE("apply_channel") {
  const auto h = generate_fading(2048, 10.0, 1e-4, 1);
  std::vector<Complex> x(2048);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Complex(i % 2 ? 1.0 : -1.0, 0.5);
  const auto y = apply_channel(x, h, 0.0, 9);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == h.gains[i] * x[i]);

  std::vector<Complex> ones(2048, Complex(1.0, 0.0));
  CHECK(apply_channel(ones, h, 0.0, 9) == h.gains);

  std::vector<Complex> too_long(2049, Complex(1.0, 0.0));
  CHECK_THROWS_AS(apply_channel(too_long, h, 0.0, 9), DomainError);
  CHECK_THROWS_AS(apply_channel(ones, h, -1.0, 9), DomainError);
}

TEST_CASE("apply_channel: noise variance") {
  const std::size_t n = 1'000'000;
  FadingProcess h{std::vector<Complex>(n, Complex(0.3, -0.8)), 0.0, 1e-4, 0};
  std::vector<Complex> x(n, Complex(0.7, 0.7));
  const auto y = apply_channel(x, h, 0.25, 42);
  double acc = 0.0, re = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex e = y[i] - h.gains[i] * x[i];
    acc += std::norm(e);
    re += e.real() * e.real();
  }
  CHECK(acc / n == doctest::Approx(0.25).epsilon(0.01));
  CHECK(re / n == doctest::Approx(0.125).epsilon(0.01));
}

TEST_CASE("tap profiles") {
  const auto epa = epa_profile();
  CHECK(epa.delays_ns.size() == 7);
  CHECK(epa.powers_db == std::vector<double>{0, -1, -2, -3, -8, -17.2, -20.8});
  CHECK(eva_profile().delays_ns.size() == 9);
  CHECK(etu_profile().delays_ns.size() == 9);

  TapProfile bad{ProfileName::Custom, {0, 30, 20}, {0, 0, 0}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  TapProfile empty;
  CHECK_THROWS_AS(empty.validate(), DomainError);
  TapProfile offset{ProfileName::Custom, {10}, {0}};
  CHECK_THROWS_AS(offset.validate(), DomainError);

  const auto parsed = parse_tap_profile("# EPA head\n0,0\n30,-1\n\n70,-2\n");
  CHECK(parsed.delays_ns == std::vector<double>{0, 30, 70});
  CHECK(parsed.powers_db == std::vector<double>{0, -1, -2});
  CHECK_THROWS_AS(parse_tap_profile("0;0\n"), FormatError);
}

TEST_CASE("map_to_grid merges colliding taps") {
  const auto fine = map_to_grid(epa_profile(), 10e-9);
  CHECK(fine.delays == std::vector<std::size_t>{0, 3, 7, 9, 11, 19, 41});
  double total_linear = 0.0;
  for (double db : epa_profile().powers_db) total_linear += std::pow(10.0, db / 10.0);
  CHECK(fine.powers[0] == doctest::Approx(1.0 / total_linear));
  CHECK(fine.powers[4] == doctest::Approx(std::pow(10.0, -0.8) / total_linear));

  const auto coarse = map_to_grid(epa_profile(), 1e-6);
  REQUIRE(coarse.delays.size() == 1);
  CHECK(coarse.powers[0] == doctest::Approx(1.0));

  // 30 ns and 70 ns on a 50 ns grid: delays 0, 1, 1 -> two taps.
  const auto mid = map_to_grid(TapProfile{ProfileName::Custom, {0, 30, 70}, {0, 0, 0}}, 50e-9);
  CHECK(mid.delays == std::vector<std::size_t>{0, 1});
  CHECK(mid.powers[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("generate_multipath") {
  const auto ch = generate_multipath(epa_profile(), 50.0, 10e-9, 1024, 5);
  CHECK(ch.taps.size() == 7);

  const TapProfile single{ProfileName::Custom, {0}, {0}};
  const auto one = generate_multipath(single, 50.0, 1e-4, 4096, 8);
  REQUIRE(one.taps.size() == 1);
  CHECK(one.taps[0].gains == generate_fading(4096, 50.0, 1e-4, 8).gains);

  const std::size_t n = std::size_t{1} << 20;
  const auto eva = generate_multipath(eva_profile(), 70.0, 100e-9, n, 13);
  double total = 0.0;
  for (const auto& tap : eva.taps) {
    double p = 0.0;
    for (const auto& g : tap.gains) p += std::norm(g);
    total += p / static_cast<double>(n);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(0.01));

  CHECK_THROWS_AS(generate_multipath(TapProfile{}, 50.0, 1e-4, 16, 1), DomainError);
}

TEST_CASE("coherence_block_length") {
  CHECK(coherence_block_length(50.0) == 42);
  CHECK(coherence_block_length(100.0) == 11);
  CHECK(coherence_block_length(50.0) == 42);
  CHECK(coherence_block_length(10.0) == 210);
  CHECK(coherence_block_length(200.0) == 6);
  // Between anchors K = count * f_D is interpolated: at 75 Hz K = 1600.
  CHECK(coherence_block_length(75.0) == 21);
  CHECK_THROWS_AS(coherence_block_length(0.0), DomainError);
  CoherenceRule custom{{{10.0, 100}}};
  CHECK(coherence_block_length(20.0, custom) == 50);
}

TEST_CASE("FadingSource hands out deterministic disjoint segments") {
  FadingSource a(50.0, 1e-5, 4), b(50.0, 1e-5, 4);
  const auto s1 = a.next(100);
  const auto s2 = a.next(100);
  CHECK(s1 == b.next(100));
  CHECK(s2 == b.next(100));
  CHECK(s1 != s2);
  CHECK(s1.size() == 100);
}
