#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "fadecast/adaptive.hpp"
#include "fadecast/error.hpp"

using namespace fadecast;

namespace {

PredictorNet small_net(std::uint64_t seed) {
  PredictorNet net(nn::NetShape{1, 4, 1, 1}, 10, 10.0);
  Rng a(seed), b(seed + 1);
  net.real_net.init_uniform(a);
  net.imag_net.init_uniform(b);
  return net;
}

LutGrid small_grid() { return {{5, 10, 20}, {10.0, 50.0}, {0.0, 10.0, 20.0}}; }

// Hand-filled table: mse = n * 1e-3 * (1 + 10^(-snr/10)).
MseLookupTable synthetic() {
  MseLookupTable t;
  t.grid = small_grid();
  t.trials = 100;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t d = 0; d < 2; ++d)
      for (std::size_t s = 0; s < 3; ++s) {
        t.mse.push_back(static_cast<double>(t.grid.n_grid[i]) * 1e-3 *
                        (1.0 + std::pow(10.0, -t.grid.snr_db[s] / 10.0)));
        t.stderr_mse.push_back(1e-5);
      }
  return t;
}

}  // namespace

TEST_CASE("standard grid") {
  const auto g = LutGrid::standard();
  CHECK(g.n_grid.size() == 20);
  CHECK(g.n_grid.front() == 5);
  CHECK(g.n_grid.back() == 100);
  CHECK(g.doppler_hz.size() == 20);
  CHECK(g.snr_db.front() == -5.0);
  CHECK(g.snr_db.back() == 40.0);
  CHECK_NOTHROW(g.validate());
  LutGrid bad = g;
  bad.n_grid = {10, 5};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = g;
  bad.snr_db.clear();
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("select_n extremes and ties") {
  const auto t = synthetic();
  CHECK(select_n(t, 10.0, 50.0, std::numeric_limits<double>::infinity()) == 20);
  CHECK(select_n(t, 10.0, 50.0, 0.0) == 5);
  // At 20 dB the cells are 5.05e-3, 10.1e-3, 20.2e-3.
  CHECK(select_n(t, 20.0, 10.0, 0.0101) == 5);
  CHECK(select_n(t, 20.0, 10.0, 0.01011) == 10);
  CHECK(select_n(t, 20.0, 10.0, 0.021) == 20);
  CHECK_THROWS_AS(select_n(MseLookupTable{}, 0.0, 10.0, 1.0), DomainError);
}

TEST_CASE("select_n is anti-monotone in the target") {
  const auto t = synthetic();
  for (double snr : {-3.0, 0.0, 7.0, 20.0, 35.0}) {
    std::size_t prev = 1000;
    for (double target = 0.05; target > 1e-4; target *= 0.8) {
      const auto n = select_n(t, snr, 30.0, target);
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("nearest grid point") {
  const std::vector<double> axis{0.0, 10.0, 20.0};
  CHECK(nearest_index(axis, -50.0) == 0);
  CHECK(nearest_index(axis, 4.9) == 0);
  CHECK(nearest_index(axis, 5.0) == 0);
  CHECK(nearest_index(axis, 5.1) == 1);
  CHECK(nearest_index(axis, 99.0) == 2);
}

TEST_CASE("build_lut shape, determinism and fingerprint") {
  const auto net = small_net(3);
  LutOptions opt;
  opt.trials = 100;
  opt.seed = 9;
  opt.jobs = 1;
  CHECK_THROWS_AS(build_lut(net, small_grid(), LutOptions{99, 1, 1}), DomainError);
  const auto a = build_lut(net, small_grid(), opt);
  CHECK(a.mse.size() == 18);
  CHECK(a.trials == 100);
  CHECK(a.fingerprint == model_fingerprint(net));
  for (double v : a.mse) CHECK(v >= 0.0);
  opt.jobs = 3;
  const auto b = build_lut(net, small_grid(), opt);
  CHECK(a.mse == b.mse);
  CHECK(a.stderr_mse == b.stderr_mse);
  CHECK_NOTHROW(check_fingerprint(a, net));
  CHECK_THROWS_AS(check_fingerprint(a, small_net(4)), FingerprintMismatch);
}

TEST_CASE("lut csv round trip") {
  auto t = synthetic();
  t.fingerprint = 0x0123456789abcdefULL;
  std::stringstream io;
  write_csv(io, lut_to_csv(t));
  const auto back = lut_from_csv(read_csv(io));
  CHECK(back.fingerprint == t.fingerprint);
  CHECK(back.trials == t.trials);
  CHECK(back.grid.n_grid == t.grid.n_grid);
  CHECK(back.grid.doppler_hz == t.grid.doppler_hz);
  CHECK(back.grid.snr_db == t.grid.snr_db);
  CHECK(back.mse == t.mse);
  CHECK(back.stderr_mse == t.stderr_mse);

  auto csv = lut_to_csv(t);
  csv.rows.pop_back();
  CHECK_THROWS_AS(lut_from_csv(csv), FormatError);
}
