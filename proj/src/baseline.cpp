// SPDX-License-Identifier: Apache-2.0
#include "fadecast/baseline.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>

#include "fadecast/error.hpp"

namespace fadecast {
namespace {

struct Frame {
  std::vector<Complex> h, y;
  std::vector<std::size_t> sent;  // data symbols, in order
};

}  // namespace

Ar2Model fit_ar2_yw(std::span<const Complex> h) {
  require(h.size() >= 4, "fit_ar2_yw: need at least 4 samples");
  const std::size_t rows = h.size() - 2;
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(rows), 2);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(rows));
  for (std::size_t t = 2; t < h.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t - 2);
    a(r, 0) = h[t - 1];
    a(r, 1) = h[t - 2];
    b(r) = h[t];
  }
  if (a.squaredNorm() == 0.0) throw FitError("fit_ar2_yw: regressors are all zero");
  // Rank-revealing solve: minimum-norm least squares when the columns are
  // dependent (constant or pure AR(1) data).
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
  cod.setThreshold(1e-12);
  const Eigen::Vector2cd rho = cod.solve(b);
  if (!rho.allFinite()) throw FitError("fit_ar2_yw: singular regression");
  return {rho(0), rho(1)};
}

Ar2Model fit_ar2_yw(std::span<const ChannelEstimate> estimates) {
  std::vector<Complex> v(estimates.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = estimates[i].value;
  return fit_ar2_yw(v);
}

std::vector<Complex> ar2_predict(const Ar2Model& m, Complex last, Complex before_last,
                                 std::size_t n_preds) {
  require(n_preds >= 1, "ar2_predict: n_preds must be positive");
  std::vector<Complex> out(n_preds);
  for (std::size_t i = 0; i < n_preds; ++i) {
    out[i] = m.rho1 * last + m.rho2 * before_last;
    before_last = last;
    last = out[i];
  }
  return out;
}

ReceiverReport run_ar2_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                const MseLookupTable& lut, const SimOptions& opt) {
  return run_ar2_receiver(c, doppler_hz, ebn0_db, adaptive_horizon(lut, c, doppler_hz, ebn0_db), 10,
                          opt);
}

ReceiverReport run_ar2_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                std::size_t n_c, std::size_t n_p, const SimOptions& opt) {
  require(n_p >= 4, "run_ar2_receiver: need at least 4 pilots");
  require(n_c >= 1, "run_ar2_receiver: horizon must be positive");
  const double sigma2 = ebn0_to_sigma2(ebn0_db, c.m);
  const double sd = std::sqrt(sigma2);
  const double dt = block_period(doppler_hz, opt.symbol_period_s);
  const Complex pilot = pilot_symbol();

  return run_chunks(opt, [&](std::size_t chunk, std::size_t count) {
    const std::uint64_t seed = derive_seed(opt.seed, chunk);
    FadingSource source(doppler_hz, dt, seed);
    Rng rng(derive_seed(seed, 1));
    ReceiverReport r;
    for (std::size_t j = 0; j < count; ++j) {
      const auto h = source.next(n_p + n_c);
      std::vector<Complex> est(n_p);
      for (std::size_t t = 0; t < n_p; ++t)
        est[t] = lmmse(h[t] * pilot + sd * rng.complex_gaussian(1.0), pilot, sigma2).value;
      std::vector<std::size_t> sent(n_c);
      std::vector<Complex> y(n_c);
      for (std::size_t i = 0; i < n_c; ++i) {
        sent[i] = static_cast<std::size_t>(rng.below(c.m));
        y[i] = h[n_p + i] * c.points[sent[i]] + sd * rng.complex_gaussian(1.0);
      }
      std::vector<Complex> pred;
      if (opt.perfect_csi) {
        pred.assign(h.begin() + static_cast<std::ptrdiff_t>(n_p), h.end());
      } else {
        try {
          pred = ar2_predict(fit_ar2_yw(est), est[n_p - 1], est[n_p - 2], n_c);
        } catch (const FitError&) {
          ++r.discarded_trials;
          continue;
        }
      }
      std::uint64_t errors = 0;
      double sq = 0.0;
      for (std::size_t i = 0; i < n_c; ++i) {
        const Complex g = pred[i];
        // A predictor that collapses to zero carries no information.
        const std::size_t d = g == Complex{} ? 0 : ml_detect(y[i], g, c);
        errors += static_cast<std::uint64_t>(std::popcount(sent[i] ^ d));
        sq += std::norm(g - h[n_p + i]);
      }
      r.add_trial(n_c * c.bits_per_symbol, errors,
                  opt.perfect_csi ? -1.0 : sq / static_cast<double>(n_c), static_cast<double>(n_c),
                  n_c, n_p + n_c);
    }
    return r;
  });
}

std::vector<std::size_t> interleaved_pilot_positions(std::size_t n_p, std::size_t n_d) {
  require(n_p >= 1, "interleaved_pilot_positions: need a pilot");
  std::vector<std::size_t> pos(n_p);
  std::size_t at = 0;
  for (std::size_t i = 0; i < n_p; ++i) {
    pos[i] = at;
    at += 1 + n_d / n_p + (i < n_d % n_p ? 1 : 0);
  }
  return pos;
}

std::vector<Complex> linear_interpolate(std::span<const std::size_t> positions,
                                        std::span<const Complex> values,
                                        std::span<const std::size_t> queries) {
  require(!positions.empty() && positions.size() == values.size(),
          "linear_interpolate: need matching, non-empty pilot lists");
  for (std::size_t i = 1; i < positions.size(); ++i)
    require(positions[i] > positions[i - 1], "linear_interpolate: positions must increase");
  std::vector<Complex> out(queries.size());
  const std::size_t last = positions.size() - 1;
  std::size_t seg = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto t = static_cast<double>(queries[q]);
    if (queries[q] <= positions.front()) {
      out[q] = values.front();
      continue;
    }
    if (last == 0) {
      out[q] = values.front();
      continue;
    }
    if (queries[q] >= positions[last]) {
      const Complex slope = (values[last] - values[last - 1]) /
                            static_cast<double>(positions[last] - positions[last - 1]);
      out[q] = values[last] + slope * (t - static_cast<double>(positions[last]));
      continue;
    }
    seg = 0;
    while (positions[seg + 1] <= queries[q]) ++seg;
    const double x0 = static_cast<double>(positions[seg]), x1 = static_cast<double>(positions[seg + 1]);
    out[q] = values[seg] + (values[seg + 1] - values[seg]) * ((t - x0) / (x1 - x0));
  }
  return out;
}

ReceiverReport run_lmmse_li_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                     std::size_t n_p, std::size_t n_d, const SimOptions& opt) {
  require(n_p >= 1 && n_d >= 1, "run_lmmse_li_receiver: n_p and n_d must be positive");
  const double sigma2 = ebn0_to_sigma2(ebn0_db, c.m);
  const double sd = std::sqrt(sigma2);
  const double dt = block_period(doppler_hz, opt.symbol_period_s);
  const Complex pilot = pilot_symbol();
  const std::size_t len = n_p + n_d;
  const auto pilots = interleaved_pilot_positions(n_p, n_d);
  std::vector<std::size_t> data;
  for (std::size_t t = 0, next = 0; t < len; ++t) {
    if (next < n_p && pilots[next] == t) {
      ++next;
      continue;
    }
    data.push_back(t);
  }

  return run_chunks(opt, [&](std::size_t chunk, std::size_t count) {
    const std::uint64_t seed = derive_seed(opt.seed, chunk);
    FadingSource source(doppler_hz, dt, seed);
    Rng rng(derive_seed(seed, 1));
    ReceiverReport r;
    std::vector<Complex> est(n_p);
    for (std::size_t j = 0; j < count; ++j) {
      const auto h = source.next(len);
      for (std::size_t i = 0; i < n_p; ++i)
        est[i] = lmmse(h[pilots[i]] * pilot + sd * rng.complex_gaussian(1.0), pilot, sigma2).value;
      std::vector<std::size_t> sent(n_d);
      std::vector<Complex> y(n_d);
      for (std::size_t i = 0; i < n_d; ++i) {
        sent[i] = static_cast<std::size_t>(rng.below(c.m));
        y[i] = h[data[i]] * c.points[sent[i]] + sd * rng.complex_gaussian(1.0);
      }
      const auto g = linear_interpolate(pilots, est, data);
      std::uint64_t errors = 0;
      double sq = 0.0;
      for (std::size_t i = 0; i < n_d; ++i) {
        const Complex gi = opt.perfect_csi ? h[data[i]] : g[i];
        const std::size_t d = gi == Complex{} ? 0 : ml_detect(y[i], gi, c);
        errors += static_cast<std::uint64_t>(std::popcount(sent[i] ^ d));
        sq += std::norm(gi - h[data[i]]);
      }
      r.add_trial(n_d * c.bits_per_symbol, errors,
                  opt.perfect_csi ? -1.0 : sq / static_cast<double>(n_d), static_cast<double>(n_d),
                  n_d, len);
    }
    return r;
  });
}

}  // namespace fadecast
