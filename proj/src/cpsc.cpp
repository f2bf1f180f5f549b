// SPDX-License-Identifier: Apache-2.0
#include "fadecast/cpsc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fadecast/error.hpp"
#include "fadecast/estimation.hpp"
#include "fadecast/fading.hpp"

namespace fadecast {

std::size_t cpsc_payload_length(std::size_t n, std::size_t l_taps, std::size_t n_p) {
  require(l_taps >= 1, "cpsc: need at least one tap");
  const std::size_t pilots = n_p * (2 * l_taps - 1);
  require(n > pilots, "cpsc: pilots leave no room for data");
  return n - pilots;
}

std::vector<Complex> CpscFrame::transmitted() const {
  std::vector<Complex> out(cp);
  out.insert(out.end(), symbols.begin(), symbols.end());
  return out;
}

CpscFrame build_frame(std::size_t n, std::size_t l_taps, std::size_t n_p,
                      std::span<const Complex> data, Complex pilot) {
  const std::size_t n_c = cpsc_payload_length(n, l_taps, n_p);
  require(data.size() == n_c, "build_frame: data length must be n - n_p(2l - 1)");
  CpscFrame f;
  f.n = n;
  f.l_taps = l_taps;
  f.n_p = n_p;
  f.symbols = PilotLayout{n_p, l_taps, pilot}.symbols();
  if (n_p == 0) f.symbols.clear();
  f.symbols.insert(f.symbols.end(), data.begin(), data.end());
  f.cp.assign(f.symbols.end() - static_cast<std::ptrdiff_t>(l_taps - 1), f.symbols.end());
  return f;
}

std::vector<Complex> apply_doubly_selective(const CpscFrame& frame, const TapSeries& taps,
                                            double sigma2, std::uint64_t seed) {
  require(taps.size() == frame.l_taps, "apply_doubly_selective: tap count mismatch");
  const auto x = frame.transmitted();
  for (const auto& h : taps)
    require(h.size() >= x.size(), "apply_doubly_selective: tap series shorter than the frame");
  require(sigma2 >= 0.0, "apply_doubly_selective: sigma2 must be non-negative");
  const std::size_t cp = frame.cp.size();
  std::vector<Complex> y(frame.n);
  for (std::size_t t = 0; t < frame.n; ++t) {
    const std::size_t tau = t + cp;
    Complex acc{};
    for (std::size_t l = 0; l < taps.size() && l <= tau; ++l) acc += taps[l][tau] * x[tau - l];
    y[t] = acc;
  }
  Rng rng(seed);
  add_awgn(y, sigma2, rng);
  return y;
}

std::vector<std::size_t> viterbi_detect(std::size_t length, std::size_t l_taps,
                                        const Constellation& c, const BranchCost& cost,
                                        std::span<const Complex> prefix) {
  require(l_taps >= 1, "viterbi_detect: need at least one tap");
  const std::size_t m = c.m;
  std::size_t states = 1;
  for (std::size_t j = 1; j < l_taps; ++j) states *= m;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> metric(states, inf), next(states);
  metric[0] = 0.0;
  std::vector<std::size_t> from(length * states), symbol(length * states);
  std::vector<Complex> recent(l_taps);

  for (std::size_t t = 0; t < length; ++t) {
    std::fill(next.begin(), next.end(), inf);
    for (std::size_t s = 0; s < states; ++s) {
      if (metric[s] == inf) continue;
      std::size_t digits = s;
      for (std::size_t j = 1; j < l_taps; ++j) {
        const std::size_t d = digits % m;
        digits /= m;
        if (t >= j) {
          recent[j] = c.points[d];
        } else {
          const std::size_t back = j - t;  // 1 = the symbol just before t = 0
          recent[j] = back <= prefix.size() ? prefix[prefix.size() - back] : Complex{};
        }
      }
      for (std::size_t a = 0; a < m; ++a) {
        recent[0] = c.points[a];
        const double v = metric[s] + cost(t, recent);
        const std::size_t ns = states == 1 ? 0 : (a + m * s) % states;
        if (v < next[ns]) {
          next[ns] = v;
          from[t * states + ns] = s;
          symbol[t * states + ns] = a;
        }
      }
    }
    metric.swap(next);
  }

  std::vector<std::size_t> out(length);
  if (length == 0) return out;
  std::size_t s = static_cast<std::size_t>(
      std::min_element(metric.begin(), metric.end()) - metric.begin());
  for (std::size_t t = length; t-- > 0;) {
    out[t] = symbol[t * states + s];
    s = from[t * states + s];
  }
  return out;
}

std::vector<std::size_t> viterbi_detect(std::span<const Complex> y, const TapSeries& taps,
                                        const Constellation& c,
                                        std::span<const Complex> prefix) {
  require(!taps.empty(), "viterbi_detect: no taps");
  for (const auto& h : taps)
    require(h.size() >= y.size(), "viterbi_detect: taps missing for some time indices");
  return viterbi_detect(
      y.size(), taps.size(), c,
      [&](std::size_t t, std::span<const Complex> recent) {
        Complex e = y[t];
        for (std::size_t l = 0; l < taps.size(); ++l) e -= taps[l][t] * recent[l];
        return std::norm(e);
      },
      prefix);
}

std::vector<double> CpscLayout::powers() const {
  if (tap_powers.empty()) return std::vector<double>(l_taps, 1.0 / static_cast<double>(l_taps));
  require(tap_powers.size() == l_taps, "cpsc: tap power count must equal l_taps");
  return tap_powers;
}

ReceiverReport run_cpsc(const PredictorNet* net, const Constellation& c, double doppler_hz,
                        double snr_db, const CpscLayout& layout, const SimOptions& opt) {
  const std::size_t n_c = cpsc_payload_length(layout.n, layout.l_taps, layout.n_p);
  require(net != nullptr || opt.perfect_csi, "run_cpsc: predicted CSI needs a model");
  require(opt.perfect_csi || layout.n_p >= 1, "run_cpsc: predicted CSI needs pilots");
  require(layout.n_p >= 1 || layout.l_taps == 1,
          "run_cpsc: a multi-tap frame needs guard pilots before the data");
  const auto powers = layout.powers();
  const std::size_t taps_n = layout.l_taps;
  const std::size_t cp = taps_n - 1;
  const std::size_t len = layout.n + cp;
  const std::size_t block = coherence_block_length(doppler_hz);
  const std::size_t n_blocks = (len + block - 1) / block;
  const double dt = block_period(doppler_hz, opt.symbol_period_s);
  const double sigma2 = snr_to_sigma2(snr_db);
  const Complex pilot = pilot_symbol();
  const PilotLayout pl{layout.n_p, taps_n, pilot};
  const std::size_t offset = layout.n_p * (2 * taps_n - 1);
  // Transmitted sample carrying tap l of the last pilot sequence.
  const std::size_t last_block =
      layout.n_p == 0 ? 0 : (cp + (layout.n_p - 1) * (2 * taps_n - 1) + 2 * (taps_n - 1)) / block;
  const std::size_t n_preds = n_blocks - 1 - last_block;

  return run_chunks(opt, [&](std::size_t chunk, std::size_t count) {
    const std::uint64_t seed = derive_seed(opt.seed, chunk);
    std::vector<FadingSource> sources;
    for (std::size_t l = 0; l < taps_n; ++l)
      sources.emplace_back(doppler_hz, dt, derive_seed(seed, 100 + l));
    Rng rng(derive_seed(seed, 1));
    ReceiverReport r;
    TapSeries truth(taps_n, std::vector<Complex>(len)), est(taps_n, std::vector<Complex>(len));
    std::vector<Complex> data(n_c);
    std::vector<std::size_t> sent(n_c);

    for (std::size_t j = 0; j < count; ++j) {
      std::vector<std::vector<Complex>> blocks(taps_n);
      for (std::size_t l = 0; l < taps_n; ++l) {
        blocks[l] = sources[l].next(n_blocks);
        const double a = std::sqrt(powers[l]);
        for (std::size_t tau = 0; tau < len; ++tau) truth[l][tau] = a * blocks[l][tau / block];
      }
      for (std::size_t i = 0; i < n_c; ++i) {
        sent[i] = static_cast<std::size_t>(rng.below(c.m));
        data[i] = c.points[sent[i]];
      }
      const CpscFrame frame = build_frame(layout.n, taps_n, layout.n_p, data, pilot);
      const auto y = apply_doubly_selective(frame, truth, sigma2, rng.next_u64());

      double sq = 0.0;
      if (opt.perfect_csi) {
        est = truth;
      } else {
        const auto pe = estimate_multipath(std::span(y).first(pl.total_length()), pl, sigma2);
        const std::size_t w = net->window_n;
        for (std::size_t l = 0; l < taps_n; ++l) {
          const double a = std::sqrt(powers[l]);
          std::vector<Complex> window(w);
          for (std::size_t i = 0; i < w; ++i) {
            const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(layout.n_p) -
                                     static_cast<std::ptrdiff_t>(w) + static_cast<std::ptrdiff_t>(i);
            window[i] = pe[l][static_cast<std::size_t>(std::max<std::ptrdiff_t>(k, 0))].value / a;
          }
          std::vector<Complex> pred;
          if (n_preds > 0) pred = predict(*net, window, n_preds);
          for (std::size_t tau = 0; tau < len; ++tau) {
            const std::size_t b = tau / block;
            est[l][tau] = a * (b <= last_block ? window.back() : pred[b - last_block - 1]);
          }
        }
      }
      // Payload view: frame index t sits at transmitted sample t + cp.
      TapSeries payload(taps_n, std::vector<Complex>(n_c));
      for (std::size_t l = 0; l < taps_n; ++l)
        for (std::size_t i = 0; i < n_c; ++i) {
          payload[l][i] = est[l][cp + offset + i];
          sq += std::norm(payload[l][i] - truth[l][cp + offset + i]);
        }
      const auto prefix = std::span(frame.symbols).first(offset);
      const auto detected = viterbi_detect(std::span(y).subspan(offset), payload, c, prefix);
      std::uint64_t errors = 0;
      for (std::size_t i = 0; i < n_c; ++i)
        errors += static_cast<std::uint64_t>(std::popcount(sent[i] ^ detected[i]));
      r.add_trial(n_c * c.bits_per_symbol, errors,
                  opt.perfect_csi ? -1.0 : sq / static_cast<double>(n_c * taps_n),
                  static_cast<double>(n_c), n_c, len);
    }
    return r;
  });
}

}  // namespace fadecast
