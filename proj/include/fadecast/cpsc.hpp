// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fadecast/modem.hpp"
#include "fadecast/predictor.hpp"
#include "fadecast/receiver.hpp"

namespace fadecast {

/// Per-tap gain sequences, taps[l][t].
using TapSeries = std::vector<std::vector<Complex>>;

/// n - n_p (2l - 1); throws DomainError when no data symbol fits.
std::size_t cpsc_payload_length(std::size_t n, std::size_t l_taps, std::size_t n_p);

/// Cyclic-prefix single-carrier frame: n_p guard-zero pilot sequences, then
/// the data; the prefix repeats the last l_taps - 1 frame symbols.
struct CpscFrame {
  std::size_t n = 128;
  std::size_t l_taps = 2;
  std::size_t n_p = 2;
  std::vector<Complex> symbols;  // n frame symbols
  std::vector<Complex> cp;

  std::size_t n_c() const { return n - data_offset(); }
  std::size_t data_offset() const { return n_p * (2 * l_taps - 1); }
  /// Prefix followed by the frame.
  std::vector<Complex> transmitted() const;
};

CpscFrame build_frame(std::size_t n, std::size_t l_taps, std::size_t n_p,
                      std::span<const Complex> data, Complex pilot = pilot_symbol());

/// r(tau) = sum_l h_l(tau) x(tau - l) + noise over the transmitted samples
/// (prefix included, nothing before it), then the prefix is dropped. Tap
/// series are indexed by transmitted sample and must cover n + cp samples.
std::vector<Complex> apply_doubly_selective(const CpscFrame& frame, const TapSeries& taps,
                                            double sigma2, std::uint64_t seed);

/// Branch cost of hypothesis recent = (x(t), x(t-1), ..., x(t-L+1)) at
/// time t; smaller is more likely.
using BranchCost = std::function<double(std::size_t t, std::span<const Complex> recent)>;

/// Minimum total cost sequence of `length` symbols over M^(L-1) states.
/// Symbols before t = 0 are taken from `prefix` (most recent last) and are
/// zero where it runs out. Ties go to the lowest predecessor state.
std::vector<std::size_t> viterbi_detect(std::size_t length, std::size_t l_taps,
                                        const Constellation& c, const BranchCost& cost,
                                        std::span<const Complex> prefix = {});

/// Euclidean metric |y(t) - sum_l taps[l][t] x(t-l)|^2.
std::vector<std::size_t> viterbi_detect(std::span<const Complex> y, const TapSeries& taps,
                                        const Constellation& c,
                                        std::span<const Complex> prefix = {});

struct CpscLayout {
  std::size_t n = 128;
  std::size_t l_taps = 2;
  std::size_t n_p = 2;
  std::vector<double> tap_powers;  // linear, empty: equal split
  std::vector<double> powers() const;
};

/// Per frame: LMMSE tap estimates from the pilots, each tap predicted one
/// value per coherence block after the last pilot (estimates normalized by
/// the tap power; the window is left-padded with the earliest estimate),
/// Viterbi detection of the data. Payload symbols still inside the last
/// pilot's block use that pilot's estimate. `net` may be null only with
/// perfect CSI.
ReceiverReport run_cpsc(const PredictorNet* net, const Constellation& c, double doppler_hz,
                        double snr_db, const CpscLayout& layout, const SimOptions& opt);

}  // namespace fadecast
