// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fadecast/adaptive.hpp"
#include "fadecast/estimation.hpp"
#include "fadecast/modem.hpp"
#include "fadecast/predictor.hpp"

namespace fadecast {

/// One pilot block of n_p symbols followed by k data blocks of n_c
/// symbols, one symbol per coherence block.
struct FrameLayout {
  std::size_t n_p = 10;
  std::size_t n_c = 100;
  std::size_t k = 1;
  void validate() const;
};

/// k n_c / (n_p + k n_c).
double efficiency(const FrameLayout& layout);

/// Monte-Carlo counters. Summary fields are filled by finalize().
struct ReceiverReport {
  double ber = 0.0;
  double ber_stderr = 0.0;
  double prediction_mse = 0.0;
  double mse_stderr = 0.0;
  double efficiency = 0.0;
  double n_c_mean = 0.0;
  std::uint64_t bits_sent = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t trials = 0;
  std::uint64_t convergence_failures = 0;
  std::uint64_t discarded_trials = 0;

  // Raw sums behind the summary fields.
  double trial_ber_sum = 0.0, trial_ber_sq = 0.0;
  double trial_mse_sum = 0.0, trial_mse_sq = 0.0;
  std::uint64_t mse_trials = 0;
  double n_c_sum = 0.0;
  std::uint64_t data_symbols = 0;
  std::uint64_t channel_uses = 0;

  /// Records one trial: its bit counts, mean squared prediction error
  /// (skipped when negative), horizon and symbol usage.
  void add_trial(std::uint64_t bits, std::uint64_t errors, double trial_mse, double n_c,
                 std::uint64_t data, std::uint64_t uses);
  void merge(const ReceiverReport& other);
  void finalize();
};

struct SimOptions {
  std::size_t trials = 1000;       // trial cap
  std::uint64_t min_bit_errors = 0;  // stop early once reached (0: run the cap)
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
  double symbol_period_s = kDefaultSymbolPeriod;
  bool perfect_csi = false;        // detect with the true channel
};

/// Trials are grouped in fixed chunks; chunk c covers trials
/// [c * kTrialChunk, ...) and draws everything from derive_seed(seed, c).
inline constexpr std::size_t kTrialChunk = 128;

/// Runs chunk(c, count) for consecutive chunks and merges them in order.
/// With a bit-error target, the result is the shortest chunk prefix that
/// reaches it, so it does not depend on the worker count.
ReceiverReport run_chunks(const SimOptions& opt,
                          const std::function<ReceiverReport(std::size_t, std::size_t)>& chunk);

/// Sample period of the one-symbol-per-coherence-block grid.
double block_period(double doppler_hz, double symbol_period_s);

/// Fixed horizon: n_p = window_n pilots, LMMSE, predict n_preds, detect.
ReceiverReport run_fixed(const PredictorNet& net, const Constellation& c, double doppler_hz,
                         double ebn0_db, std::size_t n_preds, const SimOptions& opt);

/// Horizon from select_n at SNR = Es/N0 and target lmmse_target_mse.
std::size_t adaptive_horizon(const MseLookupTable& lut, const Constellation& c, double doppler_hz,
                             double ebn0_db);

/// run_fixed with the adaptive horizon. Throws FingerprintMismatch when the
/// table belongs to another model.
ReceiverReport run_adaptive(const PredictorNet& net, const MseLookupTable& lut,
                            const Constellation& c, double doppler_hz, double ebn0_db,
                            const SimOptions& opt);

/// 1:k decision-directed receiver. Each data block except the last is
/// refined from its own decisions (until two consecutive decodes agree,
/// at most max_iterations), and the latest window_n refined estimates seed
/// the prediction of the next block. k = 1 reproduces run_adaptive.
ReceiverReport run_data_driven(const PredictorNet& net, const MseLookupTable& lut,
                               const Constellation& c, double doppler_hz, double ebn0_db,
                               std::size_t k, const SimOptions& opt,
                               std::size_t max_iterations = 200);

/// lmmse(y_i, s_i, sigma2) per symbol, tagged DataRefined.
std::vector<ChannelEstimate> refine_estimates(std::span<const Complex> y,
                                              std::span<const Complex> decoded, double sigma2,
                                              std::size_t first_index = 0);

/// Outcome of the refine / re-decode loop for one data block.
struct RefinedBlock {
  std::vector<std::size_t> decisions;
  std::vector<ChannelEstimate> estimates;
  std::size_t iterations = 0;
  bool converged = false;
};

RefinedBlock refine_until_stable(std::span<const Complex> y, std::vector<std::size_t> decisions,
                                 const Constellation& c, double sigma2,
                                 std::size_t max_iterations = 200, std::size_t first_index = 0);

}  // namespace fadecast
