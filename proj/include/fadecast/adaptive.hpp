// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fadecast/csv.hpp"
#include "fadecast/predictor.hpp"

namespace fadecast {

struct LutGrid {
  std::vector<std::size_t> n_grid;
  std::vector<double> doppler_hz;
  std::vector<double> snr_db;

  /// n and Doppler 5..100 step 5, SNR -5..40 dB step 5.
  static LutGrid standard();
  /// Throws DomainError on an empty or unsorted axis, or n = 0.
  void validate() const;
};

/// Achieved prediction MSE per (horizon, Doppler, SNR) cell, bound to one
/// model by its fingerprint.
struct MseLookupTable {
  LutGrid grid;
  std::vector<double> mse;          // flat [n][doppler][snr]
  std::vector<double> stderr_mse;   // Monte-Carlo standard error, same layout
  std::size_t trials = 0;
  std::uint64_t fingerprint = 0;

  std::size_t index(std::size_t i_n, std::size_t i_d, std::size_t i_s) const {
    return (i_n * grid.doppler_hz.size() + i_d) * grid.snr_db.size() + i_s;
  }
  double at(std::size_t i_n, std::size_t i_d, std::size_t i_s) const { return mse[index(i_n, i_d, i_s)]; }
  double stderr_at(std::size_t i_n, std::size_t i_d, std::size_t i_s) const {
    return stderr_mse[index(i_n, i_d, i_s)];
  }
  bool empty() const { return mse.empty(); }
};

struct LutOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t jobs = 0;  // 0: all cores
  double symbol_period_s = kDefaultSymbolPeriod;
};

/// Per Doppler: each trial draws window_n + max(n) fading samples (one per
/// coherence block), LMMSE-estimates the first window_n from pilots at each
/// SNR, predicts max(n) steps and records the complex MSE over every
/// prefix. All SNRs of one Doppler reuse the same fading and unit noise
/// draws, so SNR columns differ only through the noise scale. Results do
/// not depend on `jobs`. Throws DomainError unless trials >= 100.
MseLookupTable build_lut(const PredictorNet& net, const LutGrid& grid, const LutOptions& opt);

/// Largest n whose achieved MSE is below target_mse at the grid point
/// nearest (snr_db, doppler_hz); min(n_grid) when none qualifies.
std::size_t select_n(const MseLookupTable& lut, double snr_db, double doppler_hz, double target_mse);

/// Index of the grid value nearest x (lower index on ties).
std::size_t nearest_index(const std::vector<double>& axis, double x);

/// Throws FingerprintMismatch unless the table was built for `net`.
void check_fingerprint(const MseLookupTable& lut, const PredictorNet& net);

/// CSV with columns n,doppler_hz,snr_db,mse,stderr and metadata comments
/// model_fingerprint and trials.
CsvTable lut_to_csv(const MseLookupTable& lut);
MseLookupTable lut_from_csv(const CsvTable& t);

}  // namespace fadecast
