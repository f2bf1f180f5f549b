// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fadecast/rng.hpp"

namespace fadecast {

enum class EstimateSource { PilotLmmse, Predicted, DataRefined };

struct ChannelEstimate {
  Complex value;
  EstimateSource source = EstimateSource::PilotLmmse;
  std::size_t time_index = 0;
};

/// LMMSE estimate from one received pilot: y_p |p|^2 / (p (|p|^2 + sigma2)).
ChannelEstimate lmmse(Complex y_p, Complex pilot, double sigma2,
                      std::size_t time_index = 0,
                      EstimateSource source = EstimateSource::PilotLmmse);

/// Analytic MSE of the LMMSE estimate for a unit-power channel.
double lmmse_target_mse(double sigma2, Complex pilot);

double mse(std::span<const Complex> pred, std::span<const Complex> truth);
double mse(std::span<const double> pred, std::span<const double> truth);

/// Guard-zero pilot layout for an L-tap channel: each pilot sequence is
/// L-1 zeros, the pilot, L-1 zeros (length 2L-1), repeated n_p times.
struct PilotLayout {
  std::size_t n_pilots = 1;
  std::size_t taps = 1;
  Complex pilot{1.0, 0.0};

  std::size_t sequence_length() const { return 2 * taps - 1; }
  std::size_t total_length() const { return n_pilots * sequence_length(); }

  /// Transmit samples for all pilot sequences.
  std::vector<Complex> symbols() const;
};

/// Per-tap LMMSE estimates, result[l][j] for tap l from pilot sequence j.
/// The sample at offset (L-1) + l of each sequence carries only h_l * p.
std::vector<std::vector<ChannelEstimate>> estimate_multipath(
    std::span<const Complex> received, const PilotLayout& layout, double sigma2);

}  // namespace fadecast
