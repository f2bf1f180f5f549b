// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fadecast/adaptive.hpp"
#include "fadecast/estimation.hpp"
#include "fadecast/modem.hpp"
#include "fadecast/receiver.hpp"

namespace fadecast {

/// h(t) = rho1 h(t-1) + rho2 h(t-2), complex coefficients.
struct Ar2Model {
  Complex rho1;
  Complex rho2;
};

/// Least-squares fit of the stacked regression over t = 2..n-1 by a
/// complete orthogonal decomposition (relative rank threshold 1e-12), so
/// dependent regressors give the minimum-norm solution. Throws
/// DomainError for fewer than 4 samples and FitError when the regressors
/// are all zero or the solution is not finite.
Ar2Model fit_ar2_yw(std::span<const Complex> h);
Ar2Model fit_ar2_yw(std::span<const ChannelEstimate> estimates);

/// Recursive prediction from h(t-1) = last, h(t-2) = before_last.
std::vector<Complex> ar2_predict(const Ar2Model& m, Complex last, Complex before_last,
                                 std::size_t n_preds);

/// As run_adaptive with the AR(2) predictor in place of the network; the
/// horizon still comes from the table. Trials whose fit fails are
/// discarded and counted.
ReceiverReport run_ar2_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                const MseLookupTable& lut, const SimOptions& opt);
/// Same with an explicit horizon.
ReceiverReport run_ar2_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                std::size_t n_c, std::size_t n_p, const SimOptions& opt);

/// Pilot positions of the interleaved benchmark frame: n_p pilots each
/// followed by n_d / n_p data symbols, the first n_d mod n_p groups taking
/// one extra.
std::vector<std::size_t> interleaved_pilot_positions(std::size_t n_p, std::size_t n_d);

/// Piecewise-linear interpolation of pilot estimates (positions strictly
/// increasing). Before the first pilot the first value is held; after the
/// last the final slope is extended (held when there is a single pilot).
std::vector<Complex> linear_interpolate(std::span<const std::size_t> positions,
                                        std::span<const Complex> values,
                                        std::span<const std::size_t> queries);

/// LMMSE at interleaved pilots, linear interpolation for data, ML detect.
ReceiverReport run_lmmse_li_receiver(const Constellation& c, double doppler_hz, double ebn0_db,
                                     std::size_t n_p, std::size_t n_d, const SimOptions& opt);

}  // namespace fadecast
