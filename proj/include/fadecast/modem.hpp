// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fadecast/rng.hpp"

namespace fadecast {

using Bits = std::vector<std::uint8_t>;

/// Square M-QAM with per-axis Gray labels and unit average energy.
///
/// A point's index is its label: the high log2(M)/2 bits select the
/// in-phase level and the low bits the quadrature level, each axis Gray
/// coded, so index -> bits is plain binary expansion (MSB first).
struct Constellation {
  std::size_t m = 0;
  std::size_t bits_per_symbol = 0;
  std::vector<Complex> points;

  Bits bits_of(std::size_t index) const;
  std::size_t index_of(std::span<const std::uint8_t> bits) const;
};

/// m in {4, 16, 64}; anything else throws DomainError.
Constellation gray_qam(std::size_t m);

/// Parses "4qam" / "16qam" / "64qam".
Constellation constellation_from_name(const std::string& name);
std::string constellation_name(const Constellation& c);

/// Noise variance for a unit-energy symbol: 1 / (log2(m) 10^(EbN0/10)).
double ebn0_to_sigma2(double ebn0_db, std::size_t m);

/// Noise variance for a unit-energy symbol at the given SNR (Es/N0).
double snr_to_sigma2(double snr_db);

/// Es/N0 in dB for an Eb/N0 in dB and constellation order m.
double ebn0_to_snr_db(double ebn0_db, std::size_t m);

/// Pilot symbol: first point of 4-QAM, same power as data.
Complex pilot_symbol();

/// argmin_s |y - h_hat s|^2, lowest index on ties. Throws DomainError when
/// h_hat is zero.
std::size_t ml_detect(Complex y, Complex h_hat, const Constellation& c);

struct Modulated {
  std::vector<std::size_t> indices;
  std::vector<Complex> symbols;
};

/// Groups bits (MSB first) into symbols. Throws DomainError when the bit
/// count is not a multiple of log2(m).
Modulated modulate(std::span<const std::uint8_t> bits, const Constellation& c);

Bits demap(std::span<const std::size_t> indices, const Constellation& c);

Bits random_bits(std::size_t n, Rng& rng);

/// Closed-form BER of Gray 4-QAM over Rayleigh fading with perfect CSI,
/// 0.5 (1 - sqrt(g / (1 + g))), g = Eb/N0 (linear).
double rayleigh_qpsk_ber(double ebn0_db);

}  // namespace fadecast
