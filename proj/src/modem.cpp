// SPDX-License-Identifier: Apache-2.0
#include "fadecast/modem.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "fadecast/error.hpp"

namespace fadecast {

Bits Constellation::bits_of(std::size_t index) const {
  Bits out(bits_per_symbol);
  for (std::size_t b = 0; b < bits_per_symbol; ++b)
    out[b] = static_cast<std::uint8_t>((index >> (bits_per_symbol - 1 - b)) & 1U);
  return out;
}

std::size_t Constellation::index_of(std::span<const std::uint8_t> bits) const {
  require(bits.size() == bits_per_symbol, "index_of: wrong bit count");
  std::size_t idx = 0;
  for (std::uint8_t b : bits) idx = (idx << 1) | (b & 1U);
  return idx;
}

Constellation gray_qam(std::size_t m) {
  if (m != 4 && m != 16 && m != 64) throw DomainError("gray_qam: order must be 4, 16 or 64");
  const std::size_t half_bits = static_cast<std::size_t>(std::countr_zero(m)) / 2;
  const std::size_t levels = std::size_t{1} << half_bits;
  // Mean energy of levels {+-1, +-3, ...} per axis is (L^2 - 1) / 3.
  const double scale = 1.0 / std::sqrt(2.0 * (static_cast<double>(levels * levels) - 1.0) / 3.0);

  // level_of_label[g] = amplitude whose Gray label is g.
  std::vector<double> level_of_label(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    const std::size_t gray = i ^ (i >> 1);
    level_of_label[gray] = (2.0 * static_cast<double>(i) - static_cast<double>(levels - 1)) * scale;
  }

  Constellation c;
  c.m = m;
  c.bits_per_symbol = 2 * half_bits;
  c.points.resize(m);
  for (std::size_t idx = 0; idx < m; ++idx) {
    const std::size_t gi = idx >> half_bits;
    const std::size_t gq = idx & (levels - 1);
    c.points[idx] = {level_of_label[gi], level_of_label[gq]};
  }
  return c;
}

Constellation constellation_from_name(const std::string& name) {
  if (name == "4qam" || name == "qpsk") return gray_qam(4);
  if (name == "16qam") return gray_qam(16);
  if (name == "64qam") return gray_qam(64);
  throw DomainError("unknown modulation '" + name + "'");
}

std::string constellation_name(const Constellation& c) {
  return std::to_string(c.m) + "qam";
}

double ebn0_to_sigma2(double ebn0_db, std::size_t m) {
  require(m >= 4, "ebn0_to_sigma2: order must be at least 4");
  return 1.0 / (std::log2(static_cast<double>(m)) * std::pow(10.0, ebn0_db / 10.0));
}

double snr_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double ebn0_to_snr_db(double ebn0_db, std::size_t m) {
  require(m >= 4, "ebn0_to_snr_db: order must be at least 4");
  return ebn0_db + 10.0 * std::log10(std::log2(static_cast<double>(m)));
}

Complex pilot_symbol() { return gray_qam(4).points.front(); }

std::size_t ml_detect(Complex y, Complex h_hat, const Constellation& c) {
  if (h_hat == Complex{0.0, 0.0}) throw DomainError("ml_detect: degenerate channel estimate");
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const double cost = std::norm(y - h_hat * c.points[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return best;
}

Modulated modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
  if (bits.size() % c.bits_per_symbol != 0)
    throw DomainError("modulate: bit count not a multiple of log2(m)");
  Modulated out;
  const std::size_t n = bits.size() / c.bits_per_symbol;
  out.indices.reserve(n);
  out.symbols.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t idx = c.index_of(bits.subspan(s * c.bits_per_symbol, c.bits_per_symbol));
    out.indices.push_back(idx);
    out.symbols.push_back(c.points[idx]);
  }
  return out;
}

Bits demap(std::span<const std::size_t> indices, const Constellation& c) {
  Bits out;
  out.reserve(indices.size() * c.bits_per_symbol);
  for (std::size_t idx : indices) {
    require(idx < c.m, "demap: index out of range");
    const Bits b = c.bits_of(idx);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

Bits random_bits(std::size_t n, Rng& rng) {
  Bits out(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng.next_u64();
    out[i] = static_cast<std::uint8_t>(word & 1U);
    word >>= 1;
  }
  return out;
}

double rayleigh_qpsk_ber(double ebn0_db) {
  const double g = std::pow(10.0, ebn0_db / 10.0);
  return 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
}

}  // namespace fadecast
