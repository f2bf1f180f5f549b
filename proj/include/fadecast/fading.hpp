// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fadecast/rng.hpp"

namespace fadecast {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Symbol period used when a caller does not supply one (100 ns, i.e.
/// 10 Msymbol/s).
inline constexpr double kDefaultSymbolPeriod = 1e-7;

/// Maximum Doppler shift f_c * v / c.
double max_doppler(double speed_mps, double carrier_hz);

/// Bessel function of the first kind, order zero. Power series for
/// |x| <= 12, Hankel asymptotic expansion beyond; absolute error < 1e-10.
double bessel_j0(double x);

/// Clarke/Jakes autocorrelation J0(2 pi f_D dt).
double jakes_acf(double delta_t, double doppler_hz);

/// Jakes power spectral density. Zero outside [-f_D, f_D]. At |f| = f_D the
/// density is singular; the ratio |f|/f_D is clamped to 1 - 1e-12 so a
/// large finite value is returned instead.
double jakes_psd(double f, double doppler_hz);

/// Probability mass of the Jakes spectrum on [lo, hi] (arcsine CDF).
double jakes_mass(double lo, double hi, double doppler_hz);

/// A sampled, unit-power fading realization.
struct FadingProcess {
  std::vector<Complex> gains;
  double doppler_hz = 0.0;
  double sample_period_s = 0.0;
  std::uint64_t seed = 0;
};

/// Smith's spectral method: complex Gaussian frequency bins shaped by the
/// square root of the Jakes mass in each bin, inverse FFT, then scaled to
/// unit mean power over the generated buffer.
///
/// The FFT length is the next power of two covering both n and enough bins
/// to resolve the Doppler band (at least 128 per side, capped at 2^22);
/// the first n samples are returned. Throws ConfigError unless
/// f_D * T_s < 0.5.
FadingProcess generate_fading(std::size_t n, double doppler_hz,
                              double sample_period_s, std::uint64_t seed);

/// y(t) = h(t) x(t) + n(t), n ~ CN(0, sigma2).
std::vector<Complex> apply_channel(std::span<const Complex> x,
                                   const FadingProcess& h, double sigma2,
                                   std::uint64_t seed);

/// Adds CN(0, sigma2) noise in place.
void add_awgn(std::span<Complex> y, double sigma2, Rng& rng);

/// Hands out disjoint segments of long fading realizations.
///
/// Generating one FFT buffer per trial is wasteful when the Doppler is far
/// below the sample rate, so trials draw consecutive segments from a shared
/// realization separated by a guard gap; a new realization (with a derived
/// seed) is generated when the current one runs out.
class FadingSource {
public:
  FadingSource(double doppler_hz, double sample_period_s, std::uint64_t seed);

  /// Next segment of length n.
  std::vector<Complex> next(std::size_t n);

  double doppler_hz() const { return doppler_hz_; }
  double sample_period_s() const { return sample_period_s_; }

private:
  double doppler_hz_;
  double sample_period_s_;
  std::uint64_t seed_;
  std::uint64_t realization_ = 0;
  std::size_t gap_;
  std::size_t cursor_ = 0;
  std::vector<Complex> buffer_;
};

enum class ProfileName { EPA, EVA, ETU, Custom };

/// Power-delay profile of a tapped-delay-line channel.
struct TapProfile {
  ProfileName name = ProfileName::Custom;
  std::vector<double> delays_ns;
  std::vector<double> powers_db;

  /// Throws DomainError on empty/unequal lists, a nonzero first delay, or
  /// delays that are not strictly increasing.
  void validate() const;
};

/// 3GPP extended pedestrian A.
TapProfile epa_profile();
/// 3GPP extended vehicular A.
TapProfile eva_profile();
/// 3GPP extended typical urban.
TapProfile etu_profile();

/// Parses `delay_ns,power_db` lines; blank lines and `#` comments skipped.
TapProfile parse_tap_profile(const std::string& text);
TapProfile load_tap_profile(const std::string& path);

/// Taps after mapping to the symbol grid: integer delays with normalized
/// linear powers summing to one.
struct GridTaps {
  std::vector<std::size_t> delays;
  std::vector<double> powers;
};

/// Rounds each delay to the nearest multiple of T_s and merges taps that
/// land on the same sample by adding their linear powers.
GridTaps map_to_grid(const TapProfile& profile, double sample_period_s);

struct MultipathChannel {
  GridTaps grid;
  std::vector<FadingProcess> taps;  // taps[l] scaled to E|h_l|^2 = powers[l]
};

/// One independent fading process per grid tap.
MultipathChannel generate_multipath(const TapProfile& profile,
                                    double doppler_hz, double sample_period_s,
                                    std::size_t n, std::uint64_t seed);

/// Symbols per coherence block as a function of Doppler.
///
/// The rule is anchored at (50 Hz, 42) and (100 Hz, 11). With K = count *
/// Doppler at each anchor, K is held constant below the first anchor and
/// above the last, and interpolated linearly in Doppler between anchors;
/// the block length is round(K / f_D), at least 1.
struct CoherenceRule {
  std::vector<std::pair<double, std::size_t>> anchors{{50.0, 42}, {100.0, 11}};

  std::size_t block_length(double doppler_hz) const;
};

std::size_t coherence_block_length(double doppler_hz,
                                   const CoherenceRule& rule = {});

}  // namespace fadecast
