// SPDX-License-Identifier: Apache-2.0
#include "fadecast/fading.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fadecast/error.hpp"

namespace fadecast {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinBinsPerSide = 128;
constexpr std::size_t kMaxFftLength = std::size_t{1} << 22;

std::size_t fft_length(std::size_t n, double nu) {
  std::size_t want = n;
  if (nu > 0.0) {
    const double bins = std::ceil(static_cast<double>(kMinBinsPerSide) / nu);
    if (bins < static_cast<double>(kMaxFftLength))
      want = std::max(want, static_cast<std::size_t>(bins));
    else
      want = std::max(want, kMaxFftLength);
  }
  return std::bit_ceil(std::max<std::size_t>(want, 2));
}

double jakes_cdf(double f, double fd) {
  const double r = std::clamp(f / fd, -1.0, 1.0);
  return 0.5 + std::asin(r) / kPi;
}

// Shaped spectrum -> time series of length len, unit mean power.
std::vector<Complex> smith_buffer(std::size_t len, double nu, Rng& rng) {
  std::vector<Complex> spec(len);
  const double df = 1.0 / static_cast<double>(len);
  for (std::size_t k = 0; k < len; ++k) {
    // Signed bin frequency in cycles per sample.
    const double f = (k < len / 2 ? static_cast<double>(k)
                                  : static_cast<double>(k) - static_cast<double>(len)) *
                     df;
    double mass;
    if (nu <= 0.0)
      mass = (k == 0) ? 1.0 : 0.0;
    else
      mass = jakes_mass(f - 0.5 * df, f + 0.5 * df, nu);
    const Complex g = rng.complex_gaussian();
    spec[k] = std::sqrt(mass) * g;
  }

  std::vector<Complex> out(len);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(len),
                                    reinterpret_cast<fftw_complex*>(spec.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  double power = 0.0;
  for (const Complex& v : out) power += std::norm(v);
  power /= static_cast<double>(len);
  const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;
  for (Complex& v : out) v *= scale;
  return out;
}

void check_doppler_grid(double doppler_hz, double sample_period_s) {
  if (!(doppler_hz >= 0.0) || !(sample_period_s > 0.0))
    throw ConfigError("fading: need f_D >= 0 and T_s > 0");
  if (doppler_hz * sample_period_s >= 0.5)
    throw ConfigError("fading: f_D * T_s must be below 0.5 (Doppler beyond Nyquist)");
}

}  // namespace

double max_doppler(double speed_mps, double carrier_hz) {
  if (!(speed_mps >= 0.0)) throw DomainError("max_doppler: negative speed");
  if (!(carrier_hz > 0.0)) throw DomainError("max_doppler: carrier must be positive");
  return carrier_hz * speed_mps / kSpeedOfLight;
}

double bessel_j0(double x) {
  x = std::fabs(x);
  if (x <= 12.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= -q / (static_cast<double>(k) * k);
      sum += term;
      if (std::fabs(term) < 1e-17 * std::max(1.0, std::fabs(sum))) break;
    }
    return sum;
  }
  // Hankel expansion: a_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k).
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= odd * odd / (static_cast<double>(k) * 8.0 * x);
    if (a > prev) break;
    prev = a;
    // P takes a_0 - a_2 + a_4 ..., Q takes -a_1 + a_3 - a_5 ...
    switch (k % 4) {
      case 1: q -= a; break;
      case 2: p -= a; break;
      case 3: q += a; break;
      default: p += a; break;
    }
    if (a < 1e-17) break;
  }
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double jakes_acf(double delta_t, double doppler_hz) {
  if (!(doppler_hz >= 0.0)) throw DomainError("jakes_acf: negative Doppler");
  return bessel_j0(2.0 * kPi * doppler_hz * delta_t);
}

double jakes_psd(double f, double doppler_hz) {
  if (!(doppler_hz > 0.0)) throw DomainError("jakes_psd: Doppler must be positive");
  double r = std::fabs(f) / doppler_hz;
  if (r > 1.0) return 0.0;
  r = std::min(r, 1.0 - 1e-12);
  return 1.0 / (kPi * doppler_hz * std::sqrt(1.0 - r * r));
}

double jakes_mass(double lo, double hi, double doppler_hz) {
  if (!(doppler_hz > 0.0)) throw DomainError("jakes_mass: Doppler must be positive");
  if (hi <= lo) return 0.0;
  return jakes_cdf(hi, doppler_hz) - jakes_cdf(lo, doppler_hz);
}

FadingProcess generate_fading(std::size_t n, double doppler_hz,
                              double sample_period_s, std::uint64_t seed) {
  require(n >= 1, "generate_fading: n must be at least 1");
  check_doppler_grid(doppler_hz, sample_period_s);
  const double nu = doppler_hz * sample_period_s;
  Rng rng(seed);
  std::vector<Complex> buf = smith_buffer(fft_length(n, nu), nu, rng);
  buf.resize(n);
  return FadingProcess{std::move(buf), doppler_hz, sample_period_s, seed};
}

void add_awgn(std::span<Complex> y, double sigma2, Rng& rng) {
  if (sigma2 <= 0.0) return;
  for (Complex& v : y) v += rng.complex_gaussian(sigma2);
}

std::vector<Complex> apply_channel(std::span<const Complex> x,
                                   const FadingProcess& h, double sigma2,
                                   std::uint64_t seed) {
  require(x.size() <= h.gains.size(), "apply_channel: more symbols than channel samples");
  require(sigma2 >= 0.0, "apply_channel: negative noise variance");
  std::vector<Complex> y(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = h.gains[t] * x[t];
  Rng rng(seed);
  add_awgn(y, sigma2, rng);
  return y;
}

FadingSource::FadingSource(double doppler_hz, double sample_period_s,
                           std::uint64_t seed)
    : doppler_hz_(doppler_hz), sample_period_s_(sample_period_s), seed_(seed) {
  check_doppler_grid(doppler_hz, sample_period_s);
  const double nu = doppler_hz * sample_period_s;
  gap_ = nu > 0.0 ? static_cast<std::size_t>(std::min(std::ceil(1.0 / nu), 1e7)) : 0;
}

std::vector<Complex> FadingSource::next(std::size_t n) {
  const double nu = doppler_hz_ * sample_period_s_;
  if (nu <= 0.0 || buffer_.empty() || cursor_ + n > buffer_.size()) {
    const std::size_t len = fft_length(n + gap_, nu);
    Rng rng(derive_seed(seed_, realization_++));
    buffer_ = smith_buffer(len, nu, rng);
    cursor_ = 0;
    gap_ = std::min(gap_, len / 4);
  }
  std::vector<Complex> out(buffer_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                           buffer_.begin() + static_cast<std::ptrdiff_t>(cursor_ + n));
  cursor_ += n + gap_;
  return out;
}

void TapProfile::validate() const {
  require(!delays_ns.empty(), "tap profile: empty");
  require(delays_ns.size() == powers_db.size(), "tap profile: delay/power length mismatch");
  require(delays_ns.front() == 0.0, "tap profile: first delay must be 0");
  for (std::size_t i = 1; i < delays_ns.size(); ++i)
    require(delays_ns[i] > delays_ns[i - 1], "tap profile: delays must be strictly increasing");
}

TapProfile epa_profile() {
  return {ProfileName::EPA,
          {0, 30, 70, 90, 110, 190, 410},
          {0, -1, -2, -3, -8, -17.2, -20.8}};
}

TapProfile eva_profile() {
  return {ProfileName::EVA,
          {0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
          {0, -1.5, -1.4, -3.6, -0.6, -9.1, -7, -12, -16.9}};
}

TapProfile etu_profile() {
  return {ProfileName::ETU,
          {0, 50, 120, 200, 230, 500, 1600, 2300, 5000},
          {-1, -1, -1, 0, 0, 0, -3, -5, -7}};
}

TapProfile parse_tap_profile(const std::string& text) {
  TapProfile p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("tap profile: expected delay_ns,power_db: " + line);
    try {
      p.delays_ns.push_back(std::stod(line.substr(0, comma)));
      p.powers_db.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw FormatError("tap profile: bad number in line: " + line);
    }
  }
  p.validate();
  return p;
}

TapProfile load_tap_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open tap profile " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tap_profile(ss.str());
}

GridTaps map_to_grid(const TapProfile& profile, double sample_period_s) {
  profile.validate();
  require(sample_period_s > 0.0, "map_to_grid: T_s must be positive");
  GridTaps g;
  double total = 0.0;
  for (std::size_t i = 0; i < profile.delays_ns.size(); ++i) {
    const auto d = static_cast<std::size_t>(std::llround(profile.delays_ns[i] * 1e-9 / sample_period_s));
    const double p = std::pow(10.0, profile.powers_db[i] / 10.0);
    total += p;
    if (!g.delays.empty() && g.delays.back() == d)
      g.powers.back() += p;
    else {
      g.delays.push_back(d);
      g.powers.push_back(p);
    }
  }
  for (double& p : g.powers) p /= total;
  return g;
}

MultipathChannel generate_multipath(const TapProfile& profile, double doppler_hz,
                                    double sample_period_s, std::size_t n,
                                    std::uint64_t seed) {
  MultipathChannel ch;
  ch.grid = map_to_grid(profile, sample_period_s);
  for (std::size_t l = 0; l < ch.grid.delays.size(); ++l) {
    // Tap 0 uses the caller's seed so a single-tap profile matches generate_fading.
    const std::uint64_t s = l == 0 ? seed : derive_seed(seed, l);
    FadingProcess tap = generate_fading(n, doppler_hz, sample_period_s, s);
    const double amp = std::sqrt(ch.grid.powers[l]);
    for (Complex& v : tap.gains) v *= amp;
    ch.taps.push_back(std::move(tap));
  }
  return ch;
}

std::size_t CoherenceRule::block_length(double doppler_hz) const {
  require(doppler_hz > 0.0, "coherence_block_length: Doppler must be positive");
  require(!anchors.empty(), "coherence_block_length: no anchors");
  auto k_at = [](const std::pair<double, std::size_t>& a) {
    return a.first * static_cast<double>(a.second);
  };
  double k;
  if (doppler_hz <= anchors.front().first) {
    k = k_at(anchors.front());
  } else if (doppler_hz >= anchors.back().first) {
    k = k_at(anchors.back());
  } else {
    std::size_t i = 1;
    while (anchors[i].first < doppler_hz) ++i;
    const auto& a = anchors[i - 1];
    const auto& b = anchors[i];
    const double w = (doppler_hz - a.first) / (b.first - a.first);
    k = (1.0 - w) * k_at(a) + w * k_at(b);
  }
  // Anchors are returned verbatim.
  for (const auto& a : anchors)
    if (a.first == doppler_hz) return a.second;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(k / doppler_hz)));
}

std::size_t coherence_block_length(double doppler_hz, const CoherenceRule& rule) {
  return rule.block_length(doppler_hz);
}

}  // namespace fadecast
