// SPDX-License-Identifier: Apache-2.0
#include "fadecast/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fadecast/error.hpp"
#include "fadecast/estimation.hpp"
#include "fadecast/modem.hpp"
#include "fadecast/parallel.hpp"

namespace fadecast {
namespace {

constexpr std::size_t kChunk = 128;

struct Moments {
  std::vector<double> sum, sum_sq;  // [n_index][snr]
};

}  // namespace

LutGrid LutGrid::standard() {
  LutGrid g;
  for (std::size_t n = 5; n <= 100; n += 5) g.n_grid.push_back(n);
  for (int d = 5; d <= 100; d += 5) g.doppler_hz.push_back(d);
  for (int s = -5; s <= 40; s += 5) g.snr_db.push_back(s);
  return g;
}

void LutGrid::validate() const {
  require(!n_grid.empty() && !doppler_hz.empty() && !snr_db.empty(), "lut grid: empty axis");
  require(n_grid.front() >= 1, "lut grid: horizons must be positive");
  require(std::is_sorted(n_grid.begin(), n_grid.end()) &&
              std::adjacent_find(n_grid.begin(), n_grid.end()) == n_grid.end(),
          "lut grid: horizons must be strictly increasing");
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  require(increasing(doppler_hz) && increasing(snr_db), "lut grid: axes must be strictly increasing");
  require(doppler_hz.front() > 0.0, "lut grid: Doppler must be positive");
}

MseLookupTable build_lut(const PredictorNet& net, const LutGrid& grid, const LutOptions& opt) {
  grid.validate();
  require(opt.trials >= 100, "build_lut: at least 100 trials per cell");
  const std::size_t nd = grid.doppler_hz.size(), ns = grid.snr_db.size(), nn_ = grid.n_grid.size();
  const std::size_t horizon = grid.n_grid.back();
  const std::size_t w = net.window_n;
  const std::size_t chunks = (opt.trials + kChunk - 1) / kChunk;
  const Complex pilot = pilot_symbol();

  std::vector<Moments> parts(nd * chunks);
  parallel_for(nd * chunks, opt.jobs, [&](std::size_t task) {
    const std::size_t d = task / chunks, chunk = task % chunks;
    const std::size_t count = std::min(kChunk, opt.trials - chunk * kChunk);
    const double fd = grid.doppler_hz[d];
    const double dt = static_cast<double>(coherence_block_length(fd)) * opt.symbol_period_s;
    const std::uint64_t seed = derive_seed(derive_seed(opt.seed, d), chunk);
    FadingSource source(fd, dt, seed);
    Rng noise_rng(derive_seed(seed, 0x6e6f697365));

    std::vector<std::vector<Complex>> h(count);
    ComplexMatrix unit_noise(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) {
      h[j] = source.next(w + horizon);
      for (std::size_t t = 0; t < w; ++t)
        unit_noise(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = noise_rng.complex_gaussian(1.0);
    }

    Moments& m = parts[task];
    m.sum.assign(nn_ * ns, 0.0);
    m.sum_sq.assign(nn_ * ns, 0.0);
    ComplexMatrix windows(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(count));
    for (std::size_t s = 0; s < ns; ++s) {
      const double sigma2 = snr_to_sigma2(grid.snr_db[s]);
      const double sd = std::sqrt(sigma2);
      for (std::size_t j = 0; j < count; ++j)
        for (std::size_t t = 0; t < w; ++t) {
          const auto ti = static_cast<Eigen::Index>(t), ji = static_cast<Eigen::Index>(j);
          const Complex y = h[j][t] * pilot + sd * unit_noise(ti, ji);
          windows(ti, ji) = lmmse(y, pilot, sigma2).value;
        }
      const ComplexMatrix pred = predict_batch(net, windows, horizon);
      for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        std::size_t next = 0;
        for (std::size_t k = 0; k < horizon && next < nn_; ++k) {
          acc += std::norm(pred(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) - h[j][w + k]);
          if (k + 1 == grid.n_grid[next]) {
            const double v = acc / static_cast<double>(k + 1);
            m.sum[next * ns + s] += v;
            m.sum_sq[next * ns + s] += v * v;
            ++next;
          }
        }
      }
    }
  });

  MseLookupTable lut;
  lut.grid = grid;
  lut.trials = opt.trials;
  lut.fingerprint = model_fingerprint(net);
  lut.mse.assign(nn_ * nd * ns, 0.0);
  lut.stderr_mse.assign(nn_ * nd * ns, 0.0);
  const double t = static_cast<double>(opt.trials);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t i = 0; i < nn_ * ns; ++i) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t c = 0; c < chunks; ++c) {
        sum += parts[d * chunks + c].sum[i];
        sq += parts[d * chunks + c].sum_sq[i];
      }
      const double mean = sum / t;
      const double var = std::max(0.0, (sq - t * mean * mean) / (t - 1.0));
      const std::size_t n = i / ns, s = i % ns;
      lut.mse[lut.index(n, d, s)] = mean;
      lut.stderr_mse[lut.index(n, d, s)] = std::sqrt(var / t);
    }
  }
  return lut;
}

std::size_t nearest_index(const std::vector<double>& axis, double x) {
  require(!axis.empty(), "nearest_index: empty axis");
  std::size_t best = 0;
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (std::fabs(axis[i] - x) < std::fabs(axis[best] - x)) best = i;
  return best;
}

std::size_t select_n(const MseLookupTable& lut, double snr_db, double doppler_hz, double target_mse) {
  require(!lut.empty(), "select_n: empty lookup table");
  const std::size_t d = nearest_index(lut.grid.doppler_hz, doppler_hz);
  const std::size_t s = nearest_index(lut.grid.snr_db, snr_db);
  for (std::size_t i = lut.grid.n_grid.size(); i-- > 0;)
    if (lut.at(i, d, s) < target_mse) return lut.grid.n_grid[i];
  return lut.grid.n_grid.front();
}

void check_fingerprint(const MseLookupTable& lut, const PredictorNet& net) {
  const std::uint64_t fp = model_fingerprint(net);
  if (lut.fingerprint != fp)
    throw FingerprintMismatch("lookup table was built for model " + fingerprint_hex(lut.fingerprint) +
                              ", not " + fingerprint_hex(fp));
}

CsvTable lut_to_csv(const MseLookupTable& lut) {
  CsvTable t;
  t.comments = {"model_fingerprint=" + fingerprint_hex(lut.fingerprint),
                "trials=" + std::to_string(lut.trials)};
  t.columns = {"n", "doppler_hz", "snr_db", "mse", "stderr"};
  const auto& g = lut.grid;
  for (std::size_t i = 0; i < g.n_grid.size(); ++i)
    for (std::size_t d = 0; d < g.doppler_hz.size(); ++d)
      for (std::size_t s = 0; s < g.snr_db.size(); ++s)
        t.add_row({std::to_string(g.n_grid[i]), format_number(g.doppler_hz[d]),
                   format_number(g.snr_db[s]), format_number(lut.at(i, d, s)),
                   format_number(lut.stderr_at(i, d, s))});
  return t;
}

MseLookupTable lut_from_csv(const CsvTable& t) {
  const std::string fp = t.meta("model_fingerprint");
  if (fp.size() != 16 || fp.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw FormatError("lut: missing or malformed model_fingerprint comment");
  MseLookupTable lut;
  lut.fingerprint = std::stoull(fp, nullptr, 16);
  const std::string trials = t.meta("trials");
  lut.trials = trials.empty() ? 0 : static_cast<std::size_t>(std::stoull(trials));

  std::set<std::size_t> ns;
  std::set<double> ds, ss;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double n = t.number(r, "n");
    if (!(n >= 1.0) || n != std::floor(n)) throw FormatError("lut: bad horizon in row " + std::to_string(r + 1));
    ns.insert(static_cast<std::size_t>(n));
    ds.insert(t.number(r, "doppler_hz"));
    ss.insert(t.number(r, "snr_db"));
  }
  lut.grid.n_grid.assign(ns.begin(), ns.end());
  lut.grid.doppler_hz.assign(ds.begin(), ds.end());
  lut.grid.snr_db.assign(ss.begin(), ss.end());
  const std::size_t cells = ns.size() * ds.size() * ss.size();
  if (cells == 0 || t.rows.size() != cells) throw FormatError("lut: table is not a complete grid");
  lut.mse.assign(cells, std::nan(""));
  lut.stderr_mse.assign(cells, 0.0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto i = static_cast<std::size_t>(
        std::lower_bound(lut.grid.n_grid.begin(), lut.grid.n_grid.end(),
                         static_cast<std::size_t>(t.number(r, "n"))) - lut.grid.n_grid.begin());
    const auto d = static_cast<std::size_t>(
        std::lower_bound(lut.grid.doppler_hz.begin(), lut.grid.doppler_hz.end(), t.number(r, "doppler_hz")) -
        lut.grid.doppler_hz.begin());
    const auto s = static_cast<std::size_t>(
        std::lower_bound(lut.grid.snr_db.begin(), lut.grid.snr_db.end(), t.number(r, "snr_db")) -
        lut.grid.snr_db.begin());
    const std::size_t k = lut.index(i, d, s);
    if (!std::isnan(lut.mse[k])) throw FormatError("lut: duplicate cell in row " + std::to_string(r + 1));
    lut.mse[k] = t.number(r, "mse");
    lut.stderr_mse[k] = t.number(r, "stderr");
    if (!(lut.mse[k] >= 0.0)) throw FormatError("lut: negative or missing mse in row " + std::to_string(r + 1));
  }
  return lut;
}

}  // namespace fadecast
