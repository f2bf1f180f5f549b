// SPDX-License-Identifier: Apache-2.0
#include "fadecast/receiver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fadecast/error.hpp"
#include "fadecast/parallel.hpp"

namespace fadecast {
namespace {

using Index = Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

// Shared body of the fixed, adaptive and 1:k receivers.
ReceiverReport simulate_blocks(const PredictorNet& net, const Constellation& c, double doppler_hz,
                               double ebn0_db, std::size_t n_c, std::size_t k,
                               const SimOptions& opt, std::size_t max_iterations) {
  const FrameLayout layout{net.window_n, n_c, k};
  layout.validate();
  const std::size_t n_p = layout.n_p;
  const double sigma2 = ebn0_to_sigma2(ebn0_db, c.m);
  const double sd = std::sqrt(sigma2);
  const double dt = block_period(doppler_hz, opt.symbol_period_s);
  const Complex pilot = pilot_symbol();
  const std::size_t data_len = k * n_c;
  const std::size_t bps = c.bits_per_symbol;

  return run_chunks(opt, [&](std::size_t chunk, std::size_t count) {
    const std::uint64_t seed = derive_seed(opt.seed, chunk);
    FadingSource source(doppler_hz, dt, seed);
    Rng rng(derive_seed(seed, 1));

    std::vector<std::vector<Complex>> h(count), y(count);
    std::vector<std::vector<std::size_t>> sent(count);
    ComplexMatrix window(ix(n_p), ix(count));
    for (std::size_t j = 0; j < count; ++j) {
      h[j] = source.next(n_p + data_len);
      y[j].resize(n_p + data_len);
      sent[j].resize(data_len);
      for (std::size_t t = 0; t < n_p; ++t) y[j][t] = h[j][t] * pilot + sd * rng.complex_gaussian(1.0);
      for (std::size_t i = 0; i < data_len; ++i) {
        sent[j][i] = static_cast<std::size_t>(rng.below(c.m));
        y[j][n_p + i] = h[j][n_p + i] * c.points[sent[j][i]] + sd * rng.complex_gaussian(1.0);
      }
      for (std::size_t t = 0; t < n_p; ++t) window(ix(t), ix(j)) = lmmse(y[j][t], pilot, sigma2).value;
    }

    std::vector<std::uint64_t> errors(count, 0);
    std::vector<double> sq_err(count, 0.0);
    std::uint64_t failures = 0;
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t base = n_p + b * n_c;
      ComplexMatrix est;
      if (!opt.perfect_csi) est = predict_batch(net, window, n_c);
      for (std::size_t j = 0; j < count; ++j) {
        std::vector<std::size_t> decided(n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
          const Complex truth = h[j][base + i];
          const Complex g = opt.perfect_csi ? truth : est(ix(i), ix(j));
          decided[i] = ml_detect(y[j][base + i], g, c);
          sq_err[j] += std::norm(g - truth);
        }
        if (b + 1 < k) {
          auto refined = refine_until_stable(std::span(y[j]).subspan(base, n_c), std::move(decided), c,
                                             sigma2, max_iterations, base);
          if (!refined.converged) ++failures;
          decided = std::move(refined.decisions);
          // Shift the newest refined estimates into the predictor window.
          std::vector<Complex> hist(n_p + n_c);
          for (std::size_t t = 0; t < n_p; ++t) hist[t] = window(ix(t), ix(j));
          for (std::size_t i = 0; i < n_c; ++i) hist[n_p + i] = refined.estimates[i].value;
          for (std::size_t t = 0; t < n_p; ++t) window(ix(t), ix(j)) = hist[n_c + t];
        }
        for (std::size_t i = 0; i < n_c; ++i)
          errors[j] += static_cast<std::uint64_t>(std::popcount(sent[j][b * n_c + i] ^ decided[i]));
      }
    }

    ReceiverReport r;
    for (std::size_t j = 0; j < count; ++j)
      r.add_trial(data_len * bps, errors[j],
                  opt.perfect_csi ? -1.0 : sq_err[j] / static_cast<double>(data_len),
                  static_cast<double>(n_c), data_len, n_p + data_len);
    r.convergence_failures = failures;
    return r;
  });
}

}  // namespace

void FrameLayout::validate() const {
  require(n_p >= 1 && n_c >= 1 && k >= 1, "frame layout: n_p, n_c and k must be positive");
}

double efficiency(const FrameLayout& layout) {
  layout.validate();
  const double data = static_cast<double>(layout.k * layout.n_c);
  return data / (static_cast<double>(layout.n_p) + data);
}

void ReceiverReport::add_trial(std::uint64_t bits, std::uint64_t errors, double trial_mse,
                               double n_c, std::uint64_t data, std::uint64_t uses) {
  ++trials;
  bits_sent += bits;
  bit_errors += errors;
  const double b = bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
  trial_ber_sum += b;
  trial_ber_sq += b * b;
  if (trial_mse >= 0.0) {
    ++mse_trials;
    trial_mse_sum += trial_mse;
    trial_mse_sq += trial_mse * trial_mse;
  }
  n_c_sum += n_c;
  data_symbols += data;
  channel_uses += uses;
}

void ReceiverReport::merge(const ReceiverReport& o) {
  bits_sent += o.bits_sent;
  bit_errors += o.bit_errors;
  trials += o.trials;
  convergence_failures += o.convergence_failures;
  discarded_trials += o.discarded_trials;
  trial_ber_sum += o.trial_ber_sum;
  trial_ber_sq += o.trial_ber_sq;
  trial_mse_sum += o.trial_mse_sum;
  trial_mse_sq += o.trial_mse_sq;
  mse_trials += o.mse_trials;
  n_c_sum += o.n_c_sum;
  data_symbols += o.data_symbols;
  channel_uses += o.channel_uses;
}

void ReceiverReport::finalize() {
  auto stderr_of = [](double sum, double sq, double n) {
    if (n < 2.0) return 0.0;
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) / n);
  };
  const double t = static_cast<double>(trials);
  ber = bits_sent ? static_cast<double>(bit_errors) / static_cast<double>(bits_sent) : 0.0;
  ber_stderr = stderr_of(trial_ber_sum, trial_ber_sq, t);
  const double mt = static_cast<double>(mse_trials);
  prediction_mse = mse_trials ? trial_mse_sum / mt : 0.0;
  mse_stderr = stderr_of(trial_mse_sum, trial_mse_sq, mt);
  efficiency = channel_uses ? static_cast<double>(data_symbols) / static_cast<double>(channel_uses) : 0.0;
  n_c_mean = trials ? n_c_sum / t : 0.0;
}

ReceiverReport run_chunks(const SimOptions& opt,
                          const std::function<ReceiverReport(std::size_t, std::size_t)>& chunk) {
  require(opt.trials >= 1, "simulation: at least one trial");
  const std::size_t total = (opt.trials + kTrialChunk - 1) / kTrialChunk;
  auto count_of = [&](std::size_t c) { return std::min(kTrialChunk, opt.trials - c * kTrialChunk); };
  const std::size_t jobs = opt.jobs == 0 ? default_jobs() : opt.jobs;
  const std::size_t wave = opt.min_bit_errors == 0 ? total : std::max<std::size_t>(jobs, 1);

  ReceiverReport merged;
  for (std::size_t start = 0; start < total; start += wave) {
    const std::size_t n = std::min(wave, total - start);
    std::vector<ReceiverReport> parts(n);
    parallel_for(n, jobs, [&](std::size_t i) { parts[i] = chunk(start + i, count_of(start + i)); });
    for (const auto& p : parts) {
      merged.merge(p);
      if (opt.min_bit_errors > 0 && merged.bit_errors >= opt.min_bit_errors) {
        merged.finalize();
        return merged;
      }
    }
  }
  merged.finalize();
  return merged;
}

double block_period(double doppler_hz, double symbol_period_s) {
  return static_cast<double>(coherence_block_length(doppler_hz)) * symbol_period_s;
}

ReceiverReport run_fixed(const PredictorNet& net, const Constellation& c, double doppler_hz,
                         double ebn0_db, std::size_t n_preds, const SimOptions& opt) {
  return simulate_blocks(net, c, doppler_hz, ebn0_db, n_preds, 1, opt, 0);
}

std::size_t adaptive_horizon(const MseLookupTable& lut, const Constellation& c, double doppler_hz,
                             double ebn0_db) {
  const double sigma2 = ebn0_to_sigma2(ebn0_db, c.m);
  return select_n(lut, ebn0_to_snr_db(ebn0_db, c.m), doppler_hz,
                  lmmse_target_mse(sigma2, pilot_symbol()));
}

ReceiverReport run_adaptive(const PredictorNet& net, const MseLookupTable& lut,
                            const Constellation& c, double doppler_hz, double ebn0_db,
                            const SimOptions& opt) {
  check_fingerprint(lut, net);
  return simulate_blocks(net, c, doppler_hz, ebn0_db, adaptive_horizon(lut, c, doppler_hz, ebn0_db),
                         1, opt, 0);
}

ReceiverReport run_data_driven(const PredictorNet& net, const MseLookupTable& lut,
                               const Constellation& c, double doppler_hz, double ebn0_db,
                               std::size_t k, const SimOptions& opt, std::size_t max_iterations) {
  require(k >= 1, "run_data_driven: k must be positive");
  require(max_iterations >= 1, "run_data_driven: need at least one iteration");
  check_fingerprint(lut, net);
  return simulate_blocks(net, c, doppler_hz, ebn0_db, adaptive_horizon(lut, c, doppler_hz, ebn0_db),
                         k, opt, max_iterations);
}

std::vector<ChannelEstimate> refine_estimates(std::span<const Complex> y,
                                              std::span<const Complex> decoded, double sigma2,
                                              std::size_t first_index) {
  require(y.size() == decoded.size(), "refine_estimates: length mismatch");
  std::vector<ChannelEstimate> out;
  out.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out.push_back(lmmse(y[i], decoded[i], sigma2, first_index + i, EstimateSource::DataRefined));
  return out;
}

RefinedBlock refine_until_stable(std::span<const Complex> y, std::vector<std::size_t> decisions,
                                 const Constellation& c, double sigma2, std::size_t max_iterations,
                                 std::size_t first_index) {
  require(y.size() == decisions.size(), "refine_until_stable: length mismatch");
  RefinedBlock out;
  std::vector<Complex> symbols(y.size());
  while (out.iterations < max_iterations) {
    for (std::size_t i = 0; i < y.size(); ++i) symbols[i] = c.points[decisions[i]];
    out.estimates = refine_estimates(y, symbols, sigma2, first_index);
    ++out.iterations;
    std::vector<std::size_t> again(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const Complex g = out.estimates[i].value;
      // A zero observation gives no information; keep the decision.
      again[i] = g == Complex{} ? decisions[i] : ml_detect(y[i], g, c);
    }
    if (again == decisions) {
      out.converged = true;
      break;
    }
    decisions = std::move(again);
  }
  out.decisions = std::move(decisions);
  return out;
}

}  // namespace fadecast
