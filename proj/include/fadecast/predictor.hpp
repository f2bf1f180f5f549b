// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fadecast/estimation.hpp"
#include "fadecast/fading.hpp"
#include "fadecast/nn.hpp"

namespace fadecast {

using ComplexMatrix = Eigen::MatrixXcd;

enum class Preset { Paper, Desk };

/// Training hyperparameters. Defaults are the paper preset.
///
/// `batches_per_epoch` counts training sequences visited per epoch,
/// processed in mini-batches of `batch_size` with gradients averaged
/// over the mini-batch. The plateau and early-stop counters advance once
/// per epoch.
struct TrainingConfig {
  double start_lr = 0.01;
  double min_lr = 1e-8;
  std::size_t min_epochs = 200;
  std::size_t max_epochs = 1000;
  std::size_t batches_per_epoch = 4500;
  std::size_t batch_size = 32;
  double teacher_force_p = 0.2;
  std::size_t plateau_patience = 10;
  double plateau_factor = 10.0;
  std::size_t early_stop_patience = 50;
  // Relative loss reduction that counts as an improvement.
  double improvement_threshold = 1e-3;
  // While the learning rate sits below start_lr, an epoch loss above
  // plateau * (1 + reset_tolerance) restores start_lr, where plateau is the
  // mean loss over the patience window at the first reduction.
  double reset_tolerance = 0.5;
  std::size_t horizon = 100;
  std::size_t window = 10;
  std::size_t hidden = 100;
  std::size_t layers = 1;
  double validation_fraction = 0.1;
  double doppler_hz = 10.0;
  double symbol_period_s = kDefaultSymbolPeriod;
  // Input-noise augmentation; off when not finite.
  double noise_snr_db = std::numeric_limits<double>::infinity();
  bool teacher_forcing = true;
  bool lr_schedule = true;
  bool early_stop = true;
  std::uint64_t seed = 1;

  static TrainingConfig preset(Preset p);
  /// Teacher forcing, plateau schedule and early stop all switched off.
  TrainingConfig without_enhancements() const;
  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

Preset preset_from_name(const std::string& name);

/// Flat `key=value` text, one field per line, `#` comments allowed. Keys
/// are the TrainingConfig field names; unknown keys throw ConfigError.
TrainingConfig parse_training_config(const std::string& text, TrainingConfig base = {});
std::string format_training_config(const TrainingConfig& c);

/// Training sequences, one per column: rows [0, window) are the input
/// window, rows [window, window + horizon) the targets, oldest first.
struct SequenceSet {
  std::size_t window = 10;
  std::size_t horizon = 100;
  nn::Matrix real;
  nn::Matrix imag;

  std::size_t size() const { return static_cast<std::size_t>(real.cols()); }
  auto inputs(const nn::Matrix& part) const { return part.topRows(static_cast<Eigen::Index>(window)); }
  auto targets(const nn::Matrix& part) const { return part.bottomRows(static_cast<Eigen::Index>(horizon)); }
  /// Columns picked by index, in the given order.
  SequenceSet select(std::span<const std::size_t> cols) const;
};

/// `count` sequences of window + horizon fading samples taken one per
/// coherence block (sample period = block_symbols * T_s, with
/// block_symbols = coherence_block_length(f_D) when 0), drawn as disjoint
/// segments of independent realizations.
SequenceSet make_dataset(double doppler_hz, std::size_t count, std::uint64_t seed,
                         std::size_t window = 10, std::size_t horizon = 100,
                         double symbol_period_s = kDefaultSymbolPeriod,
                         std::size_t block_symbols = 0);

/// Seed-fixed disjoint split; the first result holds `1 - fraction`.
std::pair<SequenceSet, SequenceSet> split_dataset(const SequenceSet& all, double fraction,
                                                  std::uint64_t seed);

/// Paired real/imaginary predictors sharing one architecture.
struct PredictorNet {
  nn::SequenceNet real_net;
  nn::SequenceNet imag_net;
  std::size_t window_n = 10;
  double trained_doppler_hz = 10.0;
  TrainingConfig config;

  PredictorNet() = default;
  PredictorNet(const nn::NetShape& shape, std::size_t window, double doppler_hz);
};

/// Feeds the estimates (oldest first) and returns n_preds predictions, each
/// fed back as the next input. Throws DomainError unless estimates.size()
/// equals window_n and n_preds >= 1.
std::vector<Complex> predict(const PredictorNet& net, std::span<const Complex> estimates,
                             std::size_t n_preds);
std::vector<Complex> predict(const PredictorNet& net,
                             std::span<const ChannelEstimate> estimates, std::size_t n_preds);

/// Batched predict: one window per column (window_n x batch); returns
/// n_preds x batch.
ComplexMatrix predict_batch(const PredictorNet& net, const ComplexMatrix& windows,
                            std::size_t n_preds);

enum class StopReason { EarlyStop, MaxEpochs };
std::string stop_reason_name(StopReason r);

struct TrainingReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> lr;
  StopReason stop = StopReason::MaxEpochs;
  std::size_t epochs() const { return train_loss.size(); }
};

struct TrainResult {
  PredictorNet net;
  TrainingReport report;
};

/// Called after every epoch with the epoch index (0-based) and the report
/// so far.
using EpochCallback = std::function<void(std::size_t, const TrainingReport&)>;

/// Trains the real and imaginary networks in one loop. Throws
/// DivergenceError (message carries the epoch) on a non-finite loss.
TrainResult train(const TrainingConfig& config, const SequenceSet& training,
                  const SequenceSet& validation, const EpochCallback& on_epoch = {});

/// Generates the dataset described by the config, splits it and trains.
TrainResult train(const TrainingConfig& config, const EpochCallback& on_epoch = {});

/// Mean squared error of free-running predictions over both networks,
/// i.e. the MSE of the concatenated real and imaginary outputs. Throws
/// DomainError on an empty set.
double validate(const PredictorNet& net, const SequenceSet& held_out);

/// Versioned little-endian binary model file. save(load(x)) == x.
void save_model(const PredictorNet& net, std::ostream& out);
PredictorNet load_model(std::istream& in);
void save_model(const PredictorNet& net, const std::string& path);
PredictorNet load_model(const std::string& path);

/// 64-bit FNV-1a over shape and both parameter vectors.
std::uint64_t model_fingerprint(const PredictorNet& net);
std::string fingerprint_hex(std::uint64_t fp);

}  // namespace fadecast
