// SPDX-License-Identifier: Apache-2.0
#include "fadecast/predictor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fadecast/error.hpp"

namespace fadecast {
namespace {

using nn::Matrix;
using nn::MaskMatrix;
using Index = Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  return d;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(std::stoull(v));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

struct Field {
  std::function<std::string(const TrainingConfig&)> get;
  std::function<void(TrainingConfig&, const std::string&, const std::string&)> set;
};

template <typename T>
Field field(T TrainingConfig::*member) {
  Field f;
  f.get = [member](const TrainingConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, double>)
      return format_double(c.*member);
    else if constexpr (std::is_same_v<T, bool>)
      return (c.*member) ? "true" : "false";
    else
      return std::to_string(c.*member);
  };
  f.set = [member](TrainingConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>)
      c.*member = parse_double(k, v);
    else if constexpr (std::is_same_v<T, bool>)
      c.*member = parse_bool(k, v);
    else
      c.*member = static_cast<T>(parse_size(k, v));
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& config_fields() {
  static const std::vector<std::pair<std::string, Field>> fields{
      {"start_lr", field(&TrainingConfig::start_lr)},
      {"min_lr", field(&TrainingConfig::min_lr)},
      {"min_epochs", field(&TrainingConfig::min_epochs)},
      {"max_epochs", field(&TrainingConfig::max_epochs)},
      {"batches_per_epoch", field(&TrainingConfig::batches_per_epoch)},
      {"batch_size", field(&TrainingConfig::batch_size)},
      {"teacher_force_p", field(&TrainingConfig::teacher_force_p)},
      {"plateau_patience", field(&TrainingConfig::plateau_patience)},
      {"plateau_factor", field(&TrainingConfig::plateau_factor)},
      {"early_stop_patience", field(&TrainingConfig::early_stop_patience)},
      {"improvement_threshold", field(&TrainingConfig::improvement_threshold)},
      {"reset_tolerance", field(&TrainingConfig::reset_tolerance)},
      {"horizon", field(&TrainingConfig::horizon)},
      {"window", field(&TrainingConfig::window)},
      {"hidden", field(&TrainingConfig::hidden)},
      {"layers", field(&TrainingConfig::layers)},
      {"validation_fraction", field(&TrainingConfig::validation_fraction)},
      {"doppler_hz", field(&TrainingConfig::doppler_hz)},
      {"symbol_period_s", field(&TrainingConfig::symbol_period_s)},
      {"noise_snr_db", field(&TrainingConfig::noise_snr_db)},
      {"teacher_forcing", field(&TrainingConfig::teacher_forcing)},
      {"lr_schedule", field(&TrainingConfig::lr_schedule)},
      {"early_stop", field(&TrainingConfig::early_stop)},
      {"seed", field(&TrainingConfig::seed)},
  };
  return fields;
}

nn::NetShape shape_of(const TrainingConfig& c) { return {1, c.hidden, c.layers, 1}; }

// Free-running rollout of both nets, returning the squared-error sum.
double rollout_error(const PredictorNet& net, const SequenceSet& set) {
  const std::size_t n = set.horizon;
  const Matrix yr = nn::rollout(net.real_net, set.inputs(set.real), n);
  const Matrix yi = nn::rollout(net.imag_net, set.inputs(set.imag), n);
  return (yr - set.targets(set.real)).squaredNorm() + (yi - set.targets(set.imag)).squaredNorm();
}

// Plateau / reset / early-stop bookkeeping, advanced once per epoch.
class Schedule {
public:
  explicit Schedule(const TrainingConfig& c) : c_(c), lr_(c.start_lr) {}

  double lr() const { return lr_; }

  // Returns true when training should stop.
  bool update(std::size_t epoch, double loss) {
    recent_.push_back(loss);
    if (recent_.size() > c_.plateau_patience) recent_.erase(recent_.begin());
    const bool improved =
        std::isinf(best_) || loss < best_ * (1.0 - c_.improvement_threshold);
    if (improved) {
      best_ = loss;
      stale_ = 0;
      last_improvement_ = epoch;
    } else {
      ++stale_;
    }
    if (c_.lr_schedule) {
      if (lr_ < c_.start_lr && loss > plateau_level_ * (1.0 + c_.reset_tolerance)) {
        lr_ = c_.start_lr;
        stale_ = 0;
      } else if (stale_ >= c_.plateau_patience) {
        if (lr_ >= c_.start_lr)
          plateau_level_ = std::accumulate(recent_.begin(), recent_.end(), 0.0) /
                           static_cast<double>(recent_.size());
        lr_ = std::max(lr_ / c_.plateau_factor, c_.min_lr);
        stale_ = 0;
      }
    }
    if (!c_.early_stop || epoch + 1 < c_.min_epochs) return false;
    if (lr_ > c_.min_lr * (1.0 + 1e-9)) {
      min_lr_since_ = epoch + 1;
      return false;
    }
    // The patience window starts once the floor is reached.
    const std::size_t since = std::max(last_improvement_, min_lr_since_);
    return epoch >= since + c_.early_stop_patience;
  }

private:
  const TrainingConfig& c_;
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  // Mean loss over the patience window when the rate first left start_lr.
  double plateau_level_ = std::numeric_limits<double>::infinity();
  std::vector<double> recent_;
  std::size_t stale_ = 0;
  std::size_t last_improvement_ = 0;
  std::size_t min_lr_since_ = 0;
};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("model file: truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[8] = {'F', 'C', 'S', 'T', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kModelVersion = 1;

std::string shape_bytes(const PredictorNet& net) {
  std::string s;
  const nn::NetShape& sh = net.real_net.shape();
  put_u64(s, sh.input_size);
  put_u64(s, sh.hidden_size);
  put_u64(s, sh.num_layers);
  put_u64(s, sh.output_size);
  put_u64(s, net.window_n);
  put_f64(s, net.trained_doppler_hz);
  return s;
}

void put_params(std::string& out, const nn::Vector& p) {
  for (Index i = 0; i < p.size(); ++i) put_f64(out, p[i]);
}

}  // namespace

TrainingConfig TrainingConfig::preset(Preset p) {
  TrainingConfig c;
  if (p == Preset::Desk) {
    c.batches_per_epoch = 500;
    c.min_epochs = 50;
    c.max_epochs = 250;
  }
  return c;
}

TrainingConfig TrainingConfig::without_enhancements() const {
  TrainingConfig c = *this;
  c.teacher_forcing = false;
  c.teacher_force_p = 0.0;
  c.lr_schedule = false;
  c.early_stop = false;
  return c;
}

void TrainingConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("training config: ") + what);
  };
  need(teacher_force_p >= 0.0 && teacher_force_p <= 1.0, "teacher_force_p must be in [0, 1]");
  need(min_lr > 0.0 && min_lr <= start_lr, "need 0 < min_lr <= start_lr");
  need(min_epochs <= max_epochs && max_epochs >= 1, "need 1 <= max_epochs and min_epochs <= max_epochs");
  need(batches_per_epoch >= 1 && batch_size >= 1, "batches_per_epoch and batch_size must be positive");
  need(plateau_factor > 1.0, "plateau_factor must exceed 1");
  need(improvement_threshold >= 0.0 && improvement_threshold < 1.0,
       "improvement_threshold must be in [0, 1)");
  need(reset_tolerance >= 0.0, "reset_tolerance must be non-negative");
  need(horizon >= 1 && window >= 1 && hidden >= 1 && layers >= 1, "sizes must be positive");
  need(validation_fraction > 0.0 && validation_fraction < 1.0, "validation_fraction must be in (0, 1)");
  need(doppler_hz >= 0.0 && symbol_period_s > 0.0, "need doppler_hz >= 0 and symbol_period_s > 0");
  need(!std::isnan(noise_snr_db), "noise_snr_db must not be NaN");
}

Preset preset_from_name(const std::string& name) {
  if (name == "paper") return Preset::Paper;
  if (name == "desk") return Preset::Desk;
  throw ConfigError("unknown preset '" + name + "' (expected paper or desk)");
}

TrainingConfig parse_training_config(const std::string& text, TrainingConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& fields = config_fields();
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const auto& f) { return f.first == key; });
    if (it == fields.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(base, key, value);
  }
  return base;
}

std::string format_training_config(const TrainingConfig& c) {
  std::string out;
  for (const auto& [name, f] : config_fields()) out += name + "=" + f.get(c) + "\n";
  return out;
}

SequenceSet SequenceSet::select(std::span<const std::size_t> cols) const {
  SequenceSet out{window, horizon, Matrix(real.rows(), ix(cols.size())),
                  Matrix(imag.rows(), ix(cols.size()))};
  for (std::size_t j = 0; j < cols.size(); ++j) {
    require(cols[j] < size(), "SequenceSet::select: column out of range");
    out.real.col(ix(j)) = real.col(ix(cols[j]));
    out.imag.col(ix(j)) = imag.col(ix(cols[j]));
  }
  return out;
}

SequenceSet make_dataset(double doppler_hz, std::size_t count, std::uint64_t seed,
                         std::size_t window, std::size_t horizon, double symbol_period_s,
                         std::size_t block_symbols) {
  require(count >= 1, "make_dataset: count must be positive");
  require(window >= 1 && horizon >= 1, "make_dataset: window and horizon must be positive");
  if (block_symbols == 0) block_symbols = coherence_block_length(doppler_hz);
  const double dt = static_cast<double>(block_symbols) * symbol_period_s;
  const std::size_t len = window + horizon;
  SequenceSet set{window, horizon, Matrix(ix(len), ix(count)), Matrix(ix(len), ix(count))};
  FadingSource source(doppler_hz, dt, seed);
  for (std::size_t j = 0; j < count; ++j) {
    const auto seg = source.next(len);
    for (std::size_t t = 0; t < len; ++t) {
      set.real(ix(t), ix(j)) = seg[t].real();
      set.imag(ix(t), ix(j)) = seg[t].imag();
    }
  }
  return set;
}

std::pair<SequenceSet, SequenceSet> split_dataset(const SequenceSet& all, double fraction,
                                                  std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "split_dataset: fraction must be in (0, 1)");
  const std::size_t n = all.size();
  const auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  require(held >= 1 && held < n, "split_dataset: split leaves an empty side");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<std::size_t> tr(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  std::sort(val.begin(), val.end());
  std::sort(tr.begin(), tr.end());
  return {all.select(tr), all.select(val)};
}

PredictorNet::PredictorNet(const nn::NetShape& shape, std::size_t window, double doppler_hz)
    : real_net(shape), imag_net(shape), window_n(window), trained_doppler_hz(doppler_hz) {
  require(window >= 1, "PredictorNet: window must be positive");
  config.hidden = shape.hidden_size;
  config.layers = shape.num_layers;
  config.window = window;
  config.doppler_hz = doppler_hz;
}

ComplexMatrix predict_batch(const PredictorNet& net, const ComplexMatrix& windows,
                            std::size_t n_preds) {
  require(static_cast<std::size_t>(windows.rows()) == net.window_n,
          "predict: window length must equal window_n");
  require(n_preds >= 1, "predict: n_preds must be positive");
  const Matrix re = nn::rollout(net.real_net, windows.real(), n_preds);
  const Matrix im = nn::rollout(net.imag_net, windows.imag(), n_preds);
  ComplexMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

std::vector<Complex> predict(const PredictorNet& net, std::span<const Complex> estimates,
                             std::size_t n_preds) {
  require(estimates.size() == net.window_n, "predict: window length must equal window_n");
  ComplexMatrix w(ix(estimates.size()), 1);
  for (std::size_t i = 0; i < estimates.size(); ++i) w(ix(i), 0) = estimates[i];
  const ComplexMatrix y = predict_batch(net, w, n_preds);
  return {y.data(), y.data() + y.size()};
}

std::vector<Complex> predict(const PredictorNet& net, std::span<const ChannelEstimate> estimates,
                             std::size_t n_preds) {
  std::vector<Complex> v(estimates.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = estimates[i].value;
  return predict(net, v, n_preds);
}

std::string stop_reason_name(StopReason r) {
  return r == StopReason::EarlyStop ? "early_stop" : "max_epochs";
}

double validate(const PredictorNet& net, const SequenceSet& held_out) {
  require(held_out.size() >= 1, "validate: empty held-out set");
  const double n = 2.0 * static_cast<double>(held_out.size() * held_out.horizon);
  return rollout_error(net, held_out) / n;
}

TrainResult train(const TrainingConfig& config, const SequenceSet& training,
                  const SequenceSet& validation, const EpochCallback& on_epoch) {
  config.validate();
  require(training.size() >= 1, "train: empty training set");
  require(validation.size() >= 1, "train: empty validation set");
  require(training.window == config.window && training.horizon == config.horizon,
          "train: dataset window/horizon differ from the config");

  TrainResult result;
  PredictorNet& net = result.net;
  net = PredictorNet(shape_of(config), config.window, config.doppler_hz);
  net.config = config;
  {
    Rng init_re(derive_seed(config.seed, 1));
    Rng init_im(derive_seed(config.seed, 2));
    net.real_net.init_uniform(init_re);
    net.imag_net.init_uniform(init_im);
  }
  nn::AdamState adam_re(static_cast<std::size_t>(net.real_net.params().size()));
  nn::AdamState adam_im(static_cast<std::size_t>(net.imag_net.params().size()));

  Rng rng(derive_seed(config.seed, 3));
  const bool noisy = std::isfinite(config.noise_snr_db);
  const double noise_sd = noisy ? std::sqrt(0.5 * std::pow(10.0, -config.noise_snr_db / 10.0)) : 0.0;
  const double p = config.teacher_forcing ? config.teacher_force_p : 0.0;
  const Index w = ix(config.window), h = ix(config.horizon);

  Schedule schedule(config);
  TrainingReport& report = result.report;
  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = schedule.lr();
    double loss_sum = 0.0;
    std::size_t seen = 0;
    while (seen < config.batches_per_epoch) {
      const std::size_t b = std::min(config.batch_size, config.batches_per_epoch - seen);
      Matrix win_re(w, ix(b)), win_im(w, ix(b)), tgt_re(h, ix(b)), tgt_im(h, ix(b));
      for (std::size_t j = 0; j < b; ++j) {
        if (cursor == order.size()) {
          for (std::size_t i = order.size(); i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
          cursor = 0;
        }
        const Index col = ix(order[cursor++]);
        win_re.col(ix(j)) = training.real.col(col).head(w);
        win_im.col(ix(j)) = training.imag.col(col).head(w);
        tgt_re.col(ix(j)) = training.real.col(col).tail(h);
        tgt_im.col(ix(j)) = training.imag.col(col).tail(h);
      }
      if (noisy) {
        for (Index i = 0; i < win_re.size(); ++i) {
          win_re.data()[i] += noise_sd * rng.gaussian();
          win_im.data()[i] += noise_sd * rng.gaussian();
        }
      }
      MaskMatrix mask_re, mask_im;
      if (p > 0.0 && h > 1) {
        mask_re.resize(h - 1, ix(b));
        mask_im.resize(h - 1, ix(b));
        for (Index i = 0; i < mask_re.size(); ++i) mask_re.data()[i] = rng.bernoulli(p);
        for (Index i = 0; i < mask_im.size(); ++i) mask_im.data()[i] = rng.bernoulli(p);
      }
      const nn::LossGrad g_re = nn::bptt(net.real_net, win_re, tgt_re, mask_re);
      const nn::LossGrad g_im = nn::bptt(net.imag_net, win_im, tgt_im, mask_im);
      if (!std::isfinite(g_re.loss) || !std::isfinite(g_im.loss))
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              " (non-finite loss)");
      try {
        nn::adam_step(net.real_net.params(), g_re.grad, adam_re, lr);
        nn::adam_step(net.imag_net.params(), g_im.grad, adam_im, lr);
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " +
                              e.what());
      }
      loss_sum += 0.5 * (g_re.loss + g_im.loss) * static_cast<double>(b);
      seen += b;
    }
    const double train_loss = loss_sum / static_cast<double>(seen);
    const double val_loss = validate(net, validation);
    if (!std::isfinite(val_loss))
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                            " (non-finite validation loss)");
    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    report.lr.push_back(lr);
    const bool stop = schedule.update(epoch, train_loss);
    if (on_epoch) on_epoch(epoch, report);
    if (stop) {
      report.stop = StopReason::EarlyStop;
      break;
    }
  }
  return result;
}

TrainResult train(const TrainingConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const auto total = static_cast<std::size_t>(std::ceil(
      static_cast<double>(config.batches_per_epoch) / (1.0 - config.validation_fraction)));
  const SequenceSet all = make_dataset(config.doppler_hz, total, derive_seed(config.seed, 10),
                                       config.window, config.horizon, config.symbol_period_s);
  const auto [tr, val] = split_dataset(all, config.validation_fraction, derive_seed(config.seed, 11));
  return train(config, tr, val, on_epoch);
}

void save_model(const PredictorNet& net, std::ostream& out) {
  require(net.real_net.shape() == net.imag_net.shape(), "save_model: real/imag shapes differ");
  std::string buf(kMagic, sizeof kMagic);
  put_u32(buf, kModelVersion);
  put_u32(buf, 0);
  buf += shape_bytes(net);
  const std::string cfg = format_training_config(net.config);
  put_u64(buf, cfg.size());
  buf += cfg;
  put_u64(buf, static_cast<std::uint64_t>(net.real_net.params().size()));
  put_params(buf, net.real_net.params());
  put_params(buf, net.imag_net.params());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("save_model: write failed");
}

PredictorNet load_model(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data));
  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw FormatError("model file: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    throw FormatError("model file: unsupported version " + std::to_string(version));
  r.u32();
  nn::NetShape shape;
  shape.input_size = r.u64();
  shape.hidden_size = r.u64();
  shape.num_layers = r.u64();
  shape.output_size = r.u64();
  const std::size_t window = r.u64();
  const double doppler = r.f64();
  if (shape.input_size != 1 || shape.output_size != 1 || shape.hidden_size == 0 ||
      shape.num_layers == 0 || shape.hidden_size > (1u << 16) || shape.num_layers > 64 ||
      window == 0)
    throw FormatError("model file: implausible dimensions");
  const std::uint64_t cfg_len = r.u64();
  if (cfg_len > (1u << 20)) throw FormatError("model file: config block too large");
  const std::string cfg = r.bytes(cfg_len);
  PredictorNet net(shape, window, doppler);
  try {
    net.config = parse_training_config(cfg);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  const std::uint64_t count = r.u64();
  if (count != shape.param_count()) throw FormatError("model file: parameter count mismatch");
  for (auto* p : {&net.real_net.params(), &net.imag_net.params()})
    for (Index i = 0; i < p->size(); ++i) (*p)[i] = r.f64();
  if (!r.done()) throw FormatError("model file: trailing bytes");
  return net;
}

void save_model(const PredictorNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  save_model(net, out);
}

PredictorNet load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file '" + path + "'");
  return load_model(in);
}

std::uint64_t model_fingerprint(const PredictorNet& net) {
  std::string buf = shape_bytes(net);
  put_params(buf, net.real_net.params());
  put_params(buf, net.imag_net.params());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : buf) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

}  // namespace fadecast
