// SPDX-License-Identifier: Apache-2.0
// fadecast command-line driver.
//
// Exit codes:
//   0 success
//   1 unexpected failure
//   2 usage error (unknown flag, bad value)
//   3 missing input file
//   4 model / lookup-table fingerprint mismatch
//   5 invalid configuration or argument
//   6 training diverged
//   7 malformed input file or CSV schema mismatch

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fadecast/adaptive.hpp"
#include "fadecast/baseline.hpp"
#include "fadecast/cpsc.hpp"
#include "fadecast/csv.hpp"
#include "fadecast/error.hpp"
#include "fadecast/fading.hpp"
#include "fadecast/predictor.hpp"
#include "fadecast/receiver.hpp"

using namespace fadecast;

namespace {

enum Exit { Ok = 0, Failure = 1, Usage = 2, Missing = 3, Mismatch = 4, Invalid = 5, Diverged = 6, Malformed = 7 };

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string& need_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw MissingFile("no such file: " + path);
  return path;
}

// "a:step:b" (inclusive) or a comma list.
std::vector<double> parse_range(const std::string& s) {
  auto num = [&](const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) throw ConfigError("bad number '" + v + "' in '" + s + "'");
    return x;
  };
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> p;
    std::stringstream in(s);
    for (std::string t; std::getline(in, t, ':');) p.push_back(t);
    if (p.size() != 3) throw ConfigError("range '" + s + "' must be start:step:stop");
    const double a = num(p[0]), step = num(p[1]), b = num(p[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("range '" + s + "' is empty or has a bad step");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    std::stringstream in(s);
    for (std::string t; std::getline(in, t, ',');) out.push_back(num(t));
  }
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (double v : parse_range(s)) {
    if (v < 0 || v != std::floor(v)) throw ConfigError("'" + s + "' must hold non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

// Self-describing header shared by all outputs.
struct Header {
  std::vector<std::string> lines;
  Header(const std::string& command, std::optional<std::uint64_t> seed = {}) {
    lines.push_back(std::string("fadecast ") + FADECAST_VERSION);
    lines.push_back("command=" + command);
    if (seed) lines.push_back("seed=" + std::to_string(*seed));
  }
  void add(const std::string& key, const std::string& value) { lines.push_back(key + "=" + value); }
};

CsvTable table(const Header& h, std::vector<std::string> columns) {
  CsvTable t;
  t.comments = h.lines;
  t.columns = std::move(columns);
  return t;
}

void emit(const CsvTable& t, const std::string& out) {
  if (out.empty() || out == "-")
    write_csv(std::cout, t);
  else
    write_csv_file(out, t);
}

// Seed precedence: --seed flag, then FADECAST_SEED, then the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FADECAST_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("FADECAST_SEED must be an unsigned integer, got '") + env + "'");
  }
  return fallback;
}

std::string read_text(const std::string& path) {
  std::ifstream in(need_file(path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TapProfile profile_by_name(const std::string& name) {
  if (name == "epa") return epa_profile();
  if (name == "eva") return eva_profile();
  if (name == "etu") return etu_profile();
  return load_tap_profile(need_file(name));
}

// ---------------------------------------------------------------------------

struct GenChannel {
  double fd = 50.0;
  double ts = 0.0;
  std::size_t n = 1000;
  std::string profile = "flat";
  std::optional<std::uint64_t> seed;
  std::string out;

  void run() const {
    const std::uint64_t s = resolve_seed(seed, 1);
    const double period = ts > 0.0 ? ts : block_period(fd, kDefaultSymbolPeriod);
    Header h("gen-channel", s);
    h.add("fd_hz", fmt(fd));
    h.add("sample_period_s", fmt(period));
    h.add("n", std::to_string(n));
    h.add("profile", profile);
    auto t = table(h, {"t", "time_s", "tap", "delay", "re", "im"});
    auto add = [&](const std::vector<Complex>& g, std::size_t tap, std::size_t delay) {
      for (std::size_t i = 0; i < g.size(); ++i)
        t.add_row({std::to_string(i), fmt(static_cast<double>(i) * period), std::to_string(tap),
                   std::to_string(delay), fmt(g[i].real()), fmt(g[i].imag())});
    };
    if (profile == "flat") {
      add(generate_fading(n, fd, period, s).gains, 0, 0);
    } else {
      const auto ch = generate_multipath(profile_by_name(profile), fd, period, n, s);
      for (std::size_t l = 0; l < ch.taps.size(); ++l) add(ch.taps[l].gains, l, ch.grid.delays[l]);
    }
    emit(t, out);
  }
};

struct Train {
  std::string preset = "desk";
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<double> fd;
  std::optional<std::uint64_t> seed;
  bool plain = false;
  std::string out = "model.fcp";
  std::string log;

  void run() const {
    auto cfg = TrainingConfig::preset(preset_from_name(preset));
    if (!config_file.empty()) cfg = parse_training_config(read_text(config_file), cfg);
    std::string overrides;
    for (const auto& s : sets) overrides += s + "\n";
    cfg = parse_training_config(overrides, cfg);
    if (fd) cfg.doppler_hz = *fd;
    if (plain) cfg = cfg.without_enhancements();
    cfg.seed = resolve_seed(seed, cfg.seed);
    cfg.validate();

    auto result = train(cfg, [](std::size_t epoch, const TrainingReport& r) {
      std::cerr << "epoch " << epoch + 1 << " train " << r.train_loss.back() << " val "
                << r.val_loss.back() << " lr " << r.lr.back() << '\n';
    });
    save_model(result.net, out);
    const auto fp = fingerprint_hex(model_fingerprint(result.net));
    std::cerr << "stop: " << stop_reason_name(result.report.stop) << " after "
              << result.report.epochs() << " epochs; model " << out << " (" << fp << ")\n";
    if (log.empty()) return;
    Header h("train", cfg.seed);
    h.add("preset", preset);
    std::istringstream lines(format_training_config(cfg));
    for (std::string l; std::getline(lines, l);) h.lines.push_back("config." + l);
    h.add("model_fingerprint", fp);
    h.add("stop", stop_reason_name(result.report.stop));
    auto t = table(h, {"epoch", "train_loss", "val_loss", "lr"});
    const auto& r = result.report;
    for (std::size_t e = 0; e < r.epochs(); ++e)
      t.add_row({std::to_string(e + 1), fmt(r.train_loss[e]), fmt(r.val_loss[e]), fmt(r.lr[e])});
    emit(t, log);
  }
};

struct Predict {
  std::string model;
  std::string input;
  std::size_t n = 10;
  std::string out;

  void run() const {
    const auto net = load_model(need_file(model));
    const auto in = read_csv_file(need_file(input));
    std::vector<Complex> window;
    for (std::size_t i = 0; i < in.rows.size(); ++i) window.emplace_back(in.number(i, "re"), in.number(i, "im"));
    const auto p = predict(net, window, n);
    Header h("predict");
    h.add("model_fingerprint", fingerprint_hex(model_fingerprint(net)));
    h.add("input", input);
    auto t = table(h, {"step", "re", "im"});
    for (std::size_t i = 0; i < p.size(); ++i)
      t.add_row({std::to_string(i + 1), fmt(p[i].real()), fmt(p[i].imag())});
    emit(t, out);
  }
};

struct BuildLut {
  std::string model;
  std::size_t trials = 1000;
  std::string n_grid = "5:5:100", doppler = "5:5:100", snr = "-5:5:40";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  double ts = kDefaultSymbolPeriod;
  std::string out;

  void run() const {
    const auto net = load_model(need_file(model));
    LutGrid g{parse_counts(n_grid), parse_range(doppler), parse_range(snr)};
    LutOptions opt{trials, resolve_seed(seed, 1), jobs, ts};
    const auto lut = build_lut(net, g, opt);
    auto t = lut_to_csv(lut);
    Header h("build-lut", opt.seed);
    h.add("n_grid", n_grid);
    h.add("doppler_hz", doppler);
    h.add("snr_db", snr);
    h.add("symbol_period_s", fmt(ts));
    t.comments.insert(t.comments.begin(), h.lines.begin(), h.lines.end());
    emit(t, out);
  }
};

SimOptions sim_options(std::size_t trials, std::uint64_t min_errors, std::uint64_t seed,
                       std::size_t jobs, double ts, bool perfect) {
  SimOptions o;
  o.trials = trials;
  o.min_bit_errors = min_errors;
  o.seed = seed;
  o.jobs = jobs;
  o.symbol_period_s = ts;
  o.perfect_csi = perfect;
  return o;
}

std::vector<std::string> report_columns() {
  return {"ber_stderr", "mse_stderr", "bit_errors", "bits_sent", "discarded_trials",
          "convergence_failures"};
}

void add_report_fields(std::vector<std::string>& row, const ReceiverReport& r) {
  row.insert(row.end(), {fmt(r.ber_stderr), fmt(r.mse_stderr), fmt(r.bit_errors), fmt(r.bits_sent),
                         fmt(r.discarded_trials), fmt(r.convergence_failures)});
}

struct RunBer {
  std::string scheme = "adaptive";
  std::string model, lut_path;
  std::string mod = "4qam";
  double fd = 50.0;
  std::string ebn0 = "0:2:40";
  std::optional<std::size_t> n_preds;
  std::size_t k = 1;
  std::size_t n_p = 10;
  std::size_t trials = 10000;
  std::uint64_t min_errors = 100;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  double ts = kDefaultSymbolPeriod;
  bool perfect = false;
  std::string out;

  void run() const {
    static const std::vector<std::string> schemes{"fixed", "adaptive", "datadriven", "ar2", "lmmse-li"};
    if (std::find(schemes.begin(), schemes.end(), scheme) == schemes.end())
      throw ConfigError("unknown scheme '" + scheme + "'");
    const auto c = constellation_from_name(mod);
    const std::uint64_t s = resolve_seed(seed, 1);
    const auto opt = sim_options(trials, min_errors, s, jobs, ts, perfect);

    std::optional<PredictorNet> net;
    std::optional<MseLookupTable> lut;
    const bool needs_net = scheme == "fixed" || scheme == "adaptive" || scheme == "datadriven";
    if (needs_net) {
      if (model.empty()) throw ConfigError("--model is required for scheme " + scheme);
      net = load_model(need_file(model));
    }
    if (!lut_path.empty()) lut = lut_from_csv(read_csv_file(need_file(lut_path)));
    if ((scheme == "adaptive" || scheme == "datadriven") && !lut)
      throw ConfigError("--lut is required for scheme " + scheme);
    if ((scheme == "fixed" || scheme == "lmmse-li" || scheme == "ar2") && !n_preds && !lut)
      throw ConfigError("scheme " + scheme + " needs --n-preds or --lut");
    if (net && lut) check_fingerprint(*lut, *net);

    Header h("run-ber", s);
    h.add("scheme", scheme);
    h.add("mod", mod);
    h.add("fd_hz", fmt(fd));
    h.add("ebn0_db", ebn0);
    if (n_preds) h.add("n_preds", std::to_string(*n_preds));
    h.add("k", std::to_string(k));
    h.add("n_p", std::to_string(n_p));
    h.add("trials", std::to_string(trials));
    h.add("min_errors", std::to_string(min_errors));
    h.add("symbol_period_s", fmt(ts));
    h.add("perfect_csi", perfect ? "true" : "false");
    h.add("model_fingerprint", net ? fingerprint_hex(model_fingerprint(*net)) : "none");
    if (lut) h.add("lut_fingerprint", fingerprint_hex(lut->fingerprint));

    std::vector<std::string> cols{"ebn0_db", "scheme", "fd_hz", "mod", "n_c_mean", "efficiency",
                                  "ber", "mse", "trials"};
    for (auto& col : report_columns()) cols.push_back(col);
    auto t = table(h, cols);
    for (double e : parse_range(ebn0)) {
      ReceiverReport r;
      if (scheme == "fixed") {
        r = run_fixed(*net, c, fd, e, n_preds ? *n_preds : adaptive_horizon(*lut, c, fd, e), opt);
      } else if (scheme == "adaptive") {
        r = run_adaptive(*net, *lut, c, fd, e, opt);
      } else if (scheme == "datadriven") {
        r = run_data_driven(*net, *lut, c, fd, e, k, opt);
      } else {
        const std::size_t horizon = n_preds ? *n_preds : adaptive_horizon(*lut, c, fd, e);
        r = scheme == "ar2" ? run_ar2_receiver(c, fd, e, horizon, n_p, opt)
                            : run_lmmse_li_receiver(c, fd, e, n_p, horizon, opt);
      }
      std::vector<std::string> row{fmt(e), scheme, fmt(fd), mod, fmt(r.n_c_mean), fmt(r.efficiency),
                                   fmt(r.ber), fmt(r.prediction_mse), fmt(r.trials)};
      add_report_fields(row, r);
      t.add_row(std::move(row));
      std::cerr << "ebn0 " << e << " ber " << r.ber << " mse " << r.prediction_mse << '\n';
    }
    emit(t, out);
  }
};

struct RunCpsc {
  std::string model;
  std::size_t n = 128, l = 2;
  std::string np = "2,4";
  double fd = 50.0;
  std::string snr = "0:5:30";
  std::string mod = "4qam";
  std::string powers;
  std::size_t trials = 2000;
  std::uint64_t min_errors = 0;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  double ts = kDefaultSymbolPeriod;
  bool perfect = false;
  std::string out;

  void run() const {
    const auto c = constellation_from_name(mod);
    const std::uint64_t s = resolve_seed(seed, 1);
    const auto opt = sim_options(trials, min_errors, s, jobs, ts, perfect);
    std::optional<PredictorNet> net;
    if (!model.empty()) net = load_model(need_file(model));
    if (!net && !perfect) throw ConfigError("--model is required unless --perfect-csi is given");

    Header h("run-cpsc", s);
    h.add("n", std::to_string(n));
    h.add("l", std::to_string(l));
    h.add("np", np);
    h.add("fd_hz", fmt(fd));
    h.add("snr_db", snr);
    h.add("mod", mod);
    h.add("tap_powers", powers.empty() ? "equal" : powers);
    h.add("trials", std::to_string(trials));
    h.add("min_errors", std::to_string(min_errors));
    h.add("symbol_period_s", fmt(ts));
    h.add("perfect_csi", perfect ? "true" : "false");
    h.add("model_fingerprint", net ? fingerprint_hex(model_fingerprint(*net)) : "none");

    std::vector<std::string> cols{"snr_db", "n_p", "csi", "fd_hz", "mod", "efficiency", "ber", "mse", "trials"};
    for (auto& col : report_columns()) cols.push_back(col);
    auto t = table(h, cols);
    const auto tap_powers = powers.empty() ? std::vector<double>{} : parse_range(powers);
    for (std::size_t p : parse_counts(np))
      for (double x : parse_range(snr)) {
        const auto r = run_cpsc(net ? &*net : nullptr, c, fd, x, CpscLayout{n, l, p, tap_powers}, opt);
        std::vector<std::string> row{fmt(x), std::to_string(p), perfect ? "perfect" : "predicted", fmt(fd),
                                     mod, fmt(r.efficiency), fmt(r.ber), fmt(r.prediction_mse), fmt(r.trials)};
        add_report_fields(row, r);
        t.add_row(std::move(row));
        std::cerr << "n_p " << p << " snr " << x << " ber " << r.ber << '\n';
      }
    emit(t, out);
  }
};

// Merges result CSVs. Without --by the rows are concatenated (long form,
// plus a `source` column). With --x, --y and --by the merged rows are
// pivoted to one row per x value and one column per series, in order of
// first appearance; missing cells are written as `nan`.
struct Report {
  std::vector<std::string> inputs;
  std::string x, y, by;
  std::string out;

  void run() const {
    if (inputs.empty()) throw ConfigError("report: no input files");
    std::vector<CsvTable> tables;
    for (const auto& p : inputs) tables.push_back(read_csv_file(need_file(p)));
    const auto& ref = tables.front().columns;
    for (std::size_t i = 1; i < tables.size(); ++i) {
      if (tables[i].columns == ref) continue;
      std::string diff;
      for (const auto& c : tables[i].columns)
        if (std::find(ref.begin(), ref.end(), c) == ref.end()) diff += " +" + c;
      for (const auto& c : ref)
        if (std::find(tables[i].columns.begin(), tables[i].columns.end(), c) == tables[i].columns.end())
          diff += " -" + c;
      if (diff.empty()) diff = " (column order differs)";
      throw FormatError("report: schema of " + inputs[i] + " differs from " + inputs[0] + ":" + diff);
    }
    Header h("report");
    for (const auto& p : inputs) h.add("input", p);

    if (by.empty()) {
      auto cols = ref;
      cols.insert(cols.begin(), "source");
      auto t = table(h, cols);
      for (std::size_t i = 0; i < tables.size(); ++i)
        for (auto row : tables[i].rows) {
          row.insert(row.begin(), inputs[i]);
          t.add_row(std::move(row));
        }
      emit(t, out);
      return;
    }
    if (x.empty() || y.empty()) throw ConfigError("report: --by needs --x and --y");
    std::vector<std::string> series, xs;
    std::map<std::pair<std::string, std::string>, std::string> cell;
    for (const auto& tb : tables)
      for (std::size_t r = 0; r < tb.rows.size(); ++r) {
        const auto& sv = tb.text(r, by);
        const auto& xv = tb.text(r, x);
        if (std::find(series.begin(), series.end(), sv) == series.end()) series.push_back(sv);
        if (std::find(xs.begin(), xs.end(), xv) == xs.end()) xs.push_back(xv);
        cell[{xv, sv}] = tb.text(r, y);
      }
    std::vector<std::string> cols{x};
    for (const auto& s : series) cols.push_back(y + ":" + s);
    h.add("pivot", x + "," + y + "," + by);
    auto t = table(h, cols);
    for (const auto& xv : xs) {
      std::vector<std::string> row{xv};
      for (const auto& s : series) {
        const auto it = cell.find({xv, s});
        row.push_back(it == cell.end() ? "nan" : it->second);
      }
      t.add_row(std::move(row));
    }
    emit(t, out);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep channel prediction toolkit", "fadecast"};
  app.set_version_flag("--version", std::string(FADECAST_VERSION));
  app.require_subcommand(1);

  GenChannel gen;
  auto* g = app.add_subcommand("gen-channel", "Generate a Jakes fading realization");
  g->add_option("--fd", gen.fd, "Maximum Doppler (Hz)");
  g->add_option("--ts", gen.ts, "Sample period (s); default one sample per coherence block");
  g->add_option("--n", gen.n, "Samples");
  g->add_option("--profile", gen.profile, "flat, epa, eva, etu or a delay_ns,power_db file");
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen.out, "Output CSV (default stdout)");

  Train tr;
  auto* t = app.add_subcommand("train", "Train a predictor");
  t->add_option("--preset", tr.preset, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  t->add_option("--config", tr.config_file, "key=value config file");
  t->add_option("--set", tr.sets, "key=value override (repeatable)");
  t->add_option("--fd", tr.fd, "Training Doppler (Hz)");
  t->add_option("--seed", tr.seed);
  t->add_flag("--no-enhancements", tr.plain, "Disable teacher forcing, LR schedule and early stop");
  t->add_option("--out", tr.out, "Model file");
  t->add_option("--log", tr.log, "Per-epoch loss CSV");

  Predict pr;
  auto* p = app.add_subcommand("predict", "Predict from a window of estimates");
  p->add_option("--model", pr.model)->required();
  p->add_option("--input", pr.input, "CSV with re,im columns, oldest first")->required();
  p->add_option("--n", pr.n, "Predictions");
  p->add_option("--out", pr.out);

  BuildLut bl;
  auto* b = app.add_subcommand("build-lut", "Build the achieved-MSE lookup table");
  b->add_option("--model", bl.model)->required();
  b->add_option("--trials", bl.trials);
  b->add_option("--n-grid", bl.n_grid, "Horizons (start:step:stop or list)");
  b->add_option("--doppler", bl.doppler, "Dopplers in Hz");
  b->add_option("--snr", bl.snr, "SNRs in dB");
  b->add_option("--seed", bl.seed);
  b->add_option("--jobs", bl.jobs, "Worker threads (0: all cores)");
  b->add_option("--ts", bl.ts, "Symbol period (s)");
  b->add_option("--out", bl.out);

  RunBer rb;
  auto* r = app.add_subcommand("run-ber", "BER / MSE sweep over Eb/N0");
  r->add_option("--scheme", rb.scheme)
      ->check(CLI::IsMember({"fixed", "adaptive", "datadriven", "ar2", "lmmse-li"}));
  r->add_option("--model", rb.model);
  r->add_option("--lut", rb.lut_path);
  r->add_option("--mod", rb.mod, "4qam, 16qam or 64qam");
  r->add_option("--fd", rb.fd);
  r->add_option("--ebn0", rb.ebn0, "Eb/N0 points in dB");
  r->add_option("--n-preds", rb.n_preds, "Fixed horizon (data symbols per block)");
  r->add_option("--k", rb.k, "Data blocks per pilot block");
  r->add_option("--n-p", rb.n_p, "Pilots (ar2, lmmse-li)");
  r->add_option("--trials", rb.trials, "Trial cap per point");
  r->add_option("--min-errors", rb.min_errors, "Stop a point after this many bit errors (0: never)");
  r->add_option("--seed", rb.seed);
  r->add_option("--jobs", rb.jobs);
  r->add_option("--ts", rb.ts);
  r->add_flag("--perfect-csi", rb.perfect, "Detect with the true channel");
  r->add_option("--out", rb.out);

  RunCpsc rc;
  auto* c = app.add_subcommand("run-cpsc", "CPSC BER sweep over SNR");
  c->add_option("--model", rc.model);
  c->add_option("--n", rc.n, "Frame length");
  c->add_option("--l", rc.l, "Channel taps");
  c->add_option("--np", rc.np, "Pilot sequence counts");
  c->add_option("--fd", rc.fd);
  c->add_option("--snr", rc.snr);
  c->add_option("--mod", rc.mod);
  c->add_option("--tap-powers", rc.powers, "Linear tap powers (default equal)");
  c->add_option("--trials", rc.trials);
  c->add_option("--min-errors", rc.min_errors);
  c->add_option("--seed", rc.seed);
  c->add_option("--jobs", rc.jobs);
  c->add_option("--ts", rc.ts);
  c->add_flag("--perfect-csi", rc.perfect);
  c->add_option("--out", rc.out);

  Report rp;
  auto* o = app.add_subcommand("report", "Merge result CSVs into plot-ready tables");
  o->add_option("inputs", rp.inputs, "Result CSV files");
  o->add_option("--x", rp.x, "Column for the x axis");
  o->add_option("--y", rp.y, "Column for the y axis");
  o->add_option("--by", rp.by, "Column naming each series");
  o->add_option("--out", rp.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*g) gen.run();
    if (*t) tr.run();
    if (*p) pr.run();
    if (*b) bl.run();
    if (*r) rb.run();
    if (*c) rc.run();
    if (*o) rp.run();
  } catch (const MissingFile& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Missing;
  } catch (const FingerprintMismatch& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Mismatch;
  } catch (const DivergenceError& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Diverged;
  } catch (const FormatError& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Malformed;
  } catch (const ConfigError& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Invalid;
  } catch (const DomainError& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Invalid;
  } catch (const std::exception& e) {
    std::cerr << "fadecast: " << e.what() << '\n';
    return Failure;
  }
  return Ok;
}
