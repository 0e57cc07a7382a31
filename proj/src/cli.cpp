#include "dictmon/cli.hpp"

#include "dictmon/detect.hpp"
#include "dictmon/dictionary.hpp"
#include "dictmon/error.hpp"
#include "dictmon/formats.hpp"
#include "dictmon/metrics.hpp"
#include "dictmon/rng.hpp"
#include "dictmon/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace fs = std::filesystem;

namespace dictmon {

namespace {

struct Machine {
  std::string id;
  fs::path path;
};

bool has_segment_files(const fs::path& dir, SampleFormat format) {
  const auto exts = format == SampleFormat::csv ? std::vector<std::string>{".csv"}
                    : format == SampleFormat::raw_f32le
                        ? std::vector<std::string>{".f32", ".raw", ".bin"}
                        : std::vector<std::string>{".f64", ".raw", ".bin"};
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() &&
        std::find(exts.begin(), exts.end(), e.path().extension().string()) != exts.end())
      return true;
  }
  return false;
}

/// A directory whose subdirectories hold segment files is a fleet, one
/// machine per subdirectory. Anything else is a single machine.
std::vector<Machine> discover_machines(const fs::path& input, SampleFormat format, bool& fleet) {
  if (!fs::exists(input))
    throw IoError("no such file or directory: " + input.string());
  fleet = false;
  if (!fs::is_directory(input))
    return {{input.stem().string(), input}};
  std::vector<Machine> out;
  for (const auto& e : fs::directory_iterator(input)) {
    if (e.is_directory() && has_segment_files(e.path(), format))
      out.push_back({e.path().filename().string(), e.path()});
  }
  std::sort(out.begin(), out.end(), [](const Machine& a, const Machine& b) { return a.id < b.id; });
  if (out.empty())
    return {{input.filename().string(), input}};
  fleet = true;
  return out;
}

/// Run tasks on up to `jobs` threads; the first exception is rethrown.
void run_parallel(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i)
      task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

void write_config_echo(const fs::path& dir, const RunConfig& cfg) {
  fs::create_directories(dir);
  std::ofstream out(dir / "run_config.txt");
  if (!out)
    throw IoError("cannot write " + (dir / "run_config.txt").string());
  out << cfg.to_text();
}

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algo;
  std::optional<double> eta;
  std::optional<double> sparsity;
  std::optional<double> rms_gate;
  std::optional<std::size_t> jobs;
  std::optional<std::string> format;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Flat key=value configuration file");
    cmd->add_option("--set", sets, "Override any configuration key (key=value)");
    cmd->add_option("--seed", seed, "Global seed");
    cmd->add_option("--algo", algo, "Sparse coding algorithm: mp or omp");
    cmd->add_option("--eta", eta, "Dictionary learning step length (0 disables learning)");
    cmd->add_option("--sparsity", sparsity, "Sparsity level in [0, 1)");
    cmd->add_option("--rms-gate", rms_gate, "Minimum raw segment RMS in G");
    cmd->add_option("--jobs", jobs, "Machines processed in parallel");
    cmd->add_option("--format", format, "Segment format: csv, raw_f32le, raw_f64le");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty())
      cfg.load_file(config_file);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed)
      cfg.set("seed", std::to_string(*seed));
    if (algo)
      cfg.set("algorithm", *algo);
    if (eta)
      cfg.set("eta", std::to_string(*eta));
    if (sparsity)
      cfg.set("sparsity", std::to_string(*sparsity));
    if (rms_gate)
      cfg.set("rms_gate", std::to_string(*rms_gate));
    if (jobs)
      cfg.set("jobs", std::to_string(*jobs));
    if (format)
      cfg.set("format", *format);
    return cfg;
  }
};

std::vector<SignalSegment> gated_and_preprocessed(const fs::path& path, const RunConfig& cfg,
                                                  std::optional<std::int64_t> before = {}) {
  auto segments = load_segments(path, cfg.format);
  if (before)
    std::erase_if(segments, [&](const SignalSegment& s) { return s.timestamp >= *before; });
  auto gated = gate_by_rms(segments, SegmentGate{cfg.rms_gate});
  std::vector<SignalSegment> out;
  out.reserve(gated.size());
  for (const auto& s : gated)
    out.push_back(preprocess(s));
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string input;
  std::string output;
  std::optional<std::int64_t> before;
};

void train_one(const Machine& m, const fs::path& output, const RunConfig& cfg,
               const std::optional<std::int64_t>& before, std::ostream& log, std::mutex& log_mu) {
  auto segments = load_segments(m.path, cfg.format);
  const std::size_t available = segments.size();
  if (before)
    std::erase_if(segments, [&](const SignalSegment& s) { return s.timestamp >= *before; });
  const auto considered = gate_by_rms(segments, SegmentGate{cfg.rms_gate});
  if (considered.empty() && cfg.train_blocks > 0)
    throw DataError("machine '" + m.id + "': insufficient gated segments (available " +
                    std::to_string(available) + ", in period " + std::to_string(segments.size()) +
                    ", considered " + std::to_string(considered.size()) + ")");

  const Dictionary init = init_pseudorandom(cfg.atoms, cfg.core_len, cfg.pad, cfg.seed);
  const auto blocks =
      sample_blocks(considered, cfg.block_len, cfg.train_blocks, Rng::derive(cfg.seed, 1));
  std::vector<std::pair<std::size_t, double>> trace;
  trace.reserve(blocks.size());
  const Dictionary baseline =
      train_baseline(blocks, init, cfg.coding(), cfg.learning(),
                     [&](std::size_t b, double fid) { trace.emplace_back(b, fid); });
  save_dictionary(baseline, output);

  fs::path log_path = output;
  log_path.replace_extension(".train.csv");
  std::ofstream tl(log_path);
  if (!tl)
    throw IoError("cannot write " + log_path.string());
  tl << "block,fidelity_db\n";
  for (const auto& [b, fid] : trace)
    tl << b << ',' << fid << '\n';

  std::lock_guard lock(log_mu);
  log << m.id << ": available=" << available << " considered=" << considered.size()
      << " used=" << blocks.size() << " -> " << output.string() << '\n';
}

void cmd_train(const TrainArgs& args, const RunConfig& cfg, std::ostream& out) {
  bool fleet = false;
  const auto machines = discover_machines(args.input, cfg.format, fleet);
  std::mutex log_mu;
  if (!fleet) {
    const fs::path output = args.output;
    const fs::path dir = output.has_parent_path() ? output.parent_path() : fs::path(".");
    write_config_echo(dir, cfg);
    train_one(machines.front(), output, cfg, args.before, out, log_mu);
    return;
  }
  const fs::path dir = args.output;
  write_config_echo(dir, cfg);
  run_parallel(machines.size(), cfg.jobs, [&](std::size_t i) {
    train_one(machines[i], dir / (machines[i].id + ".vdct"), cfg, args.before, out, log_mu);
  });
}

// ---------------------------------------------------------------------------
// monitor

struct MonitorArgs {
  std::string input;
  std::string baseline;
  std::string output;
  std::string mode = "propagate";
  std::optional<std::int64_t> adaptation_delta;
  std::string export_codes;
};

fs::path baseline_for(const fs::path& baseline, const std::string& machine) {
  if (fs::is_directory(baseline))
    return baseline / (machine + ".vdct");
  return baseline;
}

Dictionary load_checked_baseline(const fs::path& path, const RunConfig& cfg) {
  Dictionary d = load_dictionary(path);
  if (d.size() != cfg.atoms)
    throw ConfigError("baseline " + path.string() + " has " + std::to_string(d.size()) +
                      " atoms but the configuration expects " + std::to_string(cfg.atoms));
  return d;
}

std::vector<HistoryRecord> monitor_stream(const std::vector<SignalSegment>& segments,
                                          const Dictionary& baseline, const RunConfig& cfg,
                                          double eta, const MonitorArgs& args,
                                          const std::string& machine, const fs::path& outdir,
                                          Dictionary* final_dict) {
  LearnConfig lc = cfg.learning();
  lc.eta = eta;
  MonitorState state(baseline, cfg.coding(), lc);
  std::vector<DictionarySnapshot> snapshots;
  IndicatorSeries adaptation{machine, IndicatorKind::adaptation_deg, {}};
  fs::path code_dir;
  if (!args.export_codes.empty()) {
    code_dir = fs::path(args.export_codes) / machine;
    fs::create_directories(code_dir);
  }
  for (std::size_t k = 0; k < segments.size(); ++k) {
    state.propagate(segments[k]);
    if (!code_dir.empty()) {
      char name[48];
      std::snprintf(name, sizeof name, "code_%05zu.csv", k);
      write_sparse_code(code_dir / name, state.last_code());
    }
    if (args.adaptation_delta) {
      snapshots.push_back({segments[k].timestamp, state.dictionary()});
      const std::int64_t t = segments[k].timestamp;
      if (t - *args.adaptation_delta >= snapshots.front().timestamp)
        adaptation.points.push_back(
            {t, adaptation_rate(snapshots, t, *args.adaptation_delta)});
    }
  }
  if (args.adaptation_delta)
    write_indicator(outdir / (machine + ".adaptation_deg.csv"), adaptation,
                    {{"delta_seconds", std::to_string(*args.adaptation_delta)}});
  if (final_dict)
    *final_dict = state.dictionary();
  return state.history();
}

void cmd_monitor(const MonitorArgs& args, const RunConfig& cfg, std::ostream& out) {
  if (args.mode != "propagate" && args.mode != "frozen" && args.mode != "foreign")
    throw ConfigError("unknown monitor mode '" + args.mode + "'");
  bool fleet = false;
  const auto machines = discover_machines(args.input, cfg.format, fleet);
  const fs::path outdir = args.output;
  write_config_echo(outdir, cfg);
  const double eta = args.mode == "propagate" ? cfg.eta : 0.0;
  std::mutex log_mu;

  if (args.mode == "foreign" && fleet && fs::is_directory(args.baseline)) {
    // Every machine modeled with every other machine's baseline, unchanged.
    std::vector<Dictionary> baselines;
    for (const auto& m : machines)
      baselines.push_back(load_checked_baseline(baseline_for(args.baseline, m.id), cfg));
    run_parallel(machines.size(), cfg.jobs, [&](std::size_t i) {
      const auto segments = gated_and_preprocessed(machines[i].path, cfg);
      std::vector<HistoryRecord> mean;
      std::size_t used = 0;
      for (std::size_t j = 0; j < machines.size(); ++j) {
        if (j == i)
          continue;
        const auto h = monitor_stream(segments, baselines[j], cfg, 0.0, MonitorArgs{},
                                      machines[i].id, outdir, nullptr);
        write_history(outdir / (machines[i].id + "__" + machines[j].id + ".history.csv"), h);
        if (mean.empty())
          mean = h;
        else
          for (std::size_t k = 0; k < h.size(); ++k)
            mean[k].fidelity_db += h[k].fidelity_db;
        ++used;
      }
      for (auto& r : mean)
        r.fidelity_db /= static_cast<double>(std::max<std::size_t>(1, used));
      write_history(outdir / (machines[i].id + ".foreign_mean.history.csv"), mean);
      std::lock_guard lock(log_mu);
      out << machines[i].id << ": " << segments.size() << " segments x " << used
          << " foreign baselines\n";
    });
    return;
  }

  run_parallel(machines.size(), cfg.jobs, [&](std::size_t i) {
    const auto& m = machines[i];
    const Dictionary baseline = load_checked_baseline(baseline_for(args.baseline, m.id), cfg);
    const auto segments = gated_and_preprocessed(m.path, cfg);
    Dictionary final_dict;
    const auto history =
        monitor_stream(segments, baseline, cfg, eta, args, m.id, outdir, &final_dict);
    write_history(outdir / (m.id + ".history.csv"), history);
    save_dictionary(final_dict, outdir / (m.id + ".final.vdct"));
    std::lock_guard lock(log_mu);
    out << m.id << ": " << history.size() << " segments monitored (" << args.mode << ")\n";
  });
}

// ---------------------------------------------------------------------------
// indicators

struct IndicatorArgs {
  std::string histories;
  std::string output;
};

void cmd_indicators(const IndicatorArgs& args, const RunConfig& cfg, std::ostream& out) {
  const std::string suffix = ".history.csv";
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& e : fs::directory_iterator(args.histories)) {
    const std::string name = e.path().filename().string();
    if (!e.is_regular_file() || name.size() <= suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    const std::string machine = name.substr(0, name.size() - suffix.size());
    if (machine.find("__") != std::string::npos || machine.find('.') != std::string::npos)
      continue; // foreign-baseline pair files
    files.emplace_back(machine, e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw DataError("no *.history.csv files in " + args.histories);

  const fs::path outdir = args.output;
  write_config_echo(outdir, cfg);
  const std::string tc = std::to_string(cfg.time_constant);
  std::vector<IndicatorSeries> distances;
  for (const auto& [machine, path] : files) {
    const auto history = read_history(path);
    const auto fid = history_series(machine, history, IndicatorKind::fidelity_db);
    const auto dist = history_series(machine, history, IndicatorKind::distance_deg);
    validate_series(dist);
    write_indicator(outdir / (machine + ".fidelity_db.csv"), lowpass(fid, cfg.time_constant),
                    {{"filter", "lowpass"}, {"time_constant", tc}});
    write_indicator(outdir / (machine + ".distance_deg.csv"), lowpass(dist, cfg.time_constant),
                    {{"filter", "lowpass"}, {"time_constant", tc}});
    if (dist.points.size() >= cfg.slope_window)
      write_indicator(outdir / (machine + ".slope.csv"), slope_indicator(dist, cfg.slope_window),
                      {{"source", "distance_deg"}, {"window", std::to_string(cfg.slope_window)},
                       {"units", "deg_per_day"}});
    distances.push_back(dist);
  }
  if (distances.size() >= 2) {
    for (const auto& d : distances)
      write_indicator(outdir / (d.machine_id + ".min_diff.csv"),
                      min_diff_series(distances, d.machine_id), {{"source", "distance_deg"}});
  }
  if (distances.size() >= 3) {
    for (const auto& s : mad_score_series(distances))
      write_indicator(outdir / (s.machine_id + ".mad_score.csv"), s,
                      {{"source", "distance_deg"}, {"floor", "1e-6"}});
  }
  out << "indicators for " << distances.size() << " machines -> " << outdir.string() << '\n';
}

// ---------------------------------------------------------------------------
// roc

struct RocArgs {
  std::vector<std::string> indicators;
  std::string labels;
  std::string output;
};

void cmd_roc(const RocArgs& args, std::ostream& out) {
  std::vector<IndicatorSeries> series;
  for (const auto& p : args.indicators)
    series.push_back(read_indicator(p));
  const auto labels = read_labels(args.labels);
  const auto samples = to_samples(series);
  const RocCurve curve = roc_curve(samples, labels);
  if (!args.output.empty())
    write_roc(args.output, curve);
  char buf[64];
  std::snprintf(buf, sizeof buf, "auc=%.6f", curve.auc);
  out << buf << '\n';
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string output;
  std::size_t machines = 6;
  std::size_t segments = 300;
  std::size_t segment_len = 4096;
  std::int64_t cadence = 43200;
  int fault_machine = -1;
  std::size_t fault_onset_segment = 150;
  double noise_std = 0.3;
  double rate = 20.0;
  double amplitude = 4.0;
  double impulse_amp = 2.0;
  std::int64_t start_time = 1'500'000'000;
};

void cmd_synth(const SynthArgs& args, const RunConfig& cfg, std::ostream& out) {
  std::vector<SynthSpec> specs;
  for (std::size_t i = 0; i < args.machines; ++i) {
    SynthSpec s;
    s.machine_id = "machine" + std::to_string(i + 1);
    s.planted_atoms = default_planted_atoms();
    s.instance_rate = args.rate;
    s.amplitude_mean = args.amplitude;
    s.amplitude_std = 0.25 * args.amplitude;
    s.noise_std = args.noise_std;
    s.seed = Rng::derive(cfg.seed, i);
    if (args.fault_machine >= 0 && static_cast<std::size_t>(args.fault_machine) == i) {
      FaultSpec f;
      f.onset = args.start_time + static_cast<std::int64_t>(args.fault_onset_segment) * args.cadence;
      f.impulse_amp = args.impulse_amp;
      s.fault = f;
    }
    specs.push_back(std::move(s));
  }
  const auto fleet = generate_fleet(specs, args.segments, args.segment_len, args.cadence,
                                    args.start_time);
  write_fleet(fleet, args.output, cfg.format);
  write_config_echo(args.output, cfg);
  out << "wrote " << args.machines << " machines x " << args.segments << " segments to "
      << args.output << '\n';
}

// ---------------------------------------------------------------------------
// atom-info

double center_frequency(const std::vector<double>& w, double sample_rate) {
  std::size_t nfft = 1024;
  while (nfft < w.size())
    nfft *= 2;
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t)
      acc += w[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) /
                                        static_cast<double>(nfft));
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      arg = k;
    }
  }
  return static_cast<double>(arg) * sample_rate / static_cast<double>(nfft);
}

void cmd_atom_info(const std::string& path, double sample_rate, std::ostream& out) {
  const Dictionary d = load_dictionary(path);
  out << "# generation=" << d.generation << '\n' << "atom_id,length,center_khz\n";
  for (const auto& a : d.atoms) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%zu,%.4f", a.id, a.size(),
                  center_frequency(a.waveform, sample_rate) / 1000.0);
    out << buf << '\n';
  }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary-learning condition monitoring for vibration signals", "dictmon"};
  app.require_subcommand(1);

  CommonOptions common;

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Learn a baseline dictionary from healthy segments");
  train->add_option("--input", train_args.input, "Segment directory (or fleet directory)")
      ->required();
  train->add_option("--output", train_args.output,
                    "Dictionary file (or output directory for a fleet)")
      ->required();
  train->add_option("--before", train_args.before, "Only use segments with timestamp < value");
  common.attach(train);

  MonitorArgs mon_args;
  auto* monitor = app.add_subcommand("monitor", "Propagate a baseline over a segment stream");
  monitor->add_option("--input", mon_args.input, "Segment directory (or fleet directory)")
      ->required();
  monitor->add_option("--baseline", mon_args.baseline,
                      "Baseline dictionary file (or directory of <machine>.vdct)")
      ->required();
  monitor->add_option("--output", mon_args.output, "Output directory")->required();
  monitor->add_option("--mode", mon_args.mode, "propagate | frozen | foreign");
  monitor->add_option("--adaptation-delta", mon_args.adaptation_delta,
                      "Also write the adaptation rate over this lag in seconds");
  monitor->add_option("--export-codes", mon_args.export_codes,
                      "Directory for per-segment sparse code CSVs");
  common.attach(monitor);

  std::vector<std::string> distance_files;
  auto* distance = app.add_subcommand("distance", "Print the distance between two dictionaries");
  distance->add_option("dictionaries", distance_files, "Two dictionary files")
      ->required()
      ->expected(2);

  IndicatorArgs ind_args;
  auto* indicators = app.add_subcommand("indicators", "Smoothed, slope, min-diff and MAD indicators");
  indicators->add_option("--histories", ind_args.histories, "Directory of history CSVs")
      ->required();
  indicators->add_option("--output", ind_args.output, "Output directory")->required();
  std::optional<double> time_constant;
  std::optional<std::size_t> slope_window;
  indicators->add_option("--time-constant", time_constant, "Low-pass time constant in segments");
  indicators->add_option("--slope-window", slope_window, "Slope regression window in points");
  common.attach(indicators);

  RocArgs roc_args;
  auto* roc = app.add_subcommand("roc", "ROC curve of indicator files against labels");
  roc->add_option("--indicators", roc_args.indicators, "Indicator CSV files")->required();
  roc->add_option("--labels", roc_args.labels, "Labels CSV")->required();
  roc->add_option("--output", roc_args.output, "ROC CSV output");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fleet with ground-truth labels");
  synth->add_option("--output", synth_args.output, "Output directory")->required();
  synth->add_option("--machines", synth_args.machines);
  synth->add_option("--segments", synth_args.segments);
  synth->add_option("--segment-len", synth_args.segment_len);
  synth->add_option("--cadence", synth_args.cadence, "Seconds between segments");
  synth->add_option("--fault-machine", synth_args.fault_machine, "0-based index, -1 for none");
  synth->add_option("--fault-onset-segment", synth_args.fault_onset_segment);
  synth->add_option("--noise-std", synth_args.noise_std);
  synth->add_option("--rate", synth_args.rate, "Planted instances per 1000 samples");
  synth->add_option("--amplitude", synth_args.amplitude, "Mean planted amplitude (G)");
  synth->add_option("--impulse-amp", synth_args.impulse_amp);
  common.attach(synth);

  std::string info_path;
  double info_rate = 12800.0;
  auto* info = app.add_subcommand("atom-info", "Per-atom length and spectral peak");
  info->add_option("dictionary", info_path, "Dictionary file")->required();
  info->add_option("--sample-rate", info_rate);

  std::vector<std::string> argv_store = args;
  std::reverse(argv_store.begin(), argv_store.end());
  try {
    app.parse(argv_store);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dictmon: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*train) {
      cmd_train(train_args, common.resolve(), out);
    } else if (*monitor) {
      cmd_monitor(mon_args, common.resolve(), out);
    } else if (*distance) {
      const Dictionary a = load_dictionary(distance_files[0]);
      const Dictionary b = load_dictionary(distance_files[1]);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", dictionary_distance(a, b));
      out << buf << '\n';
    } else if (*indicators) {
      RunConfig cfg = common.resolve();
      if (time_constant)
        cfg.time_constant = *time_constant;
      if (slope_window)
        cfg.slope_window = *slope_window;
      cmd_indicators(ind_args, cfg, out);
    } else if (*roc) {
      cmd_roc(roc_args, out);
    } else if (*synth) {
      cmd_synth(synth_args, common.resolve(), out);
    } else if (*info) {
      cmd_atom_info(info_path, info_rate, out);
    }
  } catch (const ConfigError& e) {
    err << "dictmon: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "dictmon: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "dictmon: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "dictmon: data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

} // namespace dictmon
