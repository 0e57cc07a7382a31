#include "dictmon/synth.hpp"

#include "dictmon/error.hpp"
#include "dictmon/formats.hpp"
#include "dictmon/rng.hpp"

#include <cmath>
#include <cstdio>

namespace fs = std::filesystem;

namespace dictmon {

std::vector<double> gabor_atom(std::size_t length, double freq_cycles_per_sample, double width,
                               double phase) {
  if (length == 0 || !(width > 0.0))
    throw ConfigError("gabor_atom: length and width must be positive");
  std::vector<double> w(length);
  const double center = 0.5 * static_cast<double>(length - 1);
  double norm2 = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    const double x = static_cast<double>(t) - center;
    w[t] = std::exp(-0.5 * x * x / (width * width)) *
           std::cos(2.0 * M_PI * freq_cycles_per_sample * x + phase);
    norm2 += w[t] * w[t];
  }
  const double n = std::sqrt(norm2);
  for (double& v : w)
    v /= n;
  return w;
}

std::vector<std::vector<double>> default_planted_atoms() {
  return {gabor_atom(40, 0.05, 7.0), gabor_atom(40, 0.12, 6.0, 0.5 * M_PI),
          gabor_atom(40, 0.22, 5.0)};
}

namespace {

std::vector<double> make_segment(const SynthSpec& spec, std::size_t segment_len,
                                 std::int64_t timestamp, Rng& rng) {
  std::vector<double> x(segment_len, 0.0);
  const auto count = static_cast<std::size_t>(
      std::llround(spec.instance_rate * static_cast<double>(segment_len) / 1000.0));
  const auto& planted = spec.planted_atoms;
  if (!planted.empty()) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto& atom = planted[rng.index(planted.size())];
      const std::size_t offset = rng.index(segment_len - atom.size() + 1);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double a = sign * (spec.amplitude_mean + spec.amplitude_std * rng.gaussian());
      for (std::size_t t = 0; t < atom.size(); ++t)
        x[offset + t] += a * atom[t];
    }
  }
  if (spec.noise_std > 0.0) {
    for (double& v : x)
      v += spec.noise_std * rng.gaussian();
  }
  if (spec.fault && timestamp >= spec.fault->onset) {
    const auto& f = *spec.fault;
    const double phase = rng.uniform() * f.impulse_period;
    for (double p = phase; p < static_cast<double>(segment_len); p += f.impulse_period) {
      const auto start = static_cast<std::size_t>(p);
      double env = f.impulse_amp;
      for (std::size_t u = 0; start + u < segment_len && env > 1e-4 * f.impulse_amp; ++u) {
        x[start + u] += env * std::sin(2.0 * M_PI * f.impulse_freq * static_cast<double>(u));
        env *= f.impulse_decay;
      }
    }
  }
  return x;
}

} // namespace

SynthFleet generate_fleet(const std::vector<SynthSpec>& specs, std::size_t segments,
                          std::size_t segment_len, std::int64_t cadence, std::int64_t start_time,
                          double sample_rate) {
  if (segments == 0 || segment_len == 0 || cadence <= 0)
    throw ConfigError("generate_fleet: segments, segment_len and cadence must be positive");
  for (const auto& spec : specs) {
    if (spec.noise_std < 0.0)
      throw ConfigError("generate_fleet: noise_std must be >= 0");
    if (spec.fault && !(spec.fault->impulse_period >= 1.0))
      throw ConfigError("generate_fleet: impulse_period must be >= 1");
    for (const auto& atom : spec.planted_atoms) {
      if (atom.empty() || atom.size() > segment_len)
        throw ConfigError("generate_fleet: planted atom of length " + std::to_string(atom.size()) +
                          " does not fit segments of length " + std::to_string(segment_len));
    }
  }

  SynthFleet fleet;
  const std::int64_t end_time = start_time + static_cast<std::int64_t>(segments) * cadence;
  for (const auto& spec : specs) {
    Rng rng(spec.seed);
    std::vector<SignalSegment> list;
    list.reserve(segments);
    for (std::size_t k = 0; k < segments; ++k) {
      SignalSegment seg;
      seg.timestamp = start_time + static_cast<std::int64_t>(k) * cadence;
      seg.sample_rate = sample_rate;
      seg.source_id = spec.machine_id;
      seg.samples = make_segment(spec, segment_len, seg.timestamp, rng);
      seg.raw_rms = rms(seg.samples);
      list.push_back(std::move(seg));
    }
    fleet.segments.push_back(std::move(list));

    if (!spec.fault || spec.fault->onset >= end_time) {
      fleet.labels.push_back({spec.machine_id, start_time, end_time, Label::healthy});
    } else if (spec.fault->onset <= start_time) {
      fleet.labels.push_back({spec.machine_id, start_time, end_time, Label::faulty});
    } else {
      fleet.labels.push_back({spec.machine_id, start_time, spec.fault->onset, Label::healthy});
      fleet.labels.push_back({spec.machine_id, spec.fault->onset, end_time, Label::faulty});
    }
  }
  return fleet;
}

void write_fleet(const SynthFleet& fleet, const fs::path& dir, SampleFormat format) {
  fs::create_directories(dir);
  const char* ext = format == SampleFormat::csv         ? ".csv"
                    : format == SampleFormat::raw_f32le ? ".f32"
                                                        : ".f64";
  for (const auto& list : fleet.segments) {
    if (list.empty())
      continue;
    const fs::path mdir = dir / list.front().source_id;
    fs::create_directories(mdir);
    for (std::size_t k = 0; k < list.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "seg_%05zu", k);
      write_segment(mdir / (std::string(name) + ext), list[k], format);
    }
  }
  write_labels(dir / "labels.csv", fleet.labels);
}

double kurtosis(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2)
    throw DataError("kurtosis needs at least two samples");
  double m = 0.0;
  for (double v : x)
    m += v;
  m /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0))
    throw NumericError("kurtosis of a constant signal");
  return m4 / (m2 * m2);
}

} // namespace dictmon
