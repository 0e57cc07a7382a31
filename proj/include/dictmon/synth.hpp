#ifndef DICTMON_SYNTH_HPP
#define DICTMON_SYNTH_HPP

#include "dictmon/detect.hpp"
#include "dictmon/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dictmon {

/// Periodic exponentially decaying resonance bursts, a surrogate for a
/// localized bearing defect.
struct FaultSpec {
  std::int64_t onset = 0;          // timestamp from which the fault is present
  double impulse_period = 97.3;    // samples between bursts
  double impulse_amp = 1.0;
  double impulse_decay = 0.85;     // per-sample amplitude factor
  double impulse_freq = 0.3;       // resonance, cycles per sample
};

struct SynthSpec {
  std::string machine_id;
  std::vector<std::vector<double>> planted_atoms;
  double instance_rate = 20.0;     // instances per 1000 samples
  double amplitude_mean = 1.0;
  double amplitude_std = 0.25;
  double noise_std = 0.1;
  std::optional<FaultSpec> fault;
  std::uint64_t seed = 1;
};

/// Unit-norm Gaussian-windowed sinusoid.
std::vector<double> gabor_atom(std::size_t length, double freq_cycles_per_sample, double width,
                               double phase = 0.0);

struct SynthFleet {
  std::vector<std::vector<SignalSegment>> segments; // one list per machine, time-ordered
  std::vector<LabeledWindow> labels;
};

/// Segment k of every machine has timestamp start_time + k * cadence. Each
/// segment holds round(instance_rate * segment_len / 1000) planted instances at
/// uniform offsets with random sign and Gaussian amplitude, plus white noise,
/// plus fault bursts from the onset onward. Labels cover
/// [start_time, start_time + segments * cadence).
SynthFleet generate_fleet(const std::vector<SynthSpec>& specs, std::size_t segments,
                          std::size_t segment_len, std::int64_t cadence,
                          std::int64_t start_time = 1'500'000'000, double sample_rate = 12800.0);

/// Three Gabor atoms at distinct center frequencies used by the default fleet.
std::vector<std::vector<double>> default_planted_atoms();

/// Write `dir/<machine>/seg_XXXXX.<ext>` per segment and `dir/labels.csv`.
void write_fleet(const SynthFleet& fleet, const std::filesystem::path& dir, SampleFormat format);

double kurtosis(std::span<const double> x);

} // namespace dictmon

#endif
