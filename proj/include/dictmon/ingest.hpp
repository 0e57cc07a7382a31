#ifndef DICTMON_INGEST_HPP
#define DICTMON_INGEST_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dictmon {

/// One recorded vibration segment. Samples are acceleration in G until
/// preprocess() standardizes them.
struct SignalSegment {
  std::vector<double> samples;
  double sample_rate = 0.0;    // samples per second
  std::int64_t timestamp = 0;  // seconds since epoch
  std::string source_id;       // machine identifier
  double raw_rms = 0.0;        // RMS of the physical samples, kept through preprocess()

  std::size_t size() const { return samples.size(); }
};

struct SegmentGate {
  double rms_threshold = 0.5; // G
};

enum class SampleFormat { csv, raw_f32le, raw_f64le };

SampleFormat parse_sample_format(const std::string& name);
std::string to_string(SampleFormat format);

double rms(std::span<const double> x);
double mean(std::span<const double> x);
/// Population variance (divides by n).
double variance(std::span<const double> x);

/// Read one segment file. For raw formats the sidecar `<path>.meta` is read.
SignalSegment read_segment(const std::filesystem::path& path, SampleFormat format);

/// Write one segment in the given format (raw formats also write the sidecar).
void write_segment(const std::filesystem::path& path, const SignalSegment& segment,
                   SampleFormat format);

/// Load a single file or every segment file in a directory, sorted by
/// timestamp with ties broken by filename.
std::vector<SignalSegment> load_segments(const std::filesystem::path& path, SampleFormat format);

/// Keep segments whose raw RMS strictly exceeds the gate. Order is preserved.
std::vector<SignalSegment> gate_by_rms(const std::vector<SignalSegment>& segments,
                                       const SegmentGate& gate);

/// Zero mean, unit population variance. Throws NumericError on a
/// zero-variance segment and DataError on fewer than two samples.
SignalSegment preprocess(const SignalSegment& segment);

/// Draw `count` contiguous blocks of `block_len` samples from uniformly chosen
/// segments at uniformly chosen offsets, then preprocess each block.
std::vector<SignalSegment> sample_blocks(const std::vector<SignalSegment>& segments,
                                         std::size_t block_len, std::size_t count,
                                         std::uint64_t seed);

} // namespace dictmon

#endif
