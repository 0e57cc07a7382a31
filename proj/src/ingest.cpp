#include "dictmon/ingest.hpp"

#include "dictmon/error.hpp"
#include "dictmon/rng.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace dictmon {

namespace {

constexpr const char* kCsvHeader = "timestamp,sample_rate,source_id";

struct SegmentMeta {
  std::int64_t timestamp = 0;
  double sample_rate = 0.0;
  std::string source_id;
};

SegmentMeta parse_meta_fields(const std::string& line, const fs::path& path) {
  const auto fields = detail::split(line, ',');
  if (fields.size() != 3)
    throw ParseError(path.string() + ":1: expected 'timestamp,sample_rate,source_id' values");
  SegmentMeta meta;
  if (detail::trim(fields[0]).empty())
    throw ParseError(path.string() + ":1: timestamp missing");
  meta.timestamp = detail::parse_int(fields[0], path.string() + ":1: timestamp");
  meta.sample_rate = detail::parse_double(fields[1], path.string() + ":1: sample_rate");
  meta.source_id = detail::trim(fields[2]);
  return meta;
}

SignalSegment read_csv_segment(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (!detail::trim(line).empty())
        return true;
    }
    return false;
  };
  if (!next_line())
    throw ParseError(path.string() + ": empty file, timestamp missing");
  if (detail::trim(line) == kCsvHeader && !next_line())
    throw ParseError(path.string() + ": header without metadata values, timestamp missing");
  const SegmentMeta meta = parse_meta_fields(line, path);

  SignalSegment seg;
  seg.timestamp = meta.timestamp;
  seg.sample_rate = meta.sample_rate;
  seg.source_id = meta.source_id;
  while (next_line())
    seg.samples.push_back(
        detail::parse_double(line, path.string() + ":" + std::to_string(line_no)));
  return seg;
}

SegmentMeta read_sidecar(const fs::path& data_path) {
  fs::path meta_path = data_path;
  meta_path += ".meta";
  std::ifstream in(meta_path);
  if (!in)
    throw IoError("cannot open metadata sidecar " + meta_path.string());
  SegmentMeta meta;
  bool have_ts = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(meta_path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    const std::string where = meta_path.string() + ":" + std::to_string(line_no);
    if (key == "timestamp") {
      meta.timestamp = detail::parse_int(value, where);
      have_ts = true;
    } else if (key == "sample_rate") {
      meta.sample_rate = detail::parse_double(value, where);
    } else if (key == "source_id") {
      meta.source_id = value;
    }
  }
  if (!have_ts)
    throw ParseError(meta_path.string() + ": timestamp missing");
  return meta;
}

SignalSegment read_raw_segment(const fs::path& path, std::size_t width) {
  const SegmentMeta meta = read_sidecar(path);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() % width != 0)
    throw ParseError(path.string() + ": trailing partial sample at byte offset " +
                     std::to_string(bytes.size() - bytes.size() % width));
  SignalSegment seg;
  seg.timestamp = meta.timestamp;
  seg.sample_rate = meta.sample_rate;
  seg.source_id = meta.source_id;
  seg.samples.reserve(bytes.size() / width);
  for (std::size_t off = 0; off < bytes.size(); off += width) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < width; ++b)
      bits |= static_cast<std::uint64_t>(bytes[off + b]) << (8 * b);
    if (width == 4)
      seg.samples.push_back(std::bit_cast<float>(static_cast<std::uint32_t>(bits)));
    else
      seg.samples.push_back(std::bit_cast<double>(bits));
  }
  return seg;
}

bool matches_format(const fs::path& p, SampleFormat format) {
  const std::string ext = p.extension().string();
  switch (format) {
  case SampleFormat::csv:
    return ext == ".csv";
  case SampleFormat::raw_f32le:
    return ext == ".f32" || ext == ".raw" || ext == ".bin";
  case SampleFormat::raw_f64le:
    return ext == ".f64" || ext == ".raw" || ext == ".bin";
  }
  return false;
}

void validate(const SignalSegment& seg, const fs::path& path) {
  if (seg.samples.empty())
    throw ParseError(path.string() + ": segment has no samples");
  if (!(seg.sample_rate > 0.0))
    throw ParseError(path.string() + ": sample_rate must be positive");
}

} // namespace

SampleFormat parse_sample_format(const std::string& name) {
  if (name == "csv")
    return SampleFormat::csv;
  if (name == "raw_f32le" || name == "f32")
    return SampleFormat::raw_f32le;
  if (name == "raw_f64le" || name == "f64")
    return SampleFormat::raw_f64le;
  throw ConfigError("unknown sample format '" + name + "'");
}

std::string to_string(SampleFormat format) {
  switch (format) {
  case SampleFormat::csv:
    return "csv";
  case SampleFormat::raw_f32le:
    return "raw_f32le";
  case SampleFormat::raw_f64le:
    return "raw_f64le";
  }
  return "?";
}

double rms(std::span<const double> x) {
  if (x.empty())
    return 0.0;
  double acc = 0.0;
  for (double v : x)
    acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double mean(std::span<const double> x) {
  if (x.empty())
    return 0.0;
  double acc = 0.0;
  for (double v : x)
    acc += v;
  return acc / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty())
    return 0.0;
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x)
    acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size());
}

SignalSegment read_segment(const fs::path& path, SampleFormat format) {
  SignalSegment seg;
  switch (format) {
  case SampleFormat::csv:
    seg = read_csv_segment(path);
    break;
  case SampleFormat::raw_f32le:
    seg = read_raw_segment(path, 4);
    break;
  case SampleFormat::raw_f64le:
    seg = read_raw_segment(path, 8);
    break;
  }
  validate(seg, path);
  seg.raw_rms = rms(seg.samples);
  return seg;
}

void write_segment(const fs::path& path, const SignalSegment& segment, SampleFormat format) {
  if (format == SampleFormat::csv) {
    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write " + path.string());
    out << kCsvHeader << '\n'
        << segment.timestamp << ',' << detail::format_double(segment.sample_rate) << ','
        << segment.source_id << '\n';
    for (double v : segment.samples)
      out << detail::format_double(v) << '\n';
    if (!out)
      throw IoError("write failed for " + path.string());
    return;
  }
  const std::size_t width = format == SampleFormat::raw_f32le ? 4 : 8;
  std::vector<char> bytes(segment.samples.size() * width);
  for (std::size_t i = 0; i < segment.samples.size(); ++i) {
    std::uint64_t bits = width == 4
                             ? std::bit_cast<std::uint32_t>(static_cast<float>(segment.samples[i]))
                             : std::bit_cast<std::uint64_t>(segment.samples[i]);
    for (std::size_t b = 0; b < width; ++b)
      bytes[i * width + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  fs::path meta_path = path;
  meta_path += ".meta";
  std::ofstream meta(meta_path);
  if (!meta)
    throw IoError("cannot write " + meta_path.string());
  meta << "timestamp=" << segment.timestamp << '\n'
       << "sample_rate=" << detail::format_double(segment.sample_rate) << '\n'
       << "source_id=" << segment.source_id << '\n';
}

std::vector<SignalSegment> load_segments(const fs::path& path, SampleFormat format) {
  std::error_code ec;
  if (!fs::exists(path, ec))
    throw IoError("no such file or directory: " + path.string());

  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && matches_format(entry.path(), format))
        files.push_back(entry.path());
    }
  } else {
    files.push_back(path);
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::vector<std::pair<SignalSegment, std::string>> loaded;
  loaded.reserve(files.size());
  for (const auto& f : files)
    loaded.emplace_back(read_segment(f, format), f.filename().string());

  std::stable_sort(loaded.begin(), loaded.end(), [](const auto& a, const auto& b) {
    if (a.first.timestamp != b.first.timestamp)
      return a.first.timestamp < b.first.timestamp;
    return a.second < b.second;
  });

  std::vector<SignalSegment> out;
  out.reserve(loaded.size());
  for (auto& [seg, name] : loaded)
    out.push_back(std::move(seg));
  return out;
}

std::vector<SignalSegment> gate_by_rms(const std::vector<SignalSegment>& segments,
                                       const SegmentGate& gate) {
  if (gate.rms_threshold < 0.0)
    throw ConfigError("rms_threshold must be >= 0");
  std::vector<SignalSegment> kept;
  for (const auto& seg : segments) {
    if (rms(seg.samples) > gate.rms_threshold)
      kept.push_back(seg);
  }
  return kept;
}

SignalSegment preprocess(const SignalSegment& segment) {
  const auto& x = segment.samples;
  if (x.size() < 2)
    throw DataError("preprocess needs at least two samples");
  const double m = mean(x);
  const double var = variance(x);
  if (!(var > 0.0))
    throw NumericError("zero-variance segment (timestamp " + std::to_string(segment.timestamp) +
                       ")");
  SignalSegment out = segment;
  const double inv_sd = 1.0 / std::sqrt(var);
  for (double& v : out.samples)
    v = (v - m) * inv_sd;
  // Second pass removes the rounding left by the first.
  const double m2 = mean(out.samples);
  const double sd2 = std::sqrt(variance(out.samples));
  for (double& v : out.samples)
    v = (v - m2) / sd2;
  if (segment.raw_rms == 0.0)
    out.raw_rms = rms(segment.samples);
  return out;
}

std::vector<SignalSegment> sample_blocks(const std::vector<SignalSegment>& segments,
                                         std::size_t block_len, std::size_t count,
                                         std::uint64_t seed) {
  if (count == 0)
    return {};
  if (segments.empty())
    throw DataError("sample_blocks: no segments to sample from");
  if (block_len == 0)
    throw ConfigError("sample_blocks: block_len must be positive");
  for (const auto& seg : segments) {
    if (seg.size() < block_len)
      throw DataError("sample_blocks: segment '" + seg.source_id + "' at timestamp " +
                      std::to_string(seg.timestamp) + " has " + std::to_string(seg.size()) +
                      " samples, shorter than block_len " + std::to_string(block_len));
  }
  Rng rng(seed);
  std::vector<SignalSegment> blocks;
  blocks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& seg = segments[rng.index(segments.size())];
    const std::size_t offset = rng.index(seg.size() - block_len + 1);
    SignalSegment block;
    block.sample_rate = seg.sample_rate;
    block.timestamp = seg.timestamp;
    block.source_id = seg.source_id;
    block.samples.assign(seg.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                         seg.samples.begin() + static_cast<std::ptrdiff_t>(offset + block_len));
    block.raw_rms = rms(block.samples);
    blocks.push_back(preprocess(block));
  }
  return blocks;
}

} // namespace dictmon
