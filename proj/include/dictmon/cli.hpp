#ifndef DICTMON_CLI_HPP
#define DICTMON_CLI_HPP

#include "dictmon/coding.hpp"
#include "dictmon/ingest.hpp"
#include "dictmon/learning.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dictmon {

/// Effective run configuration. Every field can be set from a flat
/// `key=value` file (keys are the field names) or with `--set key=value`;
/// dedicated flags such as --eta override both.
struct RunConfig {
  Algorithm algorithm = Algorithm::mp;
  double sparsity = 0.9;
  std::size_t instance_quantum = 64;
  double eta = 1e-6;
  double noise_var = 1.0;
  std::size_t atoms = 8;
  std::size_t core_len = 50;
  std::size_t pad = 10;
  std::size_t tail_len = 10;
  double tail_ratio = 0.1;
  double rms_gate = 0.5;
  std::size_t train_blocks = 5000;
  std::size_t block_len = 12800;
  std::uint64_t seed = 1;
  SampleFormat format = SampleFormat::csv;
  double time_constant = 30.0;
  std::size_t slope_window = 30;
  std::size_t jobs = 1;

  /// Throws ConfigError on an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::filesystem::path& path);
  std::string to_text() const;

  CodingConfig coding() const;
  LearnConfig learning() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Entry point of the `dictmon` tool. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dictmon

#endif
