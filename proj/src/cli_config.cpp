#include "dictmon/cli.hpp"

#include "dictmon/error.hpp"
#include "dictmon/rng.hpp"
#include "text_util.hpp"

#include <fstream>
#include <sstream>

namespace dictmon {

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  try {
    v = detail::parse_int(value, key);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  if (v < 0)
    throw ConfigError(key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return detail::parse_double(value, key);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

} // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  std::string key = detail::trim(raw_key);
  for (char& c : key)
    if (c == '-')
      c = '_';
  const std::string value = detail::trim(raw_value);
  RunConfig next = *this;
  try {
    if (key == "algorithm" || key == "algo")
      next.algorithm = parse_algorithm(value);
    else if (key == "sparsity")
      next.sparsity = parse_real(key, value);
    else if (key == "instance_quantum")
      next.instance_quantum = parse_count(key, value);
    else if (key == "eta")
      next.eta = parse_real(key, value);
    else if (key == "noise_var")
      next.noise_var = parse_real(key, value);
    else if (key == "atoms")
      next.atoms = parse_count(key, value);
    else if (key == "core_len")
      next.core_len = parse_count(key, value);
    else if (key == "pad")
      next.pad = parse_count(key, value);
    else if (key == "tail_len")
      next.tail_len = parse_count(key, value);
    else if (key == "tail_ratio")
      next.tail_ratio = parse_real(key, value);
    else if (key == "rms_gate")
      next.rms_gate = parse_real(key, value);
    else if (key == "train_blocks")
      next.train_blocks = parse_count(key, value);
    else if (key == "block_len")
      next.block_len = parse_count(key, value);
    else if (key == "seed")
      next.seed = parse_count(key, value);
    else if (key == "format")
      next.format = parse_sample_format(value);
    else if (key == "time_constant")
      next.time_constant = parse_real(key, value);
    else if (key == "slope_window")
      next.slope_window = parse_count(key, value);
    else if (key == "jobs")
      next.jobs = parse_count(key, value);
    else if (key == "rng") {
      if (value != Rng::algorithm)
        throw ConfigError("unsupported rng '" + value + "' (this build uses " + Rng::algorithm + ")");
    } else
      throw ConfigError("unknown configuration key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (next.sparsity < 0.0 || next.sparsity >= 1.0)
    throw ConfigError("sparsity must lie in [0, 1)");
  if (next.eta < 0.0)
    throw ConfigError("eta must be >= 0");
  if (!(next.noise_var > 0.0))
    throw ConfigError("noise_var must be > 0");
  if (next.rms_gate < 0.0)
    throw ConfigError("rms_gate must be >= 0");
  if (next.atoms == 0 || next.core_len == 0 || next.block_len == 0)
    throw ConfigError("atoms, core_len and block_len must be positive");
  *this = next;
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "algorithm=" << to_string(algorithm) << '\n'
     << "sparsity=" << detail::format_double(sparsity) << '\n'
     << "instance_quantum=" << instance_quantum << '\n'
     << "eta=" << detail::format_double(eta) << '\n'
     << "noise_var=" << detail::format_double(noise_var) << '\n'
     << "atoms=" << atoms << '\n'
     << "core_len=" << core_len << '\n'
     << "pad=" << pad << '\n'
     << "tail_len=" << tail_len << '\n'
     << "tail_ratio=" << detail::format_double(tail_ratio) << '\n'
     << "rms_gate=" << detail::format_double(rms_gate) << '\n'
     << "train_blocks=" << train_blocks << '\n'
     << "block_len=" << block_len << '\n'
     << "seed=" << seed << '\n'
     << "rng=" << Rng::algorithm << '\n'
     << "format=" << to_string(format) << '\n'
     << "time_constant=" << detail::format_double(time_constant) << '\n'
     << "slope_window=" << slope_window << '\n'
     << "jobs=" << jobs << '\n';
  return os.str();
}

CodingConfig RunConfig::coding() const {
  CodingConfig c;
  c.algorithm = algorithm;
  c.sparsity = sparsity;
  c.instance_quantum = instance_quantum;
  return c;
}

LearnConfig RunConfig::learning() const {
  LearnConfig l;
  l.eta = eta;
  l.noise_var = noise_var;
  l.tail_len = tail_len;
  l.tail_ratio = tail_ratio;
  return l;
}

} // namespace dictmon
