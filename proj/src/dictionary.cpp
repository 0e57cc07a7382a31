#include "dictmon/dictionary.hpp"

#include "dictmon/error.hpp"
#include "dictmon/rng.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

namespace dictmon {

std::size_t Dictionary::max_atom_length() const {
  std::size_t n = 0;
  for (const auto& a : atoms)
    n = std::max(n, a.size());
  return n;
}

std::size_t Dictionary::index_of(int id) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].id == id)
      return i;
  }
  throw DataError("unknown atom id " + std::to_string(id));
}

double l2_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x)
    acc += v * v;
  return std::sqrt(acc);
}

void normalize(Atom& atom) {
  const double n = l2_norm(atom.waveform);
  if (!(n > 0.0) || !std::isfinite(n))
    throw NumericError("cannot normalize atom " + std::to_string(atom.id) + " (norm " +
                       std::to_string(n) + ")");
  for (double& v : atom.waveform)
    v /= n;
}

Dictionary init_pseudorandom(std::size_t num_atoms, std::size_t core_len, std::size_t pad,
                             std::uint64_t seed) {
  if (num_atoms == 0 || core_len == 0)
    throw ConfigError("init_pseudorandom: num_atoms and core_len must be positive");
  Rng rng(seed);
  Dictionary dict;
  dict.atoms.reserve(num_atoms);
  for (std::size_t m = 0; m < num_atoms; ++m) {
    Atom atom;
    atom.id = static_cast<int>(m);
    atom.waveform.assign(core_len + 2 * pad, 0.0);
    for (std::size_t k = 0; k < core_len; ++k)
      atom.waveform[pad + k] = rng.gaussian();
    normalize(atom);
    dict.atoms.push_back(std::move(atom));
  }
  return dict;
}

Atom maybe_grow(const Atom& atom, std::size_t tail_len, double ratio) {
  Atom out = atom;
  const std::size_t n = atom.size();
  if (tail_len == 0 || n < 2 * tail_len)
    return out;
  const std::span<const double> w(atom.waveform);
  const double whole = l2_norm(w) / std::sqrt(static_cast<double>(n));
  const double lead = l2_norm(w.first(tail_len)) / std::sqrt(static_cast<double>(tail_len));
  const double trail = l2_norm(w.last(tail_len)) / std::sqrt(static_cast<double>(tail_len));
  const bool grow_lead = lead > ratio * whole;
  const bool grow_trail = trail > ratio * whole;
  if (!grow_lead && !grow_trail)
    return out;
  if (grow_lead)
    out.waveform.insert(out.waveform.begin(), tail_len, 0.0);
  if (grow_trail)
    out.waveform.insert(out.waveform.end(), tail_len, 0.0);
  normalize(out);
  return out;
}

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b)
    out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

class Reader {
public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::uint64_t take(std::size_t width, const char* what) {
    if (pos_ + width > bytes_.size())
      throw FormatError("corrupt dictionary: truncated while reading " + std::string(what) +
                        " at byte offset " + std::to_string(pos_));
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < width; ++b)
      v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += width;
    return v;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

} // namespace

std::vector<unsigned char> serialize_dictionary(const Dictionary& dict) {
  std::vector<unsigned char> out = {'V', 'D', 'C', 'T'};
  put_u32(out, kDictionaryFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(dict.atoms.size()));
  for (const auto& atom : dict.atoms) {
    put_u32(out, static_cast<std::uint32_t>(atom.id));
    put_u32(out, static_cast<std::uint32_t>(atom.size()));
    for (double v : atom.waveform)
      put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  put_u64(out, dict.generation);
  return out;
}

Dictionary deserialize_dictionary(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4)
    throw FormatError("corrupt dictionary: truncated magic at byte offset " +
                      std::to_string(bytes.size()));
  if (bytes[0] != 'V' || bytes[1] != 'D' || bytes[2] != 'C' || bytes[3] != 'T')
    throw FormatError("not a dictionary file: bad magic");
  Reader rd(bytes.subspan(4));
  const auto version = static_cast<std::uint32_t>(rd.take(4, "version"));
  if (version != kDictionaryFormatVersion)
    throw FormatError("unsupported dictionary format version " + std::to_string(version) +
                      " (expected " + std::to_string(kDictionaryFormatVersion) + ")");
  const auto count = static_cast<std::uint32_t>(rd.take(4, "atom count"));
  Dictionary dict;
  std::set<int> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    Atom atom;
    atom.id = static_cast<int>(static_cast<std::uint32_t>(rd.take(4, "atom id")));
    const auto length = static_cast<std::uint32_t>(rd.take(4, "atom length"));
    if (static_cast<std::uint64_t>(length) * 8 > rd.remaining())
      throw FormatError("corrupt dictionary: atom " + std::to_string(atom.id) + " declares " +
                        std::to_string(length) + " samples but file is truncated at byte offset " +
                        std::to_string(4 + rd.pos() + rd.remaining()));
    atom.waveform.reserve(length);
    for (std::uint32_t k = 0; k < length; ++k)
      atom.waveform.push_back(std::bit_cast<double>(rd.take(8, "sample")));
    if (!seen.insert(atom.id).second)
      throw FormatError("corrupt dictionary: duplicate atom id " + std::to_string(atom.id));
    dict.atoms.push_back(std::move(atom));
  }
  dict.generation = rd.take(8, "generation");
  if (rd.remaining() != 0)
    throw FormatError("corrupt dictionary: " + std::to_string(rd.remaining()) +
                      " trailing bytes at byte offset " + std::to_string(4 + rd.pos()));
  return dict;
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  const auto bytes = serialize_dictionary(dict);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write dictionary " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("write failed for " + path.string());
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open dictionary " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return deserialize_dictionary(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

} // namespace dictmon
