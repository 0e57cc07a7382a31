#ifndef DICTMON_DICTIONARY_HPP
#define DICTMON_DICTIONARY_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dictmon {

/// A unit-norm waveform. Length only ever grows (zeros appended at a tail).
struct Atom {
  int id = 0;
  std::vector<double> waveform;

  std::size_t size() const { return waveform.size(); }
  bool operator==(const Atom&) const = default;
};

/// Ordered set of atoms plus an update counter. Atom ids are unique and stay
/// attached to the same waveform across updates.
struct Dictionary {
  std::vector<Atom> atoms;
  std::uint64_t generation = 0;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
  std::size_t max_atom_length() const;

  /// Position of the atom with the given id. Throws DataError if absent.
  std::size_t index_of(int id) const;
  const Atom& by_id(int id) const { return atoms[index_of(id)]; }

  bool operator==(const Dictionary&) const = default;
};

double l2_norm(std::span<const double> x);

/// Scale to unit L2 norm. Throws NumericError on an all-zero waveform.
void normalize(Atom& atom);

/// `pad` zeros, `core_len` standard Gaussian draws, `pad` zeros, normalized.
/// The same seed always yields the same dictionary.
Dictionary init_pseudorandom(std::size_t num_atoms, std::size_t core_len, std::size_t pad,
                             std::uint64_t seed);

/// Tail growth: for each end independently, if the RMS of the outermost
/// `tail_len` samples exceeds `ratio` times the RMS of the whole atom, append
/// `tail_len` zeros on that end. The result is re-normalized.
Atom maybe_grow(const Atom& atom, std::size_t tail_len, double ratio);

// Binary format, all little-endian:
//   "VDCT" | u32 version (1) | u32 atom count |
//   per atom: u32 id | u32 length | length x f64 |
//   u64 generation
inline constexpr std::uint32_t kDictionaryFormatVersion = 1;

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary load_dictionary(const std::filesystem::path& path);

std::vector<unsigned char> serialize_dictionary(const Dictionary& dict);
Dictionary deserialize_dictionary(std::span<const unsigned char> bytes);

} // namespace dictmon

#endif
