#ifndef DICTMON_CODING_HPP
#define DICTMON_CODING_HPP

#include "dictmon/dictionary.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dictmon {

enum class Algorithm { mp, omp };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);

/// Sparse coding configuration.
///
/// The instance budget N for a segment of L samples is
/// `quantum * floor((1 - sparsity) * L / quantum)`, i.e. instances are
/// allotted in whole multiples of `instance_quantum`. With the default
/// quantum of 64 this gives 1280 instances for 12800 samples and 1600 for
/// 16384 samples at 90% sparsity. If the quantized budget is zero the plain
/// `ceil((1 - sparsity) * L)` is used so N >= 1. `instance_count`, when
/// set, overrides the rule entirely.
struct CodingConfig {
  Algorithm algorithm = Algorithm::mp;
  double sparsity = 0.9;
  std::size_t instance_quantum = 64;
  std::optional<std::size_t> instance_count;
};

std::size_t instance_budget(const CodingConfig& cfg, std::size_t segment_len);

struct AtomInstance {
  int atom_id = 0;
  std::size_t offset = 0; // start of the atom support in the segment
  double amplitude = 0.0;

  bool operator==(const AtomInstance&) const = default;
};

struct SparseCode {
  std::vector<AtomInstance> instances;
  std::vector<double> residual;
  std::uint64_t dictionary_generation = 0;
  /// Set when the residual had no correlation left before N instances.
  bool exhausted = false;
  /// Squared residual norm before the first and after every selection
  /// (size instances.size() + 1).
  std::vector<double> residual_energy;
};

/// out[tau] = sum_t signal[tau + t] * atom[t] for tau in [0, len(signal) - len(atom)].
std::vector<double> cross_correlate(std::span<const double> signal, std::span<const double> atom);

/// Exhaustive argmax of |<residual, atom shifted by tau>| over every atom and
/// fully interior shift. Ties go to the lowest atom id, then lowest offset.
/// Returns nullopt when every correlation is exactly zero.
std::optional<AtomInstance> select_best(std::span<const double> residual, const Dictionary& dict);

SparseCode mp_encode(std::span<const double> segment, const Dictionary& dict,
                     const CodingConfig& cfg);
SparseCode omp_encode(std::span<const double> segment, const Dictionary& dict,
                      const CodingConfig& cfg);
/// Dispatch on cfg.algorithm.
SparseCode encode(std::span<const double> segment, const Dictionary& dict, const CodingConfig& cfg);

/// sum_i a_i * atom_{m(i)} placed at offset tau_i, over `length` samples.
std::vector<double> reconstruct(std::span<const AtomInstance> instances, const Dictionary& dict,
                                std::size_t length);

/// Least-squares amplitudes for a fixed set of (atom, offset) placements.
/// Returns the instances with re-fitted amplitudes.
std::vector<AtomInstance> refit_amplitudes(std::span<const double> segment,
                                           std::span<const AtomInstance> instances,
                                           const Dictionary& dict);

} // namespace dictmon

#endif
