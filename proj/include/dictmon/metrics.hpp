#ifndef DICTMON_METRICS_HPP
#define DICTMON_METRICS_HPP

#include "dictmon/coding.hpp"
#include "dictmon/dictionary.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dictmon {

enum class IndicatorKind { fidelity_db, distance_deg, adaptation_deg, mad_score, slope, min_diff };

std::string to_string(IndicatorKind kind);
IndicatorKind parse_indicator_kind(const std::string& name);

struct IndicatorPoint {
  std::int64_t timestamp = 0;
  double value = 0.0;
  bool operator==(const IndicatorPoint&) const = default;
};

/// Time series of one indicator for one machine. Timestamps strictly increase.
struct IndicatorSeries {
  std::string machine_id;
  IndicatorKind kind = IndicatorKind::distance_deg;
  std::vector<IndicatorPoint> points;

  /// Value at t by linear interpolation; nullopt outside the covered range.
  std::optional<double> value_at(std::int64_t t) const;
};

/// Throws DataError unless timestamps strictly increase and values are finite.
void validate_series(const IndicatorSeries& series);

/// Largest normalized |inner product| between `atom` and any atom of `dict`
/// over every relative shift with overlap. Atoms whose id equals
/// `exclude_id` are skipped. Result in [0, 1].
double atom_coherence(const Dictionary& dict, const Atom& atom,
                      std::optional<int> exclude_id = std::nullopt);

/// arccos of a coherence value, in degrees.
double coherence_to_degrees(double mu);

/// Angle between `atom` and its best match in `dict`, in degrees.
/// Equal to coherence_to_degrees(atom_coherence(dict, atom, exclude_id)) but
/// evaluated as 2*asin(|u - v| / 2) at the best alignment, which keeps
/// identical atoms at exactly 0.
double atom_similarity_beta(const Dictionary& dict, const Atom& atom,
                            std::optional<int> exclude_id = std::nullopt);

/// Symmetric dictionary distance in degrees:
/// (1 / 2M) * (sum over a of beta(b, a_j) + sum over b of beta(a, b_j)).
/// A dissimilarity score in [0, 90]; the triangle inequality is not claimed.
double dictionary_distance(const Dictionary& a, const Dictionary& b);

struct DictionarySnapshot {
  std::int64_t timestamp = 0;
  Dictionary dictionary;
};

/// Distance between the snapshots nearest at-or-before t and t - delta
/// (snapshots sorted by timestamp). With `per_day` the result is divided by
/// delta expressed in days.
double adaptation_rate(std::span<const DictionarySnapshot> snapshots, std::int64_t t,
                       std::int64_t delta, bool per_day = false);

inline constexpr double kFidelityCapDb = 200.0;

/// 20 log10(|reconstruction| / |residual|), reconstruction = segment - residual.
/// Capped at +200 dB for a (near) exact model.
double fidelity_db(const SparseCode& code, std::span<const double> segment);

/// First-order low-pass: y0 = x0, y_t = a y_{t-1} + (1 - a) x_t, a = exp(-1 / time_constant).
IndicatorSeries lowpass(const IndicatorSeries& series, double time_constant);

inline constexpr double kMadFloor = 1e-6;

struct MadScore {
  std::string machine_id;
  double value = 0.0;
  double score = 0.0;
  bool saturated = false; // population MAD below the floor
};

/// |value - median| / max(MAD, floor) for every machine with a value at t.
/// Needs at least three machines.
std::vector<MadScore> mad_scores(std::span<const IndicatorSeries> population, std::int64_t t,
                                 double floor = kMadFloor);

/// MAD scores at every timestamp where at least three machines have a value.
std::vector<IndicatorSeries> mad_score_series(std::span<const IndicatorSeries> population,
                                              double floor = kMadFloor);

double median(std::vector<double> values);

} // namespace dictmon

#endif
