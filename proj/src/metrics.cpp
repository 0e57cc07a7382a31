#include "dictmon/metrics.hpp"

#include "dictmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace dictmon {

std::string to_string(IndicatorKind kind) {
  switch (kind) {
  case IndicatorKind::fidelity_db:
    return "fidelity_db";
  case IndicatorKind::distance_deg:
    return "distance_deg";
  case IndicatorKind::adaptation_deg:
    return "adaptation_deg";
  case IndicatorKind::mad_score:
    return "mad_score";
  case IndicatorKind::slope:
    return "slope";
  case IndicatorKind::min_diff:
    return "min_diff";
  }
  return "?";
}

IndicatorKind parse_indicator_kind(const std::string& name) {
  for (auto k : {IndicatorKind::fidelity_db, IndicatorKind::distance_deg,
                 IndicatorKind::adaptation_deg, IndicatorKind::mad_score, IndicatorKind::slope,
                 IndicatorKind::min_diff}) {
    if (to_string(k) == name)
      return k;
  }
  throw ParseError("unknown indicator kind '" + name + "'");
}

std::optional<double> IndicatorSeries::value_at(std::int64_t t) const {
  if (points.empty() || t < points.front().timestamp || t > points.back().timestamp)
    return std::nullopt;
  const auto it = std::lower_bound(points.begin(), points.end(), t,
                                   [](const IndicatorPoint& p, std::int64_t ts) {
                                     return p.timestamp < ts;
                                   });
  if (it->timestamp == t)
    return it->value;
  const auto prev = it - 1;
  const double w = static_cast<double>(t - prev->timestamp) /
                   static_cast<double>(it->timestamp - prev->timestamp);
  return prev->value + w * (it->value - prev->value);
}

void validate_series(const IndicatorSeries& series) {
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    if (!std::isfinite(series.points[i].value))
      throw DataError("series '" + series.machine_id + "': non-finite value at index " +
                      std::to_string(i));
    if (i > 0 && series.points[i].timestamp <= series.points[i - 1].timestamp)
      throw DataError("series '" + series.machine_id + "': timestamps not strictly increasing at index " +
                      std::to_string(i));
  }
}

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

struct Alignment {
  double coherence = 0.0;
  double angle_deg = 90.0;
};

/// Best shifted alignment of u against v (both treated as zero-padded).
Alignment best_alignment(std::span<const double> u, std::span<const double> v) {
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (!(nu > 0.0) || !(nv > 0.0))
    throw NumericError("coherence of an all-zero atom is undefined");
  const auto p = static_cast<std::ptrdiff_t>(u.size());
  const auto q = static_cast<std::ptrdiff_t>(v.size());
  // c(d) = sum_t u[t] v[t - d], d in [-(q-1), p-1]
  double best = -1.0;
  double best_signed = 0.0;
  std::ptrdiff_t best_d = 0;
  for (std::ptrdiff_t d = -(q - 1); d <= p - 1; ++d) {
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, d);
    const std::ptrdiff_t t1 = std::min(p, q + d);
    double acc = 0.0;
    for (std::ptrdiff_t t = t0; t < t1; ++t)
      acc += u[static_cast<std::size_t>(t)] * v[static_cast<std::size_t>(t - d)];
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_signed = acc;
      best_d = d;
    }
  }
  Alignment out;
  out.coherence = std::min(1.0, best / (nu * nv));
  const double s = best_signed < 0.0 ? -1.0 : 1.0;
  // |u/|u| - s v(. - d)/|v||^2 over the union of both supports
  const std::ptrdiff_t lo = std::min<std::ptrdiff_t>(0, best_d);
  const std::ptrdiff_t hi = std::max(p, q + best_d);
  double dist2 = 0.0;
  for (std::ptrdiff_t t = lo; t < hi; ++t) {
    const double a = (t >= 0 && t < p) ? u[static_cast<std::size_t>(t)] / nu : 0.0;
    const std::ptrdiff_t k = t - best_d;
    const double b = (k >= 0 && k < q) ? s * v[static_cast<std::size_t>(k)] / nv : 0.0;
    dist2 += (a - b) * (a - b);
  }
  out.angle_deg = 2.0 * std::asin(std::min(1.0, std::sqrt(dist2) / 2.0)) * kRadToDeg;
  return out;
}

Alignment best_in_dictionary(const Dictionary& dict, const Atom& atom,
                             std::optional<int> exclude_id) {
  Alignment best{-1.0, 90.0};
  bool any = false;
  for (const auto& other : dict.atoms) {
    if (exclude_id && other.id == *exclude_id)
      continue;
    any = true;
    const Alignment a = best_alignment(atom.waveform, other.waveform);
    if (a.coherence > best.coherence || (a.coherence == best.coherence && a.angle_deg < best.angle_deg))
      best = a;
  }
  if (!any)
    throw DataError("coherence: empty comparison set");
  return best;
}

} // namespace

double atom_coherence(const Dictionary& dict, const Atom& atom, std::optional<int> exclude_id) {
  return best_in_dictionary(dict, atom, exclude_id).coherence;
}

double coherence_to_degrees(double mu) {
  return std::acos(std::clamp(mu, 0.0, 1.0)) * kRadToDeg;
}

double atom_similarity_beta(const Dictionary& dict, const Atom& atom,
                            std::optional<int> exclude_id) {
  return best_in_dictionary(dict, atom, exclude_id).angle_deg;
}

double dictionary_distance(const Dictionary& a, const Dictionary& b) {
  if (a.size() != b.size())
    throw DataError("dictionary_distance: atom counts differ (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  if (a.empty())
    throw DataError("dictionary_distance: empty dictionaries");
  double sum = 0.0;
  for (const auto& atom : a.atoms)
    sum += atom_similarity_beta(b, atom);
  for (const auto& atom : b.atoms)
    sum += atom_similarity_beta(a, atom);
  return sum / (2.0 * static_cast<double>(a.size()));
}

double adaptation_rate(std::span<const DictionarySnapshot> snapshots, std::int64_t t,
                       std::int64_t delta, bool per_day) {
  if (delta < 0)
    throw ConfigError("adaptation_rate: delta must be >= 0");
  auto at_or_before = [&](std::int64_t ts) -> const DictionarySnapshot* {
    const auto it = std::upper_bound(snapshots.begin(), snapshots.end(), ts,
                                     [](std::int64_t x, const DictionarySnapshot& s) {
                                       return x < s.timestamp;
                                     });
    if (it == snapshots.begin())
      return nullptr;
    return &*(it - 1);
  };
  const DictionarySnapshot* now = at_or_before(t);
  const DictionarySnapshot* then = at_or_before(t - delta);
  if (now == nullptr || then == nullptr)
    throw DataError("adaptation_rate: no snapshot at or before " + std::to_string(t - delta));
  const double d = now == then ? 0.0 : dictionary_distance(now->dictionary, then->dictionary);
  if (!per_day)
    return d;
  if (delta == 0)
    throw ConfigError("adaptation_rate: cannot normalize by a zero time step");
  return d / (static_cast<double>(delta) / 86400.0);
}

double fidelity_db(const SparseCode& code, std::span<const double> segment) {
  if (code.residual.size() != segment.size())
    throw DataError("fidelity_db: code and segment lengths differ");
  double model2 = 0.0, resid2 = 0.0;
  for (std::size_t t = 0; t < segment.size(); ++t) {
    const double m = segment[t] - code.residual[t];
    model2 += m * m;
    resid2 += code.residual[t] * code.residual[t];
  }
  const double model = std::sqrt(model2);
  const double resid = std::sqrt(resid2);
  if (model == 0.0 && resid == 0.0)
    throw NumericError("fidelity_db: empty model (zero reconstruction and residual)");
  if (resid < 1e-12 * model)
    return kFidelityCapDb;
  if (model == 0.0)
    return -kFidelityCapDb;
  return std::min(kFidelityCapDb, 20.0 * std::log10(model / resid));
}

IndicatorSeries lowpass(const IndicatorSeries& series, double time_constant) {
  if (!(time_constant >= 1.0))
    throw ConfigError("lowpass: time_constant must be >= 1");
  IndicatorSeries out = series;
  const double alpha = std::exp(-1.0 / time_constant);
  for (std::size_t i = 1; i < out.points.size(); ++i)
    out.points[i].value = alpha * out.points[i - 1].value + (1.0 - alpha) * series.points[i].value;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty())
    throw DataError("median of an empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1)
    return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<MadScore> mad_scores(std::span<const IndicatorSeries> population, std::int64_t t,
                                 double floor) {
  std::vector<MadScore> out;
  for (const auto& s : population) {
    if (const auto v = s.value_at(t))
      out.push_back({s.machine_id, *v, 0.0, false});
  }
  if (out.size() < 3)
    throw DataError("mad_scores: need at least 3 machines with a value at t=" + std::to_string(t) +
                    ", have " + std::to_string(out.size()));
  std::vector<double> values;
  for (const auto& m : out)
    values.push_back(m.value);
  const double med = median(values);
  std::vector<double> dev;
  for (double v : values)
    dev.push_back(std::abs(v - med));
  const double mad = median(dev);
  const bool saturated = mad < floor;
  const double denom = std::max(mad, floor);
  for (auto& m : out) {
    m.score = std::abs(m.value - med) / denom;
    m.saturated = saturated;
  }
  return out;
}

std::vector<IndicatorSeries> mad_score_series(std::span<const IndicatorSeries> population,
                                              double floor) {
  std::set<std::int64_t> stamps;
  for (const auto& s : population)
    for (const auto& p : s.points)
      stamps.insert(p.timestamp);
  std::vector<IndicatorSeries> out;
  std::map<std::string, std::size_t> index;
  for (const auto& s : population) {
    index[s.machine_id] = out.size();
    out.push_back({s.machine_id, IndicatorKind::mad_score, {}});
  }
  for (std::int64_t t : stamps) {
    std::size_t covered = 0;
    for (const auto& s : population)
      covered += s.value_at(t).has_value() ? 1 : 0;
    if (covered < 3)
      continue;
    for (const auto& m : mad_scores(population, t, floor))
      out[index[m.machine_id]].points.push_back({t, m.score});
  }
  return out;
}

} // namespace dictmon
