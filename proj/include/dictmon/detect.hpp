#ifndef DICTMON_DETECT_HPP
#define DICTMON_DETECT_HPP

#include "dictmon/metrics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dictmon {

enum class Label { healthy, faulty };

std::string to_string(Label label);
Label parse_label(const std::string& name);

/// Ground truth for one machine over the half-open interval [start, end).
struct LabeledWindow {
  std::string machine_id;
  std::int64_t start = 0;
  std::int64_t end = 0;
  Label label = Label::healthy;
};

/// Throws DataError on start >= end or overlapping windows of one machine.
void validate_labels(std::span<const LabeledWindow> labels);

/// Label of (machine, t). Throws DataError unless exactly one window covers it.
Label label_at(std::span<const LabeledWindow> labels, const std::string& machine, std::int64_t t);

inline constexpr std::size_t kDefaultSlopeWindow = 30;

/// Least-squares slope in value units per day over the trailing `window`
/// points, emitted from index window - 1 onward.
IndicatorSeries slope_indicator(const IndicatorSeries& series, std::size_t window = kDefaultSlopeWindow);

/// min over other machines j of (value_machine(t) - value_j(t)). Positive when
/// the machine exceeds all others.
double min_diff_indicator(std::span<const IndicatorSeries> population, const std::string& machine,
                          std::int64_t t);

/// min_diff_indicator evaluated at each of the machine's own timestamps
/// where at least one other machine has a value.
IndicatorSeries min_diff_series(std::span<const IndicatorSeries> population,
                                const std::string& machine);

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points; // threshold descending: (0,0) first, (1,1) last
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// One classification instance: an indicator value of one machine at one time.
struct ScoredSample {
  std::string machine_id;
  std::int64_t timestamp = 0;
  double value = 0.0;
};

std::vector<ScoredSample> to_samples(std::span<const IndicatorSeries> series);

/// Predict faulty iff value >= threshold. Default sweep: every distinct
/// observed value plus +inf and -inf sentinels. AUC by the trapezoid rule.
RocCurve roc_curve(std::span<const ScoredSample> samples, std::span<const LabeledWindow> labels,
                   std::optional<std::vector<double>> thresholds = std::nullopt);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion_at(std::span<const ScoredSample> samples, std::span<const LabeledWindow> labels,
                       double threshold);

} // namespace dictmon

#endif
