#include "dictmon/detect.hpp"

#include "dictmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dictmon {

std::string to_string(Label label) { return label == Label::healthy ? "healthy" : "faulty"; }

Label parse_label(const std::string& name) {
  if (name == "healthy")
    return Label::healthy;
  if (name == "faulty")
    return Label::faulty;
  throw ParseError("unknown label '" + name + "' (expected healthy or faulty)");
}

void validate_labels(std::span<const LabeledWindow> labels) {
  std::map<std::string, std::vector<const LabeledWindow*>> by_machine;
  for (const auto& w : labels) {
    if (w.start >= w.end)
      throw DataError("label window for '" + w.machine_id + "' has start >= end");
    by_machine[w.machine_id].push_back(&w);
  }
  for (auto& [machine, windows] : by_machine) {
    std::sort(windows.begin(), windows.end(),
              [](const auto* a, const auto* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < windows.size(); ++i) {
      if (windows[i]->start < windows[i - 1]->end)
        throw DataError("overlapping label windows for '" + machine + "'");
    }
  }
}

Label label_at(std::span<const LabeledWindow> labels, const std::string& machine, std::int64_t t) {
  const LabeledWindow* found = nullptr;
  for (const auto& w : labels) {
    if (w.machine_id == machine && w.start <= t && t < w.end) {
      if (found != nullptr)
        throw DataError("sample of '" + machine + "' at " + std::to_string(t) +
                        " falls in more than one label window");
      found = &w;
    }
  }
  if (found == nullptr)
    throw DataError("sample of '" + machine + "' at " + std::to_string(t) +
                    " is not covered by any label window");
  return found->label;
}

IndicatorSeries slope_indicator(const IndicatorSeries& series, std::size_t window) {
  if (window < 2)
    throw ConfigError("slope window must be >= 2");
  if (series.points.size() < window)
    throw DataError("slope_indicator: series '" + series.machine_id + "' has " +
                    std::to_string(series.points.size()) + " points, fewer than the window " +
                    std::to_string(window));
  IndicatorSeries out{series.machine_id, IndicatorKind::slope, {}};
  const auto& p = series.points;
  for (std::size_t end = window - 1; end < p.size(); ++end) {
    const std::size_t begin = end + 1 - window;
    // Center on the first point of the window (in days) for conditioning.
    const std::int64_t t0 = p[begin].timestamp;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = begin; i <= end; ++i) {
      sx += static_cast<double>(p[i].timestamp - t0) / 86400.0;
      sy += p[i].value;
    }
    const double n = static_cast<double>(window);
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = begin; i <= end; ++i) {
      const double dx = static_cast<double>(p[i].timestamp - t0) / 86400.0 - mx;
      sxx += dx * dx;
      sxy += dx * (p[i].value - my);
    }
    if (!(sxx > 0.0))
      throw DataError("slope_indicator: degenerate time window");
    out.points.push_back({p[end].timestamp, sxy / sxx});
  }
  return out;
}

double min_diff_indicator(std::span<const IndicatorSeries> population, const std::string& machine,
                          std::int64_t t) {
  std::optional<double> own;
  bool machine_listed = false;
  for (const auto& s : population) {
    if (s.machine_id == machine) {
      machine_listed = true;
      own = s.value_at(t);
    }
  }
  if (!machine_listed || !own)
    throw DataError("min_diff_indicator: machine '" + machine + "' has no value at " +
                    std::to_string(t));
  double best = std::numeric_limits<double>::infinity();
  std::size_t others = 0;
  for (const auto& s : population) {
    if (s.machine_id == machine)
      continue;
    if (const auto v = s.value_at(t)) {
      best = std::min(best, *own - *v);
      ++others;
    }
  }
  if (others == 0)
    throw DataError("min_diff_indicator: need at least 2 machines with a value at " +
                    std::to_string(t));
  return best;
}

IndicatorSeries min_diff_series(std::span<const IndicatorSeries> population,
                                const std::string& machine) {
  const IndicatorSeries* self = nullptr;
  for (const auto& s : population)
    if (s.machine_id == machine)
      self = &s;
  if (self == nullptr)
    throw DataError("min_diff_series: unknown machine '" + machine + "'");
  IndicatorSeries out{machine, IndicatorKind::min_diff, {}};
  for (const auto& p : self->points) {
    bool any_other = false;
    for (const auto& s : population)
      if (s.machine_id != machine && s.value_at(p.timestamp))
        any_other = true;
    if (any_other)
      out.points.push_back({p.timestamp, min_diff_indicator(population, machine, p.timestamp)});
  }
  return out;
}

std::vector<ScoredSample> to_samples(std::span<const IndicatorSeries> series) {
  std::vector<ScoredSample> out;
  for (const auto& s : series)
    for (const auto& p : s.points)
      out.push_back({s.machine_id, p.timestamp, p.value});
  return out;
}

namespace {

std::vector<Label> resolve_labels(std::span<const ScoredSample> samples,
                                  std::span<const LabeledWindow> labels) {
  validate_labels(labels);
  std::vector<Label> out;
  out.reserve(samples.size());
  for (const auto& s : samples)
    out.push_back(label_at(labels, s.machine_id, s.timestamp));
  return out;
}

} // namespace

Confusion confusion_at(std::span<const ScoredSample> samples, std::span<const LabeledWindow> labels,
                       double threshold) {
  const auto truth = resolve_labels(samples, labels);
  Confusion c;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool predicted = samples[i].value >= threshold;
    if (truth[i] == Label::faulty)
      (predicted ? c.tp : c.fn)++;
    else
      (predicted ? c.fp : c.tn)++;
  }
  return c;
}

RocCurve roc_curve(std::span<const ScoredSample> samples, std::span<const LabeledWindow> labels,
                   std::optional<std::vector<double>> thresholds) {
  const auto truth = resolve_labels(samples, labels);
  RocCurve curve;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].value))
      throw DataError("roc_curve: non-finite indicator value for '" + samples[i].machine_id + "'");
    (truth[i] == Label::faulty ? curve.positives : curve.negatives)++;
  }
  if (curve.positives == 0 || curve.negatives == 0)
    throw DataError("roc_curve: need both faulty and healthy samples (have " +
                    std::to_string(curve.positives) + " faulty, " +
                    std::to_string(curve.negatives) + " healthy)");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> sweep;
  if (thresholds) {
    sweep = *thresholds;
  } else {
    for (const auto& s : samples)
      sweep.push_back(s.value);
  }
  sweep.push_back(inf);
  sweep.push_back(-inf);
  std::sort(sweep.begin(), sweep.end(), std::greater<>());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());

  // Sort samples by value descending, then sweep thresholds with one pointer.
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples[a].value > samples[b].value; });
  std::size_t tp = 0, fp = 0, k = 0;
  const double pos = static_cast<double>(curve.positives);
  const double neg = static_cast<double>(curve.negatives);
  for (double theta : sweep) {
    while (k < order.size() && samples[order[k]].value >= theta) {
      (truth[order[k]] == Label::faulty ? tp : fp)++;
      ++k;
    }
    curve.points.push_back({theta, static_cast<double>(tp) / pos, static_cast<double>(fp) / neg});
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  return curve;
}

} // namespace dictmon
