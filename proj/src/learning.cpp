#include "dictmon/learning.hpp"

#include "dictmon/error.hpp"
#include "dictmon/metrics.hpp"

namespace dictmon {

namespace {

void check_config(const LearnConfig& cfg) {
  if (!(cfg.eta >= 0.0))
    throw ConfigError("eta must be >= 0");
  if (!(cfg.noise_var > 0.0))
    throw ConfigError("noise_var must be > 0");
}

} // namespace

std::vector<std::vector<double>> atom_gradients(const Dictionary& dict, const SparseCode& code,
                                                std::span<const double> segment,
                                                const LearnConfig& cfg) {
  check_config(cfg);
  if (code.residual.size() != segment.size())
    throw DataError("sparse code residual has " + std::to_string(code.residual.size()) +
                    " samples but the segment has " + std::to_string(segment.size()));
  std::vector<std::vector<double>> grad(dict.size());
  const double scale = 1.0 / cfg.noise_var;
  for (const auto& inst : code.instances) {
    const std::size_t m = dict.index_of(inst.atom_id);
    const std::size_t len = dict.atoms[m].size();
    if (inst.offset + len > segment.size())
      throw DataError("instance of atom " + std::to_string(inst.atom_id) +
                      " extends past the segment");
    if (grad[m].empty())
      grad[m].assign(len, 0.0);
    const double* r = code.residual.data() + inst.offset;
    const double a = scale * inst.amplitude;
    for (std::size_t t = 0; t < len; ++t)
      grad[m][t] += a * r[t];
  }
  return grad;
}

Dictionary gradient_update(const Dictionary& dict, const SparseCode& code,
                           std::span<const double> segment, const LearnConfig& cfg) {
  const auto grad = atom_gradients(dict, code, segment, cfg);
  Dictionary out = dict;
  // Growth is applied strictly after accumulation so instance supports refer
  // to the original offsets.
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (grad[m].empty())
      continue;
    auto& w = out.atoms[m].waveform;
    for (std::size_t t = 0; t < w.size(); ++t)
      w[t] += cfg.eta * grad[m][t];
    out.atoms[m] = maybe_grow(out.atoms[m], cfg.tail_len, cfg.tail_ratio);
    normalize(out.atoms[m]);
  }
  ++out.generation;
  return out;
}

Dictionary train_baseline(const std::vector<SignalSegment>& blocks, const Dictionary& init,
                          const CodingConfig& coding_cfg, const LearnConfig& learn_cfg,
                          const TrainObserver& observer) {
  check_config(learn_cfg);
  Dictionary dict = init;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    try {
      const auto& samples = blocks[b].samples;
      const SparseCode code = encode(samples, dict, coding_cfg);
      if (observer)
        observer(b, fidelity_db(code, samples));
      if (learn_cfg.eta > 0.0)
        dict = gradient_update(dict, code, samples, learn_cfg);
    } catch (const Error& e) {
      throw DataError("training block " + std::to_string(b) + ": " + e.what());
    }
  }
  return dict;
}

MonitorState::MonitorState(Dictionary baseline, CodingConfig coding_cfg, LearnConfig learn_cfg)
    : dictionary_(baseline), baseline_(std::move(baseline)), coding_cfg_(coding_cfg),
      learn_cfg_(learn_cfg) {
  check_config(learn_cfg_);
  if (baseline_.empty())
    throw DataError("monitor baseline dictionary is empty");
}

const HistoryRecord& MonitorState::propagate(const SignalSegment& segment) {
  if (!history_.empty() && segment.timestamp <= history_.back().timestamp)
    throw DataError("out-of-order segment: timestamp " + std::to_string(segment.timestamp) +
                    " does not follow " + std::to_string(history_.back().timestamp));
  last_code_ = encode(segment.samples, dictionary_, coding_cfg_);
  HistoryRecord rec;
  rec.timestamp = segment.timestamp;
  rec.fidelity_db = fidelity_db(last_code_, segment.samples);
  rec.n_instances = last_code_.instances.size();
  if (learn_cfg_.eta > 0.0) {
    dictionary_ = gradient_update(dictionary_, last_code_, segment.samples, learn_cfg_);
    rec.distance_deg = dictionary_distance(dictionary_, baseline_);
  } else {
    rec.distance_deg = dictionary_ == baseline_ ? 0.0 : dictionary_distance(dictionary_, baseline_);
  }
  history_.push_back(rec);
  return history_.back();
}

} // namespace dictmon
