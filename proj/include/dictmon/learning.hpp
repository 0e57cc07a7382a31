#ifndef DICTMON_LEARNING_HPP
#define DICTMON_LEARNING_HPP

#include "dictmon/coding.hpp"
#include "dictmon/dictionary.hpp"
#include "dictmon/ingest.hpp"

#include <functional>
#include <span>
#include <vector>

namespace dictmon {

struct LearnConfig {
  double eta = 1e-6;      // step length; 0 disables learning
  double noise_var = 1.0; // residual noise variance
  std::size_t tail_len = 10;
  double tail_ratio = 0.1;
};

/// Log-likelihood gradient with respect to each atom's samples:
/// (1 / noise_var) * sum over instances of that atom of a_i * residual[tau_i : tau_i + len].
/// Entry m is empty when atom m was never selected.
std::vector<std::vector<double>> atom_gradients(const Dictionary& dict, const SparseCode& code,
                                                std::span<const double> segment,
                                                const LearnConfig& cfg);

/// One gradient ascent step on every selected atom, followed by tail growth
/// and re-normalization of those atoms. Unselected atoms are left bit-for-bit
/// unchanged. Increments the generation counter.
Dictionary gradient_update(const Dictionary& dict, const SparseCode& code,
                           std::span<const double> segment, const LearnConfig& cfg);

/// Called after each training block with (block index, fidelity in dB).
using TrainObserver = std::function<void(std::size_t, double)>;

/// Sequential encode and update over preprocessed blocks.
Dictionary train_baseline(const std::vector<SignalSegment>& blocks, const Dictionary& init,
                          const CodingConfig& coding_cfg, const LearnConfig& learn_cfg,
                          const TrainObserver& observer = {});

struct HistoryRecord {
  std::int64_t timestamp = 0;
  double fidelity_db = 0.0;
  double distance_deg = 0.0; // distance of the current dictionary to the baseline
  std::size_t n_instances = 0;
};

/// Online monitoring state for one machine: the propagated dictionary, the
/// frozen baseline it started from, and the per-segment history.
class MonitorState {
public:
  MonitorState(Dictionary baseline, CodingConfig coding_cfg, LearnConfig learn_cfg);

  /// Encode one gated, preprocessed segment; update the dictionary when eta > 0;
  /// append a history record. Timestamps must strictly increase.
  const HistoryRecord& propagate(const SignalSegment& segment);

  const Dictionary& dictionary() const { return dictionary_; }
  const Dictionary& baseline() const { return baseline_; }
  const CodingConfig& coding_config() const { return coding_cfg_; }
  const LearnConfig& learn_config() const { return learn_cfg_; }
  const std::vector<HistoryRecord>& history() const { return history_; }
  const SparseCode& last_code() const { return last_code_; }

private:
  Dictionary dictionary_;
  Dictionary baseline_;
  CodingConfig coding_cfg_;
  LearnConfig learn_cfg_;
  std::vector<HistoryRecord> history_;
  SparseCode last_code_;
};

} // namespace dictmon

#endif
