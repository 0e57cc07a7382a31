#ifndef DICTMON_FORMATS_HPP
#define DICTMON_FORMATS_HPP

// CSV files exchanged between the CLI stages.

#include "dictmon/coding.hpp"
#include "dictmon/detect.hpp"
#include "dictmon/learning.hpp"
#include "dictmon/metrics.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dictmon {

// timestamp,fidelity_db,distance_deg,n_instances
void write_history(const std::filesystem::path& path, const std::vector<HistoryRecord>& history);
std::vector<HistoryRecord> read_history(const std::filesystem::path& path);

// "# machine=<id>", "# kind=<kind>", optional "# <key>=<value>" lines, then
// timestamp,value rows.
void write_indicator(const std::filesystem::path& path, const IndicatorSeries& series,
                     const std::map<std::string, std::string>& notes = {});
IndicatorSeries read_indicator(const std::filesystem::path& path);

// machine_id,start,end,label
void write_labels(const std::filesystem::path& path, const std::vector<LabeledWindow>& labels);
std::vector<LabeledWindow> read_labels(const std::filesystem::path& path);

// threshold,fpr,tpr rows, then "# auc=<value>".
void write_roc(const std::filesystem::path& path, const RocCurve& curve);

// atom_id,offset,amplitude rows, then "# residual_norm=<value>".
void write_sparse_code(const std::filesystem::path& path, const SparseCode& code);

/// History column extracted as an indicator series.
IndicatorSeries history_series(const std::string& machine, const std::vector<HistoryRecord>& history,
                               IndicatorKind kind);

} // namespace dictmon

#endif
