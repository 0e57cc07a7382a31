#include "dictmon/formats.hpp"

#include "dictmon/error.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>

namespace fs = std::filesystem;

namespace dictmon {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return in;
}

/// Calls fn(fields, where) for each data row. Comment lines go to on_comment.
template <class Row, class Comment>
void for_each_row(const fs::path& path, const std::string& header, Row&& fn, Comment&& on_comment) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty())
      continue;
    if (t[0] == '#') {
      on_comment(detail::trim(t.substr(1)));
      continue;
    }
    if (!saw_header) {
      if (t != header)
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected header '" +
                         header + "'");
      saw_header = true;
      continue;
    }
    fn(detail::split(t, ','), path.string() + ":" + std::to_string(line_no));
  }
  if (!saw_header)
    throw ParseError(path.string() + ": missing header '" + header + "'");
}

void expect_fields(const std::vector<std::string>& f, std::size_t n, const std::string& where) {
  if (f.size() != n)
    throw ParseError(where + ": expected " + std::to_string(n) + " fields, got " +
                     std::to_string(f.size()));
}

} // namespace

void write_history(const fs::path& path, const std::vector<HistoryRecord>& history) {
  auto out = open_out(path);
  out << "timestamp,fidelity_db,distance_deg,n_instances\n";
  for (const auto& r : history)
    out << r.timestamp << ',' << detail::format_double(r.fidelity_db) << ','
        << detail::format_double(r.distance_deg) << ',' << r.n_instances << '\n';
}

std::vector<HistoryRecord> read_history(const fs::path& path) {
  std::vector<HistoryRecord> out;
  for_each_row(
      path, "timestamp,fidelity_db,distance_deg,n_instances",
      [&](const std::vector<std::string>& f, const std::string& where) {
        expect_fields(f, 4, where);
        HistoryRecord r;
        r.timestamp = detail::parse_int(f[0], where);
        r.fidelity_db = detail::parse_double(f[1], where);
        r.distance_deg = detail::parse_double(f[2], where);
        r.n_instances = static_cast<std::size_t>(detail::parse_int(f[3], where));
        out.push_back(r);
      },
      [](const std::string&) {});
  return out;
}

void write_indicator(const fs::path& path, const IndicatorSeries& series,
                     const std::map<std::string, std::string>& notes) {
  auto out = open_out(path);
  out << "# machine=" << series.machine_id << '\n' << "# kind=" << to_string(series.kind) << '\n';
  for (const auto& [k, v] : notes)
    out << "# " << k << '=' << v << '\n';
  out << "timestamp,value\n";
  for (const auto& p : series.points)
    out << p.timestamp << ',' << detail::format_double(p.value) << '\n';
}

IndicatorSeries read_indicator(const fs::path& path) {
  IndicatorSeries s;
  s.machine_id = path.stem().string();
  for_each_row(
      path, "timestamp,value",
      [&](const std::vector<std::string>& f, const std::string& where) {
        expect_fields(f, 2, where);
        s.points.push_back({detail::parse_int(f[0], where), detail::parse_double(f[1], where)});
      },
      [&](const std::string& comment) {
        const auto eq = comment.find('=');
        if (eq == std::string::npos)
          return;
        const std::string key = detail::trim(comment.substr(0, eq));
        const std::string value = detail::trim(comment.substr(eq + 1));
        if (key == "machine")
          s.machine_id = value;
        else if (key == "kind")
          s.kind = parse_indicator_kind(value);
      });
  validate_series(s);
  return s;
}

void write_labels(const fs::path& path, const std::vector<LabeledWindow>& labels) {
  auto out = open_out(path);
  out << "machine_id,start,end,label\n";
  for (const auto& w : labels)
    out << w.machine_id << ',' << w.start << ',' << w.end << ',' << to_string(w.label) << '\n';
}

std::vector<LabeledWindow> read_labels(const fs::path& path) {
  std::vector<LabeledWindow> out;
  for_each_row(
      path, "machine_id,start,end,label",
      [&](const std::vector<std::string>& f, const std::string& where) {
        expect_fields(f, 4, where);
        out.push_back({detail::trim(f[0]), detail::parse_int(f[1], where),
                       detail::parse_int(f[2], where), parse_label(detail::trim(f[3]))});
      },
      [](const std::string&) {});
  validate_labels(out);
  return out;
}

void write_roc(const fs::path& path, const RocCurve& curve) {
  auto out = open_out(path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << detail::format_double(p.threshold) << ',' << detail::format_double(p.fpr) << ','
        << detail::format_double(p.tpr) << '\n';
  out << "# auc=" << detail::format_double(curve.auc) << '\n';
}

void write_sparse_code(const fs::path& path, const SparseCode& code) {
  auto out = open_out(path);
  out << "atom_id,offset,amplitude\n";
  for (const auto& inst : code.instances)
    out << inst.atom_id << ',' << inst.offset << ',' << detail::format_double(inst.amplitude)
        << '\n';
  double e = 0.0;
  for (double v : code.residual)
    e += v * v;
  out << "# residual_norm=" << detail::format_double(std::sqrt(e)) << '\n';
}

IndicatorSeries history_series(const std::string& machine, const std::vector<HistoryRecord>& history,
                               IndicatorKind kind) {
  IndicatorSeries s{machine, kind, {}};
  for (const auto& r : history) {
    double v = 0.0;
    switch (kind) {
    case IndicatorKind::fidelity_db:
      v = r.fidelity_db;
      break;
    case IndicatorKind::distance_deg:
      v = r.distance_deg;
      break;
    default:
      throw ConfigError("history does not carry indicator '" + to_string(kind) + "'");
    }
    s.points.push_back({r.timestamp, v});
  }
  return s;
}

} // namespace dictmon
