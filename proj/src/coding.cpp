#include "dictmon/coding.hpp"

#include "dictmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dictmon {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mp" || name == "MP")
    return Algorithm::mp;
  if (name == "omp" || name == "OMP")
    return Algorithm::omp;
  throw ConfigError("unknown coding algorithm '" + name + "' (expected mp or omp)");
}

std::string to_string(Algorithm algo) { return algo == Algorithm::mp ? "mp" : "omp"; }

std::size_t instance_budget(const CodingConfig& cfg, std::size_t segment_len) {
  if (cfg.instance_count)
    return *cfg.instance_count;
  if (!(cfg.sparsity >= 0.0 && cfg.sparsity < 1.0))
    throw ConfigError("sparsity must lie in [0, 1)");
  // The slack absorbs representation error in (1 - sparsity), e.g. 1 - 0.9.
  constexpr double slack = 1e-9;
  const double raw = (1.0 - cfg.sparsity) * static_cast<double>(segment_len);
  const std::size_t q = std::max<std::size_t>(1, cfg.instance_quantum);
  const auto quanta = static_cast<std::size_t>(std::floor(raw / static_cast<double>(q) + slack));
  if (quanta > 0)
    return quanta * q;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - slack)));
}

std::vector<double> cross_correlate(std::span<const double> signal, std::span<const double> atom) {
  if (atom.empty() || atom.size() > signal.size())
    throw DataError("cross_correlate: atom of length " + std::to_string(atom.size()) +
                    " does not fit a signal of length " + std::to_string(signal.size()));
  const std::size_t n = signal.size() - atom.size() + 1;
  std::vector<double> out(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    const double* s = signal.data() + tau;
    double acc = 0.0;
    for (std::size_t t = 0; t < atom.size(); ++t)
      acc += s[t] * atom[t];
    out[tau] = acc;
  }
  return out;
}

namespace {

/// Atom positions sorted by ascending id; scanning in this order realizes the
/// lowest-id tie-break.
std::vector<std::size_t> id_order(const Dictionary& dict) {
  std::vector<std::size_t> order(dict.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return dict.atoms[a].id < dict.atoms[b].id; });
  return order;
}

void require_fit(std::size_t signal_len, const Dictionary& dict) {
  if (dict.empty())
    throw DataError("empty dictionary");
  for (const auto& atom : dict.atoms) {
    if (atom.size() == 0 || atom.size() > signal_len)
      throw DataError("atom " + std::to_string(atom.id) + " of length " +
                      std::to_string(atom.size()) + " does not fit a segment of length " +
                      std::to_string(signal_len));
  }
}

/// Shifted inner products between every ordered atom pair:
/// at(p, q, d) = sum_t atom_q[t] * atom_p[t + d] for d in [-(len_q - 1), len_p - 1],
/// which is the inner product of atom p placed at tau and atom q placed at tau + d.
class CrossGram {
public:
  explicit CrossGram(const Dictionary& dict) : m_(dict.size()), len_(dict.size()) {
    for (std::size_t i = 0; i < m_; ++i)
      len_[i] = dict.atoms[i].size();
    table_.resize(m_ * m_);
    for (std::size_t p = 0; p < m_; ++p) {
      const auto& ap = dict.atoms[p].waveform;
      for (std::size_t q = 0; q < m_; ++q) {
        const auto& aq = dict.atoms[q].waveform;
        auto& row = table_[p * m_ + q];
        row.assign(len_[p] + len_[q] - 1, 0.0);
        for (std::size_t tq = 0; tq < len_[q]; ++tq) {
          for (std::size_t tp = 0; tp < len_[p]; ++tp) {
            // d = tp - tq
            row[tp + len_[q] - 1 - tq] += aq[tq] * ap[tp];
          }
        }
      }
    }
  }

  double at(std::size_t p, std::size_t q, std::ptrdiff_t d) const {
    const auto lo = -static_cast<std::ptrdiff_t>(len_[q]) + 1;
    const auto hi = static_cast<std::ptrdiff_t>(len_[p]) - 1;
    if (d < lo || d > hi)
      return 0.0;
    return table_[p * m_ + q][static_cast<std::size_t>(d - lo)];
  }

  /// Row for pair (p, q); index k corresponds to d = k - (len_q - 1).
  const std::vector<double>& row(std::size_t p, std::size_t q) const { return table_[p * m_ + q]; }

  std::size_t length(std::size_t i) const { return len_[i]; }

private:
  std::size_t m_;
  std::vector<std::size_t> len_;
  std::vector<std::vector<double>> table_;
};

struct Pick {
  std::size_t atom = 0; // position in dict.atoms
  std::size_t offset = 0;
  double value = 0.0;   // signed correlation
  bool found = false;
};

/// Correlation of the current residual with every atom at every valid shift,
/// kept up to date incrementally, with per-block maxima for a fast argmax.
class CorrelationTable {
public:
  static constexpr std::size_t kBlock = 32;

  CorrelationTable(std::span<const double> signal, const Dictionary& dict)
      : order_(id_order(dict)), corr_(dict.size()), excluded_(dict.size()), best_(dict.size()) {
    for (std::size_t j = 0; j < dict.size(); ++j) {
      corr_[j] = cross_correlate(signal, dict.atoms[j].waveform);
      excluded_[j].assign(corr_[j].size(), 0);
      best_[j].assign((corr_[j].size() + kBlock - 1) / kBlock, 0);
      refresh(j, 0, corr_[j].size() - 1);
    }
  }

  /// Remove delta * atom p placed at `offset` from the underlying residual.
  void subtract(const CrossGram& gram, std::size_t p, std::size_t offset, double delta) {
    for (std::size_t q = 0; q < corr_.size(); ++q) {
      auto& c = corr_[q];
      const auto lq = static_cast<std::ptrdiff_t>(gram.length(q));
      const auto lp = static_cast<std::ptrdiff_t>(gram.length(p));
      const auto tau = static_cast<std::ptrdiff_t>(offset);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, tau - lq + 1);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(c.size()) - 1,
                                                         tau + lp - 1);
      if (lo > hi)
        continue;
      const auto& row = gram.row(p, q);
      // index into row: d + lq - 1 with d = tau' - tau
      const double* g = row.data() + (lo - tau + lq - 1);
      double* dst = c.data() + lo;
      for (std::ptrdiff_t k = 0; k <= hi - lo; ++k)
        dst[k] -= delta * g[k];
      refresh(q, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
    }
  }

  void exclude(std::size_t atom, std::size_t offset) {
    excluded_[atom][offset] = 1;
    refresh(atom, offset, offset);
  }

  /// Largest |correlation|; lowest id then lowest offset on ties.
  Pick argmax() const {
    Pick pick;
    double best_abs = -1.0;
    for (std::size_t j : order_) {
      const auto& c = corr_[j];
      for (std::size_t b = 0; b < best_[j].size(); ++b) {
        const std::size_t i = best_[j][b];
        if (excluded_[j][i])
          continue;
        const double v = std::abs(c[i]);
        if (v > best_abs) {
          best_abs = v;
          pick = {j, i, c[i], true};
        }
      }
    }
    return pick;
  }

  double value(std::size_t atom, std::size_t offset) const { return corr_[atom][offset]; }

private:
  void refresh(std::size_t j, std::size_t lo, std::size_t hi) {
    const auto& c = corr_[j];
    const auto& ex = excluded_[j];
    for (std::size_t b = lo / kBlock; b <= hi / kBlock; ++b) {
      const std::size_t start = b * kBlock;
      const std::size_t end = std::min(start + kBlock, c.size());
      std::size_t arg = start;
      double best = -1.0;
      for (std::size_t i = start; i < end; ++i) {
        if (ex[i])
          continue;
        const double v = std::abs(c[i]);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      best_[j][b] = arg; // an all-excluded block keeps an excluded index and is skipped
    }
  }

  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> corr_;
  std::vector<std::vector<char>> excluded_;
  std::vector<std::vector<std::size_t>> best_;
};

struct Placement {
  std::size_t atom = 0; // position in dict.atoms
  std::size_t offset = 0;
};

/// Cholesky factorization of the Gram matrix of shifted atoms, exploiting
/// that placements sorted by offset only couple within a bounded envelope
/// (skyline storage).
class SkylineCholesky {
public:
  /// Placements must be sorted by offset.
  bool factor(std::span<const Placement> sel, const CrossGram& gram, double ridge) {
    const std::size_t n = sel.size();
    first_.assign(n, 0);
    rows_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t f = r;
      for (std::size_t k = r; k-- > 0;) {
        if (sel[r].offset - sel[k].offset >= max_len_)
          break;
        if (sel[k].offset + gram.length(sel[k].atom) > sel[r].offset)
          f = k;
      }
      first_[r] = f;
      auto& row = rows_[r];
      row.assign(r - f + 1, 0.0);
      for (std::size_t c = f; c < r; ++c) {
        const auto d = static_cast<std::ptrdiff_t>(sel[r].offset) -
                       static_cast<std::ptrdiff_t>(sel[c].offset);
        double s = gram.at(sel[c].atom, sel[r].atom, d);
        const std::size_t k0 = std::max(f, first_[c]);
        const auto& crow = rows_[c];
        for (std::size_t k = k0; k < c; ++k)
          s -= row[k - f] * crow[k - first_[c]];
        row[c - f] = s / crow[c - first_[c]];
      }
      const double diag = gram.at(sel[r].atom, sel[r].atom, 0) + ridge;
      double d = diag;
      for (std::size_t k = f; k < r; ++k)
        d -= row[k - f] * row[k - f];
      if (!(d > 1e-10 * diag))
        return false;
      row[r - f] = std::sqrt(d);
    }
    return true;
  }

  std::vector<double> solve(std::vector<double> b) const {
    const std::size_t n = b.size();
    for (std::size_t r = 0; r < n; ++r) {
      const auto& row = rows_[r];
      double s = b[r];
      for (std::size_t k = first_[r]; k < r; ++k)
        s -= row[k - first_[r]] * b[k];
      b[r] = s / row[r - first_[r]];
    }
    for (std::size_t r = n; r-- > 0;) {
      const auto& row = rows_[r];
      b[r] /= row[r - first_[r]];
      for (std::size_t k = first_[r]; k < r; ++k)
        b[k] -= row[k - first_[r]] * b[r];
    }
    return b;
  }

  void set_max_len(std::size_t n) { max_len_ = n; }

private:
  std::size_t max_len_ = 0;
  std::vector<std::size_t> first_;
  std::vector<std::vector<double>> rows_;
};

/// Solve the normal equations for sorted placements, with ridge damping
/// when the Gram matrix is numerically singular.
std::vector<double> least_squares(std::span<const Placement> sel, std::vector<double> rhs,
                                  const CrossGram& gram, std::size_t max_len,
                                  SkylineCholesky& chol) {
  chol.set_max_len(max_len);
  if (chol.factor(sel, gram, 0.0))
    return chol.solve(std::move(rhs));
  double trace = 0.0;
  for (const auto& p : sel)
    trace += gram.at(p.atom, p.atom, 0);
  double ridge = 1e-12 * trace / static_cast<double>(sel.size());
  for (int attempt = 0; attempt < 12; ++attempt, ridge *= 1e3) {
    if (chol.factor(sel, gram, ridge))
      return chol.solve(std::move(rhs));
  }
  throw NumericError("OMP Gram system could not be factored even with ridge damping");
}

double inner_at(std::span<const double> signal, std::span<const double> atom, std::size_t offset) {
  double acc = 0.0;
  for (std::size_t t = 0; t < atom.size(); ++t)
    acc += signal[offset + t] * atom[t];
  return acc;
}

double energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x)
    acc += v * v;
  return acc;
}

} // namespace

std::optional<AtomInstance> select_best(std::span<const double> residual, const Dictionary& dict) {
  if (residual.empty())
    throw DataError("select_best: empty residual");
  require_fit(residual.size(), dict);
  std::optional<AtomInstance> best;
  double best_abs = 0.0;
  for (std::size_t j : id_order(dict)) {
    const auto c = cross_correlate(residual, dict.atoms[j].waveform);
    for (std::size_t tau = 0; tau < c.size(); ++tau) {
      if (std::abs(c[tau]) > best_abs) {
        best_abs = std::abs(c[tau]);
        best = AtomInstance{dict.atoms[j].id, tau, c[tau]};
      }
    }
  }
  return best;
}

SparseCode mp_encode(std::span<const double> segment, const Dictionary& dict,
                     const CodingConfig& cfg) {
  require_fit(segment.size(), dict);
  const std::size_t budget = instance_budget(cfg, segment.size());

  SparseCode code;
  code.dictionary_generation = dict.generation;
  code.residual.assign(segment.begin(), segment.end());
  code.instances.reserve(budget);
  code.residual_energy.reserve(budget + 1);

  const CrossGram gram(dict);
  CorrelationTable table(segment, dict);
  double e = energy(code.residual);
  code.residual_energy.push_back(e);

  for (std::size_t i = 0; i < budget; ++i) {
    const Pick pick = table.argmax();
    if (!pick.found || pick.value == 0.0) {
      code.exhausted = true;
      break;
    }
    const auto& w = dict.atoms[pick.atom].waveform;
    double* r = code.residual.data() + pick.offset;
    double before = 0.0, after = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
      before += r[t] * r[t];
      r[t] -= pick.value * w[t];
      after += r[t] * r[t];
    }
    e += after - before;
    table.subtract(gram, pick.atom, pick.offset, pick.value);
    code.instances.push_back({dict.atoms[pick.atom].id, pick.offset, pick.value});
    code.residual_energy.push_back(e);
  }
  return code;
}

SparseCode omp_encode(std::span<const double> segment, const Dictionary& dict,
                      const CodingConfig& cfg) {
  require_fit(segment.size(), dict);
  const std::size_t budget = instance_budget(cfg, segment.size());
  const std::size_t max_len = dict.max_atom_length();

  SparseCode code;
  code.dictionary_generation = dict.generation;
  std::vector<double> residual(segment.begin(), segment.end());

  const CrossGram gram(dict);
  CorrelationTable table(segment, dict);
  SkylineCholesky chol;
  const double signal_energy = energy(segment);
  code.residual_energy.push_back(signal_energy);

  // Selected placements kept sorted by (offset, atom) with matching
  // right-hand sides <segment, placed atom>. `applied` holds the amplitudes
  // currently reflected in the residual and correlation table.
  std::vector<Placement> sel;
  std::vector<double> rhs;
  std::vector<double> applied;
  std::vector<double> amp;
  double amp_scale = 0.0;

  for (std::size_t i = 0; i < budget; ++i) {
    const Pick pick = table.argmax();
    if (!pick.found || pick.value == 0.0) {
      code.exhausted = true;
      break;
    }
    table.exclude(pick.atom, pick.offset);
    const Placement p{pick.atom, pick.offset};
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(sel.begin(), sel.end(), p,
                         [](const Placement& a, const Placement& b) {
                           return a.offset != b.offset ? a.offset < b.offset : a.atom < b.atom;
                         }) -
        sel.begin());
    sel.insert(sel.begin() + static_cast<std::ptrdiff_t>(pos), p);
    rhs.insert(rhs.begin() + static_cast<std::ptrdiff_t>(pos),
               inner_at(segment, dict.atoms[p.atom].waveform, p.offset));
    applied.insert(applied.begin() + static_cast<std::ptrdiff_t>(pos), 0.0);

    const std::vector<double> fitted = least_squares(sel, rhs, gram, max_len, chol);

    double projected = 0.0;
    for (std::size_t k = 0; k < sel.size(); ++k) {
      amp_scale = std::max(amp_scale, std::abs(fitted[k]));
      projected += rhs[k] * fitted[k];
    }
    // Amplitude changes far below rounding level leave the correlations
    // effectively untouched; skipping them keeps each step local.
    const double skip = 1e-15 * amp_scale;
    for (std::size_t k = 0; k < sel.size(); ++k) {
      const double delta = fitted[k] - applied[k];
      if (std::abs(delta) <= skip)
        continue;
      const auto& w = dict.atoms[sel[k].atom].waveform;
      double* r = residual.data() + sel[k].offset;
      for (std::size_t t = 0; t < w.size(); ++t)
        r[t] -= delta * w[t];
      table.subtract(gram, sel[k].atom, sel[k].offset, delta);
      applied[k] = fitted[k];
    }
    amp = fitted;
    code.residual_energy.push_back(std::max(0.0, signal_energy - projected));
  }

  code.instances.reserve(sel.size());
  for (std::size_t k = 0; k < sel.size(); ++k)
    code.instances.push_back({dict.atoms[sel[k].atom].id, sel[k].offset, amp[k]});
  // Report the residual of the final amplitudes exactly.
  code.residual.assign(segment.begin(), segment.end());
  const auto model = reconstruct(code.instances, dict, segment.size());
  for (std::size_t t = 0; t < segment.size(); ++t)
    code.residual[t] -= model[t];
  code.residual_energy.back() = energy(code.residual);
  return code;
}

SparseCode encode(std::span<const double> segment, const Dictionary& dict,
                  const CodingConfig& cfg) {
  return cfg.algorithm == Algorithm::mp ? mp_encode(segment, dict, cfg)
                                        : omp_encode(segment, dict, cfg);
}

std::vector<double> reconstruct(std::span<const AtomInstance> instances, const Dictionary& dict,
                                std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (const auto& inst : instances) {
    const auto& w = dict.by_id(inst.atom_id).waveform;
    if (inst.offset + w.size() > length)
      throw DataError("instance of atom " + std::to_string(inst.atom_id) + " at offset " +
                      std::to_string(inst.offset) + " exceeds length " + std::to_string(length));
    for (std::size_t t = 0; t < w.size(); ++t)
      out[inst.offset + t] += inst.amplitude * w[t];
  }
  return out;
}

std::vector<AtomInstance> refit_amplitudes(std::span<const double> segment,
                                           std::span<const AtomInstance> instances,
                                           const Dictionary& dict) {
  if (instances.empty())
    return {};
  const CrossGram gram(dict);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Placement> sel(instances.size());
  for (std::size_t k = 0; k < instances.size(); ++k) {
    sel[k] = {dict.index_of(instances[k].atom_id), instances[k].offset};
    if (sel[k].offset + gram.length(sel[k].atom) > segment.size())
      throw DataError("refit_amplitudes: instance exceeds segment");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sel[a].offset != sel[b].offset ? sel[a].offset < sel[b].offset
                                          : sel[a].atom < sel[b].atom;
  });
  std::vector<Placement> sorted(sel.size());
  std::vector<double> rhs(sel.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted[k] = sel[order[k]];
    rhs[k] = inner_at(segment, dict.atoms[sorted[k].atom].waveform, sorted[k].offset);
  }
  SkylineCholesky chol;
  const auto fitted = least_squares(sorted, std::move(rhs), gram, dict.max_atom_length(), chol);
  std::vector<AtomInstance> out(instances.begin(), instances.end());
  for (std::size_t k = 0; k < order.size(); ++k)
    out[order[k]].amplitude = fitted[k];
  return out;
}

} // namespace dictmon
