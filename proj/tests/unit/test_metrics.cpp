#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dictmon/error.hpp"
#include "dictmon/learning.hpp"
#include "dictmon/metrics.hpp"
#include "dictmon/synth.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace dictmon;
using testsupport::gaussian_vector;
using testsupport::make_dictionary;
using testsupport::random_dictionary;

namespace {

/// max over every overlapping alignment of |<u, v shifted>| / (|u| |v|).
double brute_coherence(const std::vector<double>& u, const std::vector<double>& v) {
  double nu = 0.0, nv = 0.0;
  for (double x : u)
    nu += x * x;
  for (double x : v)
    nv += x * x;
  const auto lu = static_cast<long>(u.size());
  const auto lv = static_cast<long>(v.size());
  double best = 0.0;
  for (long shift = -(lv - 1); shift <= lu - 1; ++shift) {
    double s = 0.0;
    for (long i = 0; i < lu; ++i) {
      const long j = i - shift;
      if (j >= 0 && j < lv)
        s += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    }
    best = std::max(best, std::abs(s) / std::sqrt(nu * nv));
  }
  return best;
}

double brute_distance(const Dictionary& a, const Dictionary& b) {
  const double deg = 180.0 / M_PI;
  double sum = 0.0;
  for (const auto& x : a.atoms) {
    double mu = 0.0;
    for (const auto& y : b.atoms)
      mu = std::max(mu, brute_coherence(x.waveform, y.waveform));
    sum += std::acos(std::min(1.0, mu)) * deg;
  }
  for (const auto& y : b.atoms) {
    double mu = 0.0;
    for (const auto& x : a.atoms)
      mu = std::max(mu, brute_coherence(y.waveform, x.waveform));
    sum += std::acos(std::min(1.0, mu)) * deg;
  }
  return sum / (2.0 * static_cast<double>(a.size()));
}

IndicatorSeries series(std::string id, std::vector<std::pair<std::int64_t, double>> pts,
                       IndicatorKind kind = IndicatorKind::distance_deg) {
  IndicatorSeries s{std::move(id), kind, {}};
  for (const auto& [t, v] : pts)
    s.points.push_back({t, v});
  return s;
}

/// One period of a sine or cosine over 32 samples.
Dictionary sine_dict(bool cosine) {
  std::vector<double> w(32);
  for (std::size_t t = 0; t < w.size(); ++t)
    w[t] = cosine ? std::cos(2 * M_PI * t / 32.0) : std::sin(2 * M_PI * t / 32.0);
  return make_dictionary({w});
}

} // namespace

TEST_CASE("coherence") {
  Rng rng(50);
  SUBCASE("identical copy gives 1") {
    const Dictionary d = random_dictionary(rng, 3, 8, 16);
    CHECK(atom_coherence(d, d.atoms[1]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("nonzero atoms are never orthogonal at every shift") {
    // At the extreme lag only the first nonzero sample of one atom meets the
    // last nonzero sample of the other, so some overlap is always nonzero.
    for (int trial = 0; trial < 20; ++trial) {
      const Dictionary d = random_dictionary(rng, 1, 2, 12);
      const Atom probe = random_dictionary(rng, 1, 2, 12).atoms[0];
      CHECK(atom_coherence(d, probe) > 0.0);
    }
    // The sine/cosine pair is orthogonal at zero lag only.
    double zero_lag = 0.0;
    for (std::size_t t = 0; t < 32; ++t)
      zero_lag += sine_dict(false).atoms[0].waveform[t] * sine_dict(true).atoms[0].waveform[t];
    CHECK(std::abs(zero_lag) < 1e-9);
    const double shifted = brute_coherence(sine_dict(true).atoms[0].waveform,
                                           sine_dict(false).atoms[0].waveform);
    CHECK(shifted > 0.5);
    CHECK(atom_coherence(sine_dict(false), sine_dict(true).atoms[0]) ==
          doctest::Approx(shifted).epsilon(1e-12));
  }
  SUBCASE("random unequal lengths match an exhaustive scan") {
    for (int trial = 0; trial < 30; ++trial) {
      const Dictionary d = random_dictionary(rng, 4, 3, 20);
      const Dictionary probe = random_dictionary(rng, 1, 3, 20);
      double want = 0.0;
      for (const auto& a : d.atoms)
        want = std::max(want, brute_coherence(probe.atoms[0].waveform, a.waveform));
      CHECK(std::abs(atom_coherence(d, probe.atoms[0]) - want) < 1e-12);
    }
  }
  SUBCASE("exclusion skips the atom with that id") {
    const Dictionary d = random_dictionary(rng, 3, 8, 8);
    CHECK(atom_coherence(d, d.atoms[0], 0) < 1.0);
    const Dictionary single = random_dictionary(rng, 1, 8, 8);
    CHECK_THROWS_AS(atom_coherence(single, single.atoms[0], 0), DataError);
    CHECK_THROWS_AS(atom_coherence(Dictionary{}, single.atoms[0]), DataError);
  }
  SUBCASE("invariant under sign flip and reordering") {
    const Dictionary d = random_dictionary(rng, 4, 5, 15);
    Atom probe = random_dictionary(rng, 1, 5, 15).atoms[0];
    const double base = atom_coherence(d, probe);
    Atom flipped = probe;
    for (double& v : flipped.waveform)
      v = -v;
    Dictionary rotated = d;
    std::rotate(rotated.atoms.begin(), rotated.atoms.begin() + 1, rotated.atoms.end());
    CHECK(atom_coherence(d, flipped) == doctest::Approx(base).epsilon(1e-14));
    CHECK(atom_coherence(rotated, probe) == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("coherence to degrees") {
  CHECK(coherence_to_degrees(1.0) == 0.0);
  CHECK(coherence_to_degrees(0.0) == doctest::Approx(90.0).epsilon(1e-15));
  CHECK(std::abs(coherence_to_degrees(1.0 / std::sqrt(2.0)) - 45.0) < 1e-9);
  Rng rng(51);
  const Dictionary d = random_dictionary(rng, 3, 6, 12);
  const Atom probe = random_dictionary(rng, 1, 6, 12).atoms[0];
  CHECK(atom_similarity_beta(d, probe) ==
        doctest::Approx(coherence_to_degrees(atom_coherence(d, probe))).epsilon(1e-9));
}

TEST_CASE("dictionary distance") {
  Rng rng(52);
  SUBCASE("identical dictionaries are 0 apart") {
    const Dictionary d = init_pseudorandom(8, 50, 10, 4);
    CHECK(dictionary_distance(d, d) == 0.0);
  }
  SUBCASE("nearly orthogonal single atoms approach 90 degrees") {
    // Impulse vs. an alternating atom: every overlap is +-1/sqrt(n).
    for (std::size_t n : {16u, 256u}) {
      std::vector<double> imp(n, 0.0), alt(n);
      imp[0] = 1.0;
      for (std::size_t t = 0; t < n; ++t)
        alt[t] = t % 2 ? -1.0 : 1.0;
      const double d = dictionary_distance(make_dictionary({imp}), make_dictionary({alt}));
      CHECK(d == doctest::Approx(coherence_to_degrees(1.0 / std::sqrt(double(n)))).epsilon(1e-12));
      CHECK(d < 90.0);
    }
  }
  SUBCASE("random M=3 pairs: symmetric, bounded, and equal to a brute-force evaluation") {
    for (int trial = 0; trial < 50; ++trial) {
      const Dictionary a = random_dictionary(rng, 3, 8, 16);
      const Dictionary b = random_dictionary(rng, 3, 8, 16);
      const double ab = dictionary_distance(a, b);
      const double ba = dictionary_distance(b, a);
      CHECK(std::abs(ab - ba) < 1e-9);
      CHECK(ab >= 0.0);
      CHECK(ab <= 90.0);
      CHECK(std::abs(ab - brute_distance(a, b)) < 1e-9);
      CHECK(dictionary_distance(a, a) == 0.0);
    }
  }
  SUBCASE("mismatched sizes are refused") {
    CHECK_THROWS_AS(dictionary_distance(random_dictionary(rng, 2, 4, 4),
                                        random_dictionary(rng, 3, 4, 4)),
                    DataError);
  }
}

TEST_CASE("adaptation rate") {
  const Dictionary d0 = init_pseudorandom(3, 10, 2, 1);
  Dictionary d1 = d0;
  d1.atoms[0] = init_pseudorandom(1, 10, 2, 99).atoms[0];
  const std::vector<DictionarySnapshot> snaps{{100, d0}, {200, d0}, {300, d1}, {400, d1}};
  CHECK(adaptation_rate(snaps, 200, 100) == 0.0);
  CHECK(adaptation_rate(snaps, 450, 100) == 0.0); // both resolve to d1
  const double jump = dictionary_distance(d1, d0);
  CHECK(adaptation_rate(snaps, 300, 100) == doctest::Approx(jump).epsilon(1e-15));
  CHECK_THROWS_AS(adaptation_rate(snaps, 300, 86400), DataError); // lag precedes the history
}

TEST_CASE("adaptation rate before the first snapshot is an error") {
  const Dictionary d0 = init_pseudorandom(3, 10, 2, 1);
  const std::vector<DictionarySnapshot> snaps{{100, d0}, {200, d0}};
  CHECK_THROWS_AS(adaptation_rate(snaps, 150, 100), DataError);
  CHECK_THROWS_AS(adaptation_rate(snaps, 200, -1), ConfigError);
}

TEST_CASE("adaptation rate per day") {
  const Dictionary d0 = init_pseudorandom(3, 10, 2, 1);
  Dictionary d1 = d0;
  d1.atoms[1] = init_pseudorandom(2, 10, 2, 77).atoms[1];
  const std::vector<DictionarySnapshot> snaps{{0, d0}, {172800, d1}};
  const double raw = adaptation_rate(snaps, 172800, 172800);
  CHECK(adaptation_rate(snaps, 172800, 172800, true) == doctest::Approx(raw / 2.0).epsilon(1e-15));
}

TEST_CASE("adaptation rate of a frozen run is zero") {
  const Dictionary base = init_pseudorandom(4, 20, 5, 3);
  LearnConfig off;
  off.eta = 0.0;
  MonitorState st(base, CodingConfig{}, off);
  Rng rng(53);
  std::vector<DictionarySnapshot> snaps;
  for (int k = 0; k < 6; ++k) {
    SignalSegment s;
    s.samples = gaussian_vector(rng, 300);
    s.timestamp = 1000 * k;
    st.propagate(s);
    snaps.push_back({s.timestamp, st.dictionary()});
  }
  for (std::int64_t t = 2000; t <= 5000; t += 1000)
    CHECK(adaptation_rate(snaps, t, 2000) == 0.0);
}

TEST_CASE("adaptation rate reacts to a fault onset") {
  SynthSpec spec;
  spec.machine_id = "m";
  spec.planted_atoms = default_planted_atoms();
  spec.noise_std = std::sqrt(0.02 * 1.0625 / 10.0);
  spec.seed = 70;
  FaultSpec f;
  f.onset = 60 * 3600;
  f.impulse_amp = 0.5;
  spec.fault = f;
  const auto fleet = generate_fleet({spec}, 90, 4096, 3600, 0);

  SynthSpec train_spec = spec;
  train_spec.fault.reset();
  train_spec.seed = 71;
  std::vector<SignalSegment> blocks;
  const auto train_fleet = generate_fleet({train_spec}, 200, 2048, 3600, 0);
  for (const auto& s : train_fleet.segments[0])
    blocks.push_back(preprocess(s));
  LearnConfig lt;
  lt.eta = 2e-4;
  const Dictionary base = train_baseline(blocks, init_pseudorandom(8, 50, 10, 6), CodingConfig{}, lt);

  LearnConfig lm;
  lm.eta = 2e-5;
  MonitorState st(base, CodingConfig{}, lm);
  std::vector<DictionarySnapshot> snaps;
  for (const auto& s : fleet.segments[0]) {
    st.propagate(preprocess(s));
    snaps.push_back({s.timestamp, st.dictionary()});
  }
  const std::int64_t delta = 10 * 3600;
  std::vector<double> pre;
  for (int k = 20; k < 60; ++k)
    pre.push_back(adaptation_rate(snaps, k * 3600, delta));
  const double med = median(pre);
  std::vector<double> dev;
  for (double v : pre)
    dev.push_back(std::abs(v - med));
  const double mad = median(dev);
  const double after = adaptation_rate(snaps, 70 * 3600, delta);
  CHECK(after - med >= 3.0 * mad);
  CHECK(after > med);
}

TEST_CASE("fidelity in dB") {
  SparseCode c;
  SUBCASE("equal model and residual norms give 0 dB") {
    c.residual = {1.0, 0.0};
    CHECK(fidelity_db(c, std::vector<double>{1.0, 1.0}) == doctest::Approx(0.0));
  }
  SUBCASE("model ten times the residual gives 20 dB") {
    c.residual = {0.0, 1.0};
    CHECK(fidelity_db(c, std::vector<double>{10.0, 1.0}) == doctest::Approx(20.0).epsilon(1e-12));
  }
  SUBCASE("exact model is capped") {
    c.residual = {0.0, 0.0};
    CHECK(fidelity_db(c, std::vector<double>{3.0, 4.0}) == kFidelityCapDb);
  }
  SUBCASE("empty model is an error") {
    c.residual = {0.0, 0.0};
    CHECK_THROWS_AS(fidelity_db(c, std::vector<double>{0.0, 0.0}), NumericError);
  }
  SUBCASE("no model at all is the negative cap") {
    c.residual = {1.0, 2.0};
    CHECK(fidelity_db(c, std::vector<double>{1.0, 2.0}) == -kFidelityCapDb);
  }
  SUBCASE("mp fidelity is nondecreasing in the instance count") {
    Rng rng(54);
    const Dictionary d = random_dictionary(rng, 3, 6, 12);
    const auto s = gaussian_vector(rng, 200);
    double prev = -1e300;
    for (std::size_t n = 1; n <= 30; ++n) {
      CodingConfig cc;
      cc.instance_count = n;
      const double f = fidelity_db(mp_encode(s, d, cc), s);
      CHECK(f >= prev);
      prev = f;
    }
  }
}

TEST_CASE("low-pass filter") {
  SUBCASE("constant series is a fixed point") {
    const auto s = series("m", {{0, 2.5}, {1, 2.5}, {2, 2.5}, {3, 2.5}});
    const auto y = lowpass(s, 30.0);
    for (const auto& p : y.points)
      CHECK(p.value == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(y.machine_id == "m");
    CHECK(y.kind == s.kind);
  }
  SUBCASE("step response reaches 1 - 1/e after one time constant") {
    IndicatorSeries s{"m", IndicatorKind::fidelity_db, {{0, 0.0}}};
    for (int k = 1; k <= 100; ++k)
      s.points.push_back({k, 1.0});
    const auto y = lowpass(s, 30.0);
    CHECK(std::abs(y.points[30].value - (1.0 - std::exp(-1.0))) < 0.02);
    CHECK(y.points.back().value < 1.0);
    CHECK(y.points.back().value > 0.95);
  }
  SUBCASE("random series follows the recurrence") {
    Rng rng(55);
    IndicatorSeries s{"m", IndicatorKind::distance_deg, {}};
    for (int k = 0; k < 200; ++k)
      s.points.push_back({10 * k, rng.gaussian()});
    const double a = std::exp(-1.0 / 7.5);
    const auto y = lowpass(s, 7.5);
    double prev = s.points[0].value;
    CHECK(y.points[0].value == prev);
    for (std::size_t k = 1; k < 200; ++k) {
      prev = a * prev + (1 - a) * s.points[k].value;
      CHECK(y.points[k].value == doctest::Approx(prev).epsilon(1e-12));
      CHECK(y.points[k].timestamp == s.points[k].timestamp);
    }
  }
  SUBCASE("time constant below one is refused") {
    CHECK_THROWS_AS(lowpass(series("m", {{0, 1.0}}), 0.5), ConfigError);
  }
}

TEST_CASE("MAD scores") {
  auto panel = [](const std::vector<double>& values) {
    std::vector<IndicatorSeries> p;
    for (std::size_t i = 0; i < values.size(); ++i)
      p.push_back(series("m" + std::to_string(i), {{0, values[i]}, {10, values[i]}}));
    return p;
  };
  SUBCASE("equal machines score 0") {
    for (const auto& s : mad_scores(panel({3, 3, 3, 3}), 5)) {
      CHECK(s.score == 0.0);
      CHECK(s.saturated);
    }
  }
  SUBCASE("degenerate MAD engages the floor and flags saturation") {
    const auto scores = mad_scores(panel({1, 1, 1, 1, 1, 10}), 0);
    CHECK(scores[5].score == doctest::Approx(9.0 / kMadFloor).epsilon(1e-12));
    CHECK(scores[5].saturated);
    CHECK(scores[0].score == 0.0);
  }
  SUBCASE("hand arithmetic: median 4, MAD 0.5") {
    const auto scores = mad_scores(panel({2, 4, 4, 4, 5, 9}), 0);
    const std::vector<double> want{4, 0, 0, 0, 2, 10};
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(scores[i].score == doctest::Approx(want[i]).epsilon(1e-15));
      CHECK_FALSE(scores[i].saturated);
      CHECK(scores[i].machine_id == "m" + std::to_string(i));
    }
  }
  SUBCASE("values are interpolated between samples") {
    std::vector<IndicatorSeries> p{series("a", {{0, 0.0}, {10, 10.0}}), series("b", {{0, 1.0}, {10, 1.0}}),
                                   series("c", {{0, 2.0}, {10, 2.0}})};
    const auto scores = mad_scores(p, 5);
    CHECK(scores[0].value == doctest::Approx(5.0));
  }
  SUBCASE("fewer than three machines is an error") {
    CHECK_THROWS_AS(mad_scores(panel({1, 2}), 0), DataError);
  }
  SUBCASE("series form covers every shared timestamp") {
    const auto out = mad_score_series(panel({2, 4, 4, 4, 5, 9}));
    REQUIRE(out.size() == 6);
    CHECK(out[5].kind == IndicatorKind::mad_score);
    REQUIRE(out[5].points.size() == 2);
    CHECK(out[5].points[1].value == doctest::Approx(10.0));
  }
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), DataError);
}

TEST_CASE("series validation and interpolation") {
  CHECK_THROWS_AS(validate_series(series("m", {{1, 0.0}, {1, 1.0}})), DataError);
  CHECK_THROWS_AS(validate_series(series("m", {{1, NAN}})), DataError);
  const auto s = series("m", {{0, 0.0}, {4, 8.0}});
  CHECK(*s.value_at(1) == doctest::Approx(2.0));
  CHECK_FALSE(s.value_at(-1));
  CHECK_FALSE(s.value_at(5));
  for (auto k : {IndicatorKind::fidelity_db, IndicatorKind::distance_deg, IndicatorKind::adaptation_deg,
                 IndicatorKind::mad_score, IndicatorKind::slope, IndicatorKind::min_diff})
    CHECK(parse_indicator_kind(to_string(k)) == k);
}
