#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dictmon/coding.hpp"
#include "dictmon/error.hpp"
#include "dictmon/metrics.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

using namespace dictmon;
using testsupport::gaussian_vector;
using testsupport::make_dictionary;
using testsupport::random_dictionary;

namespace {

CodingConfig fixed_count(std::size_t n, Algorithm algo = Algorithm::mp) {
  CodingConfig c;
  c.algorithm = algo;
  c.instance_count = n;
  return c;
}

double norm2(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x)
    e += v * v;
  return e;
}

void place(std::vector<double>& x, const std::vector<double>& w, std::size_t at, double a) {
  for (std::size_t t = 0; t < w.size(); ++t)
    x[at + t] += a * w[t];
}

double dot_at(const std::vector<double>& r, const std::vector<double>& w, std::size_t at) {
  double s = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t)
    s += r[at + t] * w[t];
  return s;
}

/// Plain greedy pursuit recomputing every correlation from scratch.
std::vector<AtomInstance> greedy_oracle(std::vector<double> r, const Dictionary& d, std::size_t n) {
  std::vector<AtomInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    AtomInstance pick;
    bool found = false;
    for (const auto& atom : d.atoms) {
      for (std::size_t tau = 0; tau + atom.size() <= r.size(); ++tau) {
        const double c = dot_at(r, atom.waveform, tau);
        if (std::abs(c) > best) {
          best = std::abs(c);
          pick = {atom.id, tau, c};
          found = true;
        }
      }
    }
    if (!found)
      break;
    place(r, d.by_id(pick.atom_id).waveform, pick.offset, -pick.amplitude);
    out.push_back(pick);
  }
  return out;
}

Eigen::MatrixXd design(const std::vector<AtomInstance>& inst, const Dictionary& d, std::size_t len) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(len),
                                            static_cast<Eigen::Index>(inst.size()));
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const auto& w = d.by_id(inst[k].atom_id).waveform;
    for (std::size_t t = 0; t < w.size(); ++t)
      a(static_cast<Eigen::Index>(inst[k].offset + t), static_cast<Eigen::Index>(k)) = w[t];
  }
  return a;
}

/// OMP with a dense solve of the full least-squares problem at every step.
std::vector<AtomInstance> dense_omp_oracle(const std::vector<double>& s, const Dictionary& d,
                                           std::size_t n) {
  const Eigen::Map<const Eigen::VectorXd> sig(s.data(), static_cast<Eigen::Index>(s.size()));
  std::vector<AtomInstance> sel;
  Eigen::VectorXd r = sig;
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    AtomInstance pick;
    bool found = false;
    for (const auto& atom : d.atoms) {
      for (std::size_t tau = 0; tau + atom.size() <= s.size(); ++tau) {
        const bool taken = std::any_of(sel.begin(), sel.end(), [&](const AtomInstance& x) {
          return x.atom_id == atom.id && x.offset == tau;
        });
        if (taken)
          continue;
        double c = 0.0;
        for (std::size_t t = 0; t < atom.size(); ++t)
          c += r(static_cast<Eigen::Index>(tau + t)) * atom.waveform[t];
        if (std::abs(c) > best) {
          best = std::abs(c);
          pick = {atom.id, tau, 0.0};
          found = true;
        }
      }
    }
    if (!found)
      break;
    sel.push_back(pick);
    const Eigen::MatrixXd a = design(sel, d, s.size());
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(sig);
    for (std::size_t k = 0; k < sel.size(); ++k)
      sel[k].amplitude = coef(static_cast<Eigen::Index>(k));
    r = sig - a * coef;
  }
  return sel;
}

void sort_placements(std::vector<AtomInstance>& v) {
  std::sort(v.begin(), v.end(), [](const AtomInstance& a, const AtomInstance& b) {
    return a.offset != b.offset ? a.offset < b.offset : a.atom_id < b.atom_id;
  });
}

} // namespace

TEST_CASE("instance budget") {
  CodingConfig c;
  CHECK(instance_budget(c, 12800) == 1280);
  CHECK(instance_budget(c, 16384) == 1600);
  CHECK(instance_budget(c, 4096) == 384);
  CHECK(instance_budget(c, 64) == 7); // below one quantum: ceil(6.4)
  CHECK(instance_budget(c, 1) == 1);
  c.instance_quantum = 1;
  CHECK(instance_budget(c, 16384) == 1638);
  c.instance_count = 5;
  CHECK(instance_budget(c, 16384) == 5);
  CodingConfig bad;
  bad.sparsity = 1.0;
  CHECK_THROWS_AS(instance_budget(bad, 100), ConfigError);
}

TEST_CASE("cross correlation") {
  SUBCASE("atom against itself is its squared norm") {
    Rng rng(1);
    const Dictionary d = random_dictionary(rng, 1, 9, 9);
    const auto c = cross_correlate(d.atoms[0].waveform, d.atoms[0].waveform);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("zero residual") {
    const auto c = cross_correlate(std::vector<double>(20, 0.0), std::vector<double>{1, 2, 3});
    CHECK(c == std::vector<double>(18, 0.0));
  }
  SUBCASE("random inputs match a direct double loop") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = gaussian_vector(rng, 30 + rng.index(200));
      const auto w = gaussian_vector(rng, 1 + rng.index(25));
      const auto c = cross_correlate(s, w);
      REQUIRE(c.size() == s.size() - w.size() + 1);
      for (std::size_t tau = 0; tau < c.size(); ++tau)
        CHECK(std::abs(c[tau] - dot_at(s, w, tau)) <= 1e-10);
    }
  }
  SUBCASE("atom longer than signal is an error") {
    CHECK_THROWS_AS(cross_correlate(std::vector<double>(3, 1.0), std::vector<double>(4, 1.0)),
                    DataError);
  }
}

TEST_CASE("best placement selection") {
  Rng rng(3);
  const Dictionary d = random_dictionary(rng, 4, 6, 12);
  SUBCASE("noiseless scaled copy is found exactly") {
    std::vector<double> r(64, 0.0);
    place(r, d.by_id(2).waveform, 7, 3.0);
    const auto best = select_best(r, d);
    REQUIRE(best);
    CHECK(best->atom_id == 2);
    CHECK(best->offset == 7);
    CHECK(best->amplitude == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("negative amplitude keeps its sign") {
    std::vector<double> r(64, 0.0);
    place(r, d.by_id(1).waveform, 0, -2.0);
    const auto best = select_best(r, d);
    REQUIRE(best);
    CHECK(best->atom_id == 1);
    CHECK(best->offset == 0);
    CHECK(best->amplitude == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("random residual matches an exhaustive scan") {
    for (int trial = 0; trial < 40; ++trial) {
      const auto r = gaussian_vector(rng, 40 + rng.index(60));
      const auto got = select_best(r, d);
      const auto want = greedy_oracle(r, d, 1);
      REQUIRE(got);
      REQUIRE(want.size() == 1);
      CHECK(got->atom_id == want[0].atom_id);
      CHECK(got->offset == want[0].offset);
      CHECK(got->amplitude == doctest::Approx(want[0].amplitude).epsilon(1e-12));
    }
  }
  SUBCASE("zero residual selects nothing") {
    CHECK_FALSE(select_best(std::vector<double>(64, 0.0), d));
  }
  SUBCASE("exact ties go to the lowest atom id, then the lowest offset") {
    const Dictionary twin = make_dictionary({{1, 0, 0}, {1, 0, 0}});
    std::vector<double> r(10, 0.0);
    r[2] = 1.0;
    r[6] = -1.0;
    const auto best = select_best(r, twin);
    REQUIRE(best);
    CHECK(best->atom_id == 0);
    CHECK(best->offset == 2);
  }
}

TEST_CASE("matching pursuit") {
  Rng rng(4);
  const Dictionary d = random_dictionary(rng, 2, 8, 8);
  SUBCASE("one planted instance is recovered with a vanishing residual") {
    std::vector<double> s(64, 0.0);
    place(s, d.by_id(1).waveform, 20, 1.7);
    const auto code = mp_encode(s, d, fixed_count(1));
    REQUIRE(code.instances.size() == 1);
    CHECK(code.instances[0].atom_id == 1);
    CHECK(code.instances[0].offset == 20);
    CHECK(code.instances[0].amplitude == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(std::sqrt(norm2(code.residual)) < 1e-9);
  }
  SUBCASE("residual norm never increases on white noise") {
    const auto s = gaussian_vector(rng, 256);
    const auto code = mp_encode(s, d, fixed_count(60));
    REQUIRE(code.residual_energy.size() == code.instances.size() + 1);
    for (std::size_t i = 1; i < code.residual_energy.size(); ++i)
      CHECK(code.residual_energy[i] <= code.residual_energy[i - 1]);
  }
  SUBCASE("64 samples, two atoms of length 8, three steps match the scripted greedy oracle") {
    const auto s = gaussian_vector(rng, 64);
    const auto code = mp_encode(s, d, fixed_count(3));
    const auto want = greedy_oracle(s, d, 3);
    REQUIRE(code.instances.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(code.instances[i].atom_id == want[i].atom_id);
      CHECK(code.instances[i].offset == want[i].offset);
      CHECK(std::abs(code.instances[i].amplitude - want[i].amplitude) <= 1e-10);
    }
  }
  SUBCASE("energy identity and reconstruction identity") {
    for (int trial = 0; trial < 30; ++trial) {
      const Dictionary dd = random_dictionary(rng, 1 + rng.index(4), 4, 16);
      const auto s = gaussian_vector(rng, 64 + rng.index(192));
      const auto code = mp_encode(s, dd, fixed_count(1 + rng.index(12)));
      double sum_a2 = 0.0;
      for (const auto& inst : code.instances)
        sum_a2 += inst.amplitude * inst.amplitude;
      const double e0 = norm2(s);
      CHECK(std::abs(e0 - sum_a2 - norm2(code.residual)) <= 1e-9 * e0);
      CHECK(code.residual_energy.back() == doctest::Approx(norm2(code.residual)).epsilon(1e-9));
      const auto model = reconstruct(code.instances, dd, s.size());
      double err = 0.0;
      for (std::size_t t = 0; t < s.size(); ++t)
        err += std::pow(model[t] + code.residual[t] - s[t], 2);
      CHECK(std::sqrt(err) <= 1e-6 * std::sqrt(e0));
    }
  }
  SUBCASE("zero segment stops early and flags exhaustion") {
    const auto code = mp_encode(std::vector<double>(64, 0.0), d, fixed_count(5));
    CHECK(code.instances.empty());
    CHECK(code.exhausted);
  }
  SUBCASE("generation is stamped on the code") {
    Dictionary g = d;
    g.generation = 17;
    CHECK(mp_encode(gaussian_vector(rng, 32), g, fixed_count(2)).dictionary_generation == 17);
  }
  SUBCASE("atom longer than the segment is refused") {
    CHECK_THROWS_AS(mp_encode(std::vector<double>(5, 1.0), d, fixed_count(1)), DataError);
  }
}

TEST_CASE("orthogonal matching pursuit") {
  Rng rng(5);
  SUBCASE("two non-overlapping instances are recovered exactly") {
    const Dictionary d = random_dictionary(rng, 3, 8, 10);
    std::vector<double> s(80, 0.0);
    place(s, d.by_id(0).waveform, 5, 2.5);
    place(s, d.by_id(2).waveform, 50, -1.25);
    const auto code = omp_encode(s, d, fixed_count(2, Algorithm::omp));
    REQUIRE(code.instances.size() == 2);
    CHECK(std::sqrt(norm2(code.residual)) < 1e-9);
    CHECK(code.instances[0].atom_id == 0);
    CHECK(code.instances[0].offset == 5);
    CHECK(code.instances[0].amplitude == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(code.instances[1].atom_id == 2);
    CHECK(code.instances[1].offset == 50);
    CHECK(code.instances[1].amplitude == doctest::Approx(-1.25).epsilon(1e-12));
  }
  SUBCASE("64 samples, three steps match a dense least-squares oracle") {
    const Dictionary d = random_dictionary(rng, 2, 8, 8);
    const auto s = gaussian_vector(rng, 64);
    auto got = omp_encode(s, d, fixed_count(3, Algorithm::omp)).instances;
    auto want = dense_omp_oracle(s, d, 3);
    sort_placements(got);
    sort_placements(want);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].atom_id == want[k].atom_id);
      CHECK(got[k].offset == want[k].offset);
      CHECK(std::abs(got[k].amplitude - want[k].amplitude) <= 1e-8);
    }
  }
  SUBCASE("residual is orthogonal to every selected placement") {
    for (int trial = 0; trial < 20; ++trial) {
      const Dictionary d = random_dictionary(rng, 1 + rng.index(4), 4, 16);
      const auto s = gaussian_vector(rng, 64 + rng.index(192));
      const auto code = omp_encode(s, d, fixed_count(1 + rng.index(8), Algorithm::omp));
      for (const auto& inst : code.instances)
        CHECK(std::abs(dot_at(code.residual, d.by_id(inst.atom_id).waveform, inst.offset)) < 1e-6);
      for (std::size_t i = 1; i < code.residual_energy.size(); ++i)
        CHECK(code.residual_energy[i] <= code.residual_energy[i - 1] * (1 + 1e-12) + 1e-12);
    }
  }
  SUBCASE("refit of the greedy selection never leaves a larger residual") {
    for (int trial = 0; trial < 20; ++trial) {
      const Dictionary d = random_dictionary(rng, 3, 6, 14);
      const auto s = gaussian_vector(rng, 128);
      const auto mp = mp_encode(s, d, fixed_count(10));
      const auto refit = refit_amplitudes(s, mp.instances, d);
      const auto model = reconstruct(refit, d, s.size());
      double e = 0.0;
      for (std::size_t t = 0; t < s.size(); ++t)
        e += std::pow(s[t] - model[t], 2);
      CHECK(e <= norm2(mp.residual) * (1 + 1e-12));
    }
  }
  SUBCASE("repeated placement in a refit is handled by regularization") {
    const Dictionary d = random_dictionary(rng, 1, 8, 8);
    const auto s = gaussian_vector(rng, 32);
    std::vector<AtomInstance> dup{{0, 4, 0.0}, {0, 4, 0.0}};
    const auto fitted = refit_amplitudes(s, dup, d);
    REQUIRE(fitted.size() == 2);
    const double projection = dot_at(s, d.atoms[0].waveform, 4);
    CHECK(fitted[0].amplitude + fitted[1].amplitude == doctest::Approx(projection).epsilon(1e-6));
  }
}

TEST_CASE("reconstruction") {
  Rng rng(6);
  const Dictionary d = random_dictionary(rng, 2, 5, 5);
  CHECK(reconstruct({}, d, 12) == std::vector<double>(12, 0.0));
  const std::vector<AtomInstance> one{{1, 3, -0.5}};
  const auto x = reconstruct(one, d, 12);
  for (std::size_t t = 0; t < 12; ++t) {
    const double want = (t >= 3 && t < 8) ? -0.5 * d.by_id(1).waveform[t - 3] : 0.0;
    CHECK(x[t] == doctest::Approx(want).epsilon(1e-15));
  }
  CHECK_THROWS_AS(reconstruct(std::vector<AtomInstance>{{1, 8, 1.0}}, d, 12), DataError);
}

TEST_CASE("omp fidelity dominates mp on the same selections budget, on average") {
  Rng rng(7);
  const Dictionary d = random_dictionary(rng, 4, 10, 20);
  double mp_sum = 0.0, omp_sum = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto s = gaussian_vector(rng, 512);
    mp_sum += fidelity_db(mp_encode(s, d, fixed_count(40)), s);
    omp_sum += fidelity_db(omp_encode(s, d, fixed_count(40, Algorithm::omp)), s);
  }
  CHECK(omp_sum >= mp_sum);
}

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("mp") == Algorithm::mp);
  CHECK(parse_algorithm("OMP") == Algorithm::omp);
  CHECK(to_string(Algorithm::omp) == "omp");
  CHECK_THROWS_AS(parse_algorithm("ksvd"), ConfigError);
}
