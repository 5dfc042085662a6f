#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "blpp/continuum_ic.hpp"
#include "blpp/discrete_kernels.hpp"
#include "blpp/scaling.hpp"
#include "doctest.h"

using namespace blpp;

namespace {

const std::vector<int> kNs{100, 400, 1600};

// per-probe error sequences must decrease across the N ladder unless the probe
// already sits at the exactness floor (degenerate rows evaluate exactly)
void check_decreasing(const std::vector<LemmaErrorRow>& rows, double floor_abs = 1e-12) {
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.size(); ++j) {
      const auto &a = rows[i], &b = rows[j];
      if (a.N >= b.N) continue;
      if (a.requested.s != b.requested.s || a.requested.t != b.requested.t ||
          a.requested.x != b.requested.x || a.requested.y != b.requested.y ||
          a.requested.m != b.requested.m)
        continue;
      if (a.error < floor_abs && b.error < floor_abs) continue;
      CHECK(b.error < a.error);
    }
}

}  // namespace

TEST_CASE("rescale map round trips within lattice rounding") {
  for (int N : {100, 250}) {
    RescaleMap map{N};
    double root = map.root();
    for (double s : {0.13, 0.25, 0.5, 0.995}) {
      CHECK(std::abs(map.read_s(map.time(s)) - s) <= 0.5 / N + 1e-15);
      for (double x : {-1.7, -0.4, 0.0, 0.3, 2.1}) {
        CHECK(std::abs(map.read_x(map.time(s), map.space(s, x)) - x) <= 0.5 / root + 1e-15);
        CHECK(std::abs(map.read_x0(map.space0(x)) - x) <= 0.5 / root + 1e-15);
      }
    }
  }
  CHECK_THROWS_AS(RescaleMap{0}.validate(), std::invalid_argument);
}

TEST_CASE("transition density limit at the symmetric probe") {
  auto rows = lemma_check(1, kNs, {{0.25, 1.0, 0.0, 0.0, 1}});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.error < 0.05);
  CHECK(rows[1].error < rows[0].error);
  CHECK(rows[2].error < rows[1].error);
  // x = y = 0 kills the odd correction term; the leading error is O(1/N)
  CHECK(rows[0].error < 2e-3);
}

TEST_CASE("lemma 1 standard grid") {
  std::vector<LemmaProbe> grid{
      {0.25, 1.0, 0.3, -0.5, 1}, {0.25, 1.0, 0.0, 0.0, 1}, {0.5, 0.75, -0.8, 0.6, 1}};
  auto rows = lemma_check(1, kNs, grid);
  check_decreasing(rows);
  double rate = median_rate(rows);
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
}

TEST_CASE("lemma 2 standard grid") {
  std::vector<LemmaProbe> grid{
      {0.25, 0.25, -0.6, 0.6, 1}, {0.5, 0.5, 0.4, -0.3, 2}, {0.75, 0.75, -0.6, 0.2, 3}};
  auto rows = lemma_check(2, kNs, grid);
  check_decreasing(rows);
  // m = 1 negative-order kernel is the constant 1; the lattice value matches
  // it exactly once z2 sits left of the support edge, at every grid N
  for (const auto& r : rows)
    if (r.requested.m == 1) {
      CHECK(r.error < 1e-12);
      CHECK(r.discrete == doctest::Approx(1.0).epsilon(1e-12));
    }
  double rate = median_rate(rows);  // carried by the m = 2, 3 probes
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
}

TEST_CASE("lemma 2 order zero drops the half-N prefactor") {
  RescaleMap map{100};
  GeomParams p;
  LemmaProbe pr{0.25, 0.25, -1.2, 1.2, 0};
  auto rows = lemma_check(2, {100}, {pr});
  REQUIRE(rows.size() == 1);
  int n1 = map.time(pr.s);
  double direct = map.root() * s_star(0, n1, map.space(pr.s, pr.x), map.space0(pr.y), p);
  CHECK(rows[0].discrete == direct);
  CHECK(rows[0].discrete != 0.0);     // d = -16 lands inside the walk support
  CHECK(rows[0].continuum == 0.0);    // continuum target vanishes at order 0
}

TEST_CASE("lemma 2 start coordinate variant") {
  LemmaOptions var;
  var.lemma2_sqrt_ns_variant = true;
  LemmaProbe off{0.25, 0.25, -1.2, 1.2, 2};
  auto a = lemma_check(2, {100}, {off});
  auto b = lemma_check(2, {100}, {off}, ContinuumIC::narrow_wedge(), {}, var);
  CHECK(a[0].effective.x != b[0].effective.x);  // sqrt(Ns) != sqrt(2N) moves z1
  LemmaProbe centered{0.25, 0.25, 0.0, 1.2, 2};
  auto c = lemma_check(2, {100}, {centered});
  auto d = lemma_check(2, {100}, {centered}, ContinuumIC::narrow_wedge(), {}, var);
  CHECK(c[0].discrete == d[0].discrete);  // x = 0 makes both readings agree
}

TEST_CASE("lemma 3 standard grid") {
  std::vector<LemmaProbe> grid{
      {0.25, 1.0, 0.3, -0.4, 1}, {0.25, 1.0, 0.4, -0.2, 2}, {0.25, 1.0, 0.2, 0.1, 3}};
  auto rows = lemma_check(3, kNs, grid);
  check_decreasing(rows);
  double rate = median_rate(rows);
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
}

TEST_CASE("lemma 4 step data grid") {
  std::vector<LemmaProbe> grid{
      {0.0, 1.0, -0.4, 0.5, 1}, {0.0, 1.0, 0.5, -0.3, 1}, {0.0, 0.75, 0.3, 0.2, 2}};
  auto rows = lemma_check(4, kNs, grid);
  check_decreasing(rows);
  // starts below the step data top can never re-cross (the walk only moves
  // down), so those rows vanish identically on both sides
  for (const auto& r : rows)
    if (r.requested.x > 0.0) {
      CHECK(r.discrete == 0.0);
      CHECK(r.continuum == 0.0);
    }
  double rate = median_rate(rows);
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
}

TEST_CASE("lemma 4 order zero reduces to the crossing heat kernel") {
  auto rows = lemma_check(4, kNs, {{0.0, 1.0, -0.4, 0.5, 0}});
  check_decreasing(rows);
  double rate = median_rate(rows);
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
}

TEST_CASE("lemma 4 embedded data grids") {
  // probes keep y above the data level: below it the left tail of the payoff
  // grows like 2^{|gap|} and the lattice expectation stops tracking the limit
  std::vector<LemmaProbe> flat_grid{{0.0, 1.0, 0.5, 0.9, 1}, {0.0, 1.0, -0.3, 0.6, 1}};
  auto fr = lemma_check(4, kNs, flat_grid, ContinuumIC::flat(0.0));
  check_decreasing(fr);
  double frate = median_rate(fr);
  CHECK(frate > 0.3);
  CHECK(frate < 0.7);

  ContinuumIC line = ContinuumIC::piecewise_linear({0.0, 1.0}, {0.3, -0.2});
  auto lr = lemma_check(4, kNs, {{0.0, 1.0, 0.6, 0.4, 1}}, line);
  check_decreasing(lr);
  double lrate = median_rate(lr);
  CHECK(lrate > 0.3);
  CHECK(lrate < 0.7);
}

TEST_CASE("lemma 4 measure factor flag") {
  LemmaOptions drop;
  drop.lemma4_drop_root = true;
  LemmaProbe pr{0.0, 1.0, -0.4, 0.5, 1};
  auto with = lemma_check(4, {400}, {pr});
  auto without = lemma_check(4, {400}, {pr}, ContinuumIC::narrow_wedge(), {}, drop);
  CHECK(with[0].discrete ==
        doctest::Approx(without[0].discrete * RescaleMap{400}.root()).epsilon(1e-13));
}

TEST_CASE("composed kernel converges on step data") {
  std::vector<LemmaProbe> grid{{0.25, 1.0, 0.3, -0.4, 1},
                               {0.5, 0.5, 0.2, -0.1, 1},
                               {0.25, 0.75, 0.1, 0.2, 2},
                               {0.25, 1.0, 0.3, -0.4, 3}};
  auto rows = product_check(kNs, grid, ContinuumIC::narrow_wedge());
  check_decreasing(rows);
  for (const auto& r : rows) CHECK(r.reliable);
  double rate = median_rate(rows);
  CHECK(rate > 0.3);
  CHECK(rate < 0.7);
  // equal-time probes drop the transient on both sides; the surviving product
  // term alone already matches
  for (const auto& r : rows)
    if (r.requested.s == r.requested.t && r.N == 1600) CHECK(r.error < 5e-3);
}

TEST_CASE("composed kernel flags cancellation on embedded data") {
  auto rows = product_check(kNs, {{0.25, 1.0, 0.3, -0.4, 1}}, ContinuumIC::flat(0.0));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].reliable);           // N = 100 still carries ~10 safe digits
  CHECK(rows[0].error < 0.5);
  CHECK_FALSE(rows[1].reliable);     // the w-sum terms outgrow the value
  CHECK_FALSE(rows[2].reliable);
  CHECK_THROWS_AS(median_rate(rows), std::invalid_argument);  // nothing usable
}

TEST_CASE("median rate bookkeeping") {
  auto synth = [](int N, double err, bool ok, double x) {
    LemmaErrorRow r;
    r.lemma = 1;
    r.N = N;
    r.requested = {0.25, 1.0, x, 0.0, 1};
    r.error = err;
    r.reliable = ok;
    return r;
  };
  // err halves per 4x N on both legs: every pair fits rate 1/2 exactly
  std::vector<LemmaErrorRow> rows{synth(100, 0.8, true, 0.0), synth(400, 0.4, true, 0.0),
                                  synth(1600, 0.2, true, 0.0)};
  CHECK(median_rate(rows) == doctest::Approx(0.5).epsilon(1e-12));

  // unreliable middle point knocks out both adjacent pairs; the second probe
  // carries the answer alone
  std::vector<LemmaErrorRow> mixed{synth(100, 0.8, true, 0.0),  synth(400, 0.4, false, 0.0),
                                   synth(1600, 0.2, true, 0.0), synth(100, 0.9, true, 1.0),
                                   synth(400, 0.3, true, 1.0),  synth(1600, 0.1, true, 1.0)};
  double lone = median_rate(mixed);
  CHECK(lone == doctest::Approx(0.5 * (std::log(3.0) / std::log(4.0) +
                                       std::log(3.0) / std::log(4.0))));

  std::vector<LemmaErrorRow> dup{synth(100, 0.8, true, 0.0), synth(100, 0.4, true, 0.0)};
  CHECK_THROWS_AS(median_rate(dup), std::invalid_argument);
  std::vector<LemmaErrorRow> floored{synth(100, 1e-15, true, 0.0), synth(400, 1e-15, true, 0.0)};
  CHECK_THROWS_AS(median_rate(floored), std::invalid_argument);
}

TEST_CASE("input validation") {
  std::vector<LemmaProbe> one{{0.25, 1.0, 0.0, 0.0, 1}};
  CHECK_THROWS_AS(lemma_check(5, {100}, one), std::invalid_argument);
  CHECK_THROWS_AS(lemma_check(1, {}, one), std::invalid_argument);
  CHECK_THROWS_AS(lemma_check(1, {100}, {}), std::invalid_argument);
  GeomParams skew;
  skew.q = 0.6;
  CHECK_THROWS_AS(lemma_check(1, {100}, one, ContinuumIC::narrow_wedge(), skew),
                  std::invalid_argument);
  // equal times leave no transition steps
  CHECK_THROWS_AS(lemma_check(1, {100}, {{0.5, 0.5, 0.0, 0.0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(lemma_check(1, {100}, {{0.25, 1.0, 0.0, 0.0, -1}}), std::invalid_argument);
  // embedded data only covers one unit of rescaled time
  CHECK_THROWS_AS(lemma_check(4, {100}, {{0.0, 1.5, 0.5, 0.9, 1}}, ContinuumIC::flat(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(product_check({100}, {{0.25, 1.5, 0.3, -0.4, 1}}, ContinuumIC::flat(0.0)),
                  std::invalid_argument);
  // step data has no horizon: the same probe goes through
  CHECK_NOTHROW(lemma_check(4, {100}, {{0.0, 1.5, 0.5, 0.9, 1}}));
}
