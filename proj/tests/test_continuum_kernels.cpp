#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "blpp/continuum_kernels.hpp"
#include "blpp/quadrature.hpp"
#include "blpp/stats.hpp"
#include "doctest.h"

using namespace blpp;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// crossing density of Brownian motion from x against the line v0 + b s,
// evaluated at B(t) = y: reflection plus an exponential tilt for the slope
double line_crossing_density(double t, double x, double y, double v0, double b) {
  double w = y - b * t;
  double base = (w > v0) ? heat_kernel(t, 2.0 * v0 - x, w) : heat_kernel(t, x, w);
  return std::exp(-b * (w - x) - 0.5 * b * b * t) * base;
}

double compose_gl(double zlo, double zhi, int n, const std::function<double(double)>& f) {
  GLRule r = gl_on_interval(n, zlo, zhi);
  double acc = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(r.x[i]);
  return acc;
}

}  // namespace

TEST_CASE("heat kernel and hermite basics") {
  CHECK(heat_kernel(1.0, 0.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(heat_kernel(2.0, 1.0, -1.0) ==
        doctest::Approx(std::exp(-1.0) / std::sqrt(4.0 * kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(heat_kernel(0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel(-1.0, 0.0, 0.0), std::invalid_argument);

  for (double u : {-2.3, -0.5, 0.0, 0.4, 1.9}) {
    CHECK(hermite_poly(0, u) == 1.0);
    CHECK(hermite_poly(1, u) == u);
    CHECK(hermite_poly(2, u) == doctest::Approx(u * u - 1.0).epsilon(1e-14));
    CHECK(hermite_poly(3, u) == doctest::Approx(u * u * u - 3.0 * u).epsilon(1e-14));
    CHECK(hermite_poly(4, u) ==
          doctest::Approx(u * u * u * u - 6.0 * u * u + 3.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(hermite_poly(-1, 0.0), std::invalid_argument);
}

TEST_CASE("exponential polynomial coefficients") {
  // exp((t/2) z^2 + d z) = sum_k c_k z^k with c_k = sum_{2a+b=k} (t/2)^a d^b / a! b!
  double t = -0.6, d = 1.3;
  CHECK(exp_poly_coeff(0, t, d) == 1.0);
  CHECK(exp_poly_coeff(1, t, d) == doctest::Approx(d).epsilon(1e-14));
  CHECK(exp_poly_coeff(2, t, d) == doctest::Approx(d * d / 2.0 + t / 2.0).epsilon(1e-14));
  CHECK(exp_poly_coeff(3, t, d) ==
        doctest::Approx(d * d * d / 6.0 + t * d / 2.0).epsilon(1e-14));
  // derivative in d lowers the index: c_k'(d) = c_{k-1}(d)
  double h = 1e-6;
  double num = (exp_poly_coeff(4, t, d + h) - exp_poly_coeff(4, t, d - h)) / (2.0 * h);
  CHECK(num == doctest::Approx(exp_poly_coeff(3, t, d)).epsilon(1e-8));
}

TEST_CASE("s_mt closed forms") {
  // m = 0 is the heat kernel
  for (double t : {0.3, 1.0, 2.5})
    for (double d : {-2.0, 0.0, 0.9})
      CHECK(s_mt(0, t, d, 0.0) == doctest::Approx(heat_kernel(t, d, 0.0)).epsilon(1e-12));

  // m = -1, t > 0 is the normal CDF of the gap
  CHECK(s_mt(-1, 1.0, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s_mt(-1, 4.0, 2.0, 0.0) == doctest::Approx(norm_cdf(1.0)).epsilon(1e-12));

  // t < 0: nonnegative orders vanish, negative orders are the residue polynomial
  CHECK(s_mt(0, -1.0, 0.3, 0.0) == 0.0);
  CHECK(s_mt(3, -0.5, 0.3, 0.0) == 0.0);
  CHECK(s_mt(-1, -0.7, 1.1, 0.4) == 1.0);
  CHECK(s_mt(-2, -0.7, 1.1, 0.4) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(s_mt(-3, -0.7, 1.1, 0.4) ==
        doctest::Approx(0.7 * 0.7 / 2.0 - 0.7 / 2.0).epsilon(1e-13));

  // t = 0: positive orders vanish, the rest has no pointwise value
  CHECK(s_mt(2, 0.0, 0.3, 0.1) == 0.0);
  CHECK_THROWS_AS(s_mt(0, 0.0, 0.3, 0.1), std::invalid_argument);

  // two pinned values of the Hermite form
  CHECK(std::abs(s_mt(2, 1.0, 0.0, 0.0) - (-0.3989)) < 5e-5);
  CHECK(std::abs(s_mt(1, 1.0, 1.0, 0.0) - (-0.2420)) < 5e-5);
}

TEST_CASE("vertical line contour matches the Hermite form") {
  for (int m = 0; m <= 4; ++m)
    for (double t : {0.3, 1.0, 2.5})
      for (double d : {-2.5, -1.0, 0.0, 0.7, 3.0}) {
        double exact = s_mt(m, t, d, 0.0);
        CHECK(std::abs(s_mt_line(m, t, d, 0.0) - exact) < 1e-9);
      }
  // node refinement changes nothing at working precision
  LineContour fine;
  fine.nodes = 480;
  CHECK(std::abs(s_mt_line(3, 0.7, 1.2, 0.0, fine) - s_mt_line(3, 0.7, 1.2, 0.0)) < 1e-11);
  // m = -1 on the line reproduces the CDF
  for (double d : {-1.5, 0.0, 0.8})
    CHECK(std::abs(s_mt_line(-1, 1.3, d, 0.0) - norm_cdf(d / std::sqrt(1.3))) < 1e-9);
  // a line through the origin is invalid for negative orders
  LineContour bad;
  bad.shift = 0.0;
  CHECK_THROWS_AS(s_mt_line(-1, 1.0, 0.0, 0.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(s_mt_line(0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("negative orders at positive time via antiderivatives of the CDF") {
  // S_{-2,t}(d) = d Phi(d/rt) + rt phi(d/rt); one more integration gives
  // S_{-3,t}(d) = ((d^2 + t) Phi(d/rt) + d rt phi(d/rt)) / 2
  for (double t : {0.5, 1.5})
    for (double d : {-2.0, -0.3, 0.0, 1.0, 2.8}) {
      double rt = std::sqrt(t);
      double m2 = d * norm_cdf(d / rt) + rt * norm_pdf(d / rt);
      double m3 = 0.5 * ((d * d + t) * norm_cdf(d / rt) + d * rt * norm_pdf(d / rt));
      CHECK(std::abs(s_mt(-2, t, d, 0.0) - m2) < 1e-8);
      CHECK(std::abs(s_mt(-3, t, d, 0.0) - m3) < 1e-8);
    }
}

TEST_CASE("sector contour reproduces the residue polynomial") {
  for (int m : {-1, -2, -3})
    for (double t : {-0.3, -1.0})
      for (double d : {-1.8, -0.4, 0.0, 0.9, 2.2}) {
        double exact = exp_poly_coeff(-m - 1, t, d);
        CHECK(std::abs(s_mt_sector(m, t, d, 0.0) - exact) < 1e-9);
        SectorContour alt;
        alt.half_angle = 0.3;
        alt.vertex = 1.1;
        alt.nodes = 480;
        CHECK(std::abs(s_mt_sector(m, t, d, 0.0, alt) - exact) < 1e-9);
      }
  // nonnegative orders have no pole: the sector integral is zero
  CHECK(std::abs(s_mt_sector(0, -0.5, 0.4, 0.0)) < 1e-10);
  CHECK(std::abs(s_mt_sector(2, -0.5, 0.4, 0.0)) < 1e-10);
  CHECK_THROWS_AS(s_mt_sector(-1, 0.5, 0.0, 0.0), std::invalid_argument);
  SectorContour wide;
  wide.half_angle = 1.0;  // past pi/4 the rays stop decaying
  CHECK_THROWS_AS(s_mt_sector(-1, -0.5, 0.0, 0.0, wide), std::invalid_argument);
}

TEST_CASE("semigroup composition of the kernels") {
  // S_{1,1/2} S_{1,1/2} = S_{2,1}
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.3, -0.6}}) {
    double lo = std::min(x, y) - 10.0, hi = std::max(x, y) + 10.0;
    double got = compose_gl(lo, hi, 600, [&](double z) {
      return s_mt(1, 0.5, x, z) * s_mt(1, 0.5, z, y);
    });
    CHECK(std::abs(got - s_mt(2, 1.0, x, y)) < 1e-6);
  }
  // S_{-1,0.3} S_{1,0.7} = heat(1.0): the CDF factor saturates to the left,
  // the order-one factor integrates to zero there, so truncation stays mild
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {-0.4, 0.9}}) {
    double lo = y - 13.0 * std::sqrt(0.7);
    double hi = std::max(x + 13.0 * std::sqrt(0.3), y + 13.0 * std::sqrt(0.7));
    double got = compose_gl(lo, hi, 800, [&](double z) {
      return s_mt(-1, 0.3, x, z) * s_mt(1, 0.7, z, y);
    });
    CHECK(std::abs(got - heat_kernel(1.0, x, y)) < 1e-6);
  }
}

TEST_CASE("hypo kernel against crossing-density oracles") {
  // narrow wedge: indicator of a nonpositive start
  ContinuumIC nw = ContinuumIC::narrow_wedge();
  CHECK(s_hypo(1, 0.8, -0.3, 0.5, nw) == s_mt(1, 0.8, -0.3, 0.5));
  CHECK(s_hypo(1, 0.8, 0.3, 0.5, nw) == 0.0);

  // flat barrier, m = 0: the hitting integral is the exact crossing density
  ContinuumIC fl = ContinuumIC::flat(0.2);
  for (double y : {-0.9, -0.1, 0.7, 1.6}) {
    double oracle = line_crossing_density(0.8, 1.0, y, 0.2, 0.0);
    CHECK(std::abs(s_hypo(0, 0.8, 1.0, y, fl, 400) - oracle) < 1e-8);
  }
  // start below the barrier: absorbed immediately
  CHECK(s_hypo(2, 0.8, 0.1, 0.5, fl) == s_mt(2, 0.8, 0.1, 0.5));

  // sloped barrier through a two-knot piecewise-linear condition
  ContinuumIC ln = ContinuumIC::piecewise_linear({0.0, 1.0}, {0.2, 0.7});
  for (double y : {-0.5, 0.3, 1.5}) {
    double oracle = line_crossing_density(0.8, 1.0, y, 0.2, 0.5);
    CHECK(std::abs(s_hypo(0, 0.8, 1.0, y, ln, 400) - oracle) < 1e-8);
  }
  // several segments (or leaving the covered span) defer to the sampler
  ContinuumIC multi = ContinuumIC::piecewise_linear({0.0, 0.5, 1.0}, {0.0, 0.4, 0.0});
  CHECK_THROWS_AS(s_hypo(1, 0.8, 1.0, 0.0, multi), std::domain_error);
  CHECK_THROWS_AS(s_hypo(1, 2.0, 1.0, 0.0, ln), std::domain_error);
}

TEST_CASE("sampled hypo kernel agrees with the deterministic forms") {
  HypoMCOptions opt;
  opt.npaths = 40000;
  opt.mesh = 1e-3;
  opt.seed = 7;

  // flat barrier, first order
  ContinuumIC fl = ContinuumIC::flat(0.2);
  std::vector<double> t2s = {0.4, 0.8};
  std::vector<double> zs = {-0.1, 0.6, 1.0};  // mixes absorbed starts with sampled ones
  std::vector<double> ys = {-0.5, 0.3, 1.2};
  HypoMCTable tab = s_hypo_mc_table(1, t2s, zs, ys, fl, opt);
  for (size_t s = 0; s < t2s.size(); ++s)
    for (size_t zi = 0; zi < zs.size(); ++zi)
      for (size_t yj = 0; yj < ys.size(); ++yj) {
        double exact = s_hypo(1, t2s[s], zs[zi], ys[yj], fl, 400);
        double tol = 3.5 * tab.se(s, zi, yj) + 2e-3;
        CHECK(std::abs(tab.at(s, zi, yj) - exact) < tol);
      }
  // absorbed start carries no sampling error
  CHECK(tab.se(0, 0, 0) == 0.0);
  CHECK(tab.at(0, 0, 0) == s_mt(1, 0.4, -0.1, -0.5));

  // sloped barrier
  ContinuumIC ln = ContinuumIC::piecewise_linear({0.0, 1.0}, {0.2, 0.7});
  double sem = 0.0;
  double got = s_hypo_mc(1, 0.8, 1.0, 0.3, ln, opt, &sem);
  CHECK(sem > 0.0);
  CHECK(std::abs(got - s_hypo(1, 0.8, 1.0, 0.3, ln, 400)) < 3.5 * sem + 2e-3);

  // same seed is bit-reproducible and independent of the worker count
  HypoMCOptions three = opt;
  three.workers = 3;
  HypoMCOptions one = opt;
  one.workers = 1;
  HypoMCTable t3 = s_hypo_mc_table(1, t2s, zs, ys, fl, three);
  HypoMCTable t1 = s_hypo_mc_table(1, t2s, zs, ys, fl, one);
  for (size_t i = 0; i < tab.mean.size(); ++i) {
    CHECK(t3.mean[i] == t1.mean[i]);
    CHECK(t3.sem[i] == t1.sem[i]);
  }

  // interior slices must land on the path mesh (the last one defines it)
  CHECK_THROWS_AS(s_hypo_mc_table(1, {0.40037, 0.8}, zs, ys, fl, opt), std::invalid_argument);
}

TEST_CASE("extended kernel closed forms at first order") {
  // narrow wedge, equal times: the z-integral telescopes to heat(t, 0, y)
  ContinuumIC nw = ContinuumIC::narrow_wedge();
  for (double y : {-2.0, -0.5, 0.0, 1.3}) {
    double got = k_extended(1, 1.0, -0.7, 1.0, y, nw);
    CHECK(std::abs(got - heat_kernel(1.0, 0.0, y)) < 1e-8);
  }
  // the x-dependence drops out entirely at equal times
  CHECK(std::abs(k_extended(1, 1.0, -0.7, 1.0, 0.4, nw) -
                 k_extended(1, 1.0, 0.9, 1.0, 0.4, nw)) < 1e-13);

  // distinct times keep the same integral and subtract the heat flow
  double base = k_extended(1, 0.5, -0.3, 1.0, 0.8, nw);
  double expect = heat_kernel(1.0, 0.0, 0.8) - heat_kernel(0.5, -0.3, 0.8);
  CHECK(std::abs(base - expect) < 1e-8);

  CHECK_THROWS_AS(k_extended(0, 0.5, 0.0, 1.0, 0.0, nw), std::invalid_argument);
}

TEST_CASE("extended kernel blocks") {
  ContinuumIC fl = ContinuumIC::flat(0.0);
  std::vector<double> xs = {-0.5, 0.3};
  std::vector<double> ys = {0.2, 0.9, 1.4};
  std::vector<double> blk = k_extended_block(2, 0.5, xs, 1.0, ys, fl);
  REQUIRE(blk.size() == xs.size() * ys.size());
  // node refinement leaves the block fixed
  std::vector<double> fine = k_extended_block(2, 0.5, xs, 1.0, ys, fl, 900);
  for (size_t i = 0; i < blk.size(); ++i) CHECK(std::abs(blk[i] - fine[i]) < 1e-7);

  // sampled block against the deterministic one on a shared grid
  const int nodes = 300;
  ComposeGrid g = compose_grid(1.0, 0.2, 1.4, fl, nodes);
  HypoMCOptions opt;
  opt.npaths = 30000;
  opt.seed = 11;
  HypoMCTable tab = s_hypo_mc_table(2, {1.0}, g.z, ys, fl, opt);
  std::vector<double> sem;
  std::vector<double> mc = k_extended_block_mc(2, 0.5, xs, 0, tab, g, &sem);
  std::vector<double> det = k_extended_block(2, 0.5, xs, 1.0, ys, fl, nodes);
  for (size_t i = 0; i < mc.size(); ++i) {
    CHECK(sem[i] > 0.0);
    CHECK(std::abs(mc[i] - det[i]) < 3.5 * sem[i] + 1e-6);
  }

  // grid mismatch is rejected
  ComposeGrid other = compose_grid(1.0, 0.2, 1.4, fl, nodes + 2);
  CHECK_THROWS_AS(k_extended_block_mc(2, 0.5, xs, 0, tab, other, nullptr),
                  std::invalid_argument);
}
