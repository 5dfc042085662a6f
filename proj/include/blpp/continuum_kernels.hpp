#pragma once
#include <cstdint>
#include <limits>
#include <vector>

#include "blpp/continuum_ic.hpp"

namespace blpp {

// probabilists' Hermite polynomial (H_0 = 1, H_1 = u, H_{m+1} = u H_m - m H_{m-1})
double hermite_poly(int m, double u);

// (2 pi t)^{-1/2} exp(-(x-y)^2 / 2t), t > 0
double heat_kernel(double t, double x, double y);

// coefficient of z^k in exp((t/2) z^2 + d z); t may be negative
double exp_poly_coeff(int k, double t, double d);

// S_{m,t}(x,y) = (1/2 pi i) int_Gamma exp((t/2) z^2 + (x-y) z) z^m dz.
// Closed forms: m >= 0 with t > 0 is the Hermite form; m >= 0 with t < 0 is 0;
// m >= 1 with t = 0 is 0; m = -1 with t > 0 is the normal CDF; m <= -1 with
// t < 0 is the residue polynomial exp_poly_coeff(-m-1, t, x-y). The remaining
// case (m <= -2, t > 0) falls back to the vertical-line quadrature.
double s_mt(int m, double t, double x, double y);

// vertical line through Re z = shift (t > 0; defaults to the saddle for
// m >= 0 and to a line right of the origin for m < 0)
struct LineContour {
  double shift = std::numeric_limits<double>::quiet_NaN();  // NaN: automatic
  int nodes = 240;
  double width = 14.0;  // truncation half-width in units of 1/sqrt(t)
};
double s_mt_line(int m, double t, double x, double y, const LineContour& c = {});

// wedge opening leftward from a vertex on the positive real axis (t < 0)
struct SectorContour {
  double vertex = std::numeric_limits<double>::quiet_NaN();  // NaN: automatic
  double half_angle = 0.5;                                   // in (0, pi/4)
  int nodes = 320;
  double reach = 14.0;  // ray truncation in units of 1/sqrt(|t| cos 2*angle)
};
double s_mt_sector(int m, double t, double x, double y, const SectorContour& c = {});

// S^{hypo}_{m,t}(x,y) = E[ S_{m,t-tau}(B(tau), y) 1_{tau <= t} | B(0) = x ],
// tau the first entry of (s, B(s)) into the hypograph of the initial
// condition. Narrow wedge and flat data have deterministic forms; a
// piecewise-linear X with a single segment covering [0,t] reduces to the
// line-hitting integral. Anything else needs the sampling backend below.
double s_hypo(int m, double t, double x, double y, const ContinuumIC& ic, int nodes = 240);

// composition grid for the z-integral joining S_{-m,-t1} to S^{hypo}_{m,t2};
// covers the Gaussian support of the hypo factor for targets in [ylo, yhi]
// (nodes = 0 picks a count from the span). Narrow wedge grids stop at 0.
struct ComposeGrid {
  std::vector<double> z, w;
};
ComposeGrid compose_grid(double t2, double ylo, double yhi, const ContinuumIC& ic, int nodes = 0);

// deterministic hypo factor on a grid, row-major zs.size() x ys.size();
// shared across the composition legs of a multi-time kernel block
std::vector<double> s_hypo_block(int m, double t2, const std::vector<double>& zs,
                                 const std::vector<double>& ys, const ContinuumIC& ic);

// extended kernel K(t1, x; t2, y) =
//   -heat(t2-t1, x, y) 1_{t1 < t2} + (S_{-m,-t1} S^{hypo}_{m,t2})(x, y)
double k_extended(int m, double t1, double x, double t2, double y, const ContinuumIC& ic,
                  int nodes = 0);

// whole block out[i*ys.size()+j] = K(t1, xs[i]; t2, ys[j]); the hypo factor
// is evaluated once per (z, y) pair and shared across rows
std::vector<double> k_extended_block(int m, double t1, const std::vector<double>& xs, double t2,
                                     const std::vector<double>& ys, const ContinuumIC& ic,
                                     int nodes = 0);

// ---- sampling backend for general finite initial data ----------------------

struct HypoMCOptions {
  double mesh = 1e-3;        // time step of the path discretization
  uint64_t npaths = 100000;  // independent Brownian paths
  uint64_t seed = 1;
  int workers = 0;  // 0: read BLPP_WORKERS, else that many threads
};

// Monte Carlo estimate of S^{hypo}_{m,t2}(z, y) on a grid of starts z,
// targets y, and time slices t2 (ascending; each within round-off of a mesh
// multiple). mean/sem are indexed [slice][zi][yj], flattened.
struct HypoMCTable {
  std::vector<double> t2, z, y;
  std::vector<double> mean, sem;
  size_t index(size_t s, size_t zi, size_t yj) const { return (s * z.size() + zi) * y.size() + yj; }
  double at(size_t s, size_t zi, size_t yj) const { return mean[index(s, zi, yj)]; }
  double se(size_t s, size_t zi, size_t yj) const { return sem[index(s, zi, yj)]; }
};

HypoMCTable s_hypo_mc_table(int m, const std::vector<double>& t2s, const std::vector<double>& zs,
                            const std::vector<double>& ys, const ContinuumIC& ic,
                            const HypoMCOptions& opt);

// single-point convenience wrapper
double s_hypo_mc(int m, double t, double x, double y, const ContinuumIC& ic,
                 const HypoMCOptions& opt, double* sem_out = nullptr);

// extended-kernel block built from a sampled hypo table: tab.z must equal g.z.
// If sem_out is non-null it receives a conservative per-entry error bound
// (sampling errors are correlated across z, so absolute values are summed).
std::vector<double> k_extended_block_mc(int m, double t1, const std::vector<double>& xs,
                                        size_t slice, const HypoMCTable& tab,
                                        const ComposeGrid& g, std::vector<double>* sem_out = nullptr);

}  // namespace blpp
