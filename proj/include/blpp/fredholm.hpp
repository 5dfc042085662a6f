#pragma once
#include <cstddef>
#include <vector>

#include "blpp/continuum_ic.hpp"
#include "blpp/continuum_kernels.hpp"
#include "blpp/discrete_model.hpp"

namespace blpp {

// joint event over time slices: continuum P(BLPP(X; (t_i, m)) <= a_i for all i)
struct MultiPointQuery {
  std::vector<double> t;  // strictly increasing, positive
  std::vector<double> a;  // one threshold per slice
  int m = 1;
  size_t k() const { return t.size(); }
  void validate() const;
};

// det(I - M) for a dense row-major n x n matrix, LU with partial pivoting;
// the product of pivots is accumulated in log magnitude so extreme scales
// degrade to 0/inf instead of trapping
double det_I_minus(const std::vector<double>& M, size_t n);

// ---- discrete setting: det(I - chi K chi) on l^2({n_1..n_k} x Z) ----------

struct DiscreteSolveOptions {
  long start_window = 32;  // initial depth below each cutoff
  long max_window = 512;
  double tol = 1e-8;  // window-doubling convergence target
};

struct DiscreteFredholmResult {
  double value = 0.0;
  double certificate = 0.0;  // window delta plus summed kernel tail bounds
  long window = 0;           // depth that met the target
};

// P(G(m, n_i) < a_i for all i) for the geometric chain started from ic;
// chi keeps z <= -a_i - n_i and the window grows downward until the
// determinant settles
DiscreteFredholmResult solve_discrete(const EventSpec& spec, int m, const DiscreteIC& ic,
                                      const GeomParams& p, const DiscreteSolveOptions& opt = {});

// ---- continuum setting: det(I - chibar K chibar) on L^2({t_1..t_k} x R) ---

struct NystromGrid {
  std::vector<std::vector<double>> x, w;  // per-slice nodes/weights on [a_i, a_i + L]
  double length = 12.0;
};
NystromGrid make_nystrom_grid(const MultiPointQuery& q, int nodes, double length);

struct RefineRow {
  int nodes = 0;
  double length = 0.0;
  double value = 0.0;
  double delta = 0.0;  // change from the previous ladder step (0 on the first)
};

struct ContinuumSolveOptions {
  double length = 12.0;  // half-line truncation [a_i, a_i + length]
  int start_nodes = 16;
  int max_nodes = 256;
  double tol = 1e-4;
  bool full_ladder = false;  // run every ladder step even after convergence
  int compose_nodes = 0;     // inner composition grid size; 0 picks automatically
};

struct ContinuumFredholmResult {
  double value = 0.0;
  double budget = 0.0;  // first-order determinant error from sampled kernels
  std::vector<RefineRow> ladder;
};

// deterministic kernel backends (narrow wedge, flat, one linear segment)
ContinuumFredholmResult solve_continuum(const MultiPointQuery& q, const ContinuumIC& ic,
                                        const ContinuumSolveOptions& opt = {});

// sampled hypo backend for general piecewise-linear data; the budget carries
// the first-order perturbation bound |det| sum |(I-M)^{-1}| sem
ContinuumFredholmResult solve_continuum_mc(const MultiPointQuery& q, const ContinuumIC& ic,
                                           const HypoMCOptions& mc,
                                           const ContinuumSolveOptions& opt = {});

// full refinement ladder for convergence reporting
std::vector<RefineRow> refine_report(const MultiPointQuery& q, const ContinuumIC& ic,
                                     const ContinuumSolveOptions& opt = {});

}  // namespace blpp
