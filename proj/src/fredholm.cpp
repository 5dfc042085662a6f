#include "blpp/fredholm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "blpp/discrete_kernels.hpp"
#include "blpp/quadrature.hpp"

namespace blpp {

void MultiPointQuery::validate() const {
  if (t.empty() || t.size() != a.size())
    throw std::invalid_argument("query: need matching times and thresholds");
  if (!(t.front() > 0.0)) throw std::invalid_argument("query: times must be positive");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("query: times must increase");
  if (m < 1) throw std::invalid_argument("query: m >= 1 required");
}

double det_I_minus(const std::vector<double>& M, size_t n) {
  if (M.size() != n * n) throw std::invalid_argument("det_I_minus: size mismatch");
  if (n == 0) return 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) A(i, j) -= M[i * n + j];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  double sign = lu.permutationP().determinant();
  double logmag = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double u = lu.matrixLU()(i, i);
    if (u == 0.0) return 0.0;
    if (u < 0.0) sign = -sign;
    logmag += std::log(std::abs(u));
  }
  return sign * std::exp(logmag);
}

// ---- discrete ---------------------------------------------------------------

namespace {

double discrete_det(const EventSpec& spec, int m, const DiscreteIC& ic, const GeomParams& p,
                    long W, double* tails) {
  const std::vector<long> xt = ic.xtilde();
  const std::vector<long> cut = translate_event(spec);
  const int k = spec.k();
  const size_t D = size_t(k) * size_t(W + 1);
  // beta-conjugation M = beta^{z-w} K balances the kernel's polynomial growth
  // up-right against the walk part down-left; the determinant is unchanged
  const double lbeta = -0.5 * std::log(p.theta);
  std::vector<double> M(D * D);
  *tails = 0.0;
  for (int j = 0; j < k; ++j) {
    for (long w = cut[j] - W; w <= cut[j]; ++w) {
      size_t col = size_t(j) * size_t(W + 1) + size_t(w - (cut[j] - W));
      for (int i = 0; i < k; ++i) {
        double tb = 0.0;
        std::vector<double> colv =
            k_geometric_column(spec.n[i], cut[i] - W, cut[i], spec.n[j], w, m, xt, p, &tb);
        for (long z = cut[i] - W; z <= cut[i]; ++z) {
          size_t row = size_t(i) * size_t(W + 1) + size_t(z - (cut[i] - W));
          double conj = std::exp(double(z - w) * lbeta);
          M[row * D + col] = conj * colv[size_t(z - (cut[i] - W))];
          *tails += std::abs(conj) * tb;
        }
      }
    }
  }
  return det_I_minus(M, D);
}

}  // namespace

DiscreteFredholmResult solve_discrete(const EventSpec& spec, int m, const DiscreteIC& ic,
                                      const GeomParams& p, const DiscreteSolveOptions& opt) {
  spec.validate();
  ic.validate();
  p.validate();
  if (m < 1) throw std::invalid_argument("solve_discrete: m >= 1 required");
  double prev = 0.0, tails = 0.0;
  bool have_prev = false;
  for (long W = opt.start_window; W <= opt.max_window; W *= 2) {
    double det = discrete_det(spec, m, ic, p, W, &tails);
    if (have_prev && std::abs(det - prev) < opt.tol)
      return DiscreteFredholmResult{det, std::abs(det - prev) + tails, W};
    prev = det;
    have_prev = true;
  }
  std::ostringstream os;
  os << "solve_discrete: window growth did not settle (last " << prev << " at window "
     << opt.max_window << ")";
  throw std::runtime_error(os.str());
}

// ---- continuum --------------------------------------------------------------

NystromGrid make_nystrom_grid(const MultiPointQuery& q, int nodes, double length) {
  q.validate();
  if (length < 10.0) throw std::invalid_argument("make_nystrom_grid: length >= 10 required");
  if (nodes < 2) throw std::invalid_argument("make_nystrom_grid: nodes >= 2 required");
  NystromGrid g;
  g.length = length;
  for (size_t i = 0; i < q.k(); ++i) {
    GLRule r = gl_on_interval(nodes, q.a[i], q.a[i] + length);
    g.x.push_back(std::move(r.x));
    g.w.push_back(std::move(r.w));
  }
  return g;
}

namespace {

struct LevelResult {
  double value = 0.0;
  double budget = 0.0;
};

LevelResult continuum_level(const MultiPointQuery& q, const ContinuumIC& ic,
                            const NystromGrid& grid, const HypoMCOptions* mc,
                            int compose_nodes) {
  const size_t k = q.k();
  std::vector<size_t> off(k + 1, 0);
  for (size_t i = 0; i < k; ++i) off[i + 1] = off[i] + grid.x[i].size();
  const size_t D = off[k];
  std::vector<double> M(D * D, 0.0), dM;

  if (!mc) {
    // deterministic backends: one hypo block per target slice, reused by
    // every source slice
    for (size_t j = 0; j < k; ++j) {
      ComposeGrid g = compose_grid(q.t[j], q.a[j], q.a[j] + grid.length, ic, compose_nodes);
      HypoMCTable tab;
      tab.t2 = {q.t[j]};
      tab.z = g.z;
      tab.y = grid.x[j];
      tab.mean = s_hypo_block(q.m, q.t[j], g.z, grid.x[j], ic);
      tab.sem.assign(tab.mean.size(), 0.0);
      for (size_t i = 0; i < k; ++i) {
        std::vector<double> blk = k_extended_block_mc(q.m, q.t[i], grid.x[i], 0, tab, g, nullptr);
        for (size_t p = 0; p < grid.x[i].size(); ++p)
          for (size_t c = 0; c < grid.x[j].size(); ++c)
            M[(off[i] + p) * D + off[j] + c] =
                std::sqrt(grid.w[i][p] * grid.w[j][c]) * blk[p * grid.x[j].size() + c];
      }
    }
    return LevelResult{det_I_minus(M, D), 0.0};
  }

  // sampled backend: one path ensemble over a shared start grid serves every
  // slice pair; the y-grid concatenates the per-slice nodes
  dM.assign(D * D, 0.0);
  double alo = q.a[0], ahi = q.a[0] + grid.length;
  for (size_t i = 0; i < k; ++i) {
    alo = std::min(alo, q.a[i]);
    ahi = std::max(ahi, q.a[i] + grid.length);
  }
  int zn = compose_nodes;
  if (zn <= 0) {
    // size the shared grid for the finest slice scale, not the last slice
    ComposeGrid probe = compose_grid(q.t.back(), alo, ahi, ic, 80);
    double span = probe.z.back() - probe.z.front();
    zn = std::min(2000, std::max(240, int(span / std::sqrt(q.t.front()) * 10.0) + 40));
  }
  ComposeGrid g = compose_grid(q.t.back(), alo, ahi, ic, zn);
  std::vector<double> yall;
  for (size_t j = 0; j < k; ++j) yall.insert(yall.end(), grid.x[j].begin(), grid.x[j].end());
  HypoMCTable tab = s_hypo_mc_table(q.m, q.t, g.z, yall, ic, *mc);
  for (size_t j = 0; j < k; ++j) {
    for (size_t i = 0; i < k; ++i) {
      std::vector<double> sem;
      std::vector<double> blk = k_extended_block_mc(q.m, q.t[i], grid.x[i], j, tab, g, &sem);
      for (size_t p = 0; p < grid.x[i].size(); ++p)
        for (size_t c = 0; c < grid.x[j].size(); ++c) {
          double sw = std::sqrt(grid.w[i][p] * grid.w[j][c]);
          M[(off[i] + p) * D + off[j] + c] = sw * blk[p * yall.size() + off[j] + c];
          dM[(off[i] + p) * D + off[j] + c] = sw * sem[p * yall.size() + off[j] + c];
        }
    }
  }
  double det = det_I_minus(M, D);
  // first-order perturbation: |d det(I-A)| <= |det| sum |(I-A)^{-1}_{qp}| |dA_{pq}|
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(D, D);
  for (size_t i = 0; i < D; ++i)
    for (size_t j = 0; j < D; ++j) A(i, j) -= M[i * D + j];
  Eigen::MatrixXd B = A.inverse();
  double budget = 0.0;
  for (size_t p = 0; p < D; ++p)
    for (size_t c = 0; c < D; ++c) budget += std::abs(B(c, p)) * dM[p * D + c];
  budget *= std::abs(det);
  return LevelResult{det, budget};
}

ContinuumFredholmResult continuum_ladder(const MultiPointQuery& q, const ContinuumIC& ic,
                                         const HypoMCOptions* mc,
                                         const ContinuumSolveOptions& opt) {
  q.validate();
  ContinuumFredholmResult res;
  double prev = 0.0;
  bool have_prev = false, converged = false;
  for (int n = opt.start_nodes; n <= opt.max_nodes; n *= 2) {
    NystromGrid grid = make_nystrom_grid(q, n, opt.length);
    LevelResult lv = continuum_level(q, ic, grid, mc, opt.compose_nodes);
    RefineRow row{n, opt.length, lv.value, have_prev ? std::abs(lv.value - prev) : 0.0};
    res.ladder.push_back(row);
    res.value = lv.value;
    res.budget = lv.budget;
    if (have_prev && row.delta < std::max(opt.tol, lv.budget)) {
      converged = true;
      if (!opt.full_ladder) return res;
    }
    prev = lv.value;
    have_prev = true;
  }
  if (converged || opt.full_ladder) return res;
  std::ostringstream os;
  os << "solve_continuum: refinement did not settle (last two "
     << res.ladder[res.ladder.size() - 2].value << ", " << res.ladder.back().value << ")";
  throw std::runtime_error(os.str());
}

}  // namespace

ContinuumFredholmResult solve_continuum(const MultiPointQuery& q, const ContinuumIC& ic,
                                        const ContinuumSolveOptions& opt) {
  return continuum_ladder(q, ic, nullptr, opt);
}

ContinuumFredholmResult solve_continuum_mc(const MultiPointQuery& q, const ContinuumIC& ic,
                                           const HypoMCOptions& mc,
                                           const ContinuumSolveOptions& opt) {
  return continuum_ladder(q, ic, &mc, opt);
}

std::vector<RefineRow> refine_report(const MultiPointQuery& q, const ContinuumIC& ic,
                                     const ContinuumSolveOptions& opt) {
  ContinuumSolveOptions full = opt;
  full.full_ladder = true;
  return continuum_ladder(q, ic, nullptr, full).ladder;
}

}  // namespace blpp
