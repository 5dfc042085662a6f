#pragma once
#include <cstdint>
#include <vector>

#include "blpp/continuum_ic.hpp"
#include "blpp/discrete_model.hpp"
#include "blpp/stats.hpp"

namespace blpp {

struct SimConfig {
  double mesh = 1e-3;  // path discretization step
  uint64_t nsamples = 100000;
  uint64_t seed = 1;
  int workers = 0;  // 0: read BLPP_WORKERS, else that many threads
};

// one sample's driving noise: B_k on the uniform grid j * mesh
struct MeshPath {
  double mesh = 0.0;
  std::vector<std::vector<double>> b;  // b[k][j], k = 1..m stored at k-1
};

// regenerates the exact driving noise blpp_mc_direct uses for one sample
MeshPath sample_mesh_path(int m, double horizon, double mesh, uint64_t seed, uint64_t sample);

// direct simulation of the passage value Z_m(t) = max over increasing
// 0 <= t_0 <= ... <= t_m = t of X(t_0) + sum_k (B_k(t_k) - B_k(t_{k-1})),
// by the running-max recursion level by level. Returns samples flattened as
// out[sample * tgrid.size() + i] = Z_m(t_i). The mesh maximum undershoots the
// true maximum; the mesh-halving test bounds that bias empirically.
std::vector<double> blpp_mc_direct(const ContinuumIC& ic, int m, const std::vector<double>& tgrid,
                                   const SimConfig& cfg);

// geometric-chain sampler coupled through the lattice embedding:
// (G(m, round(N t)) - c1 (round(N t) + m)) / sqrt(c2 N)
std::vector<double> blpp_mc_coupled(const ContinuumIC& ic, int m, const std::vector<double>& tgrid,
                                    int N, const GeomParams& p, const SimConfig& cfg,
                                    BoundaryMode mode = BoundaryMode::ColumnOnly);

// largest eigenvalue of an m x m GUE matrix (N(0,1) diagonal, complex
// off-diagonal entries with N(0,1/2) components; m = 1 is standard normal).
// lambda_min, when given, receives the smallest eigenvalue per sample.
std::vector<double> gue_lambda_max(int m, uint64_t nsamples, uint64_t seed,
                                   std::vector<double>* lambda_min = nullptr);

// empirical CDF values with binomial stderr and the 99% DKW band
std::vector<MCEstimate> empirical_cdf(const std::vector<double>& samples,
                                      const std::vector<double>& thresholds, uint64_t seed = 0);

}  // namespace blpp
