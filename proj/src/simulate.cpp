#include "blpp/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "blpp/rng.hpp"

namespace blpp {

namespace {

int env_workers(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* s = std::getenv("BLPP_WORKERS")) {
    int w = std::atoi(s);
    if (w > 0) return std::min(w, 64);
  }
  return 1;
}

// slot indices of the t-grid on the mesh; every t_i must sit on a grid point
std::vector<size_t> grid_slots(const std::vector<double>& tgrid, double dt, size_t steps) {
  std::vector<size_t> slots(tgrid.size());
  for (size_t i = 0; i < tgrid.size(); ++i) {
    if (i > 0 && !(tgrid[i] > tgrid[i - 1]))
      throw std::invalid_argument("blpp_mc: t-grid must increase");
    slots[i] = size_t(std::llround(tgrid[i] / dt));
    if (slots[i] > steps || std::abs(double(slots[i]) * dt - tgrid[i]) > 1e-9 * std::max(1.0, tgrid[i]))
      throw std::invalid_argument("blpp_mc: t-grid point off the mesh");
  }
  return slots;
}

template <typename Body>
void run_parallel(uint64_t nsamples, int workers, const Body& body) {
  if (workers <= 1) {
    body(0, nsamples);
    return;
  }
  std::vector<std::thread> th;
  uint64_t per = (nsamples + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    uint64_t s0 = uint64_t(w) * per, s1 = std::min(nsamples, s0 + per);
    if (s0 >= s1) break;
    th.emplace_back([&body, s0, s1] { body(s0, s1); });
  }
  for (auto& t : th) t.join();
}

}  // namespace

MeshPath sample_mesh_path(int m, double horizon, double mesh, uint64_t seed, uint64_t sample) {
  const size_t steps = std::max<size_t>(1, size_t(std::llround(horizon / mesh)));
  const double dt = horizon > 0.0 ? horizon / double(steps) : mesh;
  MeshPath path;
  path.mesh = dt;
  path.b.assign(m, std::vector<double>(steps + 1, 0.0));
  Rng rng(derive_stream(seed, 0, sample));
  const double sdt = std::sqrt(dt);
  for (int k = 0; k < m; ++k)
    for (size_t j = 0; j < steps; ++j) path.b[k][j + 1] = path.b[k][j] + sdt * rng.normal();
  return path;
}

std::vector<double> blpp_mc_direct(const ContinuumIC& ic, int m, const std::vector<double>& tgrid,
                                   const SimConfig& cfg) {
  if (m < 0) throw std::invalid_argument("blpp_mc_direct: m >= 0 required");
  if (tgrid.empty() || !(tgrid.front() >= 0.0))
    throw std::invalid_argument("blpp_mc_direct: bad t-grid");
  if (!(cfg.mesh > 0.0) || cfg.nsamples == 0)
    throw std::invalid_argument("blpp_mc_direct: bad config");
  const double horizon = tgrid.back();
  const size_t steps = std::max<size_t>(1, size_t(std::llround(horizon / cfg.mesh)));
  const double dt = horizon > 0.0 ? horizon / double(steps) : cfg.mesh;
  const std::vector<size_t> slots = grid_slots(tgrid, dt, steps);
  const double ninf = -std::numeric_limits<double>::infinity();

  std::vector<double> x0(steps + 1);
  for (size_t j = 0; j <= steps; ++j)
    x0[j] = (ic.kind == ContinuumIC::Kind::NarrowWedge) ? (j == 0 ? 0.0 : ninf)
                                                        : ic.eval(double(j) * dt);

  std::vector<double> out(cfg.nsamples * tgrid.size());
  auto body = [&](uint64_t s0, uint64_t s1) {
    const double sdt = std::sqrt(dt);
    std::vector<double> z(steps + 1), b(steps + 1);
    for (uint64_t s = s0; s < s1; ++s) {
      Rng rng(derive_stream(cfg.seed, 0, s));
      z = x0;
      for (int k = 0; k < m; ++k) {
        b[0] = 0.0;
        for (size_t j = 0; j < steps; ++j) b[j + 1] = b[j] + sdt * rng.normal();
        // Z_k(s) = B(s) + max_{u <= s} (Z_{k-1}(u) - B(u))
        double run = ninf;
        for (size_t j = 0; j <= steps; ++j) {
          run = std::max(run, z[j] - b[j]);
          z[j] = b[j] + run;
        }
      }
      for (size_t i = 0; i < slots.size(); ++i) out[s * slots.size() + i] = z[slots[i]];
    }
  };
  run_parallel(cfg.nsamples, env_workers(cfg.workers), body);
  return out;
}

std::vector<double> blpp_mc_coupled(const ContinuumIC& ic, int m, const std::vector<double>& tgrid,
                                    int N, const GeomParams& p, const SimConfig& cfg,
                                    BoundaryMode mode) {
  if (m < 1) throw std::invalid_argument("blpp_mc_coupled: m >= 1 required");
  if (N < 100) throw std::invalid_argument("blpp_mc_coupled: N >= 100 required");
  p.validate();
  DiscreteIC dic = embed_continuum_ic(ic, N, p);
  std::vector<int> cols(tgrid.size());
  for (size_t i = 0; i < tgrid.size(); ++i) {
    cols[i] = int(std::llround(double(N) * tgrid[i]));
    if (cols[i] < 1 || cols[i] > dic.n())
      throw std::invalid_argument("blpp_mc_coupled: t-grid outside the embedded range");
  }
  const double scale = std::sqrt(p.c2() * double(N));
  std::vector<double> out(cfg.nsamples * tgrid.size());
  auto body = [&](uint64_t s0, uint64_t s1) {
    for (uint64_t s = s0; s < s1; ++s) {
      WeightField w = sample_environment(p, m, dic.n(), derive_stream(cfg.seed, 2, s));
      LppField f = glpp_evolve(w, dic, mode);
      for (size_t i = 0; i < cols.size(); ++i)
        out[s * cols.size() + i] =
            (double(f.at(m, cols[i])) - p.c1() * double(cols[i] + m)) / scale;
    }
  };
  run_parallel(cfg.nsamples, env_workers(cfg.workers), body);
  return out;
}

std::vector<double> gue_lambda_max(int m, uint64_t nsamples, uint64_t seed,
                                   std::vector<double>* lambda_min) {
  if (m < 1) throw std::invalid_argument("gue_lambda_max: m >= 1 required");
  std::vector<double> out(nsamples);
  if (lambda_min) lambda_min->assign(nsamples, 0.0);
  const double rt2inv = std::sqrt(0.5);
  for (uint64_t s = 0; s < nsamples; ++s) {
    Rng rng(derive_stream(seed, 3, s));
    if (m == 1) {
      out[s] = rng.normal();
      if (lambda_min) (*lambda_min)[s] = out[s];
      continue;
    }
    Eigen::MatrixXcd H(m, m);
    for (int i = 0; i < m; ++i) {
      H(i, i) = rng.normal();
      for (int j = i + 1; j < m; ++j) {
        std::complex<double> v(rt2inv * rng.normal(), rt2inv * rng.normal());
        H(i, j) = v;
        H(j, i) = std::conj(v);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    out[s] = es.eigenvalues()(m - 1);
    if (lambda_min) (*lambda_min)[s] = es.eigenvalues()(0);
  }
  return out;
}

std::vector<MCEstimate> empirical_cdf(const std::vector<double>& samples,
                                      const std::vector<double>& thresholds, uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("empirical_cdf: no samples");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const uint64_t n = sorted.size();
  const double band = dkw_band(n);
  std::vector<MCEstimate> out;
  out.reserve(thresholds.size());
  for (double a : thresholds) {
    size_t cnt = std::upper_bound(sorted.begin(), sorted.end(), a) - sorted.begin();
    double pv = double(cnt) / double(n);
    MCEstimate e;
    e.value = pv;
    e.samples = n;
    e.stderr_ = std::sqrt(std::max(0.0, pv * (1.0 - pv)) / double(n));
    e.dkw99 = band;
    e.seed = seed;
    out.push_back(e);
  }
  return out;
}

}  // namespace blpp
