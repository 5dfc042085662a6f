#include "blpp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "blpp/continuum_kernels.hpp"
#include "blpp/discrete_kernels.hpp"

namespace blpp {

double RescaleMap::root() const { return std::sqrt(2.0 * N); }

int RescaleMap::time(double s) const { return int(std::lround(double(N) * s)); }

long RescaleMap::space(double s, double x) const {
  long n = time(s);  // anchor the time part on the lattice so it rounds away exactly
  return std::lround(-2.0 * double(n) - x * root());
}

long RescaleMap::space0(double x) const { return std::lround(-x * root()); }

double RescaleMap::read_s(int n) const { return double(n) / N; }

double RescaleMap::read_x(int n, long z) const { return -(double(z) + 2.0 * n) / root(); }

double RescaleMap::read_x0(long z) const { return -double(z) / root(); }

void RescaleMap::validate() const {
  if (N < 1) throw std::invalid_argument("RescaleMap: N >= 1 required");
}

namespace {

void require_half(const GeomParams& p) {
  p.validate();
  if (p.q != 0.5 || p.theta != 0.5)
    throw std::invalid_argument("scaling checks require q = theta = 1/2");
}

}  // namespace

std::vector<long> lattice_barrier(const ContinuumIC& ic, int N, int nsteps, const GeomParams& p) {
  if (!ic.finite()) return DiscreteIC::step(nsteps).xtilde();
  if (nsteps > N)
    throw std::invalid_argument("lattice_barrier: horizon exceeds the embedded column (t <= 1)");
  return embed_continuum_ic(ic, N, p).xtilde();
}

std::vector<LemmaErrorRow> lemma_check(int lemma, const std::vector<int>& Ns,
                                       const std::vector<LemmaProbe>& probes,
                                       const ContinuumIC& ic, const GeomParams& p,
                                       const LemmaOptions& opt) {
  if (lemma < 1 || lemma > 4) throw std::invalid_argument("lemma_check: lemma must be 1..4");
  require_half(p);
  if (Ns.empty() || probes.empty()) throw std::invalid_argument("lemma_check: empty input");

  std::vector<LemmaErrorRow> rows;
  rows.reserve(Ns.size() * probes.size());
  for (int N : Ns) {
    RescaleMap map{N};
    map.validate();
    for (const LemmaProbe& pr : probes) {
      if (pr.m < 0) throw std::invalid_argument("lemma_check: m >= 0 required");
      LemmaErrorRow row;
      row.lemma = lemma;
      row.N = N;
      row.requested = pr;
      row.effective = pr;
      const double root = map.root();
      const double half = 0.5 * N;

      switch (lemma) {
        case 1: {
          int n1 = map.time(pr.s), n2 = map.time(pr.t);
          if (n2 <= n1) throw std::invalid_argument("lemma_check(1): need t > s on the lattice");
          long z1 = map.space(pr.s, pr.x), z2 = map.space(pr.t, pr.y);
          row.effective.s = map.read_s(n1);
          row.effective.t = map.read_s(n2);
          row.effective.x = map.read_x(n1, z1);
          row.effective.y = map.read_x(n2, z2);
          row.discrete = root * q_pow(n2 - n1, z1, z2, p);
          row.continuum = heat_kernel(row.effective.t - row.effective.s, row.effective.x,
                                      row.effective.y);
          break;
        }
        case 2: {
          int n1 = map.time(pr.s);
          if (n1 < 1) throw std::invalid_argument("lemma_check(2): need s > 0 on the lattice");
          long z1 = opt.lemma2_sqrt_ns_variant
                        ? std::lround(-2.0 * n1 - pr.x * std::sqrt(double(N) * pr.s))
                        : map.space(pr.s, pr.x);
          long z2 = map.space0(pr.y);
          row.effective.s = map.read_s(n1);
          row.effective.t = row.effective.s;
          row.effective.x = map.read_x(n1, z1);
          row.effective.y = map.read_x0(z2);
          row.discrete = root * s_star(pr.m, n1, z1, z2, p) * std::pow(half, -0.5 * pr.m);
          row.continuum = s_mt(-pr.m, -row.effective.s, row.effective.x, row.effective.y);
          break;
        }
        case 3: {
          int n1 = map.time(pr.s), n2 = map.time(pr.t);
          if (n2 <= n1) throw std::invalid_argument("lemma_check(3): need t > s on the lattice");
          long z1 = map.space(pr.s, pr.x), z2 = map.space(pr.t, pr.y);
          row.effective.s = map.read_s(n1);
          row.effective.t = map.read_s(n2);
          row.effective.x = map.read_x(n1, z1);
          row.effective.y = map.read_x(n2, z2);
          row.discrete = root * s_bar(pr.m, n2 - n1, z1, z2, p) * std::pow(half, 0.5 * pr.m);
          row.continuum = s_mt(pr.m, row.effective.t - row.effective.s, row.effective.x,
                               row.effective.y);
          break;
        }
        case 4: {
          int n2 = map.time(pr.t);
          if (n2 < 1) throw std::invalid_argument("lemma_check(4): need t > 0 on the lattice");
          long z1 = map.space0(pr.x), z2 = map.space(pr.t, pr.y);
          auto xt = lattice_barrier(ic, N, n2, p);
          row.effective.s = 0.0;
          row.effective.t = map.read_s(n2);
          row.effective.x = map.read_x0(z1);
          row.effective.y = map.read_x(n2, z2);
          double scale = std::pow(half, 0.5 * pr.m) * (opt.lemma4_drop_root ? 1.0 : root);
          row.discrete = scale * s_epi(pr.m, n2, z1, z2, xt, p);
          row.continuum = s_hypo(pr.m, row.effective.t, row.effective.x, row.effective.y, ic);
          break;
        }
      }
      row.error = std::abs(row.discrete - row.continuum);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<LemmaErrorRow> product_check(const std::vector<int>& Ns,
                                         const std::vector<LemmaProbe>& probes,
                                         const ContinuumIC& ic, const GeomParams& p) {
  require_half(p);
  if (Ns.empty() || probes.empty()) throw std::invalid_argument("product_check: empty input");

  std::vector<LemmaErrorRow> rows;
  rows.reserve(Ns.size() * probes.size());
  for (int N : Ns) {
    RescaleMap map{N};
    map.validate();
    for (const LemmaProbe& pr : probes) {
      if (pr.m < 1) throw std::invalid_argument("product_check: m >= 1 required");
      int n1 = map.time(pr.s), n2 = map.time(pr.t);
      if (n1 < 1 || n2 < n1) throw std::invalid_argument("product_check: need 0 < s <= t");
      long z1 = map.space(pr.s, pr.x), z2 = map.space(pr.t, pr.y);
      auto xt = lattice_barrier(ic, N, n2, p);

      LemmaErrorRow row;
      row.lemma = 0;
      row.N = N;
      row.requested = pr;
      row.effective = pr;
      row.effective.s = map.read_s(n1);
      row.effective.t = map.read_s(n2);
      row.effective.x = map.read_x(n1, z1);
      row.effective.y = map.read_x(n2, z2);
      // the (N/2)^{+-m/2} factors cancel between the two legs; the surviving
      // sqrt(2N) converts the intermediate lattice sum into the z-integral
      KGeomResult kg = k_geometric(n1, z1, n2, z2, pr.m, xt, p);
      row.discrete = map.root() * kg.value;
      row.continuum = k_extended(pr.m, row.effective.s, row.effective.x, row.effective.t,
                                 row.effective.y, ic);
      row.error = std::abs(row.discrete - row.continuum);
      // eps times the peak composed term bounds the rounding noise left in the
      // w-sum; once that clears a percent of the target scale the double holds
      // no signal (slope-2 data past N of a few hundred). Judge against the
      // continuum side: the discrete value itself may already be garbage.
      row.reliable =
          map.root() * kg.peak_term * 1e-14 <= 0.01 * (1.0 + std::abs(row.continuum));
      rows.push_back(row);
    }
  }
  return rows;
}

double median_rate(const std::vector<LemmaErrorRow>& rows, double floor_abs) {
  using Key = std::tuple<int, double, double, double, double, int>;
  std::map<Key, std::vector<std::tuple<int, double, bool>>> series;
  for (const auto& r : rows) {
    Key k{r.lemma, r.requested.s, r.requested.t, r.requested.x, r.requested.y, r.requested.m};
    series[k].push_back({r.N, r.error, r.reliable});
  }
  std::vector<double> rates;
  for (auto& [k, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (size_t i = 1; i < pts.size(); ++i) {
      auto [n0, e0, ok0] = pts[i - 1];
      auto [n1, e1, ok1] = pts[i];
      if (n1 == n0) throw std::invalid_argument("median_rate: duplicate N for one probe");
      if (!ok0 || !ok1) continue;  // cancellation noise, not an error measurement
      if (e0 < floor_abs || e1 < floor_abs) continue;  // converged to the noise floor
      rates.push_back(std::log(e0 / e1) / std::log(double(n1) / n0));
    }
  }
  if (rates.empty()) throw std::invalid_argument("median_rate: no usable error pairs");
  std::sort(rates.begin(), rates.end());
  size_t h = rates.size() / 2;
  return rates.size() % 2 ? rates[h] : 0.5 * (rates[h - 1] + rates[h]);
}

}  // namespace blpp
