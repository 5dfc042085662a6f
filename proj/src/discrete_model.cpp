#include "blpp/discrete_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "blpp/rng.hpp"

namespace blpp {

void GeomParams::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("GeomParams: q outside (0,1)");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("GeomParams: theta outside (0,1)");
}

void DiscreteIC::validate() const {
  if (x.empty()) throw std::invalid_argument("DiscreteIC: empty");
  for (size_t i = 1; i < x.size(); ++i)
    if (x[i] < x[i - 1]) throw std::invalid_argument("DiscreteIC: not weakly increasing");
}

std::vector<long> DiscreteIC::xtilde() const {
  std::vector<long> t(x.size());
  for (size_t j = 0; j < x.size(); ++j) t[j] = -x[j] - long(j + 1);
  return t;
}

void EventSpec::validate() const {
  if (n.empty() || n.size() != a.size()) throw std::invalid_argument("EventSpec: bad shape");
  for (size_t i = 1; i < n.size(); ++i)
    if (n[i] <= n[i - 1]) throw std::invalid_argument("EventSpec: n_i not strictly increasing");
}

std::vector<long> LppField::row(int m) const {
  std::vector<long> r(N);
  for (int n = 1; n <= N; ++n) r[n - 1] = at(m, n);
  return r;
}

WeightField sample_environment(const GeomParams& p, int M, int N, uint64_t seed) {
  p.validate();
  if (M < 1 || N < 1) throw std::invalid_argument("sample_environment: M,N >= 1 required");
  WeightField f;
  f.M = M;
  f.N = N;
  f.w.resize(size_t(M) * N);
  // chunked substreams: layout fixed by (seed, cell index), not worker count
  constexpr size_t kChunk = 4096;
  for (size_t base = 0; base < f.w.size(); base += kChunk) {
    Rng rng(derive_stream(seed, 0, base / kChunk));
    size_t end = std::min(base + kChunk, f.w.size());
    for (size_t i = base; i < end; ++i) f.w[i] = rng.geometric(p.q);
  }
  return f;
}

LppField glpp_evolve(const WeightField& w, const DiscreteIC& ic, BoundaryMode mode) {
  ic.validate();
  if (ic.n() != w.N) throw std::invalid_argument("glpp_evolve: ic length != weight width");
  LppField f;
  f.M = w.M;
  f.N = w.N;
  f.mode = mode;
  f.G.assign(size_t(w.M + 1) * (w.N + 1), 0);
  const long bnd = mode == BoundaryMode::ZeroRow ? 0 : LppField::kNegInf;
  f.at(0, 0) = bnd;
  for (int n = 1; n <= w.N; ++n) f.at(0, n) = ic.x[n - 1];
  for (int m = 1; m <= w.M; ++m) {
    f.at(m, 0) = bnd;
    for (int n = 1; n <= w.N; ++n) {
      long best = std::max(f.at(m - 1, n), f.at(m, n - 1));
      f.at(m, n) = best <= LppField::kNegInf ? LppField::kNegInf : best + w.at(m, n);
    }
  }
  return f;
}

long variational_lpp(const WeightField& w, const DiscreteIC& ic, BoundaryMode mode, int m, int n) {
  ic.validate();
  if (m < 1 || n < 1 || m > w.M || n > w.N) throw std::invalid_argument("variational_lpp: out of range");
  // prefix sums S^{(k)}_j, S_j = 0 for j <= 0
  auto S = [&](int k, int j) {
    long s = 0;
    for (int c = 1; c <= j; ++c) s += w.at(k, c);
    return s;
  };
  long best = LppField::kNegInf;
  std::vector<int> nk(m + 1, 0);
  nk[m] = n;
  const int n0min = mode == BoundaryMode::ZeroRow ? 0 : 1;
  std::function<void(int)> rec = [&](int k) {
    if (k == m) {
      long v = nk[0] == 0 ? 0 : ic.x[nk[0] - 1];
      for (int j = 1; j <= m; ++j) v += S(j, nk[j]) - S(j, nk[j - 1] - 1);
      best = std::max(best, v);
      return;
    }
    int lo = k == 0 ? n0min : nk[k - 1];
    for (int v = lo; v <= n; ++v) {
      nk[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

std::vector<long> map_to_x(const std::vector<long>& g_row) {
  for (size_t i = 1; i < g_row.size(); ++i)
    if (g_row[i] < g_row[i - 1]) throw std::invalid_argument("map_to_x: row not weakly increasing");
  std::vector<long> out(g_row.size());
  for (size_t j = 0; j < g_row.size(); ++j) out[j] = -g_row[j] - long(j + 1);
  return out;
}

std::vector<long> translate_event(const EventSpec& spec) {
  spec.validate();
  std::vector<long> th(spec.n.size());
  for (size_t i = 0; i < th.size(); ++i) th[i] = -spec.a[i] - spec.n[i];
  return th;
}

bool event_holds(const LppField& f, int m, const EventSpec& spec) {
  spec.validate();
  for (int i = 0; i < spec.k(); ++i) {
    if (spec.n[i] < 1 || spec.n[i] > f.N) throw std::invalid_argument("event_holds: n_i out of range");
    if (!(f.at(m, spec.n[i]) < spec.a[i])) return false;
  }
  return true;
}

DiscreteIC embed_continuum_ic(const ContinuumIC& X, int N, const GeomParams& p) {
  if (!X.finite()) throw std::invalid_argument("embed_continuum_ic: narrow wedge is not embeddable");
  p.validate();
  DiscreteIC ic;
  ic.x.resize(N);
  double root = std::sqrt(p.c2() * N);
  for (int n = 1; n <= N; ++n)
    ic.x[n - 1] = std::lround(p.c1() * n) + long(std::floor(root * X.eval(double(n) / N)));
  ic.validate();  // embedding of a too-steeply-decreasing X is rejected here
  return ic;
}

// iterate all weight configurations with per-cell cap chosen so total skipped
// mass stays below tail_mass
static void enumerate_weights(int M, int N, double q, double tail_mass,
                              const std::function<void(const WeightField&, double)>& visit) {
  const int cells = M * N;
  const int cap = std::max(1, (int)std::ceil(std::log(tail_mass / cells) / std::log(q)) - 1);
  std::vector<double> pmf(cap + 1);
  for (int k = 0; k <= cap; ++k) pmf[k] = (1 - q) * std::pow(q, k);
  WeightField w;
  w.M = M;
  w.N = N;
  w.w.assign(size_t(cells), 0);
  std::function<void(int, double)> rec = [&](int cell, double mass) {
    if (cell == cells) {
      visit(w, mass);
      return;
    }
    for (int k = 0; k <= cap; ++k) {
      w.w[cell] = k;
      rec(cell + 1, mass * pmf[k]);
    }
  };
  rec(0, 1.0);
}

std::map<std::vector<long>, double> enumerate_glpp_distribution(const DiscreteIC& ic, int m,
                                                                const GeomParams& p,
                                                                BoundaryMode mode,
                                                                double tail_mass) {
  ic.validate();
  p.validate();
  std::map<std::vector<long>, double> dist;
  enumerate_weights(m, ic.n(), p.q, tail_mass, [&](const WeightField& w, double mass) {
    dist[glpp_evolve(w, ic, mode).row(m)] += mass;
  });
  return dist;
}

double enumerate_event_probability(const DiscreteIC& ic, int m, const EventSpec& spec,
                                   const GeomParams& p, BoundaryMode mode, double tail_mass) {
  ic.validate();
  spec.validate();
  p.validate();
  double acc = 0.0;
  enumerate_weights(m, ic.n(), p.q, tail_mass, [&](const WeightField& w, double mass) {
    if (event_holds(glpp_evolve(w, ic, mode), m, spec)) acc += mass;
  });
  return acc;
}

}  // namespace blpp
