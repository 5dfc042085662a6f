#pragma once
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "blpp/continuum_ic.hpp"

namespace blpp {

struct GeomParams {
  double q = 0.5;      // geometric weight parameter, in (0,1)
  double theta = 0.5;  // walk parameter, in (0,1)
  double alpha() const { return (1.0 - theta) / theta; }
  // phi(w) = (1-q) w / (w - q)
  std::complex<double> phi(std::complex<double> w) const { return (1.0 - q) * w / (w - q); }
  double c1() const { return q / (1.0 - q); }
  double c2() const { return q / ((1.0 - q) * (1.0 - q)); }
  void validate() const;
};

// column-zero data x_1 <= ... <= x_N
struct DiscreteIC {
  std::vector<long> x;
  int n() const { return static_cast<int>(x.size()); }
  void validate() const;
  // x~_j = -x_j - j, strictly decreasing
  std::vector<long> xtilde() const;
  static DiscreteIC step(int N) { return DiscreteIC{std::vector<long>(N, 0)}; }
};

struct WeightField {
  int M = 0, N = 0;
  std::vector<long> w;  // (m-1)*N + (n-1), 1-based access
  long at(int m, int n) const { return w[(m - 1) * size_t(N) + (n - 1)]; }
  long& at(int m, int n) { return w[(m - 1) * size_t(N) + (n - 1)]; }
};

// G(m,0): the paper's text fixes the zero row at 0, Johansson's formula sees
// only column data. The two evolutions agree when x_1 >= 0.
enum class BoundaryMode { ZeroRow, ColumnOnly };

struct LppField {
  static constexpr long kNegInf = -(1L << 60);
  int M = 0, N = 0;
  BoundaryMode mode = BoundaryMode::ZeroRow;
  std::vector<long> G;  // (M+1) x (N+1) row-major, indices 0..M, 0..N
  long at(int m, int n) const { return G[size_t(m) * (N + 1) + n]; }
  long& at(int m, int n) { return G[size_t(m) * (N + 1) + n]; }
  std::vector<long> row(int m) const;  // G(m,1..N)
};

// event {G(m, n_i) < a_i for all i}, n_i strictly increasing
struct EventSpec {
  std::vector<int> n;
  std::vector<long> a;
  int k() const { return static_cast<int>(n.size()); }
  void validate() const;
};

WeightField sample_environment(const GeomParams& p, int M, int N, uint64_t seed);

LppField glpp_evolve(const WeightField& w, const DiscreteIC& ic, BoundaryMode mode);

// exhaustive max over up-right paths (tiny instances); n_0 = 0 allowed only
// in zero-row mode, where the boundary contributes value 0
long variational_lpp(const WeightField& w, const DiscreteIC& ic, BoundaryMode mode, int m, int n);

// X(m,n) = -G(m,n) - n on a weakly increasing row
std::vector<long> map_to_x(const std::vector<long>& g_row);

// thresholds -a_i - n_i of the X-side event {X(m,n_i) > -a_i - n_i}
std::vector<long> translate_event(const EventSpec& spec);

bool event_holds(const LppField& f, int m, const EventSpec& spec);

// x_n = c1 n + floor(sqrt(c2 N) X(n/N)); narrow wedge rejected
DiscreteIC embed_continuum_ic(const ContinuumIC& X, int N, const GeomParams& p);

// Exact enumeration oracles over weight configurations, truncated so the
// discarded mass is below tail_mass. Exponential cost: tiny instances only.
std::map<std::vector<long>, double> enumerate_glpp_distribution(const DiscreteIC& ic, int m,
                                                                const GeomParams& p,
                                                                BoundaryMode mode,
                                                                double tail_mass = 1e-12);

double enumerate_event_probability(const DiscreteIC& ic, int m, const EventSpec& spec,
                                   const GeomParams& p, BoundaryMode mode,
                                   double tail_mass = 1e-12);

}  // namespace blpp
