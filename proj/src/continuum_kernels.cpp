#include "blpp/continuum_kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "blpp/quadrature.hpp"
#include "blpp/rng.hpp"
#include "blpp/stats.hpp"

namespace blpp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.141592653589793238462643383279;

cplx cpow_int(cplx z, long n) {
  if (n == 0) return 1.0;
  bool inv = n < 0;
  unsigned long e = inv ? -(unsigned long)n : (unsigned long)n;
  cplx acc = 1.0, base = z;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return inv ? 1.0 / acc : acc;
}

int env_workers(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* s = std::getenv("BLPP_WORKERS")) {
    int w = std::atoi(s);
    if (w > 0) return std::min(w, 64);
  }
  return 1;
}

// first-passage density of B to the line v0 + b s, started at x = v0 + a, a > 0
double line_hit_density(double a, double b, double s) {
  double u = a - b * s;
  return a / std::sqrt(2.0 * kPi * s * s * s) * std::exp(-u * u / (2.0 * s));
}

double line_hit_prob(double a, double b, double t) {
  double rt = std::sqrt(t);
  double tilt = std::exp(std::min(700.0, 2.0 * a * b));
  return norm_cdf((b * t - a) / rt) + tilt * norm_cdf((-b * t - a) / rt);
}

// deterministic hypo kernel for the barrier X(s) = v0 + b s (b = 0 is flat data)
double s_hypo_line(int m, double t, double x, double y, double v0, double b, int nodes) {
  if (x <= v0) return s_mt(m, t, x, y);
  double a = x - v0;
  // subtracting the s = 0 value keeps the integrand resolvable when the
  // hitting density concentrates at s ~ a^2 for starts close to the barrier;
  // s = t sin^2(pi v / 2) then clusters nodes at both remaining endpoints
  double g0 = s_mt(m, t, v0, y);
  const GLRule& gl = gauss_legendre(nodes);
  double acc = g0 * line_hit_prob(a, b, t);
  for (size_t i = 0; i < gl.x.size(); ++i) {
    double v = 0.5 * (gl.x[i] + 1.0);
    double sn = std::sin(0.5 * kPi * v);
    double s = t * sn * sn;
    if (s <= 0.0 || s >= t) continue;
    double ds = t * 0.5 * kPi * std::sin(kPi * v);
    double g = s_mt(m, t - s, v0 + b * s, y) - g0;
    acc += 0.5 * gl.w[i] * ds * line_hit_density(a, b, s) * g;
  }
  return acc;
}

bool single_segment(const ContinuumIC& ic, double t) {
  return ic.kind == ContinuumIC::Kind::PiecewiseLinear && ic.knot_t.size() == 2 &&
         t <= ic.knot_t.back() + 1e-12;
}

// barrier range over [0, t]
void barrier_range(const ContinuumIC& ic, double t, double* bmin, double* bmax) {
  double lo = ic.eval(0.0), hi = lo;
  if (ic.kind == ContinuumIC::Kind::PiecewiseLinear) {
    for (size_t i = 0; i < ic.knot_t.size(); ++i) {
      if (ic.knot_t[i] > t) break;
      lo = std::min(lo, ic.knot_v[i]);
      hi = std::max(hi, ic.knot_v[i]);
    }
    double e = ic.eval(t);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  *bmin = lo;
  *bmax = hi;
}

uint64_t bridge_key(uint64_t pathkey, uint64_t k) {
  return mix64(pathkey ^ (0xc2b2ae3d27d4eb4full * (k + 1)));
}

double unit_from(uint64_t h) { return ((h >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

double hermite_poly(int m, double u) {
  if (m < 0) throw std::invalid_argument("hermite_poly: m >= 0 required");
  double hm1 = 0.0, h = 1.0;
  for (int k = 0; k < m; ++k) {
    double next = u * h - double(k) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

double heat_kernel(double t, double x, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t > 0 required");
  double d = x - y;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

double exp_poly_coeff(int k, double t, double d) {
  if (k < 0) throw std::invalid_argument("exp_poly_coeff: k >= 0 required");
  // sum over 2a + b = k of (t/2)^a d^b / (a! b!)
  double acc = 0.0;
  for (int a = 0; 2 * a <= k; ++a) {
    int b = k - 2 * a;
    double term = 1.0;
    for (int i = 1; i <= a; ++i) term *= (t / 2.0) / double(i);
    for (int i = 1; i <= b; ++i) term *= d / double(i);
    acc += term;
  }
  return acc;
}

double s_mt(int m, double t, double x, double y) {
  double d = x - y;
  if (t > 0.0) {
    if (m >= 0) {
      double rt = std::sqrt(t);
      double sign = (m % 2 == 0) ? 1.0 : -1.0;
      return sign * std::pow(rt, -double(m)) * hermite_poly(m, d / rt) * heat_kernel(t, x, y);
    }
    if (m == -1) return norm_cdf(d / std::sqrt(t));
    return s_mt_line(m, t, x, y);
  }
  if (t == 0.0) {
    if (m >= 1) return 0.0;
    throw std::invalid_argument("s_mt: t = 0 with m <= 0 is not a pointwise kernel");
  }
  if (m >= 0) return 0.0;
  return exp_poly_coeff(-m - 1, t, d);
}

double s_mt_line(int m, double t, double x, double y, const LineContour& c) {
  if (!(t > 0.0)) throw std::invalid_argument("s_mt_line: t > 0 required");
  double d = x - y;
  double zstar = -d / t;
  double shift = c.shift;
  if (std::isnan(shift)) shift = (m >= 0) ? zstar : std::max(zstar, 0.5 / std::sqrt(t));
  if (m < 0 && !(shift > 0.0))
    throw std::invalid_argument("s_mt_line: negative orders need a line right of the origin");
  double U = c.width / std::sqrt(t);
  const GLRule& gl = gauss_legendre(c.nodes);
  double acc = 0.0;
  for (size_t i = 0; i < gl.x.size(); ++i) {
    double u = 0.5 * (gl.x[i] + 1.0) * U;
    cplx z(shift, u);
    cplx f = std::exp(0.5 * t * z * z + d * z) * cpow_int(z, m);
    acc += 0.5 * U * gl.w[i] * f.real();
  }
  return acc / kPi;
}

double s_mt_sector(int m, double t, double x, double y, const SectorContour& c) {
  if (!(t < 0.0)) throw std::invalid_argument("s_mt_sector: t < 0 required");
  if (!(c.half_angle > 0.0 && c.half_angle < 0.25 * kPi))
    throw std::invalid_argument("s_mt_sector: half angle must lie in (0, pi/4)");
  double d = x - y;
  double at = -t;
  double c2 = std::cos(2.0 * c.half_angle);
  double vertex = c.vertex;
  if (std::isnan(vertex)) vertex = 0.5 / std::sqrt(at);
  if (!(vertex > 0.0)) throw std::invalid_argument("s_mt_sector: vertex must be positive");
  // exponential decay sets in beyond the drift peak |d|/(|t| cos 2theta)
  double U = vertex + std::abs(d) / (at * c2) + c.reach / std::sqrt(at * c2);
  cplx dir = std::polar(1.0, c.half_angle);
  const GLRule& gl = gauss_legendre(c.nodes);
  double acc = 0.0;
  for (size_t i = 0; i < gl.x.size(); ++i) {
    double u = 0.5 * (gl.x[i] + 1.0) * U;
    cplx z = vertex - dir * u;
    cplx f = std::exp(0.5 * t * z * z + d * z) * cpow_int(z, m);
    acc += 0.5 * U * gl.w[i] * (dir * f).imag();
  }
  return acc / kPi;
}

double s_hypo(int m, double t, double x, double y, const ContinuumIC& ic, int nodes) {
  if (!(t > 0.0)) throw std::invalid_argument("s_hypo: t > 0 required");
  switch (ic.kind) {
    case ContinuumIC::Kind::NarrowWedge:
      return x <= 0.0 ? s_mt(m, t, x, y) : 0.0;
    case ContinuumIC::Kind::Flat:
      return s_hypo_line(m, t, x, y, ic.level, 0.0, nodes);
    case ContinuumIC::Kind::PiecewiseLinear: {
      if (single_segment(ic, t)) {
        double b = (ic.knot_v[1] - ic.knot_v[0]) / (ic.knot_t[1] - ic.knot_t[0]);
        return s_hypo_line(m, t, x, y, ic.knot_v[0], b, nodes);
      }
      throw std::domain_error("s_hypo: several linear pieces need the sampling backend");
    }
  }
  return 0.0;
}

ComposeGrid compose_grid(double t2, double ylo, double yhi, const ContinuumIC& ic, int nodes) {
  if (!(t2 > 0.0)) throw std::invalid_argument("compose_grid: t2 > 0 required");
  if (ylo > yhi) std::swap(ylo, yhi);
  double W = 12.0 * std::sqrt(t2);
  double zlo, zhi;
  if (ic.kind == ContinuumIC::Kind::NarrowWedge) {
    zlo = ylo - W;
    zhi = 0.0;
    if (zhi <= zlo) zlo = zhi - std::sqrt(t2);  // kernel is negligible; keep the grid valid
  } else {
    double bmin, bmax;
    barrier_range(ic, t2, &bmin, &bmax);
    zlo = std::min(ylo, bmin) - W;
    zhi = std::max(yhi, bmax) + W;
  }
  if (nodes <= 0)
    nodes = std::min(2000, std::max(240, int((zhi - zlo) / std::sqrt(t2) * 10.0) + 40));
  ComposeGrid g;
  // the hypo factor is smooth on either side of z = X(0) but kinks there
  // (absorbed versus sampled starts), so give each side its own panel
  double brk = ic.eval(0.0);
  std::vector<std::pair<double, double>> panels;
  if (ic.kind != ContinuumIC::Kind::NarrowWedge && brk > zlo + 1e-12 && brk < zhi - 1e-12) {
    panels = {{zlo, brk}, {brk, zhi}};
  } else {
    panels = {{zlo, zhi}};
  }
  for (auto [a, b] : panels) {
    int n = std::max(40, int(std::lround(double(nodes) * (b - a) / (zhi - zlo))));
    GLRule r = gl_on_interval(n, a, b);
    g.z.insert(g.z.end(), r.x.begin(), r.x.end());
    g.w.insert(g.w.end(), r.w.begin(), r.w.end());
  }
  return g;
}

namespace {

// hypo factor H(p, j) = S^hypo_{m,t2}(z_p, y_j) on the composition grid; for
// barrier data the hitting integral factorizes through a shared s-grid
Eigen::MatrixXd hypo_matrix(int m, double t2, const std::vector<double>& zs,
                            const std::vector<double>& ys, const ContinuumIC& ic) {
  const size_t Z = zs.size(), Y = ys.size();
  Eigen::MatrixXd H(Z, Y);
  if (ic.kind == ContinuumIC::Kind::NarrowWedge) {
    for (size_t p = 0; p < Z; ++p)
      for (size_t j = 0; j < Y; ++j)
        H(p, j) = zs[p] <= 0.0 ? s_mt(m, t2, zs[p], ys[j]) : 0.0;
    return H;
  }
  double v0, b;
  if (ic.kind == ContinuumIC::Kind::Flat) {
    v0 = ic.level;
    b = 0.0;
  } else if (single_segment(ic, t2)) {
    v0 = ic.knot_v[0];
    b = (ic.knot_v[1] - ic.knot_v[0]) / (ic.knot_t[1] - ic.knot_t[0]);
  } else {
    throw std::domain_error("k_extended: several linear pieces need the sampling backend");
  }
  const int Sn = 240;
  const GLRule& gl = gauss_legendre(Sn);
  std::vector<double> sv(Sn), dsw(Sn);
  for (int i = 0; i < Sn; ++i) {
    double v = 0.5 * (gl.x[i] + 1.0);
    double sn = std::sin(0.5 * kPi * v);
    sv[i] = t2 * sn * sn;
    dsw[i] = 0.5 * gl.w[i] * t2 * 0.5 * kPi * std::sin(kPi * v);
  }
  // V holds the s = 0 subtracted values so near-barrier rows stay resolvable
  Eigen::RowVectorXd g0(Y);
  for (size_t j = 0; j < Y; ++j) g0(j) = s_mt(m, t2, v0, ys[j]);
  Eigen::MatrixXd V(Sn, Y);
  for (int i = 0; i < Sn; ++i) {
    double rem = t2 - sv[i];
    for (size_t j = 0; j < Y; ++j)
      V(i, j) = (rem > 0.0 && sv[i] > 0.0) ? s_mt(m, rem, v0 + b * sv[i], ys[j]) - g0(j) : 0.0;
  }
  for (size_t p = 0; p < Z; ++p) {
    if (zs[p] <= v0) {
      for (size_t j = 0; j < Y; ++j) H(p, j) = s_mt(m, t2, zs[p], ys[j]);
      continue;
    }
    Eigen::RowVectorXd pw(Sn);
    double a = zs[p] - v0;
    for (int i = 0; i < Sn; ++i)
      pw(i) = (sv[i] > 0.0 && sv[i] < t2) ? dsw[i] * line_hit_density(a, b, sv[i]) : 0.0;
    H.row(p) = pw * V + line_hit_prob(a, b, t2) * g0;
  }
  return H;
}

}  // namespace

std::vector<double> s_hypo_block(int m, double t2, const std::vector<double>& zs,
                                 const std::vector<double>& ys, const ContinuumIC& ic) {
  Eigen::MatrixXd H = hypo_matrix(m, t2, zs, ys, ic);
  std::vector<double> out(zs.size() * ys.size());
  for (size_t p = 0; p < zs.size(); ++p)
    for (size_t j = 0; j < ys.size(); ++j) out[p * ys.size() + j] = H(p, j);
  return out;
}

std::vector<double> k_extended_block(int m, double t1, const std::vector<double>& xs, double t2,
                                     const std::vector<double>& ys, const ContinuumIC& ic,
                                     int nodes) {
  if (m < 1) throw std::invalid_argument("k_extended: m >= 1 required");
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("k_extended: times must be positive");
  if (xs.empty() || ys.empty()) return {};
  double ylo = *std::min_element(ys.begin(), ys.end());
  double yhi = *std::max_element(ys.begin(), ys.end());
  ComposeGrid g = compose_grid(t2, ylo, yhi, ic, nodes);
  Eigen::MatrixXd H = hypo_matrix(m, t2, g.z, ys, ic);
  Eigen::MatrixXd A(xs.size(), g.z.size());
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t p = 0; p < g.z.size(); ++p)
      A(i, p) = g.w[p] * exp_poly_coeff(m - 1, -t1, xs[i] - g.z[p]);
  Eigen::MatrixXd K = A * H;
  std::vector<double> out(xs.size() * ys.size());
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j) {
      double v = K(i, j);
      if (t1 < t2) v -= heat_kernel(t2 - t1, xs[i], ys[j]);
      out[i * ys.size() + j] = v;
    }
  return out;
}

double k_extended(int m, double t1, double x, double t2, double y, const ContinuumIC& ic,
                  int nodes) {
  return k_extended_block(m, t1, {x}, t2, {y}, ic, nodes)[0];
}

HypoMCTable s_hypo_mc_table(int m, const std::vector<double>& t2s, const std::vector<double>& zs,
                            const std::vector<double>& ys, const ContinuumIC& ic,
                            const HypoMCOptions& opt) {
  if (t2s.empty() || zs.empty() || ys.empty())
    throw std::invalid_argument("s_hypo_mc_table: empty grid");
  for (size_t i = 1; i < t2s.size(); ++i)
    if (!(t2s[i] > t2s[i - 1])) throw std::invalid_argument("s_hypo_mc_table: slices not ascending");
  if (!(t2s.front() > 0.0)) throw std::invalid_argument("s_hypo_mc_table: slices must be positive");
  if (!(opt.mesh > 0.0) || opt.npaths == 0)
    throw std::invalid_argument("s_hypo_mc_table: bad sampling options");
  const double horizon = t2s.back();
  const size_t steps = size_t(std::llround(horizon / opt.mesh));
  if (steps < 1 || steps > 2000000)
    throw std::invalid_argument("s_hypo_mc_table: mesh out of range");
  const double dt = horizon / double(steps);
  std::vector<size_t> kcut(t2s.size());
  for (size_t s = 0; s < t2s.size(); ++s) {
    kcut[s] = size_t(std::llround(t2s[s] / dt));
    if (std::abs(double(kcut[s]) * dt - t2s[s]) > 1e-9 * std::max(1.0, t2s[s]))
      throw std::invalid_argument("s_hypo_mc_table: slice does not sit on the path mesh");
  }

  const double x0 = ic.eval(0.0);
  // starts at or below X(0) are absorbed at time zero with B(0) = z: no sampling needed
  std::vector<size_t> scan;  // indices into zs with z > X(0), ascending by value
  std::vector<size_t> order(zs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return zs[a] < zs[b]; });
  for (size_t i : order)
    if (zs[i] > x0) scan.push_back(i);

  std::vector<double> xb(steps + 1);
  for (size_t k = 0; k <= steps; ++k) xb[k] = ic.eval(double(k) * dt);
  if (zs.size() * steps > 100000000)
    throw std::invalid_argument("s_hypo_mc_table: grid times mesh too large");

  // crossing counts per (scan index, step bin); integer accumulation keeps the
  // result identical for any worker count
  const size_t NS = scan.size();
  std::vector<uint64_t> counts(NS * steps, 0);
  auto run_range = [&](uint64_t p0, uint64_t p1, std::vector<uint64_t>& cnt) {
    std::vector<double> wpath(steps + 1);
    const double sdt = std::sqrt(dt);
    for (uint64_t path = p0; path < p1; ++path) {
      Rng rng(derive_stream(opt.seed, 0, path));
      uint64_t pkey = derive_stream(opt.seed, 1, path);
      wpath[0] = 0.0;
      for (size_t k = 0; k < steps; ++k) wpath[k + 1] = wpath[k] + sdt * rng.normal();
      size_t kptr = 0;
      for (size_t si = 0; si < NS; ++si) {
        double z = zs[scan[si]];
        size_t k = kptr;
        double g0 = z + wpath[k] - xb[k];
        bool found = false;
        for (; k < steps; ++k) {
          double g1 = z + wpath[k + 1] - xb[k + 1];
          if (g1 <= 0.0) {
            found = true;
          } else {
            double pr = std::exp(-2.0 * g0 * g1 / dt);
            if (pr > 0.0 && unit_from(bridge_key(pkey, k)) < pr) found = true;
          }
          if (found) {
            cnt[si * steps + k] += 1;
            kptr = k;
            break;
          }
          g0 = g1;
        }
        if (!found) break;  // larger starts cross even later
      }
    }
  };
  int workers = env_workers(opt.workers);
  if (workers <= 1) {
    run_range(0, opt.npaths, counts);
  } else {
    std::vector<std::vector<uint64_t>> part(workers, std::vector<uint64_t>(NS * steps, 0));
    std::vector<std::thread> th;
    uint64_t per = (opt.npaths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      uint64_t p0 = uint64_t(w) * per, p1 = std::min(opt.npaths, p0 + per);
      if (p0 >= p1) break;
      th.emplace_back([&, w, p0, p1] { run_range(p0, p1, part[w]); });
    }
    for (auto& t : th) t.join();
    for (auto& pc : part)
      for (size_t i = 0; i < counts.size(); ++i) counts[i] += pc[i];
  }

  HypoMCTable tab;
  tab.t2 = t2s;
  tab.z = zs;
  tab.y = ys;
  tab.mean.assign(t2s.size() * zs.size() * ys.size(), 0.0);
  tab.sem.assign(tab.mean.size(), 0.0);
  const double W = double(opt.npaths);
  for (size_t s = 0; s < t2s.size(); ++s) {
    double t2 = t2s[s];
    // geometrically widening bins away from the slice end keep resolution
    // where S_{m,t2-tau} steepens while making the pass over targets cheap
    for (size_t si = 0; si < NS; ++si) {
      size_t zi = scan[si];
      size_t gmax = size_t(std::floor(10.0 * std::log2(double(kcut[s])))) + 1;
      std::vector<double> gcnt(gmax + 1, 0.0), gtau(gmax + 1, 0.0);
      for (size_t k = 0; k < kcut[s]; ++k) {
        uint64_t c = counts[si * steps + k];
        if (!c) continue;
        size_t r = kcut[s] - k;
        size_t g = size_t(std::floor(10.0 * std::log2(double(r))));
        double tau = (double(k) + 0.5) * dt;
        gcnt[g] += double(c);
        gtau[g] += double(c) * tau;
      }
      for (size_t g = 0; g <= gmax; ++g) {
        if (gcnt[g] == 0.0) continue;
        double tau = gtau[g] / gcnt[g];
        double rem = t2 - tau;
        double xv = ic.eval(tau);
        double wgt = gcnt[g] / W;
        for (size_t j = 0; j < ys.size(); ++j) {
          double v = s_mt(m, rem, xv, ys[j]);
          size_t ix = tab.index(s, zi, j);
          tab.mean[ix] += wgt * v;
          tab.sem[ix] += wgt * v * v;  // second moment, converted below
        }
      }
    }
    for (size_t zi = 0; zi < zs.size(); ++zi) {
      if (zs[zi] <= x0) {
        for (size_t j = 0; j < ys.size(); ++j) {
          size_t ix = tab.index(s, zi, j);
          tab.mean[ix] = s_mt(m, t2, zs[zi], ys[j]);
          tab.sem[ix] = 0.0;
        }
        continue;
      }
      for (size_t j = 0; j < ys.size(); ++j) {
        size_t ix = tab.index(s, zi, j);
        double m1 = tab.mean[ix], m2 = tab.sem[ix];
        tab.sem[ix] = std::sqrt(std::max(0.0, m2 - m1 * m1) / W);
      }
    }
  }
  return tab;
}

double s_hypo_mc(int m, double t, double x, double y, const ContinuumIC& ic,
                 const HypoMCOptions& opt, double* sem_out) {
  HypoMCTable tab = s_hypo_mc_table(m, {t}, {x}, {y}, ic, opt);
  if (sem_out) *sem_out = tab.se(0, 0, 0);
  return tab.at(0, 0, 0);
}

std::vector<double> k_extended_block_mc(int m, double t1, const std::vector<double>& xs,
                                        size_t slice, const HypoMCTable& tab,
                                        const ComposeGrid& g, std::vector<double>* sem_out) {
  if (m < 1) throw std::invalid_argument("k_extended_block_mc: m >= 1 required");
  if (slice >= tab.t2.size()) throw std::invalid_argument("k_extended_block_mc: bad slice");
  if (g.z.size() != tab.z.size())
    throw std::invalid_argument("k_extended_block_mc: grid does not match the table");
  for (size_t p = 0; p < g.z.size(); ++p)
    if (std::abs(g.z[p] - tab.z[p]) > 1e-12)
      throw std::invalid_argument("k_extended_block_mc: grid does not match the table");
  double t2 = tab.t2[slice];
  const size_t Y = tab.y.size(), Z = g.z.size();
  std::vector<double> out(xs.size() * Y, 0.0);
  if (sem_out) sem_out->assign(out.size(), 0.0);
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = 0; j < Y; ++j) {
      double acc = 0.0, err = 0.0;
      for (size_t p = 0; p < Z; ++p) {
        double a = g.w[p] * exp_poly_coeff(m - 1, -t1, xs[i] - g.z[p]);
        acc += a * tab.at(slice, p, j);
        err += std::abs(a) * tab.se(slice, p, j);
      }
      if (t1 < t2) acc -= heat_kernel(t2 - t1, xs[i], tab.y[j]);
      out[i * Y + j] = acc;
      if (sem_out) (*sem_out)[i * Y + j] = err;
    }
  }
  return out;
}

}  // namespace blpp
