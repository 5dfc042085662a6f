#include "blpp/discrete_kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

#include "blpp/quadrature.hpp"
#include "blpp/stats.hpp"

namespace blpp {

namespace {

using cplx = std::complex<double>;

cplx cpow_int(cplx base, long n) {
  if (n < 0) return 1.0 / cpow_int(base, -n);
  cplx r = 1.0, b = base;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

// sum of s_i * exp(l_i) evaluated as exp(lmax) * sum s_i exp(l_i - lmax);
// keeps huge prefactors and tiny terms from overflowing separately
struct SignedLogSum {
  std::vector<std::pair<int, double>> terms;
  void add(int sign, double logmag) {
    if (sign != 0 && std::isfinite(logmag)) terms.push_back({sign, logmag});
  }
  double signed_exp(double lpre) const {
    if (terms.empty()) return 0.0;
    double lmax = -std::numeric_limits<double>::infinity();
    for (auto& [s, l] : terms) lmax = std::max(lmax, l);
    double acc = 0.0;
    for (auto& [s, l] : terms) acc += s * std::exp(l - lmax);
    if (acc == 0.0) return 0.0;
    double sign = acc > 0 ? 1.0 : -1.0;
    return sign * std::exp(std::log(std::abs(acc)) + lmax + lpre);
  }
};

// log of falling factorial a(a-1)...(a-k+1) for a >= k-1 >= 0
double lfall(double a, long k) {
  if (k == 0) return 0.0;
  return std::lgamma(a + 1.0) - std::lgamma(a - k + 1.0);
}

double circle_real(double r, int nodes, const std::function<cplx(cplx)>& f) {
  return circle_oint(r, nodes, f).real();
}

// little-endian magnitude integer; just enough arithmetic for the exact dyadic
// kernel sums, where doubles lose to binomial-scale cancellation
struct BigUInt {
  std::vector<uint64_t> d;
  void trim() {
    while (!d.empty() && d.back() == 0) d.pop_back();
  }
  void mul_u64(uint64_t s) {
    if (s == 0 || d.empty()) {
      d.clear();
      return;
    }
    unsigned __int128 carry = 0;
    for (auto& x : d) {
      unsigned __int128 t = (unsigned __int128)x * s + carry;
      x = (uint64_t)t;
      carry = t >> 64;
    }
    if (carry) d.push_back((uint64_t)carry);
  }
  void shl_bits(long k) {
    if (d.empty() || k == 0) return;
    long limbs = k / 64, bits = k % 64;
    std::vector<uint64_t> nd(d.size() + size_t(limbs) + 1, 0);
    for (size_t i = 0; i < d.size(); ++i) {
      nd[i + limbs] |= d[i] << bits;
      if (bits) nd[i + limbs + 1] |= d[i] >> (64 - bits);
    }
    d = std::move(nd);
    trim();
  }
  void mul_u128(unsigned __int128 s) {
    uint64_t lo = (uint64_t)s, hi = (uint64_t)(s >> 64);
    if (hi == 0) {
      mul_u64(lo);
      return;
    }
    BigUInt top = *this;
    mul_u64(lo);
    top.mul_u64(hi);
    top.shl_bits(64);
    add(top);
  }
  void div_u64(uint64_t s) {
    unsigned __int128 rem = 0;
    for (size_t i = d.size(); i-- > 0;) {
      unsigned __int128 cur = (rem << 64) | d[i];
      d[i] = (uint64_t)(cur / s);
      rem = cur % s;
    }
    trim();
  }
  void add(const BigUInt& o) {
    if (o.d.size() > d.size()) d.resize(o.d.size(), 0);
    unsigned __int128 carry = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      unsigned __int128 t = (unsigned __int128)d[i] + (i < o.d.size() ? o.d[i] : 0) + carry;
      d[i] = (uint64_t)t;
      carry = t >> 64;
    }
    if (carry) d.push_back((uint64_t)carry);
  }
  static int cmp(const BigUInt& a, const BigUInt& b) {
    if (a.d.size() != b.d.size()) return a.d.size() < b.d.size() ? -1 : 1;
    for (size_t i = a.d.size(); i-- > 0;)
      if (a.d[i] != b.d[i]) return a.d[i] < b.d[i] ? -1 : 1;
    return 0;
  }
  void sub(const BigUInt& o) {  // requires *this >= o
    unsigned __int128 borrow = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      unsigned __int128 take = (i < o.d.size() ? (unsigned __int128)o.d[i] : 0) + borrow;
      unsigned __int128 cur = d[i];
      if (cur >= take) {
        d[i] = (uint64_t)(cur - take);
        borrow = 0;
      } else {
        d[i] = (uint64_t)((((unsigned __int128)1) << 64) + cur - take);
        borrow = 1;
      }
    }
    trim();
  }
  // value = returned mantissa * 2^{e2}
  double to_norm_exp2(long& e2) const {
    if (d.empty()) {
      e2 = 0;
      return 0.0;
    }
    size_t k = d.size() - 1;
    long double v = (long double)d[k];
    e2 = 64L * (long)k;
    for (int step = 0; step < 2 && k > 0; ++step) {
      --k;
      v = v * 0x1p64L + (long double)d[k];
      e2 -= 64;
    }
    return (double)v;
  }
};

// exact alternating kernel sum at q = theta = 1/2, where the value is the
// dyadic rational 2^{-m} * integer; doubles cannot survive the C(n,j)-scale
// cancellation once n is large, big integers can
double s_star_dyadic(int m, long n, long e) {
  long jmin = std::max(0L, e);
  if (jmin > n) return 0.0;
  if (m > 12 || n > 4096)
    throw std::domain_error("s_star: exact dyadic path supports m <= 12, n <= 4096");
  BigUInt c;  // C(n, j), advanced with j
  c.d = {1};
  for (long j = 1; j <= jmin; ++j) {
    c.mul_u64(uint64_t(n - j + 1));
    c.div_u64(uint64_t(j));
  }
  BigUInt pos, neg;
  for (long j = jmin; j <= n; ++j) {
    unsigned __int128 c2 = 1;  // C(j - e + m - 1, m - 1)
    for (long i = 1; i <= m - 1; ++i)
      c2 = c2 * (unsigned __int128)(j - e + i) / (unsigned __int128)i;
    BigUInt t = c;
    t.mul_u128(c2);
    t.shl_bits(n - j);
    if (j % 2)
      neg.add(t);
    else
      pos.add(t);
    if (j < n) {
      c.mul_u64(uint64_t(n - j));
      c.div_u64(uint64_t(j + 1));
    }
  }
  int s = BigUInt::cmp(pos, neg);
  if (s == 0) return 0.0;
  BigUInt r = (s > 0) ? pos : neg;
  r.sub(s > 0 ? neg : pos);
  long e2;
  double mant = r.to_norm_exp2(e2);
  return (s > 0 ? 1.0 : -1.0) * std::ldexp(mant, int(e2 - m));
}

}  // namespace

void CircleContour::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("CircleContour: radius must be positive");
  if (nodes < 64 || (nodes & (nodes - 1)) != 0)
    throw std::invalid_argument("CircleContour: node count must be a power of two >= 64");
}

double w_m(long x, int m, double q) {
  if (m < 0) throw std::invalid_argument("w_m: m >= 0 required");
  if (m == 0) return x == 0 ? 1.0 : 0.0;
  if (x < 0) return 0.0;
  if (x + m - 1 <= 60)
    return binom(double(x + m - 1), m - 1) * std::pow(q, double(x)) * std::pow(1.0 - q, m);
  return std::exp(lbinom(x + m - 1, m - 1) + x * std::log(q) + m * std::log1p(-q));
}

double h_discrete(long n, long x, int m, double q) {
  if (n == 0) return w_m(x, m, q);
  if (n > 0) {
    if (n > 64) throw std::domain_error("h_discrete: difference order beyond stable range");
    double acc = 0.0;
    for (long j = 0; j <= n; ++j) {
      double t = binom(double(n), j) * w_m(x + j, m, q);
      acc += ((n - j) % 2) ? -t : t;
    }
    return acc;
  }
  // inverse differences: grad^{-k} f(x) = sum_{y <= x-k} f(y) C(x-1-y, k-1)
  long k = -n;
  double acc = 0.0;
  for (long y = 0; y <= x - k; ++y) acc += w_m(y, m, q) * binom(double(x - 1 - y), k - 1);
  return acc;
}

double h_discrete_contour(long n, long x, int m, double q, const CircleContour& c) {
  c.validate();
  if (!(c.radius > 1.0))
    throw std::invalid_argument("h_discrete_contour: radius must exceed 1");
  double sgn = ((n - 1) % 2 == 0) ? 1.0 : -1.0;
  double val = circle_real(c.radius, c.nodes, [&](cplx z) {
    cplx num = cpow_int(z, n) * cpow_int(1.0 - z, m + x - 1);
    cplx den = cpow_int(1.0 - z / (1.0 - q), m);
    return num / den;
  });
  return sgn * val;
}

double f_discrete(long n, long x, int m, double q) { return h_discrete(-n, n - x, m, q); }

double f_discrete_contour(long n, long x, int m, double q, const CircleContour& c) {
  c.validate();
  if (!(c.radius > 1.0)) throw std::invalid_argument("f_discrete_contour: radius must exceed 1");
  GeomParams p;
  p.q = q;
  double sgn = (n % 2 == 0) ? 1.0 : -1.0;
  double val = circle_real(c.radius, c.nodes, [&](cplx w) {
    return cpow_int(w, n - x - 1) * cpow_int(1.0 - w, -n) * cpow_int(p.phi(w), m);
  });
  return sgn * val;
}

double johansson_transition(const DiscreteIC& x, const DiscreteIC& y, int m, double q) {
  x.validate();
  y.validate();
  if (x.n() != y.n()) throw std::invalid_argument("johansson_transition: size mismatch");
  if (m == 0) return x.x == y.x ? 1.0 : 0.0;  // zero-step chain
  int N = x.n();
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = h_discrete(j - i, y.x[j] - x.x[i], m, q);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

double schutz_transition(const DiscreteIC& x, const DiscreteIC& y, int m, double q) {
  x.validate();
  y.validate();
  if (x.n() != y.n()) throw std::invalid_argument("schutz_transition: size mismatch");
  if (m == 0) return x.x == y.x ? 1.0 : 0.0;
  int N = x.n();
  std::vector<long> xt = x.xtilde(), yt = y.xtilde();
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = f_discrete(i - j, yt[N - 1 - i] - xt[N - 1 - j], m, q);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

double q_pow(long n, long z1, long z2, const GeomParams& p) {
  p.validate();
  long d = z1 - z2;
  if (n == 0) return d == 0 ? 1.0 : 0.0;
  if (n > 0) {
    if (d < n) return 0.0;
    if (d - 1 <= 60)
      return binom(double(d - 1), n - 1) * std::pow(1.0 - p.theta, double(n)) *
             std::pow(p.theta, double(d - n));
    return std::exp(lbinom(d - 1, n - 1) + n * std::log1p(-p.theta) + (d - n) * std::log(p.theta));
  }
  long k = -n;
  if (d < -k || d > 0) return 0.0;
  double sgn = ((d + k) % 2 == 0) ? 1.0 : -1.0;
  if (k <= 40)
    return sgn * binom(double(k), d + k) * std::pow(p.theta, double(d)) *
           std::pow(p.alpha(), double(-k));
  return sgn * std::exp(lbinom(k, d + k) + d * std::log(p.theta) - k * std::log(p.alpha()));
}

double q_pow_contour(long n, long z1, long z2, const GeomParams& p, const CircleContour& c) {
  p.validate();
  c.validate();
  if (!(c.radius < 1.0)) throw std::invalid_argument("q_pow_contour: radius must lie in (0,1)");
  long d = z1 - z2;
  return circle_real(c.radius, c.nodes, [&](cplx w) {
    // walk symbol alpha w/(1-w); theta^d folded in as (theta/w)^d
    return cpow_int(p.theta / w, d) * cpow_int(p.alpha() * w / (1.0 - w), n) / w;
  });
}

double r_pm(int sm, long z1, long z2, const GeomParams& p) {
  p.validate();
  long d = z1 - z2;
  if (sm == 0) return d == 0 ? 1.0 : 0.0;
  if (sm > 0) {
    if (d > 0) return 0.0;
    if (-d + sm <= 60) return std::pow(p.theta, double(d)) * w_m(-d, sm, p.q);
    return std::exp(d * std::log(p.theta) + lbinom(-d + sm - 1, sm - 1) - d * std::log(p.q) +
                    sm * std::log1p(-p.q));
  }
  int m = -sm;
  if (d < -m || d > 0) return 0.0;
  double sgn = ((-d) % 2 == 0) ? 1.0 : -1.0;
  return std::pow(p.theta, double(d)) * std::pow(1.0 - p.q, double(-m)) * binom(double(m), -d) *
         sgn * std::pow(p.q, double(-d));
}

double r_pm_contour(int sm, long z1, long z2, const GeomParams& p, const CircleContour& c) {
  p.validate();
  c.validate();
  if (!(c.radius > p.q && c.radius < 1.0))
    throw std::invalid_argument("r_pm_contour: radius must lie in (q,1)");
  long d = z1 - z2;
  return circle_real(c.radius, c.nodes, [&](cplx w) {
    return cpow_int(p.theta / w, d) * cpow_int(p.phi(w), sm) / w;
  });
}

double s_star(int m, long n, long z1, long z2, const GeomParams& p) {
  p.validate();
  if (m < 0 || n < 0) throw std::invalid_argument("s_star: m, n >= 0 required");
  double al = p.alpha();
  if (m == 0) return al * q_pow(-n, z1, z2, p);
  long d = z1 - z2;
  long e = d + n;
  if (e > n) return 0.0;  // w < z1: outside the walk's reach
  if (e >= 0) {
    if (n > 64) {
      if (p.q == 0.5 && p.theta == 0.5) return s_star_dyadic(m, n, e);
      throw std::domain_error(
          "s_star: n > 64 with z1-z2+n >= 0 needs exact arithmetic (q = theta = 1/2 only)");
    }
    // only j >= e contributes; alternating binomial sum
    double acc = 0.0;
    for (long j = std::max(0L, e); j <= n; ++j) {
      double t = binom(double(n), j) * w_m(j - e, m, p.q);
      acc += (j % 2) ? -t : t;
    }
    return al * std::pow(p.theta, double(d)) * std::pow(al, double(-n)) * acc;
  }
  // e < 0: residue at w = q of w^{m-e-1} (1-w)^n / (w-q)^m
  long A = m - e - 1;
  SignedLogSum ls;
  for (long i = 0; i <= m - 1; ++i) {
    long k2 = m - 1 - i;  // derivative order landing on (1-w)^n
    if (k2 > n) continue;
    double lmag = lbinom(m - 1, i) + lfall(double(A), i) + (A - i) * std::log(p.q) +
                  lfall(double(n), k2) + (n - k2) * std::log1p(-p.q);
    ls.add((k2 % 2) ? -1 : 1, lmag);
  }
  double lpre = (1.0 - double(n)) * std::log(al) + d * std::log(p.theta) +
                m * std::log1p(-p.q) - std::lgamma(double(m));
  return ls.signed_exp(lpre);
}

double s_star_contour(int m, long n, long z1, long z2, const GeomParams& p,
                      const CircleContour& c) {
  p.validate();
  c.validate();
  if (m < 0 || n < 0) throw std::invalid_argument("s_star_contour: m, n >= 0 required");
  if (!(c.radius > p.q && c.radius < 1.0))
    throw std::invalid_argument("s_star_contour: radius must lie in (q,1)");
  long d = z1 - z2;
  return p.alpha() * circle_real(c.radius, c.nodes, [&](cplx w) {
           return cpow_int(p.theta / w, d) * cpow_int((1.0 - w) / (p.alpha() * w), n) *
                  cpow_int(p.phi(w), m) / w;
         });
}

double s_bar(int m, long n, long z1, long z2, const GeomParams& p) {
  p.validate();
  if (m < 0 || n < 0) throw std::invalid_argument("s_bar: m, n >= 0 required");
  if (n == 0) return 0.0;  // integrand analytic at 0
  long d = z1 - z2;
  long bigK = n - 1 - d, bigM = bigK - m;
  SignedLogSum ls;
  for (long i = 0; i <= std::min<long>(m, n - 1); ++i) {
    long j = n - 1 - i;  // need coefficient [w^j] (1-w)^{bigM}
    int sc;
    double lc;
    if (bigM >= 0) {
      if (j > bigM) continue;
      sc = (j % 2) ? -1 : 1;
      lc = lbinom(bigM, j);
    } else {
      sc = 1;  // [w^j](1-w)^{-k} = C(j+k-1, j) >= 0
      lc = lbinom(j - bigM - 1, j);
    }
    int si = (i % 2) ? -1 : 1;
    ls.add(sc * si, lbinom(m, i) + (m - i) * std::log1p(-p.q) + lc);
  }
  double lpre = (double(n) - 1.0) * std::log(p.alpha()) + d * std::log(p.theta) -
                m * std::log1p(-p.q);
  return ls.signed_exp(lpre);
}

double s_bar_contour(int m, long n, long z1, long z2, const GeomParams& p,
                     const CircleContour& c) {
  p.validate();
  c.validate();
  if (m < 0 || n < 0) throw std::invalid_argument("s_bar_contour: m, n >= 0 required");
  // phi(1-w)^{-m} is analytic except at w = 1; w = 1-q is a zero of phi(1-w),
  // not a pole of its inverse, so any radius in (0,1) is admissible
  if (!(c.radius < 1.0)) throw std::invalid_argument("s_bar_contour: radius must lie in (0,1)");
  long d = z1 - z2;
  double al = p.alpha();
  return circle_real(c.radius, c.nodes, [&](cplx w) {
    cplx om = 1.0 - w;
    return cpow_int(p.theta / om, d) * cpow_int(al * om / w, n) * cpow_int(p.phi(om), -m) /
           (al * om);
  });
}

// positions v <= min_{j' in [j+1..n-1]}(xt[j'] + j') - j can never again
// satisfy B_{j'} > xt[j'], because steps are <= -1
static std::vector<long> epi_floors(int n, const std::vector<long>& xt) {
  std::vector<long> fl(n, std::numeric_limits<long>::min() / 2);
  long suff = std::numeric_limits<long>::max();
  for (int j = n - 1; j >= 0; --j) {
    if (j < n - 1) fl[j] = suff - j;
    suff = std::min(suff, xt[j] + j);
  }
  return fl;
}

static void validate_epi_args(int m, int n, const std::vector<long>& xt, const GeomParams& p) {
  p.validate();
  if (m < 0) throw std::invalid_argument("s_epi: m >= 0 required");
  if (n < 1 || size_t(n) > xt.size()) throw std::invalid_argument("s_epi: need 1 <= n <= len(xt)");
  for (size_t i = 1; i < xt.size(); ++i)
    if (xt[i] >= xt[i - 1]) throw std::invalid_argument("s_epi: xt must be strictly decreasing");
}

double s_epi(int m, int n, long z1, long z2, const std::vector<long>& xt, const GeomParams& p) {
  validate_epi_args(m, n, xt, p);
  long smin = std::numeric_limits<long>::max();
  for (int j = 0; j < n; ++j) smin = std::min(smin, xt[j] + j);
  if (z1 <= smin) return 0.0;  // can never enter the epigraph
  std::vector<long> fl = epi_floors(n, xt);
  const long lo = smin - n;  // strictly below every per-step floor
  const long W = z1 - lo + 1;
  std::vector<double> alive(size_t(W), 0.0), next(size_t(W), 0.0);
  auto idx = [&](long v) { return size_t(v - lo); };
  alive[idx(z1)] = 1.0;
  long curlo = z1, curhi = z1;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    for (long v = std::max(curlo, xt[j] + 1); v <= curhi; ++v) {
      if (alive[idx(v)] != 0.0) {
        acc += alive[idx(v)] * s_bar(m, n - j, v, z2, p);
        alive[idx(v)] = 0.0;
      }
    }
    if (j == n - 1) break;
    const long prelo = curlo;
    curhi = std::min(curhi, xt[j]);
    const long srclo = std::max(curlo, fl[j] + 1);  // mass at or below fl[j] is dead
    if (srclo > curhi) break;                       // all mass dead or absorbed
    // one walk step down: next[v] = (1-theta) sum_{u>v} theta^{u-v-1} alive[u];
    // mass landing at or below fl[j] sits under every remaining floor and is dead
    const long nxlo = std::max(lo, fl[j]);
    double g = 0.0;
    for (long v = curhi; v >= nxlo; --v) {
      next[idx(v)] = (1.0 - p.theta) * g;
      g = (v >= srclo ? alive[idx(v)] : 0.0) + p.theta * g;
    }
    for (long v = prelo; v <= curhi; ++v) alive[idx(v)] = 0.0;
    curhi -= 1;
    curlo = nxlo;
    for (long v = curlo; v <= curhi; ++v) alive[idx(v)] = next[idx(v)];
  }
  return acc;
}

std::vector<double> s_epi_column(int m, int n, long z2, long wlo, long whi,
                                 const std::vector<long>& xt, const GeomParams& p) {
  validate_epi_args(m, n, xt, p);
  if (wlo > whi) throw std::invalid_argument("s_epi_column: empty window");
  long smin = std::numeric_limits<long>::max();
  for (int j = 0; j < n; ++j) smin = std::min(smin, xt[j] + j);
  const long glo = std::min(wlo, smin - n);
  const long W = whi - glo + 1;
  auto idx = [&](long v) { return size_t(v - glo); };
  std::vector<double> cur(size_t(W), 0.0), nxt(size_t(W), 0.0);
  // psi_j(u) = 1_{u > xt[j]} sbar_{m,n-j}(u,z2) + 1_{u <= xt[j]} (Q psi_{j+1})(u);
  // psi vanishes at and below glo, so the prefix sum starts cold there
  for (int j = n - 1; j >= 0; --j) {
    double g = 0.0;  // G(u-1) = sum_{v <= u-1} theta^{u-1-v} psi_{j+1}(v)
    for (long u = glo; u <= whi; ++u) {
      double qpsi = (1.0 - p.theta) * g;
      cur[idx(u)] = (u > xt[j]) ? s_bar(m, n - j, u, z2, p) : qpsi;
      g = nxt[idx(u)] + p.theta * g;
    }
    std::swap(cur, nxt);  // nxt now holds psi_j
  }
  std::vector<double> out(size_t(whi - wlo + 1));
  for (long w = wlo; w <= whi; ++w) out[size_t(w - wlo)] = nxt[idx(w)];
  return out;
}

double s_epi_enum(int m, int n, long z1, long z2, const std::vector<long>& xt,
                  const GeomParams& p, long step_cap) {
  validate_epi_args(m, n, xt, p);
  double acc = 0.0;
  std::function<void(int, long, double)> rec = [&](int j, long pos, double mass) {
    if (pos > xt[j]) {
      acc += mass * s_bar(m, n - j, pos, z2, p);
      return;
    }
    if (j == n - 1) return;
    for (long s = 1; s <= step_cap; ++s)
      rec(j + 1, pos - s, mass * (1.0 - p.theta) * std::pow(p.theta, double(s - 1)));
  };
  rec(0, z1, 1.0);
  return acc;
}

std::vector<double> k_geometric_column(int n1, long z1lo, long z1hi, int n2, long z2, int m,
                                       const std::vector<long>& xt, const GeomParams& p,
                                       double* tail_bound, double* peak_term) {
  validate_epi_args(m, n2, xt, p);
  if (n1 < 1 || size_t(n1) > xt.size()) throw std::invalid_argument("k_geometric: bad n1");
  if (z1lo > z1hi) throw std::invalid_argument("k_geometric: empty z1 range");
  long smin = std::numeric_limits<long>::max();
  for (int j = 0; j < n2; ++j) smin = std::min(smin, xt[j] + j);
  const long wlo = smin + 1;  // below this the epigraph term vanishes identically
  long whi = std::max({z1hi, xt[0], z2}) + 160;
  double tail = std::numeric_limits<double>::infinity();
  double peak = 0.0;
  std::vector<double> out;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<double> epi = s_epi_column(m, n2, z2, wlo, whi, xt, p);
    long dlo = z1lo - whi, dhi = z1hi - wlo;
    std::vector<double> star(size_t(dhi - dlo + 1));  // s_star depends on z1 - w only
    for (long dd = dlo; dd <= dhi; ++dd) star[size_t(dd - dlo)] = s_star(m, n1, dd, 0, p);
    out.assign(size_t(z1hi - z1lo + 1), 0.0);
    peak = 0.0;
    for (long z1 = z1lo; z1 <= z1hi; ++z1) {
      double acc = 0.0;
      for (long w = wlo; w <= whi; ++w) {
        double term = star[size_t(z1 - w - dlo)] * epi[size_t(w - wlo)];
        peak = std::max(peak, std::abs(term));
        acc += term;
      }
      out[size_t(z1 - z1lo)] = acc;
    }
    // certify the dropped tail by the measured per-step decay of the products
    double rho = 0.0, lastmag = 0.0;
    bool growing = false;
    for (long z1 = z1lo; z1 <= z1hi; ++z1) {
      for (long w = whi - 12; w < whi; ++w) {
        double a = std::abs(star[size_t(z1 - w - dlo)] * epi[size_t(w - wlo)]);
        double b = std::abs(star[size_t(z1 - w - 1 - dlo)] * epi[size_t(w + 1 - wlo)]);
        if (a > 0.0) rho = std::max(rho, b / a);
        if (a == 0.0 && b > 0.0) growing = true;
      }
      lastmag = std::max(lastmag, std::abs(star[size_t(z1 - whi - dlo)] * epi[size_t(whi - wlo)]));
    }
    if (!growing && rho < 0.98) {
      tail = lastmag * rho / (1.0 - rho);
      double scale = 0.0;
      for (double v : out) scale = std::max(scale, std::abs(v));
      if (tail <= 1e-10 * std::max(1.0, scale)) break;
    }
    whi += 320;
  }
  if (!std::isfinite(tail))
    throw std::runtime_error("k_geometric: composition tail failed to certify");
  if (tail_bound) *tail_bound = tail;
  if (peak_term) *peak_term = peak;
  for (long z1 = z1lo; z1 <= z1hi; ++z1)
    if (n1 < n2) out[size_t(z1 - z1lo)] -= q_pow(n2 - n1, z1, z2, p);
  return out;
}

KGeomResult k_geometric(int n1, long z1, int n2, long z2, int m, const std::vector<long>& xt,
                        const GeomParams& p) {
  KGeomResult r;
  std::vector<double> col =
      k_geometric_column(n1, z1, z1, n2, z2, m, xt, p, &r.tail_bound, &r.peak_term);
  r.value = col[0];
  return r;
}

}  // namespace blpp
