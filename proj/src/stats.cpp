#include "blpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blpp/quadrature.hpp"

namespace blpp {

double norm_pdf(double x) { return 0.3989422804014326779399461 * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008444); }

double binorm_cdf(double a1, double a2, double rho) {
  if (rho <= -1.0 + 1e-14) return std::max(0.0, norm_cdf(a1) + norm_cdf(a2) - 1.0);
  if (rho >= 1.0 - 1e-14) return norm_cdf(std::min(a1, a2));
  // integrate P(Y <= a2 | X = x) over x <= a1; truncation error < 1e-15 below -8.5
  double lo = std::min(a1, -8.5) - 1.0;
  if (a1 < -40.0) return 0.0;
  double s = std::sqrt(1.0 - rho * rho);
  GLRule g = gl_on_interval(400, lo, a1);
  double acc = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i)
    acc += g.w[i] * norm_pdf(g.x[i]) * norm_cdf((a2 - rho * g.x[i]) / s);
  return acc;
}

double falling(double a, long k) {
  double r = 1.0;
  for (long i = 0; i < k; ++i) r *= (a - i);
  return r;
}

double binom(double n, long k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  double ni;
  bool integral = std::modf(n, &ni) == 0.0;
  if (integral && n >= 0 && n < k) return 0.0;
  if (integral && n >= 0 && (n <= 62 || k <= 30 || n - k <= 30)) {
    // exact in double for these ranges
    long nn = static_cast<long>(n);
    long kk = std::min(static_cast<long>(k), nn - k);
    double r = 1.0;
    for (long i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
    return r;
  }
  if (integral && n >= 0)
    return std::exp(lbinom(static_cast<long>(n), k));
  return falling(n, k) / std::exp(std::lgamma(k + 1.0));
}

double lbinom(long n, long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n == 0) return;
  if (n == 0) { *this = o; return; }
  double d = o.mean - mean;
  uint64_t tot = n + o.n;
  m2 += o.m2 + d * d * (double(n) * double(o.n) / double(tot));
  mean += d * (double(o.n) / double(tot));
  n = tot;
}

double RunningMoments::stderr_mean() const {
  return n > 1 ? std::sqrt(variance() / n) : 0.0;
}

double dkw_band(uint64_t n, double alpha) {
  if (n == 0) return 1.0;
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(n)));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted(std::move(samples)) {
  std::sort(sorted.begin(), sorted.end());
}

double EmpiricalCdf::operator()(double a) const {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), a);
  return double(it - sorted.begin()) / double(sorted.size());
}

double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf) {
  const auto& s = ecdf.sorted;
  size_t n = s.size();
  if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double f = cdf(s[i]);
    d = std::max(d, std::abs(double(i + 1) / n - f));
    d = std::max(d, std::abs(double(i) / n - f));
  }
  return d;
}

double ks_pvalue(double d, uint64_t n) {
  double rn = std::sqrt(double(n));
  double lam = (rn + 0.12 + 0.11 / rn) * d;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double t = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lam * lam);
    s += t;
    if (std::abs(t) < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, s));
}

}  // namespace blpp
