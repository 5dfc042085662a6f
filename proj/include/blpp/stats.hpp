#pragma once
#include <cstdint>
#include <functional>
#include <vector>

namespace blpp {

double norm_pdf(double x);
double norm_cdf(double x);
// P(X <= a1, Y <= a2) for standard bivariate normal with correlation rho
double binorm_cdf(double a1, double a2, double rho);

// log Gamma-based binomial; exact integer arithmetic for small arguments.
double binom(double n, long k);          // C(n,k), k >= 0 (0 if k < 0)
double lbinom(long n, long k);           // log C(n,k) for 0 <= k <= n
double falling(double a, long k);        // a(a-1)...(a-k+1)

struct RunningMoments {
  uint64_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const RunningMoments& o);
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double stderr_mean() const;
};

struct MCEstimate {
  double value = 0.0;
  uint64_t samples = 0;
  double stderr_ = 0.0;
  double dkw99 = 0.0;   // simultaneous 99% CDF band, if estimate is a CDF point
  uint64_t seed = 0;
};

// sqrt(ln(2/alpha) / 2n): Dvoretzky-Kiefer-Wolfowitz simultaneous band
double dkw_band(uint64_t n, double alpha = 0.01);

struct EmpiricalCdf {
  std::vector<double> sorted;  // ascending
  explicit EmpiricalCdf(std::vector<double> samples);
  double operator()(double a) const;  // P_hat(X <= a)
  uint64_t n() const { return sorted.size(); }
};

// sup |F_hat - F| against a reference CDF
double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf);
// asymptotic Kolmogorov p-value with the Stephens finite-n correction
double ks_pvalue(double d, uint64_t n);

}  // namespace blpp
