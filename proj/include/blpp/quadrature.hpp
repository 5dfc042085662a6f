#pragma once
#include <complex>
#include <vector>

namespace blpp {

struct GLRule {
  std::vector<double> x, w;  // nodes and weights on [-1,1]
};

// Cached Gauss-Legendre rule (Newton on the Legendre recurrence).
const GLRule& gauss_legendre(int n);

// Rule mapped to [a,b].
GLRule gl_on_interval(int n, double a, double b);

// (1/2pi i) oint f(w) dw over |w| = r, n-point trapezoid (spectrally accurate
// for integrands analytic in an annulus around the circle).
template <class F>
std::complex<double> circle_oint(double r, int n, F&& f) {
  std::complex<double> acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double phi = 2.0 * 3.141592653589793238462643383279 * j / n;
    std::complex<double> w = std::polar(r, phi);
    acc += f(w) * w;
  }
  return acc / static_cast<double>(n);
}

}  // namespace blpp
