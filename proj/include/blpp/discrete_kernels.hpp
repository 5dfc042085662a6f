#pragma once
#include <vector>

#include "blpp/discrete_model.hpp"

namespace blpp {

struct CircleContour {
  double radius = 0.0;
  int nodes = 256;
  void validate() const;  // radius > 0, node count a power of two >= 64
};

// m-step Geom(1-q) transition probability (negative binomial); w_0 = delta_0
double w_m(long x, int m, double q);

// H_n(x) = grad^n w_m(x), grad f(x) = f(x+1) - f(x), grad^{-1} f(x) = sum_{y<x} f(y).
// Exact evaluator: alternating binomial sum (n >= 0) / hockey-stick sum (n < 0).
double h_discrete(long n, long x, int m, double q);
// circle-contour backend; radius must exceed 1 (all integrand poles sit in |z| <= 1)
double h_discrete_contour(long n, long x, int m, double q, const CircleContour& c);

// F_n(x) = H_{-n}(n-x)
double f_discrete(long n, long x, int m, double q);
double f_discrete_contour(long n, long x, int m, double q, const CircleContour& c);

// P(G(m) = y | G(0) = x) = det[H_{j-i}(y_j - x_i)]
double johansson_transition(const DiscreteIC& x, const DiscreteIC& y, int m, double q);
// same probability in Schutz form: det[F_{i-j}(y~_{N+1-i} - x~_{N+1-j})]
double schutz_transition(const DiscreteIC& x, const DiscreteIC& y, int m, double q);

// --- the walk-kernel package (translation invariant: depends on z1 - z2) ---

// Q(z1,z2) = (1-theta) theta^{z1-z2-1} 1_{z1>z2}; q_pow evaluates Q^n for any
// integer n (closed forms exact for every n; Q^0 = identity)
double q_pow(long n, long z1, long z2, const GeomParams& p);
double q_pow_contour(long n, long z1, long z2, const GeomParams& p, const CircleContour& c);

// R_{+-m}; sign carried by sm (R_0 = identity)
double r_pm(int sm, long z1, long z2, const GeomParams& p);
double r_pm_contour(int sm, long z1, long z2, const GeomParams& p, const CircleContour& c);

// S*_{m,-n}; exact via series/residue split (stable at large |z1-z2|)
double s_star(int m, long n, long z1, long z2, const GeomParams& p);
double s_star_contour(int m, long n, long z1, long z2, const GeomParams& p, const CircleContour& c);

// S-bar_{m,n}; exact coefficient extraction
double s_bar(int m, long n, long z1, long z2, const GeomParams& p);
double s_bar_contour(int m, long n, long z1, long z2, const GeomParams& p, const CircleContour& c);

// S^{epi(x)}_{m,n}(z1,z2) = E[ S-bar_{m,n-tau}(B_tau, z2) 1_{tau<n} | B_0 = z1 ]
// for the Q-walk B and tau = min{ j >= 0 : B_j > xt_{j+1} }, xt strictly
// decreasing. Exact killed-walk dynamic programming; mass that can no longer
// reach the barrier is discarded exactly (zero leakage by construction).
double s_epi(int m, int n, long z1, long z2, const std::vector<long>& xt, const GeomParams& p);

// S^{epi}(w, z2) for all w in [wlo, whi] at once (backward recursion; used by
// kernel assembly). out[w - wlo] = S^{epi}_{m,n}(w, z2).
std::vector<double> s_epi_column(int m, int n, long z2, long wlo, long whi,
                                 const std::vector<long>& xt, const GeomParams& p);

// brute-force oracle: enumerate all walk paths with per-step cap (tiny n only)
double s_epi_enum(int m, int n, long z1, long z2, const std::vector<long>& xt,
                  const GeomParams& p, long step_cap);

struct KGeomResult {
  double value = 0.0;
  double tail_bound = 0.0;  // certified bound on the discarded w-sum tail
  // largest |S* x S^epi| term met in the w-sum; peak_term * eps estimates the
  // cancellation noise floor of value (the factors grow exponentially toward
  // each other's support edge when the data slope matches the walk drift)
  double peak_term = 0.0;
};

// extended kernel of the X-chain:
//   K(n1,z1;n2,z2) = -Q^{n2-n1}(z1,z2) 1_{n1<n2} + sum_w S*_{m,-n1}(z1,w) S^{epi}_{m,n2}(w,z2)
KGeomResult k_geometric(int n1, long z1, int n2, long z2, int m, const std::vector<long>& xt,
                        const GeomParams& p);

// whole column K(n1, z1; n2, z2) for z1 in [z1lo, z1hi] at once; the epigraph
// column and the S* table are shared across the range, which is what makes
// determinant assembly affordable. out[z1 - z1lo]; *tail_bound as above.
std::vector<double> k_geometric_column(int n1, long z1lo, long z1hi, int n2, long z2, int m,
                                       const std::vector<long>& xt, const GeomParams& p,
                                       double* tail_bound, double* peak_term = nullptr);

}  // namespace blpp
