#pragma once

#include <cstddef>
#include <vector>

// Small numerical toolbox shared by every module: normal distribution
// helpers, a scaled complementary error function for far-tail products,
// Gauss-Legendre rules, a tridiagonal solve and a bracketed root finder.

namespace pinstop {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.5066282746310005024;

double normal_pdf(double x);

// Phi(x), absolute error ~1 ulp on [-8, 8] (erfc based, no cancellation).
double normal_cdf(double x);

// exp(y^2) * erfc(y) for y >= 0 without overflow/underflow; asymptotic
// series beyond the range where the direct product is representable.
double erfcx(double y);

// exp(x^2/2) * Phi(x).  The known-pin value function and the reveal payoff
// need this product for x << 0 where both factors over/underflow.
double normal_cdf_scaled(double x);

struct Quadrature {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule (Newton on the Legendre recurrence).
const Quadrature& gauss_legendre(int n);

// Solves a tridiagonal system in place (Thomas algorithm).  `lower[0]` and
// `upper[n-1]` are ignored; `rhs` receives the solution.  Requires the
// usual diagonal dominance for stability, which every caller here has.
void solve_tridiagonal(const std::vector<double>& lower,
                       std::vector<double>& diag,
                       const std::vector<double>& upper,
                       std::vector<double>& rhs);

// Root of f on [lo, hi] by bisection with a secant polish; f(lo), f(hi)
// must bracket.  Runs to floating-point interval collapse.
template <class F>
double find_root(F&& f, double lo, double hi);

template <class F>
double find_root(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  // Callers pass analytic brackets; a sign violation is a programming error.
  if ((flo > 0.0) == (fhi > 0.0))
    return (lo + hi) / 2;  // degenerate bracket; best effort
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval collapsed to adjacent doubles
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  // Secant polish inside the final bracket.
  double denom = fhi - flo;
  if (denom != 0.0) {
    double x = lo - flo * (hi - lo) / denom;
    if (x > lo && x < hi) return x;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pinstop
