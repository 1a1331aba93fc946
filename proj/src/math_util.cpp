#include "pinstop/math_util.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pinstop {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double erfcx(double y) {
  if (y < 0.0) throw std::invalid_argument("erfcx: negative argument not supported");
  if (y <= 25.0) {
    // Both factors representable; erfc itself is ~1 ulp so the product is
    // accurate to ~y^2*eps from the exp argument rounding (<= 7e-14 here).
    return std::exp(y * y) * std::erfc(y);
  }
  // Asymptotic series: erfcx(y) ~ (1/(y sqrt(pi))) * sum (-1)^k (2k-1)!! / (2y^2)^k.
  // First omitted term at y=25 is ~1e-10 relative; terms below keep it ~1e-13.
  const double inv2y2 = 1.0 / (2.0 * y * y);
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2 * k - 1) * inv2y2;
    sum += term;
  }
  return sum / (y * std::sqrt(kPi));
}

double normal_cdf_scaled(double x) {
  if (x < -6.0) return 0.5 * erfcx(-x * M_SQRT1_2);
  return std::exp(0.5 * x * x) * normal_cdf(x);
}

namespace {

Quadrature make_gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n via the recurrence.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

}  // namespace

const Quadrature& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

void solve_tridiagonal(const std::vector<double>& lower,
                       std::vector<double>& diag,
                       const std::vector<double>& upper,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

}  // namespace pinstop
