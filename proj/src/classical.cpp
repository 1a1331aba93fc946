#include "pinstop/classical.hpp"

#include <cmath>
#include <stdexcept>

#include "pinstop/math_util.hpp"

namespace pinstop {

namespace {

double beta_equation(double b) {
  return kSqrt2Pi * (1.0 - b * b) * std::exp(0.5 * b * b) * normal_cdf(b) - b;
}

}  // namespace

const BetaConstant& solve_beta() {
  static const BetaConstant beta = [] {
    BetaConstant out;
    // The defining function is positive at 0.5 and negative at 1.
    out.value = find_root(beta_equation, 0.5, 1.0);
    out.residual = beta_equation(out.value);
    return out;
  }();
  return beta;
}

double v_known(double r, double t, double z) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("v_known: t outside [0, 1]");
  if (t == 1.0) return z > r ? z : r;
  const double beta = solve_beta().value;
  const double s = std::sqrt(1.0 - t);
  const double x = (z - r) / s;
  if (x >= beta) return z;  // stopping region
  return r + kSqrt2Pi * s * (1.0 - beta * beta) * normal_cdf_scaled(x);
}

double boundary_known(double r, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("boundary_known: t outside [0, 1]");
  return r + solve_beta().value * std::sqrt(1.0 - t);
}

}  // namespace pinstop
