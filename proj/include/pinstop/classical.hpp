#pragma once

// Closed-form solution of the known-pin problem: a Brownian bridge pinned
// at r is optimally stopped at the square-root boundary r + beta*sqrt(1-t),
// where beta solves sqrt(2*pi)*(1-b^2)*exp(b^2/2)*Phi(b) = b.  These
// formulas anchor the analytic bounds and validate the PDE solver.

namespace pinstop {

struct BetaConstant {
  double value = 0.0;     // in (0.8, 0.9)
  double residual = 0.0;  // defining equation evaluated at `value`
};

// Solved once per process and cached; residual < 1e-12.
const BetaConstant& solve_beta();

// Value function v_r(t, z) for pin r, 0 <= t <= 1.  At t = 1 this is the
// terminal limit max(z, r).  Far below the boundary the exp/Phi product is
// evaluated in scaled form, so z many standard deviations under r is fine.
double v_known(double r, double t, double z);

// Optimal stopping boundary b_r(t) = r + beta * sqrt(1 - t).
double boundary_known(double r, double t);

}  // namespace pinstop
