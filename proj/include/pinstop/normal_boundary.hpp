#pragma once

#include "pinstop/dp_solver.hpp"

// Integral-equation solver for the optimal boundary under a Normal(m, g2)
// prior with g2 < 1.  The bridge with this prior is an ordinary Brownian
// bridge pinning at pin = m/(1-g2) at the extended time T = 1/(1-g2); its
// boundary on [0, 1] solves
//
//   b(t) = h(t, b(t)) - int_0^{1-t} E[ (pin - Z_{t+u})/(T - t - u)
//                                      * 1{Z_{t+u} > b(t+u)} ] du ,
//
// the expectation taken under the bridge marginal from (t, b(t)), with
// b(1) = pin.  An Ornstein-Uhlenbeck change of coordinates provides an
// independent shape check (g >= 0, decreasing, terminal zero).

namespace pinstop {

struct NormalProblem {
  double m = 0.0;
  double gamma2 = 0.5;  // must lie in (0, 1)

  double pin() const { return m / (1.0 - gamma2); }
  double t_ext() const { return 1.0 / (1.0 - gamma2); }
  void validate() const;
};

struct BoundarySolve {
  Boundary boundary;       // kind Upper, times on [0, 1] clustered near 1
  int iterations = 0;      // Picard sweeps used
  double last_change = 0;  // sup-norm change of the final sweep
  double residual = 0;     // sup-norm defect of the integral equation
};

// Fixed-point sweeps over a grid clustered near t = 1, descending in t
// (the equation is Volterra: the defect at t reads the boundary only on
// (t, 1]); each node solves its scalar equation exactly, and sweeping
// repeats until the sup-norm change falls below tol.  Throws NoConvergence
// after max_iter sweeps, std::invalid_argument for g2 outside (0, 1).
BoundarySolve solve_boundary(const NormalProblem& prob, int n_t = 400,
                             double tol = 1e-6, int max_iter = 50);

struct OuReport {
  double max_negative_g = 0.0;     // max of (-g)^+ over the grid
  double max_increase = 0.0;       // max of (g_{i+1} - g_i)^+
  double terminal_g = 0.0;         // g at the final grid time (exact zero target)
  double max_deviation = 0.0;      // worst of the three
};

OuReport ou_consistency_check(const NormalProblem& prob, const Boundary& b);

}  // namespace pinstop
