#pragma once

#include "pinstop/prior.hpp"

// Exact Bayesian filter for the pin.  Observing the bridge at (t, z)
// reweights the prior by exp(u*z/(1-t) - t*u^2/(2(1-t))); every family
// here is conjugate, so the posterior stays in the family.  All of the
// state dynamics flow through these functions: the observed process
// solves dZ = drift(t, Z) dt + dW with drift = (h - z)/(1 - t), where h
// is the posterior mean.

namespace pinstop {

// Times are capped here before use; the filter weights degenerate at t = 1.
constexpr double kMaxFilterTime = 1.0 - 1e-9;

struct Posterior {
  Prior distribution;
  double t = 0.0;  // conditioning time after capping
  double z = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

Posterior posterior(const Prior& prior, double t, double z);

// h(t, z); allocation free, cheap enough for per-grid-node use.
double posterior_mean(const Prior& prior, double t, double z);

double posterior_variance(const Prior& prior, double t, double z);

// (h(t, z) - z) / (1 - t).
double drift(const Prior& prior, double t, double z);

// Posterior probability of the upper atom for the symmetric two-point
// prior p*delta_r + (1-p)*delta_{-r}: a logistic in 2rz/(1-t), evaluated
// in log space.
double two_point_pi(double r, double p, double t, double z);

// f(s, y) = E[u * e^{uy - u^2 s/2}] / E[e^{uy - u^2 s/2}] under the prior;
// the posterior mean in stretched coordinates, h(t, z) = f(t/(1-t), z/(1-t)).
double f_coordinate(const Prior& prior, double s, double y);

}  // namespace pinstop
