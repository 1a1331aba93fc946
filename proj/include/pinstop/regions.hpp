#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pinstop/prior.hpp"

// Analytic region classification and the single-boundary criterion.
//
// Three provable rules classify points of [0,1) x R without solving
// anything: comparison with the known-pin problem at the support edges
// gives a stopping region D_r (support bounded above) and a continuation
// region C_{-r} (support bounded below), and for two-point priors the
// lower bound pi*v_r - (1-pi)*r gives a further continuation wedge Q_r.
// Everything else is Unknown here and left to the PDE solver.

namespace pinstop {

enum class PointLabel { KnownStop, KnownContinue, Unknown };

struct PointClass {
  PointLabel label = PointLabel::Unknown;
  std::vector<std::string> witnesses;  // subset of {"D_r", "C_{-r}", "Q_r"}
};

PointClass classify_point(const Prior& prior, double t, double z);

enum class MonotoneVerdict { DecreasingEverywhere, IncreasingEverywhere, Neither };

struct ConditionReport {
  MonotoneVerdict verdict = MonotoneVerdict::Neither;
  // Probe point with the largest d/dz (h - z) = variance/(1-t) - 1, i.e.
  // the worst offender against the decreasing condition.
  double worst_t = 0.0;
  double worst_z = 0.0;
  double max_slope = 0.0;
  double min_slope = 0.0;
  // True when a closed form decided the verdict (normal prior, symmetric
  // two-component mixture); otherwise the verdict is probe evidence only.
  bool analytic = false;
};

// Signs of d/dz(h - z) over a probe lattice: t in [0, t_max], z in z_range,
// n_t x n_z points.  Defaults: t_max just below 1, z over prior mean +- 8
// standard deviations (or +-2 around atoms), 64 x 201 lattice.
ConditionReport single_boundary_condition(const Prior& prior,
                                          double t_max = 0.999,
                                          std::pair<double, double> z_range = {0, 0},
                                          int n_t = 64, int n_z = 201);

// Exact criterion for the symmetric mixture (N(-r, g2) + N(r, g2)) / 2:
// the posterior-mean condition holds iff r <= sqrt(g2 * (1 - g2)).
// Requires g2 in (0, 1); throws otherwise.
bool symmetric_mixture_criterion(double r, double gamma2);

}  // namespace pinstop
