#include "pinstop/regions.hpp"

#include <cmath>
#include <stdexcept>

#include "pinstop/classical.hpp"
#include "pinstop/filtering.hpp"
#include "pinstop/math_util.hpp"

namespace pinstop {

namespace {

// Absolute slack when reading signs off the probe lattice; keeps boundary
// cases (slope touching zero) classified as weakly monotone.
constexpr double kSlopeTol = 1e-10;

bool is_symmetric_pair(const Mixture& m, double& r, double& g2) {
  if (m.components.size() != 2) return false;
  const auto& a = m.components[0];
  const auto& b = m.components[1];
  if (std::abs(a.weight - 0.5) > 1e-12 || std::abs(b.weight - 0.5) > 1e-12) return false;
  if (std::abs(a.var - b.var) > 1e-12) return false;
  if (std::abs(a.mean + b.mean) > 1e-12) return false;
  r = std::abs(a.mean);
  g2 = a.var;
  return true;
}

}  // namespace

PointClass classify_point(const Prior& prior, double t, double z) {
  if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("classify_point: t outside [0, 1)");
  const double beta = solve_beta().value;
  const double edge = beta * std::sqrt(1.0 - t);
  const SupportBounds sup = prior.support();

  PointClass out;
  bool stop = false, cont = false;

  // Pin never above `upper`, so the z >= upper + beta*sqrt(1-t) wedge of the
  // known-pin problem at the top of the support is a fortiori stopping.
  if (sup.bounded_above() && z >= sup.upper + edge) {
    stop = true;
    out.witnesses.push_back("D_r");
  }
  // Symmetric comparison at the bottom edge: below lower + beta*sqrt(1-t)
  // even the most pessimistic pin keeps waiting.
  if (sup.bounded_below() && z < sup.lower + edge) {
    cont = true;
    out.witnesses.push_back("C_{-r}");
  }
  // Two-point lower bound: stopping pays z, waiting is worth at least
  // pi*v_r - (1-pi)*r around the midpoint.
  if (const TwoPoint* tp = std::get_if<TwoPoint>(&prior.variant())) {
    const double c = 0.5 * (tp->r + tp->l);
    const double rr = 0.5 * (tp->r - tp->l);
    const double zc = z - c;
    const double pi = two_point_pi(rr, tp->p, t, zc);
    if (zc < pi * v_known(rr, t, zc) - (1.0 - pi) * rr) {
      cont = true;
      out.witnesses.push_back("Q_r");
    }
  }

  if (stop && cont)
    throw std::logic_error("classify_point: contradictory witnesses (internal error)");
  out.label = stop ? PointLabel::KnownStop
                   : (cont ? PointLabel::KnownContinue : PointLabel::Unknown);
  return out;
}

ConditionReport single_boundary_condition(const Prior& prior, double t_max,
                                          std::pair<double, double> z_range,
                                          int n_t, int n_z) {
  if (!(t_max > 0.0 && t_max < 1.0))
    throw std::invalid_argument("single_boundary_condition: t_max outside (0, 1)");
  if (static_cast<long>(n_t) * n_z < 100)
    throw std::invalid_argument("single_boundary_condition: need at least 100 probe points");

  if (z_range.first >= z_range.second) {
    const double m = prior.mean();
    const double sd = std::sqrt(prior.variance());
    const SupportBounds sup = prior.support();
    double lo = m - 8.0 * sd, hi = m + 8.0 * sd;
    if (sup.bounded_below()) lo = std::min(lo, sup.lower - 2.0);
    if (sup.bounded_above()) hi = std::max(hi, sup.upper + 2.0);
    z_range = {lo, hi};
  }

  ConditionReport rep;
  rep.max_slope = -1e300;
  rep.min_slope = 1e300;
  for (int it = 0; it < n_t; ++it) {
    const double t = t_max * it / (n_t - 1);
    for (int iz = 0; iz < n_z; ++iz) {
      const double z = z_range.first + (z_range.second - z_range.first) * iz / (n_z - 1);
      const double slope = posterior_variance(prior, t, z) / (1.0 - t) - 1.0;
      if (slope > rep.max_slope) {
        rep.max_slope = slope;
        rep.worst_t = t;
        rep.worst_z = z;
      }
      rep.min_slope = std::min(rep.min_slope, slope);
    }
  }

  if (rep.max_slope <= kSlopeTol)
    rep.verdict = MonotoneVerdict::DecreasingEverywhere;
  else if (rep.min_slope >= -kSlopeTol)
    rep.verdict = MonotoneVerdict::IncreasingEverywhere;
  else
    rep.verdict = MonotoneVerdict::Neither;

  // Closed forms override the probe where available.
  if (const Normal* nm = std::get_if<Normal>(&prior.variant())) {
    // Posterior variance g2*(1-t)/((1-t) + g2*t) makes the slope's sign the
    // sign of g2 - 1 everywhere.
    rep.analytic = true;
    rep.verdict = nm->var <= 1.0 ? MonotoneVerdict::DecreasingEverywhere
                                 : MonotoneVerdict::IncreasingEverywhere;
  } else if (const Mixture* mx = std::get_if<Mixture>(&prior.variant())) {
    double r = 0.0, g2 = 0.0;
    if (is_symmetric_pair(*mx, r, g2) && g2 < 1.0) {
      rep.analytic = true;
      rep.verdict = symmetric_mixture_criterion(r, g2)
                        ? MonotoneVerdict::DecreasingEverywhere
                        : MonotoneVerdict::Neither;
    }
  }
  return rep;
}

bool symmetric_mixture_criterion(double r, double gamma2) {
  if (!(gamma2 > 0.0 && gamma2 < 1.0))
    throw std::invalid_argument("symmetric_mixture_criterion: needs gamma2 in (0, 1)");
  return std::abs(r) <= std::sqrt(gamma2 * (1.0 - gamma2));
}

}  // namespace pinstop
