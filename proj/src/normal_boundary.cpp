#include "pinstop/normal_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pinstop/classical.hpp"
#include "pinstop/errors.hpp"
#include "pinstop/math_util.hpp"

namespace pinstop {

void NormalProblem::validate() const {
  if (!std::isfinite(m)) throw std::invalid_argument("NormalProblem: m must be finite");
  if (!(gamma2 > 0.0) || !(gamma2 < 1.0))
    throw std::invalid_argument("NormalProblem: gamma2 must lie in (0, 1)");
}

namespace {

// Piecewise-linear read of the current iterate at an off-grid time.  The
// final cell instead follows the square-root profile at which the boundary
// meets the pin (a chord under a concave sqrt arc would bias the last
// nodes' equations).
double interp(const std::vector<double>& times, const std::vector<double>& vals,
              double s, double pin) {
  if (s <= times.front()) return vals.front();
  if (s >= times.back()) return vals.back();
  auto it = std::upper_bound(times.begin(), times.end(), s);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (k + 1 == times.size())
    return pin + (vals[k - 1] - pin) *
                     std::sqrt((times[k] - s) / (times[k] - times[k - 1]));
  double w = (s - times[k - 1]) / (times[k] - times[k - 1]);
  return vals[k - 1] + w * (vals[k] - vals[k - 1]);
}

// Defect of the boundary equation at level x.  The raw form
// b - h(t,b) + int E[(pin - Z)/(T-t-u) 1{Z > b(t+u)}] du is a difference of
// two integrals whose linear-in-x parts cancel identically (the drift
// identity gives int E[Z - pin]/(T-t-u) du = c(t)(x - pin) exactly), so it
// is evaluated in the equivalent cancellation-free complementary form
//
//   G(x) = int_0^{1-t} E[(Z_{t+u} - pin) 1{Z_{t+u} <= b(t+u)}]/(T-t-u) du,
//
// under the extended-bridge marginal from (t, x):
//   Z_{t+u} ~ N(x + u (pin - x)/(T - t),  u (T - t - u)/(T - t)).
// The truncated mean is closed form; the u = v^2 change of variable on the
// first half absorbs the sqrt(u) behaviour at the left end.
double defect_g(const NormalProblem& p, std::size_t k, double x,
                const std::vector<double>& times,
                const std::vector<double>& vals) {
  const double t = times[k];
  const double tt = p.t_ext();
  const double pin = p.pin();
  const double span = tt - t;
  const double horizon = 1.0 - t;
  const Quadrature& q = gauss_legendre(16);

  auto term = [&](double u) {
    double mean = x + (u / span) * (pin - x);
    double sd = std::sqrt(u * (span - u) / span);
    double d = (mean - interp(times, vals, t + u, pin)) / sd;
    double e = (mean - pin) * normal_cdf(-d) - sd * normal_pdf(d);
    return e / (span - u);
  };

  // Panels aligned with the boundary grid for the first cells after t (the
  // iterate is piecewise linear, and the root at late nodes is sensitive
  // to exactly this short-u region), then geometric coarsening; straddled
  // kinks far from u = 0 contribute negligibly.
  // Late nodes (short horizon, steep iterate) get every cell; elsewhere the
  // far-off kinks are negligible against the defect scale.
  std::size_t cells_left = 0;
  for (std::size_t j = k + 1; j < times.size() && times[j] - t < horizon; ++j)
    ++cells_left;
  const std::size_t aligned = cells_left <= 48 ? cells_left : 12;

  double edges[64];
  std::size_t n_edges = 0;
  edges[n_edges++] = 0.0;
  for (std::size_t j = k + 1; n_edges <= aligned; ++j)
    edges[n_edges++] = times[j] - t;
  while (edges[n_edges - 1] < horizon && n_edges < 63) {
    double e = std::min(horizon,
                        std::max(2.0 * edges[n_edges - 1], horizon / 1024.0));
    edges[n_edges++] = e;
  }
  edges[n_edges - 1] = horizon;

  double out = 0.0;
  {  // first panel under u = v^2, absorbing the sqrt(u) endpoint behaviour
    double vmax = std::sqrt(edges[1]);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double v = 0.5 * vmax * (q.nodes[i] + 1.0);
      out += q.weights[i] * vmax * v * term(v * v);  // 0.5*vmax jac * 2v
    }
  }
  for (std::size_t e = 1; e + 1 < n_edges; ++e) {
    double a = edges[e], bb = edges[e + 1];
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double u = a + 0.5 * (bb - a) * (q.nodes[i] + 1.0);
      out += 0.5 * (bb - a) * q.weights[i] * term(u);
    }
  }
  return out;
}

}  // namespace

BoundarySolve solve_boundary(const NormalProblem& prob, int n_t, double tol,
                             int max_iter) {
  prob.validate();
  if (n_t < 8) throw std::invalid_argument("solve_boundary: n_t must be >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_boundary: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solve_boundary: max_iter must be >= 1");

  const double tt = prob.t_ext();
  const double pin = prob.pin();
  const double beta = solve_beta().value;

  // Grid on [0, 1] with 1 - t geometric down to 1e-4, final node exactly 1.
  std::vector<double> times(static_cast<std::size_t>(n_t));
  const double rho = std::pow(1e-4, 1.0 / (n_t - 2));
  times[0] = 0.0;
  for (int k = 1; k < n_t - 1; ++k)
    times[static_cast<std::size_t>(k)] = 1.0 - std::pow(rho, k);
  times.back() = 1.0;

  // Start from the known-pin boundary of the extended bridge; it dominates
  // the truncated-horizon boundary, so [pin, start] brackets every node.
  std::vector<double> b(times.size());
  for (std::size_t k = 0; k + 1 < b.size(); ++k)
    b[k] = pin + beta * std::sqrt(tt - times[k]);
  b.back() = pin;  // the equation degenerates at t = 1; the limit is the pin

  // Sweeps run descending in t (the equation is Volterra: the defect at t
  // reads the boundary only on (t, 1]), each node solving its scalar
  // equation exactly with its own short-time segment implicit.  A plain
  // whole-grid Jacobi update oscillates from this initial guess -- the
  // defect at early t is dominated by the not-yet-settled future boundary
  // -- while the backward ordering settles in one sweep and the remaining
  // sweeps verify the fixed point.
  double change = std::numeric_limits<double>::infinity();
  int used = 0;
  for (int sweep = 0; sweep < max_iter && change >= tol; ++sweep) {
    change = 0.0;
    for (std::size_t k = b.size() - 1; k-- > 0;) {
      double t = times[k];
      double old = b[k];
      auto defect = [&](double x) {
        b[k] = x;  // the u -> 0 end of the integral interpolates node k itself
        return defect_g(prob, k, x, times, b);
      };
      // G < 0 at the pin, > 0 above the root; the known-pin comparison
      // level dominates the boundary, but far above the root G decays to
      // +0 exponentially, so back off if it underflows to an exact zero.
      double hi = pin + beta * std::sqrt(tt - t);
      while (defect(hi) == 0.0 && hi - pin > 1e-12)
        hi = pin + 0.5 * (hi - pin);
      if (defect(hi) < 0.0)
        throw NumericalError("solve_boundary: failed to bracket the boundary");
      b[k] = find_root(defect, pin, hi);
      change = std::max(change, std::abs(b[k] - old));
    }
    ++used;
  }
  if (change >= tol)
    throw NoConvergence("solve_boundary: sup-norm change still above tol", change);

  BoundarySolve out;
  out.boundary.kind = Boundary::Kind::Upper;
  out.boundary.times = times;
  out.boundary.levels = b;
  out.iterations = used;
  out.last_change = change;
  for (std::size_t k = 0; k + 1 < b.size(); ++k)
    out.residual = std::max(out.residual,
                            std::abs(defect_g(prob, k, b[k], times, b)));
  return out;
}

OuReport ou_consistency_check(const NormalProblem& prob, const Boundary& bd) {
  prob.validate();
  if (bd.times.size() != bd.levels.size() || bd.times.size() < 3)
    throw std::invalid_argument("ou_consistency_check: malformed boundary");
  const double tt = prob.t_ext();
  const double pin = prob.pin();

  std::vector<double> g(bd.times.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (bd.times[i] < 0.0 || bd.times[i] > 1.0)
      throw std::invalid_argument("ou_consistency_check: time outside [0, 1]");
    g[i] = (bd.levels[i] - pin) / std::sqrt(1.0 - bd.times[i] / tt);
  }

  OuReport rep;
  for (double gi : g) rep.max_negative_g = std::max(rep.max_negative_g, -gi);
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    rep.max_increase = std::max(rep.max_increase, g[i + 1] - g[i]);
  // The final grid node is pinned analytically, so read the terminal value
  // one node earlier when the grid reaches t = 1 exactly.
  std::size_t last = g.size() - 1;
  if (bd.times[last] >= 1.0 - 1e-12 && last > 0) --last;
  rep.terminal_g = g[last];
  rep.max_deviation = std::max({rep.max_negative_g, rep.max_increase,
                                std::abs(rep.terminal_g)});
  return rep;
}

}  // namespace pinstop
