#include "pinstop/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinstop/classical.hpp"
#include "pinstop/errors.hpp"
#include "pinstop/filtering.hpp"
#include "pinstop/math_util.hpp"

namespace pinstop {

std::vector<double> GridSpec::time_nodes() const {
  std::vector<double> t(n_t);
  const double span0 = 1.0 - t0;
  const double rho = std::pow(epsilon_horizon / span0, 1.0 / (n_t - 1));
  double gap = span0;
  for (int k = 0; k < n_t; ++k) {
    t[k] = 1.0 - gap;
    gap *= rho;
  }
  t.front() = t0;
  t.back() = t1();  // pin endpoints against pow() drift
  return t;
}

std::vector<double> GridSpec::z_nodes() const {
  std::vector<double> z(n_z);
  for (int i = 0; i < n_z; ++i) z[i] = z_min + (z_max - z_min) * i / (n_z - 1);
  z.back() = z_max;
  return z;
}

void GridSpec::validate(const Prior& prior) const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("grid: " + what);
  };
  if (!(epsilon_horizon > 0.0)) fail("epsilon_horizon must be positive");
  if (!(t0 >= 0.0 && t0 < t1())) fail("need 0 <= t0 < t1 = 1 - epsilon_horizon");
  if (n_t < 2) fail("n_t must be at least 2");
  if (n_z < 3) fail("n_z must be at least 3");
  if (!(z_min < z_max)) fail("need z_min < z_max");

  const double m = prior.mean();
  const double sd = std::sqrt(prior.variance());
  double lo = m - 6.0 * sd, hi = m + 6.0 * sd;
  const SupportBounds sup = prior.support();
  if (sup.bounded_below()) lo = std::min(lo, sup.lower - 2.0);
  if (sup.bounded_above()) hi = std::max(hi, sup.upper + 2.0);
  if (z_min > lo + 1e-12 || z_max < hi - 1e-12)
    fail("domain must cover prior mean +- 6 stddev and atoms +- 2 (need [" +
         std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

GridSpec GridSpec::for_prior(const Prior& prior, int n_t, int n_z, double epsilon_horizon) {
  GridSpec g;
  g.n_t = n_t;
  g.n_z = n_z;
  g.epsilon_horizon = epsilon_horizon;
  const double m = prior.mean();
  const double sd = std::sqrt(prior.variance());
  g.z_min = m - 6.0 * sd;
  g.z_max = m + 6.0 * sd;
  const SupportBounds sup = prior.support();
  if (sup.bounded_below()) g.z_min = std::min(g.z_min, sup.lower - 2.0);
  if (sup.bounded_above()) g.z_max = std::max(g.z_max, sup.upper + 2.0);
  g.validate(prior);
  return g;
}

double default_label_tol(const GridSpec& grid) {
  return 1e-6 * (grid.z_max - grid.z_min);
}

namespace {

// One Gaussian component of the reveal payoff:
//   I = int v_known(r, t1, z) N(r; mu, sd^2) dr.
// The r <= z - beta*sqrt(1-t1) piece is exactly z; on the rest the linear
// part integrates in closed form and the exp*Phi factor is integrated by
// Gauss-Legendre with panel splits where it bends.
double reveal_gaussian(double mu, double sd, double t1, double z) {
  const double beta = solve_beta().value;
  const double s = std::sqrt(1.0 - t1);
  const double rstar = z - beta * s;
  const double astar = (rstar - mu) / sd;
  const double c = kSqrt2Pi * s * (1.0 - beta * beta);

  double out = z * normal_cdf(astar) + mu * normal_cdf(-astar) + sd * normal_pdf(astar);

  const double xmax = 10.0;
  if (astar >= xmax) return out;  // the stopping piece carries all the mass

  // Panel breakpoints: start, the r = z crossing (where the Phi factor
  // turns over) plus a few bridge widths around it, and the tail cutoff.
  const double xz = (z - mu) / sd;
  const double w = 3.0 * s / sd;
  double pts[5] = {astar, xz - w, xz, xz + w, xmax};
  std::sort(pts, pts + 5);
  const Quadrature& gl = gauss_legendre(32);
  double quad = 0.0;
  for (int p = 0; p + 1 < 5; ++p) {
    const double a = std::max(pts[p], astar);
    const double b = std::min(pts[p + 1], xmax);
    if (b <= a) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double x = mid + half * gl.nodes[q];
      acc += gl.weights[q] * normal_cdf_scaled((z - mu - sd * x) / s) * normal_pdf(x);
    }
    quad += half * acc;
  }
  return out + c * quad;
}

}  // namespace

double reveal_payoff(const Prior& prior, double t1, double z) {
  if (!(t1 > 0.0 && t1 < 1.0)) throw std::invalid_argument("reveal_payoff: t1 outside (0, 1)");
  const Posterior post = posterior(prior, t1, z);
  double out = 0.0;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          out = v_known(p.r, t1, z);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          out = p.p * v_known(p.r, t1, z) + (1.0 - p.p) * v_known(p.l, t1, z);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          for (const auto& a : p.atoms) out += a.weight * v_known(a.value, t1, z);
        } else if constexpr (std::is_same_v<T, Normal>) {
          out = reveal_gaussian(p.mean, std::sqrt(p.var), t1, z);
        } else {
          for (const auto& c : p.components)
            out += c.weight * reveal_gaussian(c.mean, std::sqrt(c.var), t1, z);
        }
      },
      post.distribution.variant());
  return std::max(out, z);
}

ValueField solve(const Prior& prior, const GridSpec& grid, TerminalScheme terminal) {
  SolveOptions options;
  options.terminal = terminal;
  return solve(prior, grid, options);
}

ValueField solve(const Prior& prior, const GridSpec& grid, const SolveOptions& options) {
  grid.validate(prior);
  if (!(options.theta > 0.0 && options.theta <= 1.0))
    throw std::invalid_argument("solve: theta must lie in (0, 1]");

  ValueField field;
  field.grid = grid;
  field.times = grid.time_nodes();
  field.zs = grid.z_nodes();
  field.label_tol = options.label_tol >= 0.0 ? options.label_tol : default_label_tol(grid);
  field.terminal = options.terminal;
  const int nt = grid.n_t, nz = grid.n_z;
  field.values.assign(static_cast<std::size_t>(nt) * nz, 0.0);

  const double dz = grid.dz();
  const double inv_dz2 = 1.0 / (dz * dz);
  const bool top_dirichlet = prior.support().bounded_above();
  const double theta = options.theta;

  // Terminal slice.
  {
    double* last = &field.values[static_cast<std::size_t>(nt - 1) * nz];
    for (int i = 0; i < nz; ++i) {
      const double z = field.zs[i];
      last[i] = options.terminal == TerminalScheme::Reveal ? reveal_payoff(prior, grid.t1(), z) : z;
    }
  }

  std::vector<double> mu(nz), lower(nz), diag(nz), upper(nz), rhs(nz);
  std::vector<double> vold(nz), fdiag(nz), frhs(nz);

  for (int k = nt - 2; k >= 0; --k) {
    const double t = field.times[k];
    const double dt = field.times[k + 1] - field.times[k];
    const double* prev = &field.values[static_cast<std::size_t>(k + 1) * nz];
    std::copy(prev, prev + nz, vold.begin());

    for (int i = 0; i < nz; ++i) mu[i] = drift(prior, t, field.zs[i]);

    if (theta < 1.0) {
      double cfl = 0.0;
      for (int i = 0; i < nz; ++i)
        cfl = std::max(cfl, (1.0 - theta) * dt * (std::abs(mu[i]) / dz + inv_dz2));
      if (cfl > 1.0)
        throw GridTooCoarse("solve: explicit-part CFL diagnostic " + std::to_string(cfl) +
                            " exceeds 1; refine the grid or use theta = 1");
    }

    // Per-node spatial stencil (sl, sd0, su) for L v |_i = sl*v_{i-1} +
    // sd0*v_i + su*v_{i+1}; drift is centered where that stays an M-matrix,
    // one-sided otherwise.
    auto stencil = [&](int i, double& sl, double& sd0, double& su) {
      const double m = mu[i];
      const bool central = options.drift == DriftScheme::CentralWhereMonotone &&
                           std::abs(m) * dz <= 1.0;
      if (central) {
        sl = 0.5 * inv_dz2 - 0.5 * m / dz;
        su = 0.5 * inv_dz2 + 0.5 * m / dz;
        sd0 = -inv_dz2;
      } else {
        const double ap = std::max(m, 0.0), an = std::max(-m, 0.0);
        sl = 0.5 * inv_dz2 + an / dz;
        su = 0.5 * inv_dz2 + ap / dz;
        sd0 = -inv_dz2 - (ap + an) / dz;
      }
    };

    for (int i = 1; i < nz - 1; ++i) {
      double sl, sd0, su;
      stencil(i, sl, sd0, su);
      lower[i] = -theta * dt * sl;
      diag[i] = 1.0 - theta * dt * sd0;
      upper[i] = -theta * dt * su;
      rhs[i] = vold[i];
      if (theta < 1.0)
        rhs[i] += (1.0 - theta) * dt * (sl * vold[i - 1] + sd0 * vold[i] + su * vold[i + 1]);
    }

    // Bottom: d2v/dz2 = 0, so only the (outward-pointing) drift acts; the
    // mean reversion toward the support keeps mu >= 0 here in practice.
    {
      const double a = std::max(mu[0], 0.0) / dz;
      diag[0] = 1.0 + dt * a;
      upper[0] = -dt * a;
      rhs[0] = vold[0];
    }
    // Top: deep stopping wedge when the support is bounded above, else the
    // same zero-curvature closure with downward drift.
    if (top_dirichlet) {
      lower[nz - 1] = 0.0;
      diag[nz - 1] = 1.0;
      rhs[nz - 1] = field.zs[nz - 1];
    } else {
      const double a = std::max(-mu[nz - 1], 0.0) / dz;
      lower[nz - 1] = -dt * a;
      diag[nz - 1] = 1.0 + dt * a;
      rhs[nz - 1] = vold[nz - 1];
    }

    // Obstacle step.  Plain solve-then-project smears the free boundary by
    // O(sqrt(dt)), which a 2000-step grid cannot afford, so solve the step's
    // complementarity problem instead: factor the M-matrix and clamp v >= z
    // during the top-down back-substitution (Brennan-Schwartz; exact whenever
    // the stopping set is a single upper interval), then run projected
    // Gauss-Seidel sweeps to finish slices where the stopping set has extra
    // components.  No over-relaxation here: plain sweeps converge for every
    // M-matrix, while omega > 1 diverges on strongly advection-dominated
    // steps (atomic priors near the horizon reach |mu| dt / dz of several).
    double* cur = &field.values[static_cast<std::size_t>(k) * nz];
    fdiag = diag;
    frhs = rhs;
    for (int i = 1; i < nz; ++i) {
      const double w = lower[i] / fdiag[i - 1];
      fdiag[i] -= w * upper[i - 1];
      frhs[i] -= w * frhs[i - 1];
    }
    cur[nz - 1] = std::max(frhs[nz - 1] / fdiag[nz - 1], field.zs[nz - 1]);
    for (int i = nz - 2; i >= 0; --i)
      cur[i] = std::max((frhs[i] - upper[i] * cur[i + 1]) / fdiag[i], field.zs[i]);

    const double lcp_tol = 1e-11 * std::max(1.0, std::max(std::abs(grid.z_min), std::abs(grid.z_max)));
    for (int sweep = 0; sweep < 400; ++sweep) {
      double delta = 0.0;
      for (int i = 0; i < nz; ++i) {
        double r = rhs[i] - diag[i] * cur[i];
        if (i > 0) r -= lower[i] * cur[i - 1];
        if (i + 1 < nz) r -= upper[i] * cur[i + 1];
        const double vn = std::max(field.zs[i], cur[i] + r / diag[i]);
        delta = std::max(delta, std::abs(vn - cur[i]));
        cur[i] = vn;
      }
      if (delta <= lcp_tol) break;
    }
  }

  return field;
}

std::pair<RegionMap, std::vector<Boundary>> extract_regions(const ValueField& field,
                                                            double label_tol) {
  if (!(label_tol > 0.0)) throw std::invalid_argument("extract_regions: label_tol must be positive");
  const int nt = field.n_t(), nz = field.n_z();

  RegionMap map;
  map.times = field.times;
  map.zs = field.zs;
  map.label_tol = label_tol;
  map.flags.assign(static_cast<std::size_t>(nt) * nz, 0);

  struct Crossing {
    int it;
    double level;
    bool stop_above;  // stopping side is the larger z
  };
  std::vector<Crossing> crossings;
  int max_per_slice = 0;

  for (int it = 0; it < nt; ++it) {
    std::uint8_t* row = &map.flags[static_cast<std::size_t>(it) * nz];
    for (int iz = 0; iz < nz; ++iz)
      if (field.gap(it, iz) <= label_tol) row[iz] = region_flag::kStop;
    for (int iz = 0; iz < nz; ++iz) {
      if (!(row[iz] & region_flag::kStop)) continue;
      if (iz + 1 < nz && !(row[iz + 1] & region_flag::kStop)) row[iz] |= region_flag::kStopLoss;
      if (iz > 0 && !(row[iz - 1] & region_flag::kStop)) row[iz] |= region_flag::kTooGood;
    }
    int here = 0;
    for (int iz = 0; iz + 1 < nz; ++iz) {
      const bool s0 = row[iz] & region_flag::kStop;
      const bool s1 = row[iz + 1] & region_flag::kStop;
      if (s0 == s1) continue;
      const double g0 = field.gap(it, iz), g1 = field.gap(it, iz + 1);
      double level = field.zs[iz];
      if (g1 != g0) {
        double frac = (label_tol - g0) / (g1 - g0);
        frac = std::clamp(frac, 0.0, 1.0);
        level += frac * (field.zs[iz + 1] - field.zs[iz]);
      }
      crossings.push_back({it, level, s1});
      ++here;
    }
    max_per_slice = std::max(max_per_slice, here);
  }

  std::vector<Boundary> boundaries;
  if (!crossings.empty()) {
    const bool all_stop_above =
        std::all_of(crossings.begin(), crossings.end(), [](const Crossing& c) { return c.stop_above; });
    const bool all_stop_below =
        std::all_of(crossings.begin(), crossings.end(), [](const Crossing& c) { return !c.stop_above; });
    Boundary b;
    if (max_per_slice <= 1 && all_stop_above)
      b.kind = Boundary::Kind::Upper;
    else if (max_per_slice <= 1 && all_stop_below)
      b.kind = Boundary::Kind::Lower;
    else
      b.kind = Boundary::Kind::Multiple;
    for (const Crossing& c : crossings) {
      b.times.push_back(field.times[c.it]);
      b.levels.push_back(c.level);
    }
    boundaries.push_back(std::move(b));
  }
  return {std::move(map), std::move(boundaries)};
}

}  // namespace pinstop
