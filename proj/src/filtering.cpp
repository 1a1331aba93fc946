#include "pinstop/filtering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace pinstop {

namespace {

// Shared core: moments of the prior reweighted by exp(b*u - a*u^2/2).
// The filter is the case a = t/(1-t), b = z/(1-t); f_coordinate passes
// (a, b) = (s, y) directly.

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Up to kMaxDiscreteAtoms atoms or kMaxMixtureComponents Gaussians, so
// fixed stack buffers suffice.
struct Weighted {
  int n = 0;
  std::array<double, kMaxDiscreteAtoms> weight{};  // normalized, may hold exact zeros
  std::array<double, kMaxDiscreteAtoms> mean{};
  std::array<double, kMaxDiscreteAtoms> var{};     // zero for atoms
};

void normalize_log_weights(int n, std::array<double, kMaxDiscreteAtoms>& lw) {
  double top = lw[0];
  for (int i = 1; i < n; ++i) top = std::max(top, lw[i]);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    lw[i] = std::exp(lw[i] - top);
    total += lw[i];
  }
  for (int i = 0; i < n; ++i) lw[i] /= total;
}

Weighted tilt_atoms(const double* values, const double* weights, int n, double a, double b) {
  Weighted out;
  out.n = n;
  std::array<double, kMaxDiscreteAtoms> lw;
  for (int i = 0; i < n; ++i) {
    const double u = values[i];
    lw[i] = std::log(weights[i]) + b * u - 0.5 * a * u * u;
    out.mean[i] = u;
    out.var[i] = 0.0;
  }
  normalize_log_weights(n, lw);
  out.weight = lw;
  return out;
}

Weighted tilt_gaussians(const MixtureComponent* comps, int n, double a, double b) {
  Weighted out;
  out.n = n;
  std::array<double, kMaxDiscreteAtoms> lw;
  for (int i = 0; i < n; ++i) {
    const double m = comps[i].mean, s2 = comps[i].var;
    const double denom = 1.0 + s2 * a;
    const double mu = (m + s2 * b) / denom;
    out.mean[i] = mu;
    out.var[i] = s2 / denom;
    // Log marginal likelihood of the component under the tilt; the (t, z)
    // dependent common factor cancels in the normalization.
    lw[i] = std::log(comps[i].weight) - 0.5 * std::log(denom) +
            0.5 * mu * mu / out.var[i] - 0.5 * m * m / s2;
  }
  normalize_log_weights(n, lw);
  out.weight = lw;
  return out;
}

Weighted tilt(const Prior& prior, double a, double b) {
  return std::visit(
      [a, b](const auto& p) -> Weighted {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          Weighted w;
          w.n = 1;
          w.weight[0] = 1.0;
          w.mean[0] = p.r;
          return w;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          const double values[2] = {p.l, p.r};
          const double weights[2] = {1.0 - p.p, p.p};
          return tilt_atoms(values, weights, 2, a, b);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          std::array<double, kMaxDiscreteAtoms> values, weights;
          const int n = static_cast<int>(p.atoms.size());
          for (int i = 0; i < n; ++i) {
            values[i] = p.atoms[i].value;
            weights[i] = p.atoms[i].weight;
          }
          return tilt_atoms(values.data(), weights.data(), n, a, b);
        } else if constexpr (std::is_same_v<T, Normal>) {
          MixtureComponent c{1.0, p.mean, p.var};
          return tilt_gaussians(&c, 1, a, b);
        } else {
          return tilt_gaussians(p.components.data(), static_cast<int>(p.components.size()), a, b);
        }
      },
      prior.variant());
}

Moments moments_of(const Weighted& w) {
  Moments m;
  for (int i = 0; i < w.n; ++i) m.mean += w.weight[i] * w.mean[i];
  for (int i = 0; i < w.n; ++i) {
    const double d = w.mean[i] - m.mean;
    m.variance += w.weight[i] * (w.var[i] + d * d);
  }
  return m;
}

double cap_time(double t) {
  if (!(t >= 0.0) || !(t <= 1.0)) throw std::invalid_argument("filter: t outside [0, 1]");
  return std::min(t, kMaxFilterTime);
}

void tilt_params(double t, double z, double& a, double& b) {
  const double omt = 1.0 - t;
  a = t / omt;
  b = z / omt;
}

}  // namespace

double posterior_mean(const Prior& prior, double t, double z) {
  t = cap_time(t);
  if (t == 0.0 && z == 0.0) return prior.mean();
  double a, b;
  tilt_params(t, z, a, b);
  return moments_of(tilt(prior, a, b)).mean;
}

double posterior_variance(const Prior& prior, double t, double z) {
  t = cap_time(t);
  if (t == 0.0 && z == 0.0) return prior.variance();
  double a, b;
  tilt_params(t, z, a, b);
  return moments_of(tilt(prior, a, b)).variance;
}

double drift(const Prior& prior, double t, double z) {
  t = cap_time(t);
  return (posterior_mean(prior, t, z) - z) / (1.0 - t);
}

double two_point_pi(double r, double p, double t, double z) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("two_point_pi: p outside (0,1)");
  t = cap_time(t);
  const double x = std::log(p / (1.0 - p)) + 2.0 * r * z / (1.0 - t);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double f_coordinate(const Prior& prior, double s, double y) {
  if (!(s >= 0.0)) throw std::invalid_argument("f_coordinate: s must be >= 0");
  return moments_of(tilt(prior, s, y)).mean;
}

Posterior posterior(const Prior& prior, double t, double z) {
  t = cap_time(t);
  Posterior out;
  out.t = t;
  out.z = z;
  if (t == 0.0 && z == 0.0) {
    out.distribution = prior;
    out.mean = prior.mean();
    out.variance = prior.variance();
    return out;
  }
  double a, b;
  tilt_params(t, z, a, b);
  const Weighted w = tilt(prior, a, b);
  const Moments m = moments_of(w);
  out.mean = m.mean;
  out.variance = m.variance;

  // Rebuild the posterior in the same family; atoms whose weights
  // underflowed to zero are dropped (the posterior genuinely is that
  // degenerate at such (t, z)).
  out.distribution = std::visit(
      [&](const auto& p) -> Prior {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return Prior::point_mass(p.r);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          const double pr = w.weight[1];  // tilt_atoms saw (l, r) in that order
          if (pr >= 1.0) return Prior::point_mass(p.r);
          if (pr <= 0.0) return Prior::point_mass(p.l);
          return Prior::two_point(p.r, p.l, pr);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          std::vector<DiscreteAtom> atoms;
          for (int i = 0; i < w.n; ++i)
            if (w.weight[i] > 0.0) atoms.push_back({w.mean[i], w.weight[i]});
          if (atoms.size() == 1) return Prior::point_mass(atoms[0].value);
          double total = 0.0;
          for (const auto& atom : atoms) total += atom.weight;
          for (auto& atom : atoms) atom.weight /= total;
          return Prior::discrete(std::move(atoms));
        } else if constexpr (std::is_same_v<T, Normal>) {
          return Prior::normal(w.mean[0], w.var[0]);
        } else {
          std::vector<MixtureComponent> comps;
          for (int i = 0; i < w.n; ++i)
            if (w.weight[i] > 0.0) comps.push_back({w.weight[i], w.mean[i], w.var[i]});
          if (comps.size() == 1) return Prior::normal(comps[0].mean, comps[0].var);
          double total = 0.0;
          for (const auto& c : comps) total += c.weight;
          for (auto& c : comps) c.weight /= total;
          return Prior::mixture(std::move(comps));
        }
      },
      prior.variant());
  return out;
}

}  // namespace pinstop
