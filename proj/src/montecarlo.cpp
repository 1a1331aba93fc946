#include "pinstop/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pinstop/classical.hpp"
#include "pinstop/filtering.hpp"
#include "pinstop/math_util.hpp"

namespace pinstop {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One stream per path, seeded from (seed, path) only: early stopping on one
// path cannot perturb any other, and splitting the path range across
// workers would reproduce the serial results exactly.
struct PathRng {
  std::uint64_t s;
  double spare = 0.0;
  bool have_spare = false;

  PathRng(std::uint64_t seed, std::uint64_t path)
      : s(mix64(seed ^ mix64(path + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next_u64() {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() {  // strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {  // Marsaglia polar; cheaper than Box-Muller's sin/cos
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare = v * f;
    have_spare = true;
    return u * f;
  }
};

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

double sample_pin(const Prior& prior, PathRng& rng) {
  return std::visit(
      Overload{
          [&](const PointMass& d) { return d.r; },
          [&](const TwoPoint& d) { return rng.uniform() < d.p ? d.r : d.l; },
          [&](const Discrete& d) {
            double u = rng.uniform();
            double acc = 0.0;
            for (const auto& a : d.atoms) {
              acc += a.weight;
              if (u <= acc) return a.value;
            }
            return d.atoms.back().value;
          },
          [&](const Normal& d) {
            return d.mean + std::sqrt(d.var) * rng.normal();
          },
          [&](const Mixture& d) {
            double u = rng.uniform();
            double acc = 0.0;
            std::size_t pick = d.components.size() - 1;
            for (std::size_t i = 0; i < d.components.size(); ++i) {
              acc += d.components[i].weight;
              if (u <= acc) {
                pick = i;
                break;
              }
            }
            const auto& c = d.components[pick];
            return c.mean + std::sqrt(c.var) * rng.normal();
          },
      },
      prior.variant());
}

double interp_level(const std::vector<double>& times,
                    const std::vector<double>& vals, double s) {
  if (times.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s <= times.front()) return vals.front();
  if (s >= times.back()) return vals.back();
  auto it = std::upper_bound(times.begin(), times.end(), s);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  double w = (s - times[k - 1]) / (times[k] - times[k - 1]);
  return vals[k - 1] + w * (vals[k] - vals[k - 1]);
}

// Rules compiled against the simulation grid: one threshold per step, or a
// per-step stop bitmap for region rules, so the path loop does no searching.
struct CompiledRule {
  enum class Mode { Never, StopAbove, StopBelow, Region };
  Mode mode = Mode::Never;
  std::vector<double> level;      // StopAbove / StopBelow, one per step
  std::vector<std::uint8_t> map;  // Region, [step * n_z + iz]
  int n_z = 0;
  double z_min = 0.0, inv_dz = 0.0;

  bool stops(std::size_t k, double z) const {
    switch (mode) {
      case Mode::Never:
        return false;
      case Mode::StopAbove:
        return z >= level[k];
      case Mode::StopBelow:
        return z <= level[k];
      case Mode::Region: {
        int iz = static_cast<int>(std::lround((z - z_min) * inv_dz));
        iz = std::clamp(iz, 0, n_z - 1);
        return map[k * static_cast<std::size_t>(n_z) + iz] != 0;
      }
    }
    return false;
  }
};

CompiledRule compile_rule(const StoppingRule& rule,
                          const std::vector<double>& times) {
  const std::size_t n = times.size() - 1;  // decisions before the forced stop
  CompiledRule out;
  std::visit(
      Overload{
          [&](const RegionRule& r) {
            if (!r.field) throw std::invalid_argument("RegionRule: null field");
            const ValueField& f = *r.field;
            out.mode = CompiledRule::Mode::Region;
            out.n_z = f.n_z();
            out.z_min = f.grid.z_min;
            out.inv_dz = 1.0 / f.grid.dz();
            out.map.assign(n * static_cast<std::size_t>(out.n_z), 0);
            for (std::size_t k = 0; k < n; ++k) {
              // Nearest field slice; past the field horizon reuse the last.
              auto it = std::lower_bound(f.times.begin(), f.times.end(), times[k]);
              std::size_t row = static_cast<std::size_t>(it - f.times.begin());
              if (row == f.times.size() ||
                  (row > 0 && times[k] - f.times[row - 1] < f.times[row] - times[k]))
                --row;
              for (int iz = 0; iz < out.n_z; ++iz)
                out.map[k * static_cast<std::size_t>(out.n_z) + iz] =
                    f.is_stop(static_cast<int>(row), iz) ? 1 : 0;
            }
          },
          [&](const BoundaryRule& r) {
            if (r.boundary.kind == Boundary::Kind::Multiple)
              throw std::invalid_argument(
                  "BoundaryRule: needs a single-sided boundary");
            bool upper = r.boundary.kind == Boundary::Kind::Upper;
            out.mode = upper ? CompiledRule::Mode::StopAbove
                             : CompiledRule::Mode::StopBelow;
            out.level.resize(n);
            double off = upper ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
              double t = times[k];
              bool covered = !r.boundary.times.empty() &&
                             t >= r.boundary.times.front() &&
                             t <= r.boundary.times.back();
              out.level[k] =
                  covered ? interp_level(r.boundary.times, r.boundary.levels, t)
                          : off;
            }
          },
          [&](const KnownPinRule& r) {
            double beta = solve_beta().value;
            out.mode = CompiledRule::Mode::StopAbove;
            out.level.resize(n);
            for (std::size_t k = 0; k < n; ++k)
              out.level[k] = r.r + beta * std::sqrt(1.0 - times[k]);
          },
          [&](const HoldToEnd&) { out.mode = CompiledRule::Mode::Never; },
          [&](const StopAtLevel& r) {
            out.mode = CompiledRule::Mode::StopAbove;
            out.level.assign(n, r.level);
          },
      },
      rule);
  return out;
}

}  // namespace

std::vector<double> simulation_times(double t0, int n_steps) {
  if (!(t0 >= 0.0) || !(t0 < 1.0))
    throw std::invalid_argument("simulation_times: t0 must lie in [0, 1)");
  if (n_steps < 1) throw std::invalid_argument("simulation_times: n_steps < 1");
  std::vector<double> times(static_cast<std::size_t>(n_steps) + 1);
  times.front() = t0;
  times.back() = 1.0;
  // Uniform in sqrt(1 - t): boundaries of interest shrink like sqrt(1-t), so
  // this clock monitors them at a constant rate all the way into the pin,
  // where a plain uniform grid would leak value through missed crossings.
  const double span = 1.0 - t0;
  for (int k = 1; k < n_steps; ++k) {
    const double u = 1.0 - static_cast<double>(k) / n_steps;
    times[static_cast<std::size_t>(k)] = 1.0 - span * u * u;
  }
  return times;
}

PathSample sample_path(const Prior& prior, double t0, double z0, int n_steps,
                       std::uint64_t seed) {
  if (n_steps < 1) throw std::invalid_argument("sample_path: n_steps < 1");
  PathSample out;
  out.times = simulation_times(t0, n_steps);
  out.values.resize(out.times.size());
  out.values.front() = z0;

  PathRng rng(seed, 0);
  Prior start_law = posterior(prior, t0, z0).distribution;
  out.pin = sample_pin(start_law, rng);

  double z = z0;
  for (std::size_t k = 0; k + 1 < out.times.size(); ++k) {
    double rem = 1.0 - out.times[k];
    double dt = out.times[k + 1] - out.times[k];
    double mean = z + dt * (out.pin - z) / rem;
    double var = dt * (rem - dt) / rem;  // zero on the final pinning step
    z = mean + (var > 0.0 ? std::sqrt(var) * rng.normal() : 0.0);
    out.values[k + 1] = z;
  }
  return out;
}

std::vector<SimResult> evaluate_rules(const std::vector<StoppingRule>& rules,
                                      const Prior& prior, std::uint64_t n_paths,
                                      int n_steps, std::uint64_t seed, double t0,
                                      double z0) {
  if (rules.empty()) throw std::invalid_argument("evaluate_rules: no rules");
  if (n_paths < 1) throw std::invalid_argument("evaluate_rules: n_paths < 1");
  const std::vector<double> times = simulation_times(t0, n_steps);
  const std::size_t n_rules = rules.size();
  const std::size_t last = times.size() - 1;

  std::vector<CompiledRule> compiled;
  compiled.reserve(n_rules);
  for (const auto& r : rules) compiled.push_back(compile_rule(r, times));

  Prior start_law = posterior(prior, t0, z0).distribution;

  std::vector<double> sum(n_rules, 0.0), sumsq(n_rules, 0.0);
  std::vector<std::uint8_t> active(n_rules);
  std::vector<double> payoff(n_rules);

  for (std::uint64_t p = 0; p < n_paths; ++p) {
    PathRng rng(seed, p);
    double pin = sample_pin(start_law, rng);
    double z = z0;
    std::fill(active.begin(), active.end(), std::uint8_t{1});
    std::size_t n_active = n_rules;

    for (std::size_t k = 0; k <= last && n_active > 0; ++k) {
      if (k > 0) {
        double rem = 1.0 - times[k - 1];
        double dt = times[k] - times[k - 1];
        double var = dt * (rem - dt) / rem;
        z = z + dt * (pin - z) / rem +
            (var > 0.0 ? std::sqrt(var) * rng.normal() : 0.0);
      }
      for (std::size_t r = 0; r < n_rules; ++r) {
        if (!active[r]) continue;
        if (k == last || compiled[r].stops(k, z)) {
          payoff[r] = z;
          active[r] = 0;
          --n_active;
        }
      }
    }
    for (std::size_t r = 0; r < n_rules; ++r) {
      sum[r] += payoff[r];
      sumsq[r] += payoff[r] * payoff[r];
    }
  }

  std::vector<SimResult> out(n_rules);
  for (std::size_t r = 0; r < n_rules; ++r) {
    double n = static_cast<double>(n_paths);
    double mean = sum[r] / n;
    double var = n_paths > 1 ? std::max(0.0, (sumsq[r] - n * mean * mean) / (n - 1.0))
                             : 0.0;
    out[r] = SimResult{mean, std::sqrt(var / n), n_paths, seed};
  }
  return out;
}

SimResult evaluate_rule(const StoppingRule& rule, const Prior& prior,
                        std::uint64_t n_paths, int n_steps, std::uint64_t seed,
                        double t0, double z0) {
  return evaluate_rules({rule}, prior, n_paths, n_steps, seed, t0, z0)[0];
}

}  // namespace pinstop
