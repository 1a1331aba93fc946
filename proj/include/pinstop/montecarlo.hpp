#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "pinstop/dp_solver.hpp"
#include "pinstop/prior.hpp"

// Monte Carlo validation: sample the bridge exactly (draw the pin from the
// posterior at the start point, then use the conditional Gaussian bridge
// transitions -- no Euler bias) and evaluate stopping rules along common
// paths.  Every estimate is a statistical lower bound for the value, which
// is what makes this an independent check on the PDE solver.

namespace pinstop {

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  double pin = 0.0;  // the sampled X; rules never see it before t = 1
};

// Rules observe only (t, Z_t) by construction.
struct RegionRule {
  std::shared_ptr<const ValueField> field;  // stop where the field says stop
};
struct BoundaryRule {
  Boundary boundary;  // Upper: stop once z >= b(t); Lower: once z <= b(t)
};
struct KnownPinRule {
  double r = 0.0;  // classical rule: stop once z >= r + beta sqrt(1-t)
};
struct HoldToEnd {};
struct StopAtLevel {
  double level = 0.0;
};
using StoppingRule =
    std::variant<RegionRule, BoundaryRule, KnownPinRule, HoldToEnd, StopAtLevel>;

struct SimResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample stddev / sqrt(n_paths)
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
};

// Simulation grid: n_steps transitions, nodes uniform in sqrt(1 - t) so
// steps shrink toward the pin at the same rate the stopping boundaries
// flatten; final node exactly 1.
std::vector<double> simulation_times(double t0, int n_steps);

PathSample sample_path(const Prior& prior, double t0, double z0, int n_steps,
                       std::uint64_t seed);

// Evaluates all rules on one common set of paths (shared randomness makes
// rule comparisons sharp).  Per-path RNG streams are derived from
// (seed, path index) alone, so results are bit-for-bit reproducible and
// independent of any partitioning of the path range.
std::vector<SimResult> evaluate_rules(const std::vector<StoppingRule>& rules,
                                      const Prior& prior, std::uint64_t n_paths,
                                      int n_steps, std::uint64_t seed,
                                      double t0 = 0.0, double z0 = 0.0);

SimResult evaluate_rule(const StoppingRule& rule, const Prior& prior,
                        std::uint64_t n_paths, int n_steps, std::uint64_t seed,
                        double t0 = 0.0, double z0 = 0.0);

}  // namespace pinstop
