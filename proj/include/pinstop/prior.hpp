#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

// Pinning-point priors.  The canonical problem is a Brownian bridge on
// [0, 1] started at 0 whose terminal value X is drawn from one of these
// distributions; `standardize` maps a physical problem (volatility sigma,
// horizon T, start z) onto that canonical form.

namespace pinstop {

struct PointMass {
  double r = 0.0;
};

// P(X = r) = p, P(X = l) = 1 - p, with l < r.
struct TwoPoint {
  double r = 0.0;
  double l = 0.0;
  double p = 0.5;
};

struct DiscreteAtom {
  double value = 0.0;
  double weight = 0.0;
};

struct Discrete {
  std::vector<DiscreteAtom> atoms;  // strictly increasing values, weights sum to 1
};

struct Normal {
  double mean = 0.0;
  double var = 1.0;
};

struct MixtureComponent {
  double weight = 0.0;
  double mean = 0.0;
  double var = 1.0;
};

struct Mixture {
  std::vector<MixtureComponent> components;  // weights sum to 1
};

// [lower, upper] hull of the support; +-infinity for unbounded sides.
struct SupportBounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool bounded_below() const { return std::isfinite(lower); }
  bool bounded_above() const { return std::isfinite(upper); }
};

constexpr int kMaxDiscreteAtoms = 64;
constexpr int kMaxMixtureComponents = 16;

class Prior {
 public:
  using Variant = std::variant<PointMass, TwoPoint, Discrete, Normal, Mixture>;

  Prior() : v_(PointMass{0.0}) {}  // degenerate default; aggregates need it

  // Factories validate and throw std::invalid_argument on bad parameters
  // (non-finite values, weights outside [0,1] or not summing to 1 within
  // 1e-12, non-increasing atom values, size caps).
  static Prior point_mass(double r);
  static Prior two_point(double r, double l, double p);
  static Prior discrete(std::vector<DiscreteAtom> atoms);
  static Prior normal(double mean, double var);
  static Prior mixture(std::vector<MixtureComponent> components);

  const Variant& variant() const { return v_; }

  double mean() const;
  double variance() const;
  SupportBounds support() const;

  // True when the prior is purely atomic (point mass / two point / discrete).
  bool is_atomic() const;

  // Schema: {"type": "two_point", "r": 1.0, "l": -1.0, "p": 0.5} etc.
  static Prior from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::string describe() const;  // short human-readable tag for manifests

 private:
  explicit Prior(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Physical problem: dZ~ = sigma * (bridge on [0, T]), observed from z at
// time 0, pin distributed per `prior` (in physical units).
struct ProblemSpec {
  double sigma = 1.0;
  double horizon = 1.0;
  double start = 0.0;
  Prior prior;
};

// Canonical reduction.  The canonical prior is ((u - start) / (sigma sqrt(T)))
// pushed forward, so the canonical bridge starts at 0; a canonical value v
// converts back through physical_value = value_scale * v + value_shift.
struct Standardized {
  Prior prior;
  double value_scale = 1.0;   // sigma * sqrt(T)
  double value_shift = 0.0;   // physical start z
  std::string note;
};

Standardized standardize(const ProblemSpec& spec);

}  // namespace pinstop
