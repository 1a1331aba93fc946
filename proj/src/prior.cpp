#include "pinstop/prior.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pinstop {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("prior: " + what);
}

void check_finite(double x, const char* name) {
  require(std::isfinite(x), std::string(name) + " must be finite");
}

constexpr double kWeightTol = 1e-12;

}  // namespace

Prior Prior::point_mass(double r) {
  check_finite(r, "r");
  return Prior(PointMass{r});
}

Prior Prior::two_point(double r, double l, double p) {
  check_finite(r, "r");
  check_finite(l, "l");
  check_finite(p, "p");
  require(l < r, "two_point needs l < r");
  require(p > 0.0 && p < 1.0, "two_point needs p in (0,1)");
  return Prior(TwoPoint{r, l, p});
}

Prior Prior::discrete(std::vector<DiscreteAtom> atoms) {
  require(!atoms.empty(), "discrete prior needs at least one atom");
  require(atoms.size() <= kMaxDiscreteAtoms, "too many atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    check_finite(atoms[i].value, "atom value");
    check_finite(atoms[i].weight, "atom weight");
    require(atoms[i].weight > 0.0, "atom weights must be positive");
    if (i > 0) require(atoms[i - 1].value < atoms[i].value, "atom values must be strictly increasing");
    total += atoms[i].weight;
  }
  require(std::abs(total - 1.0) <= kWeightTol, "atom weights must sum to 1");
  return Prior(Discrete{std::move(atoms)});
}

Prior Prior::normal(double mean, double var) {
  check_finite(mean, "mean");
  check_finite(var, "var");
  require(var > 0.0, "normal prior needs var > 0");
  return Prior(Normal{mean, var});
}

Prior Prior::mixture(std::vector<MixtureComponent> components) {
  require(!components.empty(), "mixture needs at least one component");
  require(components.size() <= kMaxMixtureComponents, "too many mixture components");
  double total = 0.0;
  for (const auto& c : components) {
    check_finite(c.weight, "component weight");
    check_finite(c.mean, "component mean");
    check_finite(c.var, "component var");
    require(c.weight > 0.0, "component weights must be positive");
    require(c.var > 0.0, "component variances must be positive");
    total += c.weight;
  }
  require(std::abs(total - 1.0) <= kWeightTol, "component weights must sum to 1");
  return Prior(Mixture{std::move(components)});
}

double Prior::mean() const {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return p.r;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return p.p * p.r + (1.0 - p.p) * p.l;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double m = 0.0;
          for (const auto& a : p.atoms) m += a.weight * a.value;
          return m;
        } else if constexpr (std::is_same_v<T, Normal>) {
          return p.mean;
        } else {
          double m = 0.0;
          for (const auto& c : p.components) m += c.weight * c.mean;
          return m;
        }
      },
      v_);
}

double Prior::variance() const {
  const double m = mean();
  return std::visit(
      [m](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          double d1 = p.r - m, d0 = p.l - m;
          return p.p * d1 * d1 + (1.0 - p.p) * d0 * d0;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double v = 0.0;
          for (const auto& a : p.atoms) v += a.weight * (a.value - m) * (a.value - m);
          return v;
        } else if constexpr (std::is_same_v<T, Normal>) {
          return p.var;
        } else {
          double v = 0.0;
          for (const auto& c : p.components)
            v += c.weight * (c.var + (c.mean - m) * (c.mean - m));
          return v;
        }
      },
      v_);
}

SupportBounds Prior::support() const {
  return std::visit(
      [](const auto& p) -> SupportBounds {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return {p.r, p.r};
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return {p.l, p.r};
        } else if constexpr (std::is_same_v<T, Discrete>) {
          return {p.atoms.front().value, p.atoms.back().value};
        } else {
          return {};  // Gaussian tails: unbounded both sides
        }
      },
      v_);
}

bool Prior::is_atomic() const {
  return !std::holds_alternative<Normal>(v_) && !std::holds_alternative<Mixture>(v_);
}

Prior Prior::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw std::invalid_argument("prior json: expected object with string \"type\"");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "point_mass") return point_mass(j.at("r").get<double>());
    if (type == "two_point")
      return two_point(j.at("r").get<double>(), j.at("l").get<double>(), j.at("p").get<double>());
    if (type == "discrete") {
      std::vector<DiscreteAtom> atoms;
      for (const auto& a : j.at("atoms"))
        atoms.push_back({a.at("value").get<double>(), a.at("weight").get<double>()});
      return discrete(std::move(atoms));
    }
    if (type == "normal") return normal(j.at("m").get<double>(), j.at("var").get<double>());
    if (type == "mixture") {
      std::vector<MixtureComponent> comps;
      for (const auto& c : j.at("components"))
        comps.push_back({c.at("weight").get<double>(), c.at("m").get<double>(), c.at("var").get<double>()});
      return mixture(std::move(comps));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("prior json (" + type + "): " + e.what());
  }
  throw std::invalid_argument("prior json: unknown type \"" + type + "\"");
}

nlohmann::json Prior::to_json() const {
  nlohmann::json j;
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          j = {{"type", "point_mass"}, {"r", p.r}};
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          j = {{"type", "two_point"}, {"r", p.r}, {"l", p.l}, {"p", p.p}};
        } else if constexpr (std::is_same_v<T, Discrete>) {
          j = {{"type", "discrete"}, {"atoms", nlohmann::json::array()}};
          for (const auto& a : p.atoms)
            j["atoms"].push_back({{"value", a.value}, {"weight", a.weight}});
        } else if constexpr (std::is_same_v<T, Normal>) {
          j = {{"type", "normal"}, {"m", p.mean}, {"var", p.var}};
        } else {
          j = {{"type", "mixture"}, {"components", nlohmann::json::array()}};
          for (const auto& c : p.components)
            j["components"].push_back({{"weight", c.weight}, {"m", c.mean}, {"var", c.var}});
        }
      },
      v_);
  return j;
}

std::string Prior::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          os << "point_mass(r=" << p.r << ")";
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          os << "two_point(r=" << p.r << ", l=" << p.l << ", p=" << p.p << ")";
        } else if constexpr (std::is_same_v<T, Discrete>) {
          os << "discrete(" << p.atoms.size() << " atoms)";
        } else if constexpr (std::is_same_v<T, Normal>) {
          os << "normal(m=" << p.mean << ", var=" << p.var << ")";
        } else {
          os << "mixture(" << p.components.size() << " components)";
        }
      },
      v_);
  return os.str();
}

Standardized standardize(const ProblemSpec& spec) {
  if (!std::isfinite(spec.sigma) || spec.sigma <= 0.0)
    throw std::invalid_argument("standardize: sigma must be positive");
  if (!std::isfinite(spec.horizon) || spec.horizon <= 0.0)
    throw std::invalid_argument("standardize: horizon must be positive");
  if (!std::isfinite(spec.start)) throw std::invalid_argument("standardize: start must be finite");

  const double scale = spec.sigma * std::sqrt(spec.horizon);
  const double shift = spec.start;
  auto map = [&](double u) { return (u - shift) / scale; };

  Prior canonical = std::visit(
      [&](const auto& p) -> Prior {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return Prior::point_mass(map(p.r));
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return Prior::two_point(map(p.r), map(p.l), p.p);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          auto atoms = p.atoms;
          for (auto& a : atoms) a.value = map(a.value);
          return Prior::discrete(std::move(atoms));
        } else if constexpr (std::is_same_v<T, Normal>) {
          return Prior::normal(map(p.mean), p.var / (scale * scale));
        } else {
          auto comps = p.components;
          for (auto& c : comps) {
            c.mean = map(c.mean);
            c.var /= scale * scale;
          }
          return Prior::mixture(std::move(comps));
        }
      },
      spec.prior.variant());

  std::ostringstream note;
  note << "canonical pin X = (X_phys - " << shift << ") / " << scale
       << "; physical value = " << scale << " * v + " << shift;
  return Standardized{std::move(canonical), scale, shift, note.str()};
}

}  // namespace pinstop
