#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinstop/classical.hpp"
#include "pinstop/regions.hpp"

using namespace pinstop;

namespace {

bool has_witness(const PointClass& pc, const char* name) {
  return std::find(pc.witnesses.begin(), pc.witnesses.end(), name) != pc.witnesses.end();
}

// Verdict implied by the probe slopes alone, ignoring any closed-form
// override; mirrors the sign logic on the report fields.
MonotoneVerdict probe_verdict(const ConditionReport& rep) {
  if (rep.max_slope <= 1e-10) return MonotoneVerdict::DecreasingEverywhere;
  if (rep.min_slope >= -1e-10) return MonotoneVerdict::IncreasingEverywhere;
  return MonotoneVerdict::Neither;
}

}  // namespace

TEST_CASE("stopping wedge above a bounded support") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  const double edge = solve_beta().value * std::sqrt(0.5);

  PointClass deep = classify_point(tp, 0.5, 1.0 + edge + 0.3);
  CHECK(deep.label == PointLabel::KnownStop);
  CHECK(has_witness(deep, "D_r"));

  // The wedge is inclusive at its edge.
  PointClass on = classify_point(tp, 0.5, 1.0 + edge);
  CHECK(on.label == PointLabel::KnownStop);

  // Just inside it is no longer provable from this comparison.
  PointClass in = classify_point(tp, 0.5, 1.0 + edge - 1e-9);
  CHECK_FALSE(has_witness(in, "D_r"));
}

TEST_CASE("continuation wedge below a bounded support") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  const double edge = solve_beta().value * std::sqrt(0.5);

  PointClass pc = classify_point(tp, 0.5, -1.0 + edge - 0.1);
  CHECK(pc.label == PointLabel::KnownContinue);
  CHECK(has_witness(pc, "C_{-r}"));
}

TEST_CASE("two-point midline continuation witness") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  PointClass pc = classify_point(tp, 0.5, 0.0);
  CHECK(pc.label == PointLabel::KnownContinue);
  CHECK(has_witness(pc, "Q_r"));
}

TEST_CASE("unbounded priors admit no analytic wedge") {
  Prior nm = Prior::normal(0.0, 0.5);
  for (double z : {-5.0, 0.0, 5.0}) {
    PointClass pc = classify_point(nm, 0.3, z);
    CHECK(pc.label == PointLabel::Unknown);
    CHECK(pc.witnesses.empty());
  }
}

TEST_CASE("point mass support recovers the classical split exactly") {
  Prior pm = Prior::point_mass(0.0);
  const double b = solve_beta().value * std::sqrt(1.0 - 0.4);
  CHECK(classify_point(pm, 0.4, b + 1e-9).label == PointLabel::KnownStop);
  CHECK(classify_point(pm, 0.4, b - 1e-9).label == PointLabel::KnownContinue);
}

TEST_CASE("witnesses never contradict on a dense lattice") {
  // classify_point raises logic_error if the stop and continue proofs ever
  // overlap; sweep a box to exercise every wedge pairing.
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  int stops = 0, conts = 0, unknown = 0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 0.95, 0.999}) {
    for (double z = -3.0; z <= 3.0; z += 0.05) {
      PointClass pc = classify_point(tp, t, z);
      if (pc.label == PointLabel::KnownStop) ++stops;
      else if (pc.label == PointLabel::KnownContinue) ++conts;
      else ++unknown;
    }
  }
  CHECK(stops > 0);
  CHECK(conts > 0);
  CHECK(unknown > 0);
}

TEST_CASE("classify_point validates the time domain") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  CHECK_THROWS_AS(classify_point(tp, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_point(tp, -0.2, 0.0), std::invalid_argument);
}

TEST_CASE("normal prior verdicts are closed form") {
  ConditionReport dec = single_boundary_condition(Prior::normal(0.0, 0.5));
  CHECK(dec.verdict == MonotoneVerdict::DecreasingEverywhere);
  CHECK(dec.analytic);
  CHECK(dec.max_slope < 0.0);  // probe agrees

  ConditionReport inc = single_boundary_condition(Prior::normal(0.0, 2.0));
  CHECK(inc.verdict == MonotoneVerdict::IncreasingEverywhere);
  CHECK(inc.analytic);
  CHECK(inc.min_slope > 0.0);
}

TEST_CASE("atomic priors fall back to probe evidence") {
  // Atoms concentrate as t -> 1 (slope -> -1) but start with variance
  // 1.56 > 1 (slope +0.56 at t = 0): Neither, and no closed form applies.
  Prior d = Prior::discrete({{-1.0, 0.2}, {0.0, 0.3}, {2.0, 0.5}});
  ConditionReport rep = single_boundary_condition(d);
  CHECK(rep.verdict == MonotoneVerdict::Neither);
  CHECK_FALSE(rep.analytic);
  CHECK(rep.max_slope > 0.1);
  CHECK(rep.min_slope < -0.1);
  CHECK(rep.worst_t >= 0.0);
}

TEST_CASE("symmetric mixture criterion closed form") {
  CHECK(symmetric_mixture_criterion(0.5, 0.5));         // exactly on the threshold
  CHECK(symmetric_mixture_criterion(0.4, 0.5));
  CHECK_FALSE(symmetric_mixture_criterion(0.51, 0.5));
  CHECK_FALSE(symmetric_mixture_criterion(5.0 / 9.0, 4.0 / 9.0));
  CHECK_THROWS_AS(symmetric_mixture_criterion(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_mixture_criterion(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("criterion function agrees with the probe on a straddle pair") {
  const double g2 = 0.2;
  const double thr = std::sqrt(g2 * (1.0 - g2));
  for (double f : {0.95, 1.05}) {
    const double r = f * thr;
    Prior mix = Prior::mixture({{0.5, -r, g2}, {0.5, r, g2}});
    ConditionReport rep = single_boundary_condition(mix);
    MonotoneVerdict expected = symmetric_mixture_criterion(r, g2)
                                   ? MonotoneVerdict::DecreasingEverywhere
                                   : MonotoneVerdict::Neither;
    CHECK(probe_verdict(rep) == expected);
    CHECK(rep.verdict == expected);  // the override reaches the same answer
    CHECK(rep.analytic);
  }
}

TEST_CASE("asymmetric mixtures are probed, not overridden") {
  Prior mix = Prior::mixture({{0.3, 0.8, 0.2}, {0.7, -0.6, 0.35}});
  ConditionReport rep = single_boundary_condition(mix);
  CHECK_FALSE(rep.analytic);
  CHECK(rep.verdict == probe_verdict(rep));
}

TEST_CASE("single_boundary_condition validates its configuration") {
  Prior nm = Prior::normal(0.0, 0.5);
  CHECK_THROWS_AS(single_boundary_condition(nm, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(single_boundary_condition(nm, 0.9, {0, 0}, 3, 3), std::invalid_argument);
}
