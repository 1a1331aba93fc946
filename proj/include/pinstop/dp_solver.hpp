#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pinstop/prior.hpp"

// Backward finite-difference solver for the obstacle problem
//
//   dv/dt + ((h(t,z) - z)/(1-t)) dv/dz + (1/2) d2v/dz2 = 0   where v > z,
//   v >= z everywhere,
//
// swept from a terminal slice at t1 = 1 - epsilon_horizon down to t0.
// Each step solves one implicit diffusion-drift system and projects onto
// the obstacle.  Region maps, boundaries and the stop-loss /
// too-good-to-persist labels are read off the solved field.

namespace pinstop {

struct GridSpec {
  double t0 = 0.0;
  double epsilon_horizon = 1e-3;
  int n_t = 2000;
  double z_min = -3.0;
  double z_max = 3.0;
  int n_z = 1200;

  double t1() const { return 1.0 - epsilon_horizon; }
  double dz() const { return (z_max - z_min) / (n_z - 1); }

  // Time nodes run t0 .. t1 with 1 - t in geometric progression, so steps
  // shrink like (1 - t) toward the horizon where the drift blows up.
  std::vector<double> time_nodes() const;
  std::vector<double> z_nodes() const;

  // Throws std::invalid_argument on geometric violations or if the domain
  // fails to cover prior mean +- 6 stddev and every atom +- 2.
  void validate(const Prior& prior) const;

  // Domain sized by that covering rule.
  static GridSpec for_prior(const Prior& prior, int n_t, int n_z,
                            double epsilon_horizon = 1e-3);
};

enum class TerminalScheme { Reveal, StopNow };

double default_label_tol(const GridSpec& grid);

struct ValueField {
  GridSpec grid;
  std::vector<double> times;
  std::vector<double> zs;
  std::vector<double> values;  // row-major [it * n_z + iz]
  double label_tol = 0.0;
  TerminalScheme terminal = TerminalScheme::Reveal;

  int n_t() const { return static_cast<int>(times.size()); }
  int n_z() const { return static_cast<int>(zs.size()); }
  double value(int it, int iz) const { return values[static_cast<std::size_t>(it) * zs.size() + iz]; }
  double gap(int it, int iz) const { return value(it, iz) - zs[iz]; }
  bool is_stop(int it, int iz) const { return gap(it, iz) <= label_tol; }
};

enum class DriftScheme {
  Upwind,               // first-order one-sided everywhere
  CentralWhereMonotone  // second-order central wherever the cell Peclet
                        // number keeps the step an M-matrix, upwind elsewhere
};

struct SolveOptions {
  TerminalScheme terminal = TerminalScheme::Reveal;
  DriftScheme drift = DriftScheme::CentralWhereMonotone;
  // Implicitness weight; 1 = implicit Euler (default), 0.5 = Crank-Nicolson.
  // With theta < 1 the explicit part must satisfy the CFL-type bound
  // (1-theta) dt (|mu|/dz + 1/dz^2) <= 1 or solve throws GridTooCoarse.
  double theta = 1.0;
  double label_tol = -1.0;  // < 0: use default_label_tol(grid)
};

ValueField solve(const Prior& prior, const GridSpec& grid, TerminalScheme terminal);
ValueField solve(const Prior& prior, const GridSpec& grid, const SolveOptions& options);

// Reveal-scheme terminal payoff: E over the posterior at (t1, z) of the
// known-pin value v_r(t1, z).  Exposed for tests and for the sandwich
// diagnostics; atoms sum exactly, Gaussian components integrate by
// panel-split Gauss-Legendre.
double reveal_payoff(const Prior& prior, double t1, double z);

struct Boundary {
  enum class Kind { Upper, Lower, Multiple };
  Kind kind = Kind::Upper;
  std::vector<double> times;   // only slices where a crossing exists;
  std::vector<double> levels;  // repeated times when a slice crosses twice
};

// Per-node classification bits.
namespace region_flag {
constexpr std::uint8_t kStop = 1;      // v - z <= label_tol
constexpr std::uint8_t kStopLoss = 2;  // stopping with continuation immediately above
constexpr std::uint8_t kTooGood = 4;   // stopping with continuation immediately below
}  // namespace region_flag

struct RegionMap {
  std::vector<double> times;
  std::vector<double> zs;
  std::vector<std::uint8_t> flags;  // row-major like ValueField
  double label_tol = 0.0;

  int n_t() const { return static_cast<int>(times.size()); }
  int n_z() const { return static_cast<int>(zs.size()); }
  std::uint8_t flag(int it, int iz) const { return flags[static_cast<std::size_t>(it) * zs.size() + iz]; }
  bool is_stop(int it, int iz) const { return flag(it, iz) & region_flag::kStop; }
};

std::pair<RegionMap, std::vector<Boundary>> extract_regions(const ValueField& field,
                                                            double label_tol);

}  // namespace pinstop
