#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "riddled/dynamics.hpp"
#include "riddled/integrate.hpp"

namespace riddled {

/// Which attractor captured a trajectory. The numeric value is S(x, y).
enum class BasinLabel : int { CMinus = -1, Unresolved = 0, CPlus = 1 };

constexpr int to_int(BasinLabel l) noexcept { return static_cast<int>(l); }
/// Indicator views of S: 1 on the named attractor, 0 otherwise.
constexpr int s_plus(BasinLabel l) noexcept { return l == BasinLabel::CPlus ? 1 : 0; }
constexpr int s_minus(BasinLabel l) noexcept { return l == BasinLabel::CMinus ? 1 : 0; }
constexpr BasinLabel negate(BasinLabel l) noexcept { return static_cast<BasinLabel>(-to_int(l)); }
const char* to_string(BasinLabel l) noexcept;

/// When a trajectory counts as captured: for `k_sections` consecutive section
/// crossings the folded distance of y to the attractor's manifold stays below
/// delta_y and |vy| below delta_v.
///
/// Transverse dynamics near a manifold is linear, so a fixed radius would
/// call any start closer than delta_y captured at once. The radius is
/// therefore also capped at `relative_delta` times the initial distance d0 to
/// the nearer stable manifold (never below `min_delta_y`); delta_v shrinks by
/// the same factor. Set relative_delta = 0 for a purely absolute radius.
struct CaptureCriterion {
  double delta_y = 1e-3;
  double delta_v = 1e-3;
  int k_sections = 20;
  double t_max_periods = 20000.0;
  double relative_delta = 1e-2;
  double min_delta_y = 1e-12;

  /// Effective (delta_y, delta_v) for a start at distance d0 >= 0.
  std::pair<double, double> radii(double d0) const noexcept;
  void validate() const;
};

/// |y mod 2pi| folded into [0, pi]: distance to the y = 0 manifold.
double folded_distance_to_zero(double y) noexcept;
/// Distance to the y = pi manifold, folded the same way.
double folded_distance_to_pi(double y) noexcept;

/// Reduces an initial transverse position to [0, pi] using 2pi-periodicity
/// and the evenness of the field (valid for initial states with vy = 0).
double canonical_transverse(double y) noexcept;

struct Classification {
  BasinLabel label = BasinLabel::Unresolved;
  bool underflow = false;     // Unresolved because the step size collapsed
  double t_end = 0.0;         // time at which the label was decided
  PhaseState final_state;     // section state at capture (or last state)
};

/// Classifies the trajectory from (x, vx, y, 0) at t = 0. The initial y is
/// first reduced by canonical_transverse(); integration then runs in the
/// centred coordinate of CenteredField, so S(x, pi - y) == -S(x, y) holds
/// exactly whenever pi - y is computed without rounding.
Classification classify_state(double x, double vx, double y, const SystemParams& params,
                              const StepControl& control, const CaptureCriterion& criterion);

/// Starting at rest at (x0, y0).
BasinLabel classify_rest(double x0, double y0, const SystemParams& params,
                         const StepControl& control, const CaptureCriterion& criterion);

/// Starting from a Duffing attractor point X with transverse offset y.
BasinLabel classify_from_state(const AttractorPoint& X, double y, const SystemParams& params,
                               const StepControl& control, const CaptureCriterion& criterion);

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t nx = 200;
  double y_min = 0.0;
  double y_max = kPi / 2.0;
  std::size_t ny = 200;
  int tol_index = 1;
  CaptureCriterion criterion;

  /// Cell-centre coordinates when `centered`, otherwise the grid includes both
  /// end points (nx == 1 gives x_min).
  bool centered = false;

  double x_at(std::size_t i) const noexcept;
  double y_at(std::size_t j) const noexcept;
  void validate() const;
};

/// Row-major labels: row j (y index), column i (x index).
struct GridResult {
  GridSpec spec;
  std::vector<BasinLabel> labels;
  std::vector<double> t_end;  // integration time per cell
  std::size_t unresolved = 0;
  std::size_t underflows = 0;
  std::size_t cells_on_repelling_manifold = 0;  // cells with y exactly pi/2

  BasinLabel at(std::size_t i, std::size_t j) const { return labels[j * spec.nx + i]; }
};

GridResult grid_scan(const GridSpec& spec, const SystemParams& params, const StepControl& control,
                     unsigned threads);

/// Labels S^(n)(x, y0) for n = 1..n_max; rows indexed by n - 1.
struct TolScanResult {
  std::vector<double> x;
  double y0 = 0.0;
  int n_max = 0;
  std::vector<BasinLabel> labels;  // row-major (n - 1) * x.size() + i

  BasinLabel at(int n, std::size_t i) const { return labels[static_cast<std::size_t>(n - 1) * x.size() + i]; }
  std::size_t unresolved() const noexcept;
};

/// x points are cell centres of `x_points` equal cells over (-1, 1).
TolScanResult tol_scan(std::size_t x_points, double y0, int n_max, const SystemParams& params,
                       const StepControl& control, const CaptureCriterion& criterion,
                       unsigned threads);

}  // namespace riddled
