#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "riddled/basin.hpp"
#include "riddled/statistics.hpp"

namespace riddled {

/// Angle on the circle stored as a 64-bit binary fraction of a turn. Addition
/// and subtraction wrap exactly, so a half-turn shift or a common rotation of
/// two angles never introduces rounding.
class Angle {
 public:
  constexpr Angle() = default;
  static constexpr Angle from_raw(std::uint64_t raw) noexcept { return Angle(raw); }
  static Angle from_radians(double radians);
  /// Exact for dyadic fractions such as 1/16.
  static Angle from_turns(double turns);
  /// num/den of a half turn (num * pi / den), rounded to the nearest binary
  /// angle; exact whenever den is a power of two. den must be in [1, 2^31].
  static Angle pi_fraction(long long num, long long den);
  static constexpr Angle half_turn() noexcept { return Angle(std::uint64_t{1} << 63); }
  static constexpr Angle quarter_turn() noexcept { return Angle(std::uint64_t{1} << 62); }

  /// Value in [0, 2pi).
  double radians() const noexcept;
  constexpr std::uint64_t raw() const noexcept { return raw_; }

  friend constexpr Angle operator+(Angle a, Angle b) noexcept { return Angle(a.raw_ + b.raw_); }
  friend constexpr Angle operator-(Angle a, Angle b) noexcept { return Angle(a.raw_ - b.raw_); }
  friend constexpr bool operator==(Angle a, Angle b) noexcept = default;

 private:
  explicit constexpr Angle(std::uint64_t raw) noexcept : raw_(raw) {}
  std::uint64_t raw_ = 0;
};

/// Reparameterisation y -> y+ chosen so that the basin fraction at y+ equals
/// cos^2(y/2). Analytic mode inverts 1 - (1/2)(2y/pi)^eta; empirical mode
/// inverts a measured, isotonically cleaned fraction table.
class WarpModel {
 public:
  enum class Mode { Analytic, Empirical };

  static WarpModel analytic(double eta);
  /// Builds a table from a measured curve. Points outside (0, pi/2) or with
  /// fraction outside (1/2, 1) are dropped; the tail below the first point
  /// follows a power law with exponent `tail_eta`.
  static WarpModel empirical(const FractionCurve& curve, double tail_eta);

  Mode mode() const noexcept { return mode_; }
  double eta() const noexcept { return eta_; }
  /// Cleaned table (y+, L) used by empirical mode, increasing in y+.
  const std::vector<std::pair<double, double>>& table() const noexcept { return table_; }

  /// y in [0, pi]; throws DomainError otherwise. warp(pi/2) == pi/2 exactly.
  double operator()(double y) const;

 private:
  double lower_half(double y) const;

  Mode mode_ = Mode::Analytic;
  double eta_ = 0.2;
  std::vector<std::pair<double, double>> table_;
};

/// Model-Q state: an attractor point and an angle relative to the z-axis.
struct SpinState {
  AttractorPoint lambda;
  Angle theta_big;
};

/// Everything a measurement needs besides the state and the orientation.
struct SpinContext {
  SystemParams params;
  StepControl control;
  CaptureCriterion criterion;
  WarpModel warp = WarpModel::analytic(0.2);
};

/// Folded transverse offset of a state relative to an apparatus: the relative
/// angle reduced to [0, pi/2] plus the sign picked up when the mirror
/// y -> pi - y was applied.
struct RelativeOffset {
  double y = 0.0;
  int sign = 1;
};
RelativeOffset relative_offset(Angle theta_big, Angle theta) noexcept;

/// Sp_theta(lambda, Theta) = S(lambda, warp(y)) with y the folded relative
/// angle. Uses evenness to fold to [0, pi] and the mirror symmetry
/// S(X, pi - y) = -S(X, y) to fold to [0, pi/2].
BasinLabel sp_theta(const SpinState& state, Angle theta, const SpinContext& ctx);

struct MeasurementOutcome {
  int sign = 0;         // +1 spin up, -1 spin down, 0 when unresolved
  SpinState post_state; // meaningful only when resolved
  bool resolved = false;
};

/// The measurement map: the post-measurement angle is theta or theta + pi and
/// the attractor point is the phase-zero state at which capture was declared.
MeasurementOutcome measure(const SpinState& state, Angle theta, const SpinContext& ctx);

enum class RhoTheta { Isotropic, Prepared, Superposition };

struct EnsembleSpec {
  RhoTheta rho_theta = RhoTheta::Isotropic;
  Angle phi;     // preparation angle (Prepared, Superposition)
  Angle theta0;  // axis of the two delta masses (Superposition)
  std::size_t n = 1000;
  std::size_t burn_in = 200;  // attractor sampling transient, periods

  void validate() const;
};

double pr_plus_analytic(const EnsembleSpec& spec, Angle theta) noexcept;

/// lambda_i are successive phase-zero samples of one Duffing orbit seeded by
/// `seed`; Theta_i come from rho_theta using the per-member seed
/// derive_seed(seed, i).
std::vector<SpinState> generate_ensemble(const EnsembleSpec& spec, const SystemParams& params,
                                         std::uint64_t seed);

struct EmpiricalProbability {
  double fraction = 0.0;
  double stderr_ = 0.0;  // binomial sqrt(p(1-p)/n_resolved)
  FractionCounts counts;
};

/// Resolved-only fraction of +1 outcomes. Throws DegenerateSample if nothing
/// resolves.
EmpiricalProbability pr_plus_empirical(const EnsembleSpec& spec, Angle theta, const SpinContext& ctx,
                                       std::uint64_t seed, unsigned threads);

/// Same estimate for an already generated ensemble.
EmpiricalProbability pr_plus_empirical(const std::vector<SpinState>& ensemble, Angle theta,
                                       const SpinContext& ctx, unsigned threads);

/// Sp on a rest-state grid: cell (i, j) is S(x_i, warp(y_j)).
GridResult sp_grid_scan(const GridSpec& spec, const SpinContext& ctx, unsigned threads);

}  // namespace riddled
