#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace riddled {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <std::size_t N>
using Vec = std::array<double, N>;

/// Constants of the forced twin-well system with a periodic transverse well.
///
/// Defaults are the chaotic Duffing parameters (gamma, p, omega) together with
/// a transverse offset slightly above the critical value, where the two
/// attractors at y = 0 and y = pi have intertwined basins.
struct SystemParams {
  double gamma = 0.05;
  double p = 2.3;
  double omega = 3.5;
  double epsilon = 0.01;
  double xbar = 1.81;

  /// Offset at which the mean transverse exponent changes sign for the
  /// default (gamma, p, omega). Fixed property of the parameter set.
  static constexpr double xbar_cr = 1.7887;

  double period() const noexcept { return kTwoPi / omega; }

  /// Throws riddled::Error(InvalidArgument) unless gamma, omega, epsilon > 0
  /// and all fields are finite.
  void validate() const;
};

/// Instantaneous state. `y` and `vy` are in rescaled transverse coordinates
/// (physical y divided by epsilon) and `y` is never wrapped.
struct PhaseState {
  double t = 0.0;
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  Vec<4> vec() const noexcept { return {x, vx, y, vy}; }
  static PhaseState from(double t, const Vec<4>& s) noexcept { return {t, s[0], s[1], s[2], s[3]}; }
  bool finite() const noexcept;
};

/// Duffing twin-well potential (1 - x^2)^2.
double potential_vd(double x) noexcept;

/// Intertwined-basin potential in rescaled y:
/// (1 - x^2)^2 + epsilon^2 (x + xbar) sin^2(y).
double potential_vq(double x, double y, const SystemParams& params) noexcept;

/// Vector field of the coupled system in rescaled coordinates. Component order
/// matches PhaseState::vec(): (dx, dvx, dy, dvy).
struct FullField {
  SystemParams params;

  void operator()(double t, const Vec<4>& s, Vec<4>& ds) const noexcept {
    const double x = s[0];
    const double vx = s[1];
    const double sy = std::sin(s[2]);
    const double eps2 = params.epsilon * params.epsilon;
    ds[0] = vx;
    ds[1] = -params.gamma * vx + 4.0 * x * (1.0 - x * x) - eps2 * (sy * sy) +
            params.p * std::sin(params.omega * t);
    ds[2] = s[3];
    ds[3] = -params.gamma * s[3] - (x + params.xbar) * std::sin(2.0 * s[2]);
  }
};

/// FullField written in the transverse offset u = y - pi/2 from the repelling
/// manifold, component order (x, vx, u, vu). The map (u, vu) -> (-u, -vu) is
/// an exact symmetry of this field in floating point (odd and even parts are
/// evaluated on |u|), so mirrored initial conditions y and pi - y produce
/// bit-for-bit mirrored trajectories.
struct CenteredField {
  SystemParams params;

  void operator()(double t, const Vec<4>& s, Vec<4>& ds) const noexcept {
    const double x = s[0];
    const double vx = s[1];
    const double au = std::abs(s[2]);
    const double cu = std::cos(au);
    const double s2 = std::sin(2.0 * au);
    const double sin2u = s[2] < 0.0 ? -s2 : s2;
    const double eps2 = params.epsilon * params.epsilon;
    ds[0] = vx;
    ds[1] = -params.gamma * vx + 4.0 * x * (1.0 - x * x) - eps2 * (cu * cu) +
            params.p * std::sin(params.omega * t);
    ds[2] = s[3];
    ds[3] = -params.gamma * s[3] + (x + params.xbar) * sin2u;
  }
};

/// The decoupled Duffing oscillator on (x, vx).
struct DuffingField {
  SystemParams params;

  void operator()(double t, const Vec<2>& s, Vec<2>& ds) const noexcept {
    const double x = s[0];
    const double vx = s[1];
    ds[0] = vx;
    ds[1] = -params.gamma * vx + 4.0 * x * (1.0 - x * x) + params.p * std::sin(params.omega * t);
  }
};

Vec<4> rhs_full(const PhaseState& state, const SystemParams& params) noexcept;
Vec<2> rhs_duffing(double t, double x, double vx, const SystemParams& params) noexcept;

/// Linearisation of the transverse equation about y = 0:
///   d(dy)/dt = vy,  d(vy)/dt = damping * vy + stiffness * dy.
struct TransverseCoefficients {
  double damping;
  double stiffness;
};

TransverseCoefficients transverse_jacobian(double x, const SystemParams& params) noexcept;

}  // namespace riddled
