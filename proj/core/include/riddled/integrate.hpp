#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "riddled/dynamics.hpp"
#include "riddled/error.hpp"

namespace riddled {

enum class StepMode { Fixed, Adaptive };

/// Accuracy knob of every integration. `tol` is the per-step local error
/// tolerance; the tolerance family indexed by n is tol0 / n.
struct StepControl {
  StepMode mode = StepMode::Adaptive;
  double tol = 1e-4;
  double tol0 = 1e-4;
  double h_init = 1e-2;  // also the step of Fixed mode
  double h_min = 1e-10;
  double h_max = 0.5;
  double t_max = 5000.0;  // forcing periods

  double tol_for_index(int n) const;
  /// Copy with tol = tol0 / n.
  StepControl with_tol_index(int n) const;
  void validate() const;
};

enum class IntegrationStatus { Completed, Stopped, StepUnderflow };

const char* to_string(IntegrationStatus status) noexcept;

/// One accepted step with enough data for cubic Hermite dense output.
template <std::size_t N>
struct StepRecord {
  double t0 = 0.0;
  double t1 = 0.0;
  Vec<N> y0{};
  Vec<N> y1{};
  Vec<N> f0{};
  Vec<N> f1{};

  double interpolate(std::size_t i, double t) const noexcept {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }

  Vec<N> interpolate(double t) const noexcept {
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = interpolate(i, t);
    return out;
  }
};

template <std::size_t N>
bool all_finite(const Vec<N>& v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

/// Classical fourth-order Runge-Kutta step.
template <std::size_t N, class Field>
Vec<N> rk4_step(const Field& field, double t, const Vec<N>& y, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "rk4 step must be positive");
  Vec<N> k1{}, k2{}, k3{}, k4{}, tmp{};
  field(t, y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  field(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  field(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
  field(t + h, tmp, k4);
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!all_finite(out)) throw Error(ErrorCode::NonFinite, "rk4 step produced a non-finite state");
  return out;
}

/// Single-trajectory integrator. Adaptive mode is the Dormand-Prince 4(5)
/// pair with local extrapolation; Fixed mode takes RK4 steps of h_init.
/// Each call to advance() performs exactly one accepted step.
template <std::size_t N, class Field>
class Stepper {
 public:
  Stepper(Field field, double t0, const Vec<N>& y0, const StepControl& control)
      : field_(std::move(field)), control_(control), t_(t0), y_(y0), h_(control.h_init) {
    field_(t_, y_, f_);
    ++evaluations_;
  }

  /// Takes one step ending at or before t_limit. Returns false on step-size
  /// underflow (adaptive) and leaves the state untouched in that case.
  bool advance(double t_limit) {
    return control_.mode == StepMode::Fixed ? advance_fixed(t_limit) : advance_adaptive(t_limit);
  }

  double t() const noexcept { return t_; }
  const Vec<N>& y() const noexcept { return y_; }
  const Vec<N>& f() const noexcept { return f_; }
  const StepRecord<N>& record() const noexcept { return record_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  std::uint64_t rejected() const noexcept { return rejected_; }
  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  bool advance_fixed(double t_limit) {
    const double h = std::min(control_.h_init, t_limit - t_);
    if (!(h > 0.0)) return false;
    Vec<N> y1 = rk4_step<N>(field_, t_, y_, h);
    const double t1 = (t_limit - t_ <= control_.h_init) ? t_limit : t_ + h;
    Vec<N> f1{};
    field_(t1, y1, f1);
    evaluations_ += 5;
    commit(t1, y1, f1);
    return true;
  }

  bool advance_adaptive(double t_limit) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double remaining = t_limit - t_;
    if (!(remaining > 0.0)) return false;
    Vec<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, y1{};
    const Vec<N>& k1 = f_;
    double h = std::min(h_, control_.h_max);
    bool retried = false;
    for (;;) {
      bool clamped = false;
      if (h >= remaining) {
        h = remaining;
        clamped = true;
      }
      if (h < control_.h_min && !clamped) return false;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1[i];
      field_(t_ + c2 * h, tmp, k2);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
      field_(t_ + c3 * h, tmp, k3);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      field_(t_ + c4 * h, tmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      field_(t_ + c5 * h, tmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      field_(t_ + h, tmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      const double t1 = clamped ? t_limit : t_ + h;
      field_(t1, y1, k7);
      evaluations_ += 6;

      double err = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double ei =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err = std::max(err, std::abs(ei));
        scale = std::max({scale, std::abs(y_[i]), std::abs(y1[i])});
      }
      const double ratio = err / (control_.tol * (1.0 + scale));
      if (std::isfinite(ratio) && all_finite(y1) && ratio <= 1.0) {
        double factor = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        // A step shortened only to land on t_limit keeps the previous proposal.
        if (!clamped || retried) h_ = std::clamp(h * factor, control_.h_min, control_.h_max);
        commit(t1, y1, k7);
        return true;
      }
      ++rejected_;
      retried = true;
      const double factor =
          std::isfinite(ratio) ? std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 1.0) : 0.2;
      h *= factor;
      if (h < control_.h_min) return false;
    }
  }

  void commit(double t1, const Vec<N>& y1, const Vec<N>& f1) {
    record_.t0 = t_;
    record_.y0 = y_;
    record_.f0 = f_;
    record_.t1 = t1;
    record_.y1 = y1;
    record_.f1 = f1;
    t_ = t1;
    y_ = y1;
    f_ = f1;
    ++accepted_;
  }

  Field field_;
  StepControl control_;
  double t_;
  Vec<N> y_;
  Vec<N> f_{};
  double h_;
  StepRecord<N> record_{};
  std::uint64_t accepted_ = 0;
  std::uint64_t rejected_ = 0;
  std::uint64_t evaluations_ = 1;
};

/// Emits the states at forcing phase zero (t = k * period) reached by each
/// accepted step. The samplers in this library clamp every step to
/// next_time(), so sections are step end points; a crossing strictly inside
/// a step falls back to Hermite interpolation. The starting time never counts
/// as a crossing, even when it is itself at phase zero.
class SectionClock {
 public:
  SectionClock(double t0, double period)
      : period_(period), next_(static_cast<std::int64_t>(std::floor(t0 / period + 1e-9)) + 1) {}

  double next_time() const noexcept { return static_cast<double>(next_) * period_; }
  std::int64_t next_index() const noexcept { return next_; }
  void tick() noexcept { ++next_; }

  template <std::size_t N, class Fn>
  void scan(const StepRecord<N>& rec, Fn&& emit) {
    while (next_time() <= rec.t1) {
      const double ts = next_time();
      emit(ts, ts == rec.t1 ? rec.y1 : rec.interpolate(ts));
      tick();
    }
  }

 private:
  double period_;
  std::int64_t next_;
};

struct IntegrationResult {
  PhaseState state;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::uint64_t steps = 0;
};

using StopCondition = std::function<bool(const PhaseState&)>;

/// Adaptive integration of the full system from `state` for at most
/// control.t_max forcing periods. `stop` is checked before the first step and
/// after every accepted step.
IntegrationResult integrate_adaptive(const PhaseState& state, const SystemParams& params,
                                     const StepControl& control, const StopCondition& stop = {});

/// Integrates an arbitrary field up to t_end (landing on it exactly).
template <std::size_t N, class Field>
IntegrationStatus integrate_field(const Field& field, double& t, Vec<N>& y, double t_end,
                                  const StepControl& control) {
  Stepper<N, Field> stepper(field, t, y, control);
  while (stepper.t() < t_end) {
    if (!stepper.advance(t_end)) {
      t = stepper.t();
      y = stepper.y();
      return IntegrationStatus::StepUnderflow;
    }
  }
  t = stepper.t();
  y = stepper.y();
  return IntegrationStatus::Completed;
}

struct SectionState {
  PhaseState state;
  std::int64_t index = 0;  // k such that t = k * period
};

/// Resumable stroboscopic map of the full system: each next() applies the
/// period map once. Successive next() calls continue the same integration, so
/// two calls equal one orbit of length two exactly.
class PoincareMap {
 public:
  PoincareMap(const PhaseState& initial, const SystemParams& params, const StepControl& control);

  /// Throws Error(StepUnderflow) if the step size collapses.
  SectionState next();

  const Stepper<4, FullField>& stepper() const noexcept { return stepper_; }

 private:
  Stepper<4, FullField> stepper_;
  SectionClock clock_;
  std::vector<SectionState> pending_;
  std::size_t cursor_ = 0;
};

std::vector<SectionState> poincare_orbit(const PhaseState& initial, const SystemParams& params,
                                         const StepControl& control, std::size_t n_sections,
                                         std::size_t burn_in);

/// A point (x, vx) of the Duffing attractor at forcing phase zero.
struct AttractorPoint {
  double x = 0.0;
  double vx = 0.0;
};

/// Default control for attractor sampling: adaptive at tol0.
StepControl sampling_control();

/// Stroboscopic samples of the Duffing subsystem after discarding `burn_in`
/// periods. The initial condition is drawn uniformly from [-1, 1]^2 with the
/// given seed. Throws Error(Unbounded) if |x| exceeds 10.
std::vector<AttractorPoint> sample_attractor(const SystemParams& params, std::size_t n_samples,
                                             std::size_t burn_in, std::uint64_t seed,
                                             const StepControl& control = sampling_control());

/// x values at crossings of vx = 0 (either direction) along a Duffing orbit,
/// after discarding `burn_in` periods.
std::vector<double> sample_rho_x_line(const SystemParams& params, std::size_t n_samples,
                                      std::size_t burn_in, std::uint64_t seed,
                                      const StepControl& control = sampling_control());

/// Statistics of finite-time transverse Lyapunov exponents.
struct LyapunovStats {
  double window = 0.0;
  std::size_t n_windows = 0;
  double h_perp_mean = 0.0;
  double sigma2 = 0.0;
  double d_coeff = 0.0;
  double eta_pred = 0.0;
};

struct LyapunovOptions {
  std::size_t burn_in = 200;  // periods discarded before the first window
  StepControl control = sampling_control();
  /// When set, x is held fixed at this value instead of following the Duffing
  /// orbit (a linear test system with a closed-form exponent).
  bool frozen = false;
  double frozen_x = 0.0;
};

/// Integrates the Duffing orbit together with the linearised transverse
/// system, renormalising the tangent vector after each window of length
/// `window` (time units).
LyapunovStats transverse_lyapunov_stats(const SystemParams& params, double window,
                                        std::size_t n_windows, std::uint64_t seed,
                                        const LyapunovOptions& options = {});

}  // namespace riddled
