#include "riddled/integrate.hpp"

#include <limits>

#include "riddled/rng.hpp"

namespace riddled {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kEscapeRadius = 10.0;

// Duffing orbit plus the transverse tangent vector (dy, dvy).
struct TangentField {
  SystemParams params;
  bool frozen = false;
  double frozen_x = 0.0;

  void operator()(double t, const Vec<4>& s, Vec<4>& ds) const noexcept {
    double x = s[0];
    if (frozen) {
      x = frozen_x;
      ds[0] = 0.0;
      ds[1] = 0.0;
    } else {
      ds[0] = s[1];
      ds[1] = -params.gamma * s[1] + 4.0 * x * (1.0 - x * x) + params.p * std::sin(params.omega * t);
    }
    const auto c = transverse_jacobian(x, params);
    ds[2] = s[3];
    ds[3] = c.damping * s[3] + c.stiffness * s[2];
  }
};

Vec<2> random_duffing_start(std::uint64_t seed) {
  Xoshiro256 rng(seed);
  const double x = rng.uniform(-1.0, 1.0);
  const double vx = rng.uniform(-1.0, 1.0);
  return {x, vx};
}

void check_bounded(const Vec<2>& s) {
  if (!(std::abs(s[0]) <= kEscapeRadius))
    throw Error(ErrorCode::Unbounded, "Duffing orbit left |x| <= 10");
}

}  // namespace

double StepControl::tol_for_index(int n) const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tolerance index must be >= 1");
  return tol0 / static_cast<double>(n);
}

StepControl StepControl::with_tol_index(int n) const {
  StepControl out = *this;
  out.tol = tol_for_index(n);
  return out;
}

void StepControl::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
  };
  require(tol > 0.0 && tol0 > 0.0, "tolerances must be positive");
  require(h_min > 0.0 && h_min <= h_init && h_init <= h_max, "need 0 < h_min <= h_init <= h_max");
  require(t_max > 0.0, "t_max must be positive");
}

const char* to_string(IntegrationStatus status) noexcept {
  switch (status) {
    case IntegrationStatus::Completed: return "Completed";
    case IntegrationStatus::Stopped: return "Stopped";
    case IntegrationStatus::StepUnderflow: return "StepUnderflow";
  }
  return "Unknown";
}

IntegrationResult integrate_adaptive(const PhaseState& state, const SystemParams& params,
                                     const StepControl& control, const StopCondition& stop) {
  control.validate();
  IntegrationResult result{state, IntegrationStatus::Completed, 0};
  if (stop && stop(state)) {
    result.status = IntegrationStatus::Stopped;
    return result;
  }
  const double t_end = state.t + control.t_max * params.period();
  Stepper<4, FullField> stepper(FullField{params}, state.t, state.vec(), control);
  while (stepper.t() < t_end) {
    if (!stepper.advance(t_end)) {
      result.status = IntegrationStatus::StepUnderflow;
      break;
    }
    result.state = PhaseState::from(stepper.t(), stepper.y());
    if (stop && stop(result.state)) {
      result.status = IntegrationStatus::Stopped;
      break;
    }
  }
  result.state = PhaseState::from(stepper.t(), stepper.y());
  result.steps = stepper.accepted();
  return result;
}

PoincareMap::PoincareMap(const PhaseState& initial, const SystemParams& params,
                         const StepControl& control)
    : stepper_(FullField{params}, initial.t, initial.vec(), control),
      clock_(initial.t, params.period()) {}

SectionState PoincareMap::next() {
  while (cursor_ >= pending_.size()) {
    pending_.clear();
    cursor_ = 0;
    if (!stepper_.advance(clock_.next_time()))
      throw Error(ErrorCode::StepUnderflow, "step size underflow during section sampling");
    if (!all_finite(stepper_.y()))
      throw Error(ErrorCode::NonFinite, "non-finite state during section sampling");
    const std::int64_t first = clock_.next_index();
    clock_.scan(stepper_.record(), [&](double ts, const Vec<4>& s) {
      pending_.push_back({PhaseState::from(ts, s), first + static_cast<std::int64_t>(pending_.size())});
    });
  }
  return pending_[cursor_++];
}

std::vector<SectionState> poincare_orbit(const PhaseState& initial, const SystemParams& params,
                                         const StepControl& control, std::size_t n_sections,
                                         std::size_t burn_in) {
  if (n_sections < 1) throw Error(ErrorCode::InvalidArgument, "n_sections must be >= 1");
  control.validate();
  PoincareMap map(initial, params, control);
  for (std::size_t i = 0; i < burn_in; ++i) map.next();
  std::vector<SectionState> out;
  out.reserve(n_sections);
  for (std::size_t i = 0; i < n_sections; ++i) out.push_back(map.next());
  return out;
}

StepControl sampling_control() {
  StepControl c;
  c.tol = c.tol0;
  return c;
}

std::vector<AttractorPoint> sample_attractor(const SystemParams& params, std::size_t n_samples,
                                             std::size_t burn_in, std::uint64_t seed,
                                             const StepControl& control) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  params.validate();
  control.validate();
  Stepper<2, DuffingField> stepper(DuffingField{params}, 0.0, random_duffing_start(seed), control);
  SectionClock clock(0.0, params.period());
  std::vector<AttractorPoint> out;
  out.reserve(n_samples);
  std::size_t seen = 0;
  while (out.size() < n_samples) {
    if (!stepper.advance(clock.next_time()))
      throw Error(ErrorCode::StepUnderflow, "step size underflow during attractor sampling");
    check_bounded(stepper.y());
    clock.scan(stepper.record(), [&](double, const Vec<2>& s) {
      if (seen++ >= burn_in && out.size() < n_samples) out.push_back({s[0], s[1]});
    });
  }
  return out;
}

std::vector<double> sample_rho_x_line(const SystemParams& params, std::size_t n_samples,
                                      std::size_t burn_in, std::uint64_t seed,
                                      const StepControl& control) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  params.validate();
  control.validate();
  Stepper<2, DuffingField> stepper(DuffingField{params}, 0.0, random_duffing_start(seed), control);
  const double t_skip = static_cast<double>(burn_in) * params.period();
  std::vector<double> out;
  out.reserve(n_samples);
  while (out.size() < n_samples) {
    if (!stepper.advance(kInfinity))
      throw Error(ErrorCode::StepUnderflow, "step size underflow during line sampling");
    check_bounded(stepper.y());
    const auto& rec = stepper.record();
    if (rec.t0 < t_skip) continue;
    const double v0 = rec.y0[1];
    const double v1 = rec.y1[1];
    if (!((v0 < 0.0 && v1 >= 0.0) || (v0 > 0.0 && v1 <= 0.0))) continue;
    // Bisection on the Hermite interpolant of vx.
    double lo = rec.t0;
    double hi = rec.t1;
    for (int it = 0; it < 80 && lo < hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double vm = rec.interpolate(1, mid);
      if ((vm < 0.0) == (v0 < 0.0) && vm != 0.0)
        lo = mid;
      else
        hi = mid;
    }
    out.push_back(rec.interpolate(0, hi));
  }
  return out;
}

LyapunovStats transverse_lyapunov_stats(const SystemParams& params, double window,
                                        std::size_t n_windows, std::uint64_t seed,
                                        const LyapunovOptions& options) {
  params.validate();
  options.control.validate();
  if (!(window >= params.period() * (1.0 - 1e-12)))
    throw Error(ErrorCode::InvalidArgument, "window must be at least one forcing period");
  if (n_windows < 2) throw Error(ErrorCode::InvalidArgument, "need at least two windows");

  double t = 0.0;
  Vec<2> duffing = random_duffing_start(seed);
  if (options.frozen) {
    duffing = {options.frozen_x, 0.0};
  } else {
    const double t_burn = static_cast<double>(options.burn_in) * params.period();
    if (t_burn > 0.0 &&
        integrate_field<2>(DuffingField{params}, t, duffing, t_burn, options.control) !=
            IntegrationStatus::Completed)
      throw Error(ErrorCode::StepUnderflow, "step size underflow during burn-in");
    check_bounded(duffing);
  }

  const TangentField field{params, options.frozen, options.frozen_x};
  Vec<4> s{duffing[0], duffing[1], 1.0, 0.0};
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n_windows; ++k) {
    const double t_end = t + window;
    if (integrate_field<4>(field, t, s, t_end, options.control) != IntegrationStatus::Completed)
      throw Error(ErrorCode::StepUnderflow, "step size underflow in tangent integration");
    if (!all_finite(s)) throw Error(ErrorCode::NonFinite, "non-finite tangent state");
    check_bounded({s[0], s[1]});
    const double norm = std::hypot(s[2], s[3]);
    const double exponent = std::log(norm) / window;
    s[2] /= norm;
    s[3] /= norm;
    const double delta = exponent - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (exponent - mean);
  }

  LyapunovStats stats;
  stats.window = window;
  stats.n_windows = n_windows;
  stats.h_perp_mean = mean;
  stats.sigma2 = m2 / static_cast<double>(n_windows - 1);
  stats.d_coeff = stats.sigma2 * window / 2.0;
  stats.eta_pred = stats.d_coeff > 0.0 ? std::abs(mean) / stats.d_coeff : 0.0;
  return stats;
}

}  // namespace riddled
