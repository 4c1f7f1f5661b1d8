#include "riddled/basin.hpp"

#include <algorithm>
#include <cmath>

#include "riddled/error.hpp"
#include "riddled/parallel.hpp"

namespace riddled {

const char* to_string(BasinLabel l) noexcept {
  switch (l) {
    case BasinLabel::CPlus: return "CPlus";
    case BasinLabel::CMinus: return "CMinus";
    case BasinLabel::Unresolved: return "Unresolved";
  }
  return "Unknown";
}

std::pair<double, double> CaptureCriterion::radii(double d0) const noexcept {
  if (!(relative_delta > 0.0) || !(d0 > 0.0)) return {delta_y, delta_v};
  const double dy = std::max(std::min(delta_y, relative_delta * d0), std::min(min_delta_y, delta_y));
  return {dy, delta_v * (dy / delta_y)};
}

void CaptureCriterion::validate() const {
  if (!(delta_y > 0.0 && delta_v > 0.0 && t_max_periods > 0.0 && k_sections >= 1))
    throw Error(ErrorCode::InvalidArgument, "capture criterion fields must be positive");
  if (!(relative_delta >= 0.0 && min_delta_y > 0.0))
    throw Error(ErrorCode::InvalidArgument, "relative capture radius must be >= 0 and its floor > 0");
}

double folded_distance_to_zero(double y) noexcept {
  // Even in y by construction: fold(-y) == fold(y) bit for bit.
  const double a = std::fmod(std::abs(y), kTwoPi);
  return a > kPi ? kTwoPi - a : a;
}

double folded_distance_to_pi(double y) noexcept { return folded_distance_to_zero(y - kPi); }

double canonical_transverse(double y) noexcept {
  // Same fold as folded_distance_to_zero, so y and -y land on the same value.
  return folded_distance_to_zero(y);
}

Classification classify_state(double x, double vx, double y, const SystemParams& params,
                              const StepControl& control, const CaptureCriterion& criterion) {
  constexpr double kHalfPi = kPi / 2.0;
  Classification out;
  const double t_end = criterion.t_max_periods * params.period();
  const double u0 = canonical_transverse(y) - kHalfPi;
  // Same radii for u0 and -u0, so the mirror symmetry stays exact.
  const auto [delta_y, delta_v] = criterion.radii(kHalfPi - std::abs(u0));
  Stepper<4, CenteredField> stepper(CenteredField{params}, 0.0, {x, vx, u0, 0.0}, control);
  SectionClock clock(0.0, params.period());
  int near_plus = 0;
  int near_minus = 0;
  bool decided = false;
  auto visit = [&](double ts, const Vec<4>& s) {
    if (decided) return;
    const bool slow = std::abs(s[3]) < delta_v;
    // u + pi/2 and u - pi/2 swap exactly under u -> -u.
    const bool at_plus = slow && folded_distance_to_zero(s[2] + kHalfPi) < delta_y;
    const bool at_minus = slow && folded_distance_to_zero(s[2] - kHalfPi) < delta_y;
    near_plus = at_plus ? near_plus + 1 : 0;
    near_minus = at_minus ? near_minus + 1 : 0;
    if (near_plus >= criterion.k_sections || near_minus >= criterion.k_sections) {
      out.label = near_plus >= criterion.k_sections ? BasinLabel::CPlus : BasinLabel::CMinus;
      out.t_end = ts;
      out.final_state = {ts, s[0], s[1], s[2] + kHalfPi, s[3]};
      decided = true;
    }
  };
  while (!decided && stepper.t() < t_end) {
    if (!stepper.advance(std::min(t_end, clock.next_time())) || !all_finite(stepper.y())) {
      out.underflow = true;
      break;
    }
    clock.scan(stepper.record(), visit);
  }
  if (!decided) {
    const auto& s = stepper.y();
    out.t_end = stepper.t();
    out.final_state = {stepper.t(), s[0], s[1], s[2] + kHalfPi, s[3]};
  }
  return out;
}

BasinLabel classify_rest(double x0, double y0, const SystemParams& params,
                         const StepControl& control, const CaptureCriterion& criterion) {
  return classify_state(x0, 0.0, y0, params, control, criterion).label;
}

BasinLabel classify_from_state(const AttractorPoint& X, double y, const SystemParams& params,
                               const StepControl& control, const CaptureCriterion& criterion) {
  return classify_state(X.x, X.vx, y, params, control, criterion).label;
}

double GridSpec::x_at(std::size_t i) const noexcept {
  if (centered) return x_min + (x_max - x_min) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
  if (nx == 1) return x_min;
  return x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double GridSpec::y_at(std::size_t j) const noexcept {
  if (centered) return y_min + (y_max - y_min) * (static_cast<double>(j) + 0.5) / static_cast<double>(ny);
  if (ny == 1) return y_min;
  return y_min + (y_max - y_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 1");
  if (!(x_max >= x_min && y_max >= y_min)) throw Error(ErrorCode::InvalidArgument, "empty grid range");
  if (tol_index < 1) throw Error(ErrorCode::InvalidArgument, "tolerance index must be >= 1");
  criterion.validate();
}

GridResult grid_scan(const GridSpec& spec, const SystemParams& params, const StepControl& control,
                     unsigned threads) {
  spec.validate();
  params.validate();
  const StepControl ctl = control.with_tol_index(spec.tol_index);
  ctl.validate();
  GridResult result;
  result.spec = spec;
  const std::size_t n = spec.nx * spec.ny;
  result.labels.assign(n, BasinLabel::Unresolved);
  result.t_end.assign(n, 0.0);
  std::vector<char> underflow(n, 0);
  parallel_for(n, threads, [&](std::size_t k) {
    const std::size_t i = k % spec.nx;
    const std::size_t j = k / spec.nx;
    const auto c = classify_state(spec.x_at(i), 0.0, spec.y_at(j), params, ctl, spec.criterion);
    result.labels[k] = c.label;
    result.t_end[k] = c.t_end;
    underflow[k] = c.underflow ? 1 : 0;
  });
  for (std::size_t k = 0; k < n; ++k) {
    if (result.labels[k] == BasinLabel::Unresolved) ++result.unresolved;
    if (underflow[k]) ++result.underflows;
  }
  for (std::size_t j = 0; j < spec.ny; ++j)
    if (spec.y_at(j) == kPi / 2.0) result.cells_on_repelling_manifold += spec.nx;
  return result;
}

std::size_t TolScanResult::unresolved() const noexcept {
  std::size_t u = 0;
  for (auto l : labels) u += l == BasinLabel::Unresolved ? 1 : 0;
  return u;
}

TolScanResult tol_scan(std::size_t x_points, double y0, int n_max, const SystemParams& params,
                       const StepControl& control, const CaptureCriterion& criterion,
                       unsigned threads) {
  if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "tol scan needs n_max >= 2");
  if (x_points < 1) throw Error(ErrorCode::InvalidArgument, "tol scan needs x points");
  params.validate();
  criterion.validate();
  TolScanResult out;
  out.y0 = y0;
  out.n_max = n_max;
  out.x.resize(x_points);
  for (std::size_t i = 0; i < x_points; ++i)
    out.x[i] = -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(x_points);
  const std::size_t total = x_points * static_cast<std::size_t>(n_max);
  out.labels.assign(total, BasinLabel::Unresolved);
  parallel_for(total, threads, [&](std::size_t k) {
    const int n = static_cast<int>(k / x_points) + 1;
    const std::size_t i = k % x_points;
    out.labels[k] = classify_rest(out.x[i], y0, params, control.with_tol_index(n), criterion);
  });
  return out;
}

}  // namespace riddled
