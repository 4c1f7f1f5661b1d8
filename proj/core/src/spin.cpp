#include "riddled/spin.hpp"

#include <algorithm>
#include <cmath>

#include "riddled/error.hpp"
#include "riddled/parallel.hpp"
#include "riddled/rng.hpp"

namespace riddled {

namespace {

constexpr double kHalfPi = kPi / 2.0;
constexpr std::uint64_t kHalfTurn = std::uint64_t{1} << 63;
constexpr std::uint64_t kQuarterTurn = std::uint64_t{1} << 62;

double half_angle_cos2(double a) {
  const double c = std::cos(0.5 * a);
  return c * c;
}

}  // namespace

Angle Angle::from_turns(double turns) {
  if (!std::isfinite(turns)) throw Error(ErrorCode::NonFinite, "angle is not finite");
  double f = turns - std::floor(turns);  // [0, 1]
  const double scaled = std::ldexp(f, 64);
  if (!(scaled < 0x1.0p64)) return Angle(0);
  return Angle(static_cast<std::uint64_t>(scaled));
}

Angle Angle::from_radians(double radians) {
  if (!std::isfinite(radians)) throw Error(ErrorCode::NonFinite, "angle is not finite");
  return from_turns(radians / kTwoPi);
}

Angle Angle::pi_fraction(long long num, long long den) {
  if (den < 1 || den > (1LL << 31)) throw Error(ErrorCode::InvalidArgument, "angle denominator out of range");
  long long k = num % (2 * den);
  if (k < 0) k += 2 * den;
  const auto u = static_cast<std::uint64_t>(k);
  const auto d = static_cast<std::uint64_t>(den);
  return Angle(u * (kHalfTurn / d) + (u * (kHalfTurn % d) + d / 2) / d);
}

double Angle::radians() const noexcept { return std::ldexp(static_cast<double>(raw_), -64) * kTwoPi; }

WarpModel WarpModel::analytic(double eta) {
  if (!(eta > 0.0 && std::isfinite(eta))) throw Error(ErrorCode::InvalidArgument, "warp eta must be positive");
  WarpModel w;
  w.mode_ = Mode::Analytic;
  w.eta_ = eta;
  return w;
}

WarpModel WarpModel::empirical(const FractionCurve& curve, double tail_eta) {
  if (!(tail_eta > 0.0 && std::isfinite(tail_eta)))
    throw Error(ErrorCode::InvalidArgument, "warp tail exponent must be positive");

  struct Block {
    double log_y_sum;
    double weight;
    double value_sum;  // weighted
    std::size_t members;
    double value() const { return value_sum / weight; }
  };
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t j = 0; j < curve.y.size(); ++j) {
    const double y = curve.y[j];
    if (y > 0.0 && y < kHalfPi && curve.counts[j].resolved() > 0) order.emplace_back(y, j);
  }
  std::sort(order.begin(), order.end());

  // Pool adjacent violators so L is strictly decreasing in y.
  std::vector<Block> blocks;
  for (const auto& [y, j] : order) {
    const double w = static_cast<double>(curve.counts[j].resolved());
    blocks.push_back({std::log(y), w, w * curve.fraction[j], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value() <= blocks.back().value()) {
      Block b = blocks.back();
      blocks.pop_back();
      auto& a = blocks.back();
      a.log_y_sum += b.log_y_sum;
      a.weight += b.weight;
      a.value_sum += b.value_sum;
      a.members += b.members;
    }
  }

  WarpModel w;
  w.mode_ = Mode::Empirical;
  w.eta_ = tail_eta;
  for (const auto& b : blocks) {
    const double L = b.value();
    if (!(L > 0.5 && L < 1.0)) continue;
    w.table_.emplace_back(std::exp(b.log_y_sum / static_cast<double>(b.members)), L);
  }
  if (w.table_.empty())
    throw Error(ErrorCode::InsufficientData, "no usable fraction points in (1/2, 1) for the warp table");
  return w;
}

double WarpModel::lower_half(double y) const {
  if (y == kHalfPi) return kHalfPi;
  const double s = std::sin(0.5 * y);
  const double q = s * s;  // 1 - cos^2(y/2), the target value of 1 - L
  if (q <= 0.0) return 0.0;
  if (q >= 0.5) return kHalfPi;

  if (mode_ == Mode::Analytic) return std::min(kHalfPi, kHalfPi * std::pow(2.0 * q, 1.0 / eta_));

  // 1 - L is increasing along the table; interpolate log y against log(1 - L).
  const auto& t = table_;
  const double q0 = 1.0 - t.front().second;
  if (q <= q0) return t.front().first * std::pow(q / q0, 1.0 / eta_);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double qa = 1.0 - t[k - 1].second;
    const double qb = 1.0 - t[k].second;
    if (q <= qb) {
      const double s_frac = std::log(q / qa) / std::log(qb / qa);
      return std::exp(std::log(t[k - 1].first) + s_frac * (std::log(t[k].first) - std::log(t[k - 1].first)));
    }
  }
  const double qa = 1.0 - t.back().second;
  const double s_frac = std::log(q / qa) / std::log(0.5 / qa);
  return std::min(kHalfPi, std::exp(std::log(t.back().first) + s_frac * (std::log(kHalfPi) - std::log(t.back().first))));
}

double WarpModel::operator()(double y) const {
  if (!(y >= 0.0 && y <= kPi)) throw Error(ErrorCode::DomainError, "warp needs y in [0, pi]");
  if (y <= kHalfPi) return lower_half(y);
  return kPi - lower_half(kPi - y);
}

RelativeOffset relative_offset(Angle theta_big, Angle theta) noexcept {
  std::uint64_t d = (theta_big - theta).raw();
  if (d > kHalfTurn) d = ~d + 1;  // evenness: y -> -y
  RelativeOffset out;
  if (d > kQuarterTurn) {         // mirror: y -> pi - y flips the label
    d = kHalfTurn - d;
    out.sign = -1;
  }
  out.y = Angle::from_raw(d).radians();
  return out;
}

namespace {

Classification classify_relative(const SpinState& state, Angle theta, const SpinContext& ctx, int& sign) {
  const auto off = relative_offset(state.theta_big, theta);
  sign = off.sign;
  return classify_state(state.lambda.x, state.lambda.vx, ctx.warp(off.y), ctx.params, ctx.control,
                        ctx.criterion);
}

}  // namespace

BasinLabel sp_theta(const SpinState& state, Angle theta, const SpinContext& ctx) {
  int sign = 1;
  const auto c = classify_relative(state, theta, ctx, sign);
  return sign < 0 ? negate(c.label) : c.label;
}

MeasurementOutcome measure(const SpinState& state, Angle theta, const SpinContext& ctx) {
  int sign = 1;
  const auto c = classify_relative(state, theta, ctx, sign);
  MeasurementOutcome out;
  if (c.label == BasinLabel::Unresolved) return out;
  out.resolved = true;
  out.sign = sign * to_int(c.label);
  // The mirror y -> pi - y leaves (x, vx) untouched, so the captured
  // section state serves for either sign.
  out.post_state.lambda = {c.final_state.x, c.final_state.vx};
  out.post_state.theta_big = out.sign > 0 ? theta : theta + Angle::half_turn();
  return out;
}

void EnsembleSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "ensemble needs n >= 1");
}

double pr_plus_analytic(const EnsembleSpec& spec, Angle theta) noexcept {
  switch (spec.rho_theta) {
    case RhoTheta::Isotropic: return 0.5;
    case RhoTheta::Prepared: return half_angle_cos2((spec.phi - theta).radians());
    case RhoTheta::Superposition: {
      const double w = half_angle_cos2((spec.phi - spec.theta0).radians());
      return w * half_angle_cos2((spec.theta0 - theta).radians()) +
             (1.0 - w) * half_angle_cos2((spec.theta0 + Angle::half_turn() - theta).radians());
    }
  }
  return 0.5;
}

std::vector<SpinState> generate_ensemble(const EnsembleSpec& spec, const SystemParams& params,
                                         std::uint64_t seed) {
  spec.validate();
  const auto lambdas = sample_attractor(params, spec.n, spec.burn_in, seed);
  const double w = half_angle_cos2((spec.phi - spec.theta0).radians());
  std::vector<SpinState> out(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Xoshiro256 rng(derive_seed(seed, i));
    out[i].lambda = lambdas[i];
    switch (spec.rho_theta) {
      case RhoTheta::Isotropic: out[i].theta_big = Angle::from_raw(rng()); break;
      case RhoTheta::Prepared: out[i].theta_big = spec.phi; break;
      case RhoTheta::Superposition:
        out[i].theta_big = rng.uniform() < w ? spec.theta0 : spec.theta0 + Angle::half_turn();
        break;
    }
  }
  return out;
}

EmpiricalProbability pr_plus_empirical(const std::vector<SpinState>& ensemble, Angle theta,
                                       const SpinContext& ctx, unsigned threads) {
  if (ensemble.empty()) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
  std::vector<BasinLabel> labels(ensemble.size());
  parallel_for(ensemble.size(), threads, [&](std::size_t i) { labels[i] = sp_theta(ensemble[i], theta, ctx); });
  EmpiricalProbability out;
  for (auto l : labels) {
    switch (l) {
      case BasinLabel::CPlus: ++out.counts.n_plus; break;
      case BasinLabel::CMinus: ++out.counts.n_minus; break;
      case BasinLabel::Unresolved: ++out.counts.n_unresolved; break;
    }
  }
  const auto n = out.counts.resolved();
  if (n == 0) throw Error(ErrorCode::DegenerateSample, "no ensemble member resolved");
  out.fraction = static_cast<double>(out.counts.n_plus) / static_cast<double>(n);
  out.stderr_ = std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(n));
  return out;
}

EmpiricalProbability pr_plus_empirical(const EnsembleSpec& spec, Angle theta, const SpinContext& ctx,
                                       std::uint64_t seed, unsigned threads) {
  return pr_plus_empirical(generate_ensemble(spec, ctx.params, seed), theta, ctx, threads);
}

GridResult sp_grid_scan(const GridSpec& spec, const SpinContext& ctx, unsigned threads) {
  spec.validate();
  ctx.params.validate();
  const StepControl ctl = ctx.control.with_tol_index(spec.tol_index);
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
    double y = canonical_transverse(spec.y_at(j));
    int sign = 1;
    if (y > kHalfPi) {
      y = kPi - y;
      sign = -1;
    }
    const auto c = classify_state(spec.x_at(i), 0.0, ctx.warp(y), ctx.params, ctl, spec.criterion);
    result.labels[k] = sign < 0 ? negate(c.label) : c.label;
    result.t_end[k] = c.t_end;
    underflow[k] = c.underflow ? 1 : 0;
  });
  for (std::size_t k = 0; k < n; ++k) {
    if (result.labels[k] == BasinLabel::Unresolved) ++result.unresolved;
    if (underflow[k]) ++result.underflows;
  }
  for (std::size_t j = 0; j < spec.ny; ++j)
    if (canonical_transverse(spec.y_at(j)) == kHalfPi) result.cells_on_repelling_manifold += spec.nx;
  return result;
}

}  // namespace riddled
