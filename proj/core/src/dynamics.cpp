#include "riddled/dynamics.hpp"

#include <string>

#include "riddled/error.hpp"

namespace riddled {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

void SystemParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
  };
  require(std::isfinite(gamma) && std::isfinite(p) && std::isfinite(omega) &&
              std::isfinite(epsilon) && std::isfinite(xbar),
          "system parameters must be finite");
  require(gamma > 0.0, "gamma must be positive");
  require(omega > 0.0, "omega must be positive");
  require(epsilon > 0.0, "epsilon must be positive");
}

bool PhaseState::finite() const noexcept {
  return std::isfinite(t) && std::isfinite(x) && std::isfinite(vx) && std::isfinite(y) &&
         std::isfinite(vy);
}

double potential_vd(double x) noexcept {
  const double a = 1.0 - x * x;
  return a * a;
}

double potential_vq(double x, double y, const SystemParams& params) noexcept {
  const double s = std::sin(y);
  return potential_vd(x) + params.epsilon * params.epsilon * (x + params.xbar) * (s * s);
}

Vec<4> rhs_full(const PhaseState& state, const SystemParams& params) noexcept {
  Vec<4> ds{};
  FullField{params}(state.t, state.vec(), ds);
  return ds;
}

Vec<2> rhs_duffing(double t, double x, double vx, const SystemParams& params) noexcept {
  Vec<2> ds{};
  DuffingField{params}(t, {x, vx}, ds);
  return ds;
}

TransverseCoefficients transverse_jacobian(double x, const SystemParams& params) noexcept {
  return {-params.gamma, -2.0 * (x + params.xbar)};
}

}  // namespace riddled
