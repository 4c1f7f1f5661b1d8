#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "riddled/spin.hpp"

namespace riddled {

/// Two particles from a zero angular momentum source: same lambda, Theta
/// offset by exactly pi.
struct EprPair {
  SpinState first;
  SpinState second;
};

/// First members follow generate_ensemble(spec); `spec.n` pairs.
std::vector<EprPair> generate_pairs(const EnsembleSpec& spec, const SystemParams& params, std::uint64_t seed);

struct CorrelationEstimate {
  double c = 0.0;
  double stderr_ = 0.0;           // sample standard deviation / sqrt(n_resolved)
  std::size_t n_pairs = 0;
  std::size_t n_resolved = 0;     // both stations resolved
  std::size_t form_mismatches = 0;  // pairs where the two product forms disagree
};

/// C = (1/N) sum Sp_a(first) * Sp_b(second) over pairs resolved at both
/// stations. The equivalent form -(1/N) sum Sp_a(first) * Sp_b(first) is
/// evaluated alongside and disagreements are counted. Station A uses
/// `ctx_a`, station B `ctx_b` (they may differ in tolerance).
CorrelationEstimate correlation(const std::vector<EprPair>& pairs, Angle theta_a, Angle theta_b,
                                const SpinContext& ctx_a, const SpinContext& ctx_b, unsigned threads);

inline CorrelationEstimate correlation(const std::vector<EprPair>& pairs, Angle theta_b, const SpinContext& ctx,
                                       unsigned threads) {
  return correlation(pairs, Angle{}, theta_b, ctx, ctx, threads);
}

/// Correlations at the actual and at a counterfactual station-B orientation,
/// both computed on the same pairs.
struct CounterfactualPair {
  CorrelationEstimate actual;
  CorrelationEstimate counterfactual;
};
CounterfactualPair counterfactual_correlation(const std::vector<EprPair>& pairs, Angle theta_actual,
                                              Angle theta_counterfactual, const SpinContext& ctx_actual,
                                              const SpinContext& ctx_counterfactual, unsigned threads);

/// |c_phi - c_theta| - c_theta_minus_phi; at most 1 for shared deterministic
/// sign triples.
double bell_lhs(double c_phi, double c_theta, double c_theta_minus_phi) noexcept;

double quantum_correlation(double theta) noexcept;

/// Correlation at (0, theta) on a fresh ensemble seeded by `seed`.
CorrelationEstimate second_ensemble_correlation(const EnsembleSpec& spec, Angle theta, const SpinContext& ctx,
                                                std::uint64_t seed, unsigned threads);

/// Sp of every first member at every orientation: signs[i * angles.size() + k].
struct SharedSigns {
  std::vector<Angle> angles;
  std::size_t n_pairs = 0;
  std::vector<int> signs;  // +1, -1, 0 for unresolved

  int at(std::size_t pair, std::size_t angle) const { return signs[pair * angles.size() + angle]; }
};
SharedSigns shared_signs(const std::vector<EprPair>& pairs, const std::vector<Angle>& angles,
                         const SpinContext& ctx, unsigned threads);

/// Bell combination from one shared list of sign triples (Sp_0, Sp_phi,
/// Sp_theta), restricted to pairs resolved at all three orientations. Station
/// B's outcome on the second particle is -Sp of the first, so
/// C(a, b) = -(1/N) sum Sp_a Sp_b.
struct SharedBell {
  double c_phi = 0.0;
  double c_theta = 0.0;
  double c_theta_minus_phi = 0.0;
  double lhs = 0.0;
  std::size_t n_triples = 0;
};
SharedBell shared_bell(const SharedSigns& signs, std::size_t i_zero, std::size_t i_phi, std::size_t i_theta);

/// k * pi / 12 for k = 0..12, rounded to the nearest binary angle; 0 and pi
/// are exact.
std::vector<Angle> default_bell_angles();

struct BellRow {
  double phi = 0.0;
  double theta = 0.0;
  SharedBell shared;
  double lhs_distinct = 0.0;
  double lhs_quantum = 0.0;
};

struct CorrelationReport {
  std::vector<double> angles;
  std::vector<CorrelationEstimate> shared;    // C(0, theta) on the shared pair list
  std::vector<CorrelationEstimate> distinct;  // one fresh ensemble per angle
  std::vector<double> quantum;
  std::vector<BellRow> bell;                  // (phi, theta) = (a, 2a) with 2a <= pi
  double max_shared_lhs = 0.0;                // over every ordered angle pair
  std::size_t shared_combinations = 0;
  int tol_index = 1;
  std::size_t n_pairs = 0;
  bool distinct_mode_uses_shared_triples = false;
};

/// Full report over `angles`. The first angle must be 0. Bell rows use every
/// (angles[k], angles[2k]) that exists, so evenly spaced angles give the
/// classic (a, 2a) configuration.
CorrelationReport correlation_report(const EnsembleSpec& spec, const std::vector<Angle>& angles,
                                     const SpinContext& ctx, std::uint64_t seed, unsigned threads);

}  // namespace riddled
