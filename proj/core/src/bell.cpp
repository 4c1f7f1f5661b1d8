#include "riddled/bell.hpp"

#include <algorithm>
#include <cmath>

#include "riddled/error.hpp"
#include "riddled/parallel.hpp"
#include "riddled/rng.hpp"

namespace riddled {

namespace {

CorrelationEstimate summarise(const std::vector<int>& products, std::size_t mismatches) {
  CorrelationEstimate out;
  out.n_pairs = products.size();
  out.form_mismatches = mismatches;
  RunningStats stats;
  for (int p : products)
    if (p != 0) stats.add(static_cast<double>(p));
  out.n_resolved = stats.count();
  if (out.n_resolved == 0) throw Error(ErrorCode::DegenerateSample, "no pair resolved at both stations");
  out.c = stats.mean();
  out.stderr_ = std::sqrt(stats.variance() / static_cast<double>(out.n_resolved));
  return out;
}

}  // namespace

std::vector<EprPair> generate_pairs(const EnsembleSpec& spec, const SystemParams& params, std::uint64_t seed) {
  const auto firsts = generate_ensemble(spec, params, seed);
  std::vector<EprPair> out(firsts.size());
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    out[i].first = firsts[i];
    out[i].second = {firsts[i].lambda, firsts[i].theta_big + Angle::half_turn()};
  }
  return out;
}

CorrelationEstimate correlation(const std::vector<EprPair>& pairs, Angle theta_a, Angle theta_b,
                                const SpinContext& ctx_a, const SpinContext& ctx_b, unsigned threads) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no pairs");
  std::vector<int> products(pairs.size(), 0);
  std::vector<char> mismatch(pairs.size(), 0);
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const int a = to_int(sp_theta(pairs[i].first, theta_a, ctx_a));
    if (a == 0) return;
    const int b_second = to_int(sp_theta(pairs[i].second, theta_b, ctx_b));
    const int b_first = to_int(sp_theta(pairs[i].first, theta_b, ctx_b));
    products[i] = a * b_second;
    if (b_second != 0 && b_first != 0 && a * b_second != -(a * b_first)) mismatch[i] = 1;
  });
  std::size_t mismatches = 0;
  for (char m : mismatch) mismatches += m ? 1 : 0;
  return summarise(products, mismatches);
}

CounterfactualPair counterfactual_correlation(const std::vector<EprPair>& pairs, Angle theta_actual,
                                              Angle theta_counterfactual, const SpinContext& ctx_actual,
                                              const SpinContext& ctx_counterfactual, unsigned threads) {
  return {correlation(pairs, Angle{}, theta_actual, ctx_actual, ctx_actual, threads),
          correlation(pairs, Angle{}, theta_counterfactual, ctx_actual, ctx_counterfactual, threads)};
}

double bell_lhs(double c_phi, double c_theta, double c_theta_minus_phi) noexcept {
  return std::abs(c_phi - c_theta) - c_theta_minus_phi;
}

double quantum_correlation(double theta) noexcept { return -std::cos(theta); }

CorrelationEstimate second_ensemble_correlation(const EnsembleSpec& spec, Angle theta, const SpinContext& ctx,
                                                std::uint64_t seed, unsigned threads) {
  return correlation(generate_pairs(spec, ctx.params, seed), theta, ctx, threads);
}

SharedSigns shared_signs(const std::vector<EprPair>& pairs, const std::vector<Angle>& angles,
                         const SpinContext& ctx, unsigned threads) {
  if (pairs.empty() || angles.empty()) throw Error(ErrorCode::InvalidArgument, "no pairs or no angles");
  SharedSigns out;
  out.angles = angles;
  out.n_pairs = pairs.size();
  out.signs.assign(pairs.size() * angles.size(), 0);
  parallel_for(out.signs.size(), threads, [&](std::size_t k) {
    out.signs[k] = to_int(sp_theta(pairs[k / angles.size()].first, angles[k % angles.size()], ctx));
  });
  return out;
}

SharedBell shared_bell(const SharedSigns& signs, std::size_t i_zero, std::size_t i_phi, std::size_t i_theta) {
  const std::size_t m = signs.angles.size();
  if (i_zero >= m || i_phi >= m || i_theta >= m) throw Error(ErrorCode::InvalidArgument, "angle index out of range");
  long long s_phi = 0, s_theta = 0, s_rel = 0;
  SharedBell out;
  for (std::size_t i = 0; i < signs.n_pairs; ++i) {
    const int a = signs.at(i, i_zero);
    const int b = signs.at(i, i_phi);
    const int c = signs.at(i, i_theta);
    if (a == 0 || b == 0 || c == 0) continue;
    s_phi += a * b;
    s_theta += a * c;
    s_rel += b * c;
    ++out.n_triples;
  }
  if (out.n_triples == 0) throw Error(ErrorCode::DegenerateSample, "no fully resolved sign triple");
  const double n = static_cast<double>(out.n_triples);
  out.c_phi = -static_cast<double>(s_phi) / n;
  out.c_theta = -static_cast<double>(s_theta) / n;
  out.c_theta_minus_phi = -static_cast<double>(s_rel) / n;
  out.lhs = bell_lhs(out.c_phi, out.c_theta, out.c_theta_minus_phi);
  return out;
}

std::vector<Angle> default_bell_angles() {
  std::vector<Angle> out;
  for (long long k = 0; k <= 12; ++k) out.push_back(Angle::pi_fraction(k, 12));
  return out;
}

CorrelationReport correlation_report(const EnsembleSpec& spec, const std::vector<Angle>& angles,
                                     const SpinContext& ctx, std::uint64_t seed, unsigned threads) {
  if (angles.empty() || angles.front() != Angle{})
    throw Error(ErrorCode::InvalidArgument, "report angles must start at 0");
  const std::size_t m = angles.size();
  const auto pairs = generate_pairs(spec, ctx.params, seed);
  const auto signs = shared_signs(pairs, angles, ctx, threads);

  CorrelationReport rep;
  rep.n_pairs = pairs.size();
  rep.tol_index = static_cast<int>(std::lround(ctx.control.tol0 / ctx.control.tol));
  for (std::size_t k = 0; k < m; ++k) {
    rep.angles.push_back(angles[k].radians());
    rep.quantum.push_back(quantum_correlation(angles[k].radians()));
    // Station B measures the second particle, whose sign is -Sp of the first.
    std::vector<int> products(pairs.size(), 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) products[i] = -signs.at(i, 0) * signs.at(i, k);
    rep.shared.push_back(summarise(products, 0));
    rep.distinct.push_back(
        second_ensemble_correlation(spec, angles[k], ctx, derive_seed(seed, 0x5EC0'0000ULL + k), threads));
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto sb = shared_bell(signs, 0, a, b);
      rep.max_shared_lhs = (a == 0 && b == 0) ? sb.lhs : std::max(rep.max_shared_lhs, sb.lhs);
      ++rep.shared_combinations;
    }
  }
  for (std::size_t k = 0; 2 * k < m; ++k) {
    BellRow row;
    row.phi = angles[k].radians();
    row.theta = angles[2 * k].radians();
    row.shared = shared_bell(signs, 0, k, 2 * k);
    row.lhs_distinct = bell_lhs(rep.distinct[k].c, rep.distinct[2 * k].c, rep.distinct[k].c);
    row.lhs_quantum = bell_lhs(quantum_correlation(row.phi), quantum_correlation(row.theta),
                               quantum_correlation(row.theta - row.phi));
    rep.bell.push_back(row);
  }
  return rep;
}

}  // namespace riddled
