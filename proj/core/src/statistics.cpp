#include "riddled/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "riddled/error.hpp"
#include "riddled/parallel.hpp"

namespace riddled {

namespace {

template <class Classify>
FractionCurve tabulate(std::span<const double> y_values, std::size_t n_samples, unsigned threads,
                       Classify&& classify) {
  if (y_values.empty()) throw Error(ErrorCode::InvalidArgument, "no y values");
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "no x samples");
  for (double y : y_values)
    if (!(y > 0.0 && y < kPi)) throw Error(ErrorCode::DomainError, "fraction curve y must lie in (0, pi)");

  std::vector<BasinLabel> labels(y_values.size() * n_samples, BasinLabel::Unresolved);
  parallel_for(labels.size(), threads, [&](std::size_t k) {
    labels[k] = classify(y_values[k / n_samples], k % n_samples);
  });

  FractionCurve curve;
  curve.y.assign(y_values.begin(), y_values.end());
  for (std::size_t j = 0; j < y_values.size(); ++j) {
    FractionCounts c;
    for (std::size_t i = 0; i < n_samples; ++i) {
      switch (labels[j * n_samples + i]) {
        case BasinLabel::CPlus: ++c.n_plus; break;
        case BasinLabel::CMinus: ++c.n_minus; break;
        case BasinLabel::Unresolved: ++c.n_unresolved; break;
      }
    }
    if (c.resolved() == 0)
      throw Error(ErrorCode::DegenerateSample, "no resolved point at y = " + std::to_string(y_values[j]));
    curve.counts.push_back(c);
    curve.fraction.push_back(static_cast<double>(c.n_plus) / static_cast<double>(c.resolved()));
  }
  return curve;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

FractionCurve basin_fraction_curve(std::span<const double> y_values, std::span<const double> x_samples,
                                   const SystemParams& params, const StepControl& control,
                                   const CaptureCriterion& criterion, unsigned threads) {
  params.validate();
  criterion.validate();
  return tabulate(y_values, x_samples.size(), threads, [&](double y, std::size_t i) {
    return classify_rest(x_samples[i], y, params, control, criterion);
  });
}

FractionCurve basin_fraction_curve(std::span<const double> y_values,
                                   std::span<const AttractorPoint> samples, const SystemParams& params,
                                   const StepControl& control, const CaptureCriterion& criterion,
                                   unsigned threads) {
  params.validate();
  criterion.validate();
  return tabulate(y_values, samples.size(), threads, [&](double y, std::size_t i) {
    return classify_from_state(samples[i], y, params, control, criterion);
  });
}

double analytic_L(double y, double eta) {
  if (!(y >= 0.0 && y <= kPi)) throw Error(ErrorCode::DomainError, "analytic_L needs y in [0, pi]");
  if (!(eta > 0.0)) throw Error(ErrorCode::DomainError, "analytic_L needs eta > 0");
  if (y <= kPi / 2.0) return 1.0 - 0.5 * std::pow(2.0 * y / kPi, eta);
  return 0.5 * std::pow(2.0 * (kPi - y) / kPi, eta);
}

EtaFit fit_eta(const FractionCurve& curve, double y_lo, double y_hi) {
  std::vector<double> u;
  std::vector<double> v;
  for (std::size_t j = 0; j < curve.y.size(); ++j) {
    const double y = curve.y[j];
    const double f = curve.fraction[j];
    if (y < y_lo || y > y_hi || y > kPi / 2.0 || !(f > 0.0 && f < 1.0)) continue;
    u.push_back(std::log(2.0 * y / kPi));
    v.push_back(std::log(1.0 - f));
  }
  if (u.size() < 5) throw Error(ErrorCode::InsufficientData, "eta fit needs at least five points in (0, 1)");

  const double n = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double suu = 0.0, suv = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  if (!(suu > 0.0)) throw Error(ErrorCode::InsufficientData, "eta fit needs distinct y values");

  EtaFit fit;
  fit.eta = suv / suu;
  fit.intercept = mv - fit.eta * mu;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = v[i] - (fit.intercept + fit.eta * u[i]);
    ss_res += r * r;
  }
  fit.r2 = svv > 0.0 ? std::clamp(1.0 - ss_res / svv, 0.0, 1.0) : 1.0;
  fit.y_lo = y_lo;
  fit.y_hi = y_hi;
  fit.points = u.size();
  return fit;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw Error(ErrorCode::InvalidArgument, "bad log range");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double tol_correlation(const TolScanResult& scan, int n, int m) {
  if (n < 1 || m < 1 || n > scan.n_max || m > scan.n_max)
    throw Error(ErrorCode::InvalidArgument, "tolerance index outside the scan");
  long long sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scan.x.size(); ++i) {
    const int a = to_int(scan.at(n, i));
    const int b = to_int(scan.at(m, i));
    if (a == 0 || b == 0) continue;
    sum += a * b;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::DegenerateSample, "no pairwise-resolved cells");
  return -static_cast<double>(sum) / static_cast<double>(count);
}

std::vector<double> tol_correlation_matrix(const TolScanResult& scan) {
  const auto n = static_cast<std::size_t>(scan.n_max);
  std::vector<double> out(n * n, std::numeric_limits<double>::quiet_NaN());
  for (int a = 1; a <= scan.n_max; ++a) {
    for (int b = a; b <= scan.n_max; ++b) {
      double c = std::numeric_limits<double>::quiet_NaN();
      try {
        c = tol_correlation(scan, a, b);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSample) throw;
      }
      out[static_cast<std::size_t>(a - 1) * n + static_cast<std::size_t>(b - 1)] = c;
      out[static_cast<std::size_t>(b - 1) * n + static_cast<std::size_t>(a - 1)] = c;
    }
  }
  return out;
}

RankCorrelation spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3)
    throw Error(ErrorCode::InsufficientData, "spearman needs two equal-length samples of size >= 3");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (!(saa > 0.0 && sbb > 0.0)) throw Error(ErrorCode::DegenerateSample, "constant sample in spearman");
  RankCorrelation out;
  out.rho = sab / std::sqrt(saa * sbb);
  const double df = n - 2.0;
  if (std::abs(out.rho) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.rho * std::sqrt(df / (1.0 - out.rho * out.rho));
    boost::math::students_t dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return out;
}

std::vector<double> row_fractions(const GridResult& grid) {
  std::vector<double> out(grid.spec.ny, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < grid.spec.ny; ++j) {
    std::size_t plus = 0, resolved = 0;
    for (std::size_t i = 0; i < grid.spec.nx; ++i) {
      const auto l = grid.at(i, j);
      if (l == BasinLabel::Unresolved) continue;
      ++resolved;
      plus += s_plus(l);
    }
    if (resolved > 0) out[j] = static_cast<double>(plus) / static_cast<double>(resolved);
  }
  return out;
}

}  // namespace riddled
