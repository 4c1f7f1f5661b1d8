#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riddled/basin.hpp"

namespace riddled {

struct FractionCounts {
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_unresolved = 0;

  std::size_t resolved() const noexcept { return n_plus + n_minus; }
};

/// Estimated basin fraction L(y) = integral of S+ against the sampling measure.
struct FractionCurve {
  std::vector<double> y;
  std::vector<double> fraction;  // n_plus / (n_plus + n_minus)
  std::vector<FractionCounts> counts;
};

/// Classifies every (x, y) pair, starting at rest, and tabulates the CPlus
/// fraction per y. Unresolved points are excluded from both numerator and
/// denominator. Throws DegenerateSample if some y has no resolved point.
FractionCurve basin_fraction_curve(std::span<const double> y_values, std::span<const double> x_samples,
                                   const SystemParams& params, const StepControl& control,
                                   const CaptureCriterion& criterion, unsigned threads);

/// As basin_fraction_curve but starting from Duffing attractor points (x, vx).
FractionCurve basin_fraction_curve(std::span<const double> y_values,
                                   std::span<const AttractorPoint> samples, const SystemParams& params,
                                   const StepControl& control, const CaptureCriterion& criterion,
                                   unsigned threads);

/// 1 - (1/2)(2y/pi)^eta on [0, pi/2] and (1/2)(2(pi - y)/pi)^eta on [pi/2, pi].
double analytic_L(double y, double eta);

struct EtaFit {
  double eta = 0.0;
  double intercept = 0.0;  // of log(1 - L) against log(2y/pi); log(1/2) for the exact law
  double r2 = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of log(1 - fraction) on log(2y/pi) over curve points
/// with y in [y_lo, y_hi] and 0 < fraction < 1. The slope is eta. Throws
/// InsufficientData with fewer than five usable points.
EtaFit fit_eta(const FractionCurve& curve, double y_lo, double y_hi);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// Tolerance correlation -(1/N) sum_x S^(n)(x) S^(m)(x) over pairwise-resolved x.
/// Throws DegenerateSample when no x is resolved in both rows.
double tol_correlation(const TolScanResult& scan, int n, int m);

/// Full symmetric matrix of tol_correlation, row-major (n_max x n_max). Entries
/// with no pairwise-resolved cell are NaN.
std::vector<double> tol_correlation_matrix(const TolScanResult& scan);

/// Spearman rank correlation (average ranks for ties) and its two-sided
/// p-value from the t approximation with n - 2 degrees of freedom.
struct RankCorrelation {
  double rho = 0.0;
  double p_value = 1.0;
};
RankCorrelation spearman(std::span<const double> a, std::span<const double> b);

/// Per-row CPlus fraction of a grid, resolved-only; rows with no resolved
/// cell are reported as NaN.
std::vector<double> row_fractions(const GridResult& grid);

/// One-pass mean / variance (Welford).
class RunningStats {
 public:
  void add(double v) noexcept {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two values.
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace riddled
