#pragma once

// Statistics kernels: Welch and Pearson tests with Student-t p-values,
// simple linear regression with confidence bands, histogram binning and
// box-plot summaries. All functions are pure.

#include <cstddef>
#include <span>
#include <vector>

namespace vlmprobe::stats {

struct WelchResult {
  double mean_true = 0;
  double mean_false = 0;
  double mean_diff = 0;  // mean_true - mean_false
  double t = 0;
  double df = 0;
  double p = 1;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
};

struct PearsonResult {
  double r = 0;
  double t = 0;
  double df = 0;
  double p = 1;
  std::size_t n = 0;
};

struct RegressionBand {
  double slope = 0;
  double intercept = 0;
  double residual_sd = 0;
  std::vector<double> x_grid;
  std::vector<double> y_hat;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct HistogramBin {
  double lower = 0;
  double upper = 0;
  std::size_t count = 0;
};

struct BoxSummary {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double whisker_lo = 0;
  double whisker_hi = 0;
  std::size_t outliers = 0;
  std::size_t n = 0;
};

/// Regularized incomplete beta I_x(a, b), evaluated with a modified Lentz
/// continued fraction. Throws ConvergenceError when 300 iterations do not
/// reach a relative change below 1e-12.
double regularized_incomplete_beta(double x, double a, double b);

/// Two-tailed Student-t tail probability P(|T| >= |t|) with `df` degrees of
/// freedom. `df` may be fractional. Throws NonPositiveDf when df <= 0.
double student_t_sf2(double t, double df);

/// Two-sided critical value: the t with student_t_sf2(t, df) == alpha,
/// found by bisection on student_t_sf2 to 1e-10.
double student_t_critical(double alpha, double df);

/// Welch two-sample two-tailed t-test. Each group needs at least two values
/// (InsufficientData); both groups having zero variance raises
/// BothGroupsConstant.
WelchResult welch_ttest(std::span<const double> group_true, std::span<const double> group_false);

/// Pearson correlation with a two-tailed t-test of r != 0 on n - 2 degrees of
/// freedom. Pairs where either side is NaN are dropped first.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Least-squares line through (x, y) with a 95% confidence band for the
/// conditional mean, evaluated on `grid_points` equally spaced points over
/// [min x, max x]. NaN pairs are dropped.
RegressionBand linfit_band(std::span<const double> x, std::span<const double> y,
                           std::size_t grid_points, double confidence = 0.95);

/// Equal-width bins over [min, max]; every bin is right-open except the last.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bin_count);

/// Equal-width bins over an explicit [lo, hi]. Values outside are clamped to
/// the outer bins.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bin_count,
                                    double lo, double hi);

/// Quartiles use linear interpolation between order statistics; whiskers
/// extend to the most extreme data within 1.5 IQR of the box.
BoxSummary box_summary(std::span<const double> values);

double mean(std::span<const double> values);

/// Sample variance (divisor n - 1).
double sample_variance(std::span<const double> values);

}  // namespace vlmprobe::stats
