#include "vlmprobe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vlmprobe/error.hpp"

namespace vlmprobe::stats {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kTolerance = 1e-12;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly when
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kTolerance) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge (x=" +
                         std::to_string(x) + ", a=" + std::to_string(a) +
                         ", b=" + std::to_string(b) + ")");
}

// I_x(a, b) where y = 1 - x is supplied separately so callers can pass an
// exactly computed complement.
double incomplete_beta(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log(y) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

struct Pairs {
  std::vector<double> x;
  std::vector<double> y;
};

Pairs complete_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("paired arrays differ in length: " + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()));
  }
  Pairs out;
  out.x.reserve(x.size());
  out.y.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    out.x.push_back(x[i]);
    out.y.push_back(y[i]);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("mean of empty array");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientData("variance needs at least two values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
  return incomplete_beta(x, 1.0 - x, a, b);
}

double student_t_sf2(double t, double df) {
  if (!(df > 0.0)) throw NonPositiveDf("degrees of freedom must be positive, got " + std::to_string(df));
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double p = incomplete_beta(x, y, 0.5 * df, 0.5);
  return std::clamp(p, 0.0, 1.0);
}

double student_t_critical(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_sf2(hi, df) > alpha) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_sf2(mid, df) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WelchResult welch_ttest(std::span<const double> group_true, std::span<const double> group_false) {
  if (group_true.size() < 2 || group_false.size() < 2) {
    throw InsufficientData("welch t-test needs at least two values per group (got " +
                           std::to_string(group_true.size()) + " and " +
                           std::to_string(group_false.size()) + ")");
  }
  require_finite(group_true, "welch_ttest");
  require_finite(group_false, "welch_ttest");

  WelchResult r;
  r.n_true = group_true.size();
  r.n_false = group_false.size();
  r.mean_true = mean(group_true);
  r.mean_false = mean(group_false);
  r.mean_diff = r.mean_true - r.mean_false;

  const double a = sample_variance(group_true) / static_cast<double>(r.n_true);
  const double b = sample_variance(group_false) / static_cast<double>(r.n_false);
  if (a + b == 0.0) throw BothGroupsConstant("both groups have zero variance");

  r.t = r.mean_diff / std::sqrt(a + b);
  r.df = (a + b) * (a + b) /
         (a * a / static_cast<double>(r.n_true - 1) + b * b / static_cast<double>(r.n_false - 1));
  r.p = student_t_sf2(r.t, r.df);
  return r;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  const Pairs pairs = complete_pairs(x, y);
  const std::size_t n = pairs.x.size();
  if (n < 3) throw InsufficientData("pearson needs at least three complete pairs, got " + std::to_string(n));
  require_finite(pairs.x, "pearson");
  require_finite(pairs.y, "pearson");

  const double mx = mean(pairs.x);
  const double my = mean(pairs.y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pairs.x[i] - mx;
    const double dy = pairs.y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("pearson: an argument has zero variance");

  PearsonResult r;
  r.n = n;
  r.df = static_cast<double>(n - 2);
  r.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(r.r) == 1.0) {
    r.t = std::copysign(std::numeric_limits<double>::infinity(), r.r);
    r.p = 0.0;
    return r;
  }
  r.t = r.r * std::sqrt(r.df / (1.0 - r.r * r.r));
  r.p = student_t_sf2(r.t, r.df);
  return r;
}

RegressionBand linfit_band(std::span<const double> x, std::span<const double> y,
                           std::size_t grid_points, double confidence) {
  if (grid_points == 0) throw std::invalid_argument("linfit_band: grid_points must be >= 1");
  const Pairs pairs = complete_pairs(x, y);
  const std::size_t n = pairs.x.size();
  if (n < 3) throw InsufficientData("regression needs at least three complete pairs, got " + std::to_string(n));
  require_finite(pairs.x, "linfit_band");
  require_finite(pairs.y, "linfit_band");

  const double mx = mean(pairs.x);
  const double my = mean(pairs.y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (pairs.x[i] - mx) * (pairs.x[i] - mx);
    sxy += (pairs.x[i] - mx) * (pairs.y[i] - my);
  }
  if (sxx == 0.0) throw ZeroVariance("regression: x has zero variance");

  RegressionBand band;
  band.slope = sxy / sxx;
  band.intercept = my - band.slope * mx;

  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = pairs.y[i] - (band.intercept + band.slope * pairs.x[i]);
    sse += e * e;
  }
  const double dof = static_cast<double>(n - 2);
  band.residual_sd = std::sqrt(sse / dof);
  const double tq = student_t_critical(1.0 - confidence, dof);

  const auto [xmin_it, xmax_it] = std::minmax_element(pairs.x.begin(), pairs.x.end());
  const double xmin = *xmin_it;
  const double xmax = *xmax_it;
  band.x_grid.resize(grid_points);
  band.y_hat.resize(grid_points);
  band.lo.resize(grid_points);
  band.hi.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double gx = grid_points == 1
                          ? xmin
                          : xmin + (xmax - xmin) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
    const double fit = band.intercept + band.slope * gx;
    const double half = tq * band.residual_sd *
                        std::sqrt(1.0 / static_cast<double>(n) + (gx - mx) * (gx - mx) / sxx);
    band.x_grid[g] = gx;
    band.y_hat[g] = fit;
    band.lo[g] = fit - half;
    band.hi[g] = fit + half;
  }
  return band;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bin_count,
                                    double lo, double hi) {
  if (bin_count == 0) throw std::invalid_argument("histogram: bin_count must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("histogram: empty range");
  require_finite(values, "histogram");

  const double width = (hi - lo) / static_cast<double>(bin_count);
  std::vector<HistogramBin> bins(bin_count);
  for (std::size_t i = 0; i < bin_count; ++i) {
    bins[i].lower = lo + width * static_cast<double>(i);
    bins[i].upper = i + 1 == bin_count ? hi : lo + width * static_cast<double>(i + 1);
  }
  const auto last = static_cast<std::ptrdiff_t>(bin_count) - 1;
  for (double v : values) {
    auto idx = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
    idx = std::clamp<std::ptrdiff_t>(idx, 0, last);
    // floor() can land one bin off when the quotient rounds across an edge.
    if (idx > 0 && v < bins[idx].lower) --idx;
    if (idx < last && v >= bins[idx].upper) ++idx;
    ++bins[idx].count;
  }
  return bins;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bin_count) {
  if (values.empty()) throw EmptyInput("histogram of empty array");
  require_finite(values, "histogram");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    const double pad = std::max(std::abs(lo), 1.0) * 64.0 * std::numeric_limits<double>::epsilon();
    lo -= pad;
    hi += pad;
  }
  return histogram(values, bin_count, lo, hi);
}

BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("box summary of empty array");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BoxSummary box;
  box.n = sorted.size();
  box.q1 = quantile_sorted(sorted, 0.25);
  box.median = quantile_sorted(sorted, 0.5);
  box.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = box.q3 - box.q1;
  const double fence_lo = box.q1 - 1.5 * iqr;
  const double fence_hi = box.q3 + 1.5 * iqr;

  box.whisker_lo = box.q1;
  box.whisker_hi = box.q3;
  for (double v : sorted) {
    if (v >= fence_lo) {
      box.whisker_lo = std::min(v, box.q1);
      break;
    }
  }
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    if (*it <= fence_hi) {
      box.whisker_hi = std::max(*it, box.q3);
      break;
    }
  }
  box.outliers = static_cast<std::size_t>(std::count_if(
      sorted.begin(), sorted.end(), [&](double v) { return v < fence_lo || v > fence_hi; }));
  return box;
}

}  // namespace vlmprobe::stats
