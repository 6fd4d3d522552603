#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library: each oracle re-derives its quantity from first
// principles (quadrature, full enumeration, direct formulas).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

namespace detail {

inline long double simpson(const std::function<long double(long double)>& f, long double a,
                           long double b, long double fa, long double fm, long double fb) {
  return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

inline long double adaptive(const std::function<long double(long double)>& f, long double a,
                            long double b, long double fa, long double fm, long double fb,
                            long double whole, long double tol, int depth) {
  const long double m = 0.5L * (a + b);
  const long double lm = 0.5L * (a + m);
  const long double rm = 0.5L * (m + b);
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = simpson(f, a, m, fa, flm, fm);
  const long double right = simpson(f, m, b, fm, frm, fb);
  const long double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0L * tol) return left + right + delta / 15.0L;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5L * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5L * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline long double integrate(const std::function<long double(long double)>& f, long double a,
                             long double b, long double tol = 1e-14L) {
  const long double fa = f(a);
  const long double fb = f(b);
  const long double fm = f(0.5L * (a + b));
  return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb), tol, 50);
}

/// Two-tailed Student-t probability by integrating the density:
/// 1 - 2 * integral_0^|t| f(u) du. The interval is split into unit pieces so
/// the adaptive rule never sees a long flat stretch.
inline double t_two_tailed_by_quadrature(double t, double df) {
  const long double nu = df;
  const long double log_c = std::lgamma((nu + 1.0L) / 2.0L) - std::lgamma(nu / 2.0L) -
                            0.5L * std::log(nu * 3.14159265358979323846264338327950288L);
  const long double c = std::exp(log_c);
  auto density = [&](long double u) {
    return c * std::pow(1.0L + u * u / nu, -(nu + 1.0L) / 2.0L);
  };
  const long double upper = std::fabs(static_cast<long double>(t));
  long double mass = 0.0L;
  long double a = 0.0L;
  while (a < upper) {
    const long double b = std::min(upper, a + 0.5L);
    mass += integrate(density, a, b, 1e-16L);
    a = b;
  }
  return static_cast<double>(1.0L - 2.0L * mass);
}

/// Standard normal two-tailed probability.
inline double normal_two_tailed(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

inline double welch_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const double se2 = var(a) / static_cast<double>(a.size()) + var(b) / static_cast<double>(b.size());
  return (mean(a) - mean(b)) / std::sqrt(se2);
}

/// Exact two-sided permutation p-value of the Welch statistic: every split of
/// the pooled sample into groups of the original sizes is enumerated.
inline double welch_permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t k = a.size();
  const double observed = std::fabs(welch_t(a, b));

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  std::size_t total = 0;
  std::size_t extreme = 0;
  do {
    std::vector<double> ga;
    std::vector<double> gb;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? ga : gb).push_back(pooled[i]);
    ++total;
    if (std::fabs(welch_t(ga, gb)) >= observed * (1.0 - 1e-12)) ++extreme;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Exact two-sided permutation p-value of |r|: all orderings of y.
inline double pearson_permutation_p(const std::vector<double>& x, std::vector<double> y) {
  const double observed = std::fabs(pearson_r(x, y));
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t total = 0;
  std::size_t extreme = 0;
  std::vector<double> permuted(y.size());
  do {
    for (std::size_t i = 0; i < order.size(); ++i) permuted[i] = y[order[i]];
    ++total;
    if (std::fabs(pearson_r(x, permuted)) >= observed * (1.0 - 1e-12)) ++extreme;
  } while (std::next_permutation(order.begin(), order.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace oracle
