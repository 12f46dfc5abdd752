#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "jscc/errors.hpp"

namespace jscc {

/// Result of a log-log (or log-linear) slope fit. The slope is the scaling
/// exponent estimate; `points_used` records the (abscissa, ordinate) pairs
/// that actually entered the fit and `points_excluded` the ones dropped by
/// a guard (saturation, zero counts).
struct ExponentEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::vector<std::pair<double, double>> points_used;
  std::vector<std::pair<double, double>> points_excluded;
};

/// Ordinary least squares y = intercept + slope * x.
/// Slope standard error from the residual variance (n - 2 dof).
inline ExponentEstimate ols_fit(const std::vector<double>& x,
                                const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3)
    throw EstimationError("ols_fit: need at least 3 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw EstimationError("ols_fit: degenerate abscissae");
  ExponentEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (est.intercept + est.slope * x[i]);
    ss_res += r * r;
  }
  est.stderr_slope = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  est.points_used.reserve(n);
  for (std::size_t i = 0; i < n; ++i) est.points_used.emplace_back(x[i], y[i]);
  return est;
}

/// Weighted least squares with known per-point variances (weights = 1/var).
/// The slope standard error is the exact propagation 1/sqrt(sum w (x-xw)^2).
inline ExponentEstimate wls_fit(const std::vector<double>& x,
                                const std::vector<double>& y,
                                const std::vector<double>& w) {
  const std::size_t n = x.size();
  if (n != y.size() || n != w.size() || n < 3)
    throw EstimationError("wls_fit: need at least 3 points");
  double sw = 0, swx = 0, swy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0)) throw EstimationError("wls_fit: nonpositive weight");
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double mx = swx / sw;
  const double my = swy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw EstimationError("wls_fit: degenerate abscissae");
  ExponentEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.stderr_slope = 1.0 / std::sqrt(sxx);
  est.points_used.reserve(n);
  for (std::size_t i = 0; i < n; ++i) est.points_used.emplace_back(x[i], y[i]);
  return est;
}

struct BinomialInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion with `successes` out of `trials`.
inline BinomialInterval clopper_pearson(std::uint64_t successes,
                                        std::uint64_t trials,
                                        double confidence = 0.95) {
  if (trials == 0) throw EstimationError("clopper_pearson: zero trials");
  if (successes > trials)
    throw EstimationError("clopper_pearson: successes exceed trials");
  const double alpha = 1.0 - confidence;
  using boost::math::binomial_distribution;
  BinomialInterval ci;
  ci.low = binomial_distribution<double>::find_lower_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), alpha / 2);
  ci.high = binomial_distribution<double>::find_upper_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), alpha / 2);
  return ci;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double t : v) s += t;
  return s / static_cast<double>(v.size());
}

/// Standard error of the sample mean.
inline double stderr_of_mean(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double ss = 0;
  for (double t : v) ss += (t - m) * (t - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace jscc
