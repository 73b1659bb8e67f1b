#ifndef TABSYNTH_NUMERIC_HPP
#define TABSYNTH_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>

#include "tabsynth/error.hpp"
#include "tabsynth/rng.hpp"

namespace tabsynth {

inline double round_to(double x, int decimals) {
  if (decimals < 0) return x;
  const double scale = std::pow(10.0, decimals);
  return std::round(x * scale) / scale;
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x), accurate for large x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Inverse standard normal CDF: Acklam's rational approximation refined by
/// one Halley step, good to roughly machine precision on (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::OutOfRange, "normal_quantile requires p in [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step; use the tail that keeps the residual well conditioned.
  const double e = (x < 0.0) ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = (x < 0.0) ? x - u / (1.0 + 0.5 * x * u) : x + u / (1.0 - 0.5 * x * u);
  return x;
}

/// Normal(mu, sigma) restricted to [lower, upper].
struct TruncatedNormal {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  /// Inverse CDF at u in (0, 1). Works in the upper tail when the interval
  /// sits right of the parent mean so that far-tail truncation keeps precision.
  double quantile(double u) const {
    const double alpha = (lower - mu) / sigma;
    const double beta = (upper - mu) / sigma;
    double z;
    if (alpha > 0.0) {
      const double sa = normal_sf(alpha);
      const double sb = normal_sf(beta);
      z = -normal_quantile(sa - u * (sa - sb));
    } else {
      const double ca = normal_cdf(alpha);
      const double cb = normal_cdf(beta);
      z = normal_quantile(ca + u * (cb - ca));
    }
    return std::clamp(mu + sigma * z, lower, upper);
  }

  double sample(Rng& rng) const { return quantile(rng.uniform()); }

  double mean() const {
    const auto [m, v] = moments();
    (void)v;
    return m;
  }

  double stddev() const {
    const auto [m, v] = moments();
    (void)m;
    return std::sqrt(std::max(v, 0.0));
  }

  /// (mean, variance) of the truncated distribution.
  std::pair<double, double> moments() const {
    const double alpha = (lower - mu) / sigma;
    const double beta = (upper - mu) / sigma;
    const double pa = std::isfinite(alpha) ? normal_pdf(alpha) : 0.0;
    const double pb = std::isfinite(beta) ? normal_pdf(beta) : 0.0;
    const double z = alpha > 0.0 ? normal_sf(alpha) - normal_sf(beta)
                                 : normal_cdf(beta) - normal_cdf(alpha);
    const double at = std::isfinite(alpha) ? alpha * pa : 0.0;
    const double bt = std::isfinite(beta) ? beta * pb : 0.0;
    const double shift = (pa - pb) / z;
    const double mean = mu + sigma * shift;
    const double var = sigma * sigma * (1.0 + (at - bt) / z - shift * shift);
    return {mean, var};
  }
};

/// Finds parent (mu, sigma) so that the normal truncated to [lower, upper]
/// has the requested mean and standard deviation. Returns nullopt when the
/// target is outside what any truncated normal on the interval can reach.
inline std::optional<TruncatedNormal> fit_truncated_normal(double target_mean, double target_sd,
                                                           double lower, double upper) {
  if (!(upper > lower) || !(target_sd > 0.0)) return std::nullopt;
  if (!(target_mean > lower && target_mean < upper)) return std::nullopt;
  const double width = upper - lower;
  // Uniform is the widest member of the family on a bounded interval.
  if (std::isfinite(width) && target_sd >= width / std::sqrt(12.0)) return std::nullopt;

  // Newton on (mu, log sigma) in units of the target sd.
  double mu = target_mean;
  double log_sigma = std::log(target_sd);
  auto residual = [&](double m, double ls, double& rm, double& rs) {
    const TruncatedNormal t{m, std::exp(ls), lower, upper};
    const auto [mean, var] = t.moments();
    rm = (mean - target_mean) / target_sd;
    rs = std::sqrt(std::max(var, 0.0)) / target_sd - 1.0;
  };
  for (int iter = 0; iter < 200; ++iter) {
    double rm, rs;
    residual(mu, log_sigma, rm, rs);
    if (!std::isfinite(rm) || !std::isfinite(rs)) return std::nullopt;
    if (std::abs(rm) < 1e-12 && std::abs(rs) < 1e-12) {
      return TruncatedNormal{mu, std::exp(log_sigma), lower, upper};
    }
    const double hm = 1e-6 * target_sd;
    const double hs = 1e-6;
    double rm1, rs1, rm2, rs2;
    residual(mu + hm, log_sigma, rm1, rs1);
    residual(mu, log_sigma + hs, rm2, rs2);
    const double j11 = (rm1 - rm) / hm, j21 = (rs1 - rs) / hm;
    const double j12 = (rm2 - rm) / hs, j22 = (rs2 - rs) / hs;
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0) return std::nullopt;
    double dmu = -(j22 * rm - j12 * rs) / det;
    double dls = -(-j21 * rm + j11 * rs) / det;
    // Damp so the parent never wanders absurdly far from the interval.
    const double cap_mu = 2.0 * (std::isfinite(width) ? width : 10.0 * target_sd);
    dmu = std::clamp(dmu, -cap_mu, cap_mu);
    dls = std::clamp(dls, -1.0, 1.0);
    double step = 1.0;
    const double norm0 = rm * rm + rs * rs;
    for (int k = 0; k < 30; ++k) {
      double rmn, rsn;
      residual(mu + step * dmu, log_sigma + step * dls, rmn, rsn);
      if (std::isfinite(rmn) && std::isfinite(rsn) && rmn * rmn + rsn * rsn < norm0) break;
      step *= 0.5;
    }
    mu += step * dmu;
    log_sigma += step * dls;
    if (log_sigma > std::log(target_sd) + 8.0) return std::nullopt;
  }
  double rm, rs;
  residual(mu, log_sigma, rm, rs);
  if (std::abs(rm) < 1e-8 && std::abs(rs) < 1e-8) {
    return TruncatedNormal{mu, std::exp(log_sigma), lower, upper};
  }
  return std::nullopt;
}

inline double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// Pearson r over equal-length spans; nullopt when either side has zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "pearson: unequal lengths");
  if (x.size() < 2) return std::nullopt;
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  if (*xlo == *xhi || *ylo == *yhi) return std::nullopt;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace tabsynth

#endif  // TABSYNTH_NUMERIC_HPP
