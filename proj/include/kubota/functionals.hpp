#pragma once

// Scalar functionals of a body estimated from Gaussian samples of its
// support function: p-moments, mean widths, normalized variance, Dvoretzky
// dimension, the small-ball parameter d_*, and the Gaussian median.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kubota/bodies.hpp"
#include "kubota/errors.hpp"
#include "kubota/linrand.hpp"
#include "kubota/parallel.hpp"

namespace kubota {

inline constexpr double kZ95 = 1.959963984540054;

/// A Monte Carlo statistic with its standard error and a 95% interval.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;

  static Estimate from_se(double value, double se, std::int64_t n) {
    return {value, se, n, value - kZ95 * se, value + kZ95 * se};
  }
  static Estimate exact(double value, std::int64_t n = 1) { return {value, 0.0, n, value, value}; }
};

inline double log_unit_ball_volume(int k) {
  if (k < 0) throw PreconditionError("unit_ball_volume: k must be >= 0");
  return 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k + 1.0);
}

/// omega_k, the volume of the Euclidean unit ball in R^k.
inline double unit_ball_volume(int k) { return std::exp(log_unit_ball_volume(k)); }

/// a_{n,p} = (E |g|_2^p)^(1/p) for a standard Gaussian g in R^n; p > -n, p != 0.
inline double a_np(int n, double p) {
  if (n < 1) throw PreconditionError("a_np: n must be >= 1");
  if (p == 0.0) throw PreconditionError("a_np: p must be nonzero");
  if (!(p > -n)) throw PreconditionError("a_np: need p > -n");
  const double log_moment = 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (n + p)) - std::lgamma(0.5 * n);
  return std::exp(log_moment / p);
}

/// E|theta_1| for theta uniform on S^{k-1}: the mean width of [-e_1, e_1] in R^k, halved.
inline double sphere_abs_coordinate_mean(int k) {
  return std::exp(std::lgamma(0.5 * k) - std::lgamma(0.5 * (k + 1)) - 0.5 * std::log(std::numbers::pi));
}

/// Values of h_A on a common Gaussian sample: h(g_i) and h(g_i/|g_i|).
/// Every estimator built on one SupportSample shares its random numbers.
struct SupportSample {
  int n = 0;
  std::vector<double> gaussian;
  std::vector<double> sphere;

  std::int64_t size() const { return static_cast<std::int64_t>(gaussian.size()); }
};

inline constexpr std::int64_t kSampleBlock = 2048;

/// Draws N Gaussian vectors in blocks of kSampleBlock; block b uses
/// stream.child(b), so the sample depends only on (stream, N).
inline SupportSample sample_support(const Body& body, std::int64_t count, const SeedStream& stream) {
  if (count < 1) throw PreconditionError("sample_support: need at least one sample");
  const int n = body.dim();
  SupportSample out;
  out.n = n;
  out.gaussian.resize(static_cast<std::size_t>(count));
  out.sphere.resize(static_cast<std::size_t>(count));
  const std::int64_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  detail::parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    SeedStream s = stream.child(b);
    Eigen::VectorXd g(n);
    const std::int64_t lo = static_cast<std::int64_t>(b) * kSampleBlock;
    const std::int64_t hi = std::min(count, lo + kSampleBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      s.fill_gaussian(std::span<double>(g.data(), static_cast<std::size_t>(n)));
      const double r = g.norm();
      const double h = support(body, g);
      if (!(h > 0.0) || !std::isfinite(h)) {
        throw IntegrityError("support returned a nonpositive value on a Gaussian sample");
      }
      out.gaussian[static_cast<std::size_t>(i)] = h;
      out.sphere[static_cast<std::size_t>(i)] = h / r;
    }
  });
  return out;
}

namespace detail {

/// (mean x_i^p)^(1/p) accumulated in the log domain, delta-method error.
inline Estimate power_mean(std::span<const double> x, double p) {
  const auto count = static_cast<std::int64_t>(x.size());
  if (count < 1) throw PreconditionError("power_mean: empty sample");
  double lmax = -kInf;
  for (double v : x) lmax = std::max(lmax, p * std::log(v));
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t i = 0;
  for (double v : x) {
    const double y = std::exp(p * std::log(v) - lmax);
    ++i;
    const double d = y - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (y - mean);
  }
  const double value = std::exp((lmax + std::log(mean)) / p);
  if (count < 2) return Estimate::from_se(value, 0.0, count);
  const double sd = std::sqrt(std::max(m2, 0.0) / static_cast<double>(count - 1));
  const double rel = sd / (std::sqrt(static_cast<double>(count)) * mean);
  return Estimate::from_se(value, value * rel / std::abs(p), count);
}

inline Estimate sample_mean(std::span<const double> x) {
  const auto count = static_cast<std::int64_t>(x.size());
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t i = 0;
  for (double v : x) {
    ++i;
    const double d = v - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (v - mean);
  }
  if (count < 2) return Estimate::from_se(mean, 0.0, count);
  const double var = std::max(m2, 0.0) / static_cast<double>(count - 1);
  return Estimate::from_se(mean, std::sqrt(var / static_cast<double>(count)), count);
}

}  // namespace detail

/// (E h_A(g)^p)^(1/p) from an existing sample. Negative p limited to |p| <= n/2.
inline Estimate gaussian_support_moment(const SupportSample& sample, double p) {
  if (sample.size() < 2) throw PreconditionError("gaussian_support_moment: need N >= 2");
  if (p == 0.0) throw PreconditionError("gaussian_support_moment: p must be nonzero");
  if (p < 0.0 && -p > 0.5 * sample.n) {
    throw PreconditionError("gaussian_support_moment: negative order needs |p| <= n/2");
  }
  return detail::power_mean(sample.gaussian, p);
}

inline Estimate gaussian_support_moment(const Body& body, double p, std::int64_t count,
                                        const SeedStream& stream) {
  if (count < 2) throw PreconditionError("gaussian_support_moment: need N >= 2");
  return gaussian_support_moment(sample_support(body, count, stream), p);
}

/// w_p(A) = (integral of h_A^p over the sphere)^(1/p).
///
/// Uses the angular parts h(g/|g|) of the Gaussian sample. Since |g| and
/// g/|g| are independent, this is I_p(gamma_n, A°)/a_{n,p} with the radial
/// factor integrated out exactly. Negative p requires |p| < n.
inline Estimate width_p(const SupportSample& sample, double p) {
  if (sample.size() < 2) throw PreconditionError("width_p: need N >= 2");
  if (p == 0.0) throw PreconditionError("width_p: p must be nonzero");
  if (p < 0.0 && !(-p < sample.n)) throw PreconditionError("width_p: negative order needs |p| < n");
  return detail::power_mean(sample.sphere, p);
}

inline Estimate width_p(const Body& body, double p, std::int64_t count, const SeedStream& stream) {
  if (count < 2) throw PreconditionError("width_p: need N >= 2");
  return width_p(sample_support(body, count, stream), p);
}

/// Var(h_A(g)) / (E h_A(g))^2 with a delete-one jackknife standard error.
inline Estimate beta_star(const SupportSample& sample) {
  const std::int64_t count = sample.size();
  if (count < 100) throw PreconditionError("beta_star: need N >= 100");
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t i = 0;
  for (double v : sample.gaussian) {
    ++i;
    const double d = v - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (v - mean);
  }
  m2 = std::max(m2, 0.0);
  const double nd = static_cast<double>(count);
  const double beta = (m2 / (nd - 1.0)) / (mean * mean);

  std::vector<double> loo(static_cast<std::size_t>(count));
  double loo_mean = 0.0;
  for (std::size_t j = 0; j < loo.size(); ++j) {
    const double x = sample.gaussian[j];
    const double mu = (nd * mean - x) / (nd - 1.0);
    const double m2j = std::max(m2 - (x - mean) * (x - mean) * nd / (nd - 1.0), 0.0);
    loo[j] = (m2j / (nd - 2.0)) / (mu * mu);
    loo_mean += loo[j];
  }
  loo_mean /= nd;
  double ss = 0.0;
  for (double b : loo) ss += (b - loo_mean) * (b - loo_mean);
  return Estimate::from_se(beta, std::sqrt((nd - 1.0) / nd * ss), count);
}

inline Estimate beta_star(const Body& body, std::int64_t count, const SeedStream& stream) {
  if (count < 100) throw PreconditionError("beta_star: need N >= 100");
  return beta_star(sample_support(body, count, stream));
}

/// Estimate plus a flag telling whether every input was exact or reliable.
struct FlaggedEstimate {
  Estimate estimate;
  bool flag = true;
};

/// k_*(A) = n w(A)^2 / R(A)^2, no absolute constant. flag = R exact.
inline FlaggedEstimate k_star(const SupportSample& sample, const Radius& circum) {
  const Estimate w = width_p(sample, 1.0);
  const double n = sample.n;
  const double ratio = w.value / circum.value;
  const double value = n * ratio * ratio;
  const double se = 2.0 * value * w.std_error / w.value;
  return {Estimate::from_se(value, se, w.n_samples), circum.exact};
}

inline FlaggedEstimate k_star(const Body& body, std::int64_t count, const SeedStream& stream) {
  return k_star(sample_support(body, count, stream), circumradius(body));
}

/// d_*(A): -log of the sphere measure of {theta : 2 h_A(theta) <= M}, M the
/// spherical mean of h_A from the same sample, capped at n.
///
/// flag = reliable. With zero hits the value is the lower bound log N and
/// flag is false, unless an exact inradius proves the event empty (2r > M),
/// in which case the value is n.
inline FlaggedEstimate d_star(const SupportSample& sample, const Radius& in) {
  const std::int64_t count = sample.size();
  if (count < 100) throw PreconditionError("d_star: need N >= 100");
  const double n = sample.n;
  double mean = 0.0;
  for (double v : sample.sphere) mean += v;
  mean /= static_cast<double>(count);
  std::int64_t hits = 0;
  for (double v : sample.sphere) {
    if (2.0 * v <= mean) ++hits;
  }
  if (hits == 0) {
    if (in.exact && 2.0 * in.value > mean) return {Estimate::exact(n, count), true};
    return {Estimate::from_se(std::min(std::log(static_cast<double>(count)), n), 0.0, count), false};
  }
  const double f = static_cast<double>(hits) / static_cast<double>(count);
  const double value = std::min(-std::log(f), n);
  const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(count)) / f;
  return {Estimate::from_se(value, se, count), true};
}

inline FlaggedEstimate d_star(const Body& body, std::int64_t count, const SeedStream& stream) {
  if (count < 100) throw PreconditionError("d_star: need N >= 100");
  return d_star(sample_support(body, count, stream), inradius(body));
}

/// Median of h_A(g) with a distribution-free order-statistic interval.
inline Estimate gaussian_median(const SupportSample& sample) {
  const std::int64_t count = sample.size();
  if (count < 100) throw PreconditionError("gaussian_median: need N >= 100");
  std::vector<double> x = sample.gaussian;
  std::sort(x.begin(), x.end());
  const auto at = [&](std::int64_t i) { return x[static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, count - 1))]; };
  const double med = count % 2 == 1 ? at(count / 2) : 0.5 * (at(count / 2 - 1) + at(count / 2));
  const double half = 0.5 * kZ95 * std::sqrt(static_cast<double>(count));
  const auto lo = static_cast<std::int64_t>(std::floor(0.5 * count - half)) - 1;
  const auto hi = static_cast<std::int64_t>(std::ceil(0.5 * count + half)) - 1;
  const double ci_lo = std::min(at(lo), med);
  const double ci_hi = std::max(at(hi), med);
  return {med, (ci_hi - ci_lo) / (2.0 * kZ95), count, ci_lo, ci_hi};
}

inline Estimate gaussian_median(const Body& body, std::int64_t count, const SeedStream& stream) {
  if (count < 100) throw PreconditionError("gaussian_median: need N >= 100");
  return gaussian_median(sample_support(body, count, stream));
}

/// Var(h_A(g)) with the usual fourth-moment standard error.
inline Estimate gaussian_variance(const SupportSample& sample) {
  const std::int64_t count = sample.size();
  if (count < 2) throw PreconditionError("gaussian_variance: need N >= 2");
  const double nd = static_cast<double>(count);
  double mean = 0.0;
  for (double v : sample.gaussian) mean += v;
  mean /= nd;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : sample.gaussian) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double var = m2 / (nd - 1.0);
  const double mu4 = m4 / nd;
  const double se = std::sqrt(std::max(mu4 - var * var, 0.0) / nd);
  return Estimate::from_se(var, se, count);
}

/// Everything `params` reports about one body, from one shared sample.
struct BodyParameters {
  Estimate w;
  Radius R{0.0, false};
  Radius r{0.0, false};
  Estimate beta_star;
  Estimate k_star;
  bool k_star_exact_radius = true;
  Estimate d_star;
  bool d_star_reliable = true;
  Estimate m_gauss;
  Estimate v_star;
  Estimate gaussian_mean;
};

inline BodyParameters body_parameters(const Body& body, std::int64_t count, const SeedStream& stream) {
  if (count < 100) throw PreconditionError("body_parameters: need N >= 100");
  const SupportSample sample = sample_support(body, count, stream);
  BodyParameters out;
  out.R = circumradius(body);
  out.r = inradius(body);
  out.w = width_p(sample, 1.0);
  out.beta_star = beta_star(sample);
  const FlaggedEstimate ks = k_star(sample, out.R);
  out.k_star = ks.estimate;
  out.k_star_exact_radius = ks.flag;
  const FlaggedEstimate ds = d_star(sample, out.r);
  out.d_star = ds.estimate;
  out.d_star_reliable = ds.flag;
  out.m_gauss = gaussian_median(sample);
  out.v_star = gaussian_variance(sample);
  out.gaussian_mean = detail::sample_mean(sample.gaussian);
  return out;
}

}  // namespace kubota
