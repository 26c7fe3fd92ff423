#ifndef LBA_MATH_HPP
#define LBA_MATH_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace lba {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / 2.5066282746310005024;
}

// Standard normal CDF via erfc; accurate in both tails.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Survival function 1 - Phi(x) without cancellation for large x.
inline double norm_sf(double x) {
  return 0.5 * std::erfc(x * 0.7071067811865475244);
}

inline double log_norm_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * kLog2Pi;
}

// log(sum(exp(v))) with max-shift; returns -inf for an all -inf input.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // -inf (all log-zero) or propagated inf
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
  return m + std::log(s);
}

inline double log_sum_exp(double a, double b) {
  const double m = a > b ? a : b;
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Normalized weights from log-weights. All -inf yields a zero vector.
template <typename Derived>
Eigen::VectorXd normalized_weights(const Eigen::DenseBase<Derived>& logw) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(logw.size());
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) return w;
  for (Eigen::Index i = 0; i < logw.size(); ++i) w(i) = std::exp(logw(i) - lse);
  return w;
}

inline double sq(double x) { return x * x; }

}  // namespace lba

#endif
