#pragma once

// Log-domain helpers. Series in this library routinely contain terms such as
// exp(s*k^2), so magnitudes are carried as natural logarithms and sums are
// formed with a max-shifted, pairwise, compensated reduction whose tree shape
// depends only on the input length (bit-stable across runs).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace gevrey {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

namespace detail {

inline constexpr std::size_t kPairwiseLeaf = 16;

// Neumaier-compensated sum of a short block.
inline double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace detail

/// Deterministic pairwise summation with compensated leaves.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= detail::kPairwiseLeaf) return detail::compensated_sum(xs);
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// log(sum_i exp(xs[i])). Empty input or all -inf gives -inf; any +inf or
/// NaN entry propagates as +inf / NaN.
inline double log_sum_exp(std::span<const double> xs) {
  double peak = kNegInf;
  for (double x : xs) {
    if (std::isnan(x)) return x;
    peak = std::max(peak, x);
  }
  if (peak == kNegInf || peak == kPosInf) return peak;
  std::vector<double> shifted;
  shifted.reserve(xs.size());
  for (double x : xs) shifted.push_back(std::exp(x - peak));
  return peak + std::log(pairwise_sum(shifted));
}

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  if (a == kPosInf) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log|z| that stays finite for huge components.
inline double log_abs(std::complex<double> z) {
  const double m = std::max(std::abs(z.real()), std::abs(z.imag()));
  if (m == 0.0) return kNegInf;
  if (!std::isfinite(m)) return kPosInf;
  const double lo = std::min(std::abs(z.real()), std::abs(z.imag())) / m;
  return std::log(m) + 0.5 * std::log1p(lo * lo);
}

/// Product `a*b` with the convention 0 * inf = 0 (a zero multiplier
/// annihilates an overflowed component instead of producing NaN).
inline double mul0(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

/// A complex number held as (log-magnitude, phase).
struct LogPolar {
  double log_mag = kNegInf;
  double phase = 0.0;

  [[nodiscard]] std::complex<double> value() const {
    if (log_mag == kNegInf) return {0.0, 0.0};
    return std::polar(std::exp(log_mag), phase);
  }

  static LogPolar from(std::complex<double> z) {
    return {log_abs(z), z == std::complex<double>{} ? 0.0 : std::arg(z)};
  }

  friend LogPolar operator*(LogPolar a, LogPolar b) {
    if (a.log_mag == kNegInf || b.log_mag == kNegInf) return {};
    return {a.log_mag + b.log_mag, a.phase + b.phase};
  }
};

/// Euclidean norm of a coefficient list computed without overflow.
inline double log_norm(std::span<const double> log_magnitudes) {
  std::vector<double> doubled;
  doubled.reserve(log_magnitudes.size());
  for (double l : log_magnitudes) doubled.push_back(2.0 * l);
  return 0.5 * log_sum_exp(doubled);
}

}  // namespace gevrey
