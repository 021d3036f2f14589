#pragma once

/**
 * @file series.hpp
 * @brief Three-valued convergence judgments for series of positive terms
 *        given by their logarithms.
 *
 * A series is an explicit head (finitely many log-terms) plus an optional
 * closed-form tail k -> log a_k evaluated on a geometric window of indices
 * reaching 2^40. The window is then matched against a small set of rules:
 *
 *   term_test           a_k >= 1 on the final window       -> diverges
 *   harmonic_minorant   k a_k nondecreasing on the window    -> diverges
 *   power_majorant      k^1.5 a_k nonincreasing on the window -> converges
 *
 * Anything else is `inconclusive`; no rule is ever guessed.
 */

#include <gevrey/logmath.hpp>
#include <gevrey/spectrum.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

enum class Verdict { converges, diverges, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converges: return "converges";
    case Verdict::diverges: return "diverges";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Record of one series judgment; replaying the same inputs reproduces it
/// bit for bit.
struct Judgment {
  Verdict verdict = Verdict::converges;
  std::string rule = "finite_sum";
  /// Index at which divergence was detected (first offending head term or
  /// first window point of the diverging tail), -1 when not applicable.
  Index index = -1;
  std::size_t head_terms = 0;
  /// log of the head partial sum.
  double head_log_sum = kNegInf;
  /// Sampled tail (k, log a_k).
  std::vector<std::pair<Index, double>> window;
};

using LogTerm = std::function<double(Index)>;

namespace detail {

inline constexpr Index kWindowEnd = Index{1} << 40;
inline constexpr double kWindowGrowth = 1.5;

inline bool close_le(double a, double b) { return a <= b + 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

/// Geometric sample of indices start, ~1.5 start, ... up to 2^40.
inline std::vector<Index> window_indices(Index start) {
  std::vector<Index> ks;
  double x = static_cast<double>(std::max<Index>(start, 1));
  Index last = 0;
  while (x <= static_cast<double>(kWindowEnd)) {
    const Index k = std::max(last + 1, static_cast<Index>(std::ceil(x)));
    ks.push_back(k);
    last = k;
    x *= kWindowGrowth;
  }
  return ks;
}

inline bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!close_le(v[i - 1], v[i])) return false;
  }
  return true;
}

inline bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!close_le(v[i], v[i - 1])) return false;
  }
  return true;
}

}  // namespace detail

/// Samples `term` on the geometric window from `start`; stops at the first
/// NaN and keeps a +inf sample as the final point.
inline std::vector<std::pair<Index, double>> sample_tail(const LogTerm& term, Index start) {
  std::vector<std::pair<Index, double>> out;
  for (Index k : detail::window_indices(start)) {
    const double l = term(k);
    if (std::isnan(l)) break;
    out.emplace_back(k, l);
    if (l == kPosInf) break;
  }
  return out;
}

/// Applies the tail rules to an already sampled window.
inline Judgment judge_window(std::vector<std::pair<Index, double>> window) {
  Judgment j;
  j.window = std::move(window);
  j.verdict = Verdict::inconclusive;
  j.rule = "insufficient_window";
  const auto& w = j.window;
  if (!w.empty() && w.back().second == kPosInf) {
    j.verdict = Verdict::diverges;
    j.rule = "term_test";
    j.index = w.back().first;
    return j;
  }
  if (w.size() < 8) return j;
  const std::size_t from = w.size() - std::max<std::size_t>(4, w.size() / 2);
  bool all_zero = true;
  bool all_large = true;
  std::vector<double> harmonic, power;
  for (std::size_t i = from; i < w.size(); ++i) {
    const double l = w[i].second;
    const double lk = std::log(static_cast<double>(w[i].first));
    all_zero = all_zero && l == kNegInf;
    all_large = all_large && l >= 0.0;
    harmonic.push_back(l + lk);
    power.push_back(l + 1.5 * lk);
  }
  if (all_zero) {
    j.verdict = Verdict::converges;
    j.rule = "vanishing_tail";
    return j;
  }
  if (all_large) {
    j.verdict = Verdict::diverges;
    j.rule = "term_test";
    j.index = w[from].first;
    return j;
  }
  const bool finite_h = std::all_of(harmonic.begin(), harmonic.end(), [](double x) { return std::isfinite(x); });
  if (finite_h && detail::nondecreasing(harmonic)) {
    j.verdict = Verdict::diverges;
    j.rule = "harmonic_minorant";
    j.index = w[from].first;
    return j;
  }
  // -inf entries (exact zeros) only help a majorant.
  std::vector<double> capped = power;
  for (auto& x : capped) {
    if (x == kNegInf) x = -1e300;
  }
  if (detail::nonincreasing(capped)) {
    j.verdict = Verdict::converges;
    j.rule = "power_majorant";
    return j;
  }
  j.rule = "no_rule";
  return j;
}

/// Judges sum(head) + sum_{k >= tail_start} exp(tail(k)). An empty `tail`
/// means the series is the finite head.
inline Judgment judge_series(const std::vector<std::pair<Index, double>>& head, const LogTerm& tail = {},
                             Index tail_start = 1) {
  std::vector<double> logs;
  logs.reserve(head.size());
  for (const auto& [k, l] : head) {
    if (l == kPosInf || std::isnan(l)) {
      Judgment j;
      j.verdict = std::isnan(l) ? Verdict::inconclusive : Verdict::diverges;
      j.rule = std::isnan(l) ? "undefined_term" : "infinite_term";
      j.index = k;
      j.head_terms = head.size();
      return j;
    }
    logs.push_back(l);
  }
  Judgment j;
  if (tail) {
    j = judge_window(sample_tail(tail, tail_start));
  }
  j.head_terms = head.size();
  j.head_log_sum = log_sum_exp(logs);
  return j;
}

/// Behaviour of the family L_s(k) = s phi(k) + psi(k), s > 0, as k -> infinity,
/// read off rho = -psi/phi on the sampled window.
enum class ScaleKind { unbounded_ratio, vanishing_ratio, bounded_ratio, flat_scale, unknown };

inline const char* scale_kind_name(ScaleKind k) {
  switch (k) {
    case ScaleKind::unbounded_ratio: return "unbounded_ratio";
    case ScaleKind::vanishing_ratio: return "vanishing_ratio";
    case ScaleKind::bounded_ratio: return "bounded_ratio";
    case ScaleKind::flat_scale: return "flat_scale";
    case ScaleKind::unknown: return "unknown";
  }
  return "?";
}

struct ScaleProfile {
  ScaleKind kind = ScaleKind::unknown;
  /// Limit of rho for bounded_ratio.
  double ratio = 0.0;
  /// For flat_scale: judgment of the psi series alone (phi bounded, so every
  /// s gives the same verdict).
  std::optional<Judgment> flat;
  double log_slope = 0.0;
};

/// Classifies s phi + psi for every s > 0 at once (phi >= 0 required).
///
///   unbounded_ratio  rho -> infinity with sum e^(psi/2) < infinity: converges for all s
///   vanishing_ratio  rho -> 0 (or psi >= 0) with phi growing:      diverges for all s
///   bounded_ratio    rho -> R: converges for s < R, diverges for s > R
///   flat_scale       phi bounded: all s share the verdict of psi
inline ScaleProfile scale_profile(const LogTerm& phi, const LogTerm& psi, Index start) {
  ScaleProfile out;
  std::vector<Index> ks;
  std::vector<double> ph, ps;
  for (Index k : detail::window_indices(start)) {
    const double a = phi(k), b = psi(k);
    if (std::isnan(a) || std::isnan(b)) break;
    if (a == kPosInf && std::isfinite(b)) {
      // phi has outgrown double range while psi has not: rho -> 0.
      ks.push_back(k);
      ph.push_back(a);
      ps.push_back(b);
      break;
    }
    if (!std::isfinite(a) || b == kPosInf) break;
    ks.push_back(k);
    ph.push_back(a);
    ps.push_back(b);
  }
  if (ks.size() < 8) return out;
  const std::size_t n = ks.size();
  const std::size_t from = n - std::max<std::size_t>(4, n / 2);

  if (ph.back() == kPosInf) {
    out.kind = ScaleKind::vanishing_ratio;
    return out;
  }
  double early_max = 0.0;
  for (std::size_t i = 0; i < from; ++i) early_max = std::max(early_max, ph[i]);
  double late_max = 0.0;
  for (std::size_t i = from; i < n; ++i) late_max = std::max(late_max, ph[i]);
  if (late_max <= early_max * (1.0 + 1e-9) + 1e-12) {
    out.kind = ScaleKind::flat_scale;
    std::vector<std::pair<Index, double>> w;
    for (std::size_t i = 0; i < n; ++i) w.emplace_back(ks[i], ps[i]);
    out.flat = judge_window(std::move(w));
    return out;
  }
  if (ps.back() == kNegInf) {
    // Coefficients vanish identically on the tail.
    out.kind = ScaleKind::unbounded_ratio;
    out.log_slope = kPosInf;
    return out;
  }
  if (ps.back() >= 0.0) {
    out.kind = ScaleKind::vanishing_ratio;
    return out;
  }
  const double rho_first = -ps[from] / ph[from];
  const double rho_last = -ps.back() / ph.back();
  if (!(rho_first > 0.0) || !(rho_last > 0.0)) return out;
  const double slope = (std::log(rho_last) - std::log(rho_first)) /
                       (std::log(static_cast<double>(ks.back())) - std::log(static_cast<double>(ks[from])));
  out.log_slope = slope;
  if (slope >= 0.05 && ps.back() <= -3.0 * std::log(static_cast<double>(ks.back()))) {
    out.kind = ScaleKind::unbounded_ratio;
  } else if (slope <= -0.05) {
    out.kind = ScaleKind::vanishing_ratio;
  } else if (std::abs(slope) < 0.01) {
    out.kind = ScaleKind::bounded_ratio;
    out.ratio = rho_last;
  }
  return out;
}

}  // namespace gevrey
