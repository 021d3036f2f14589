#pragma once

/**
 * @file evolution.hpp
 * @brief Weak solutions y(t) = e^{tA} f on the whole real line.
 */

#include <gevrey/calculus.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/series.hpp>
#include <gevrey/state.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

struct Admissibility {
  Membership verdict = Membership::inconclusive;
  double t_max = 0.0;
  Judgment forward;   // t = +t_max
  Judgment backward;  // t = -t_max
  std::optional<ScaleProfile> profile;
  std::string reason;
};

/// f in the intersection over real t of D(e^{tA})?
inline Admissibility admissible_two_sided(const SpectralModel& model, const StateVector& f,
                                          const std::vector<double>& t_grid) {
  double t_max = 0.0;
  for (double t : t_grid) t_max = std::max(t_max, std::abs(t));
  const bool symmetric = std::find(t_grid.begin(), t_grid.end(), t_max) != t_grid.end() &&
                         std::find(t_grid.begin(), t_grid.end(), -t_max) != t_grid.end();
  if (!(t_max > 0.0) || !symmetric) throw ValidationError("t_grid must contain +t_max and -t_max with t_max > 0");

  Admissibility a;
  a.t_max = t_max;
  a.forward = domain_test_direct(model, BorelFunction::exp(t_max), f);
  a.backward = domain_test_direct(model, BorelFunction::exp(-t_max), f);
  if (a.forward.verdict == Verdict::diverges || a.backward.verdict == Verdict::diverges) {
    a.verdict = Membership::no;
    a.reason = "diverges at an extreme time";
    return a;
  }
  if (a.forward.verdict != Verdict::converges || a.backward.verdict != Verdict::converges) {
    a.reason = "extreme-time series not decided";
    return a;
  }
  if (detail::is_finite_sum(model, f)) {
    a.verdict = Membership::yes;
    a.reason = "finite sum";
    return a;
  }
  if (f.kind() == StateKind::selected) {
    // The selection majorants exist for every real t once they exist at all.
    const bool maj = a.forward.rule.rfind("proof_majorant", 0) == 0 && a.backward.rule.rfind("proof_majorant", 0) == 0;
    a.verdict = maj ? Membership::yes : Membership::inconclusive;
    a.reason = maj ? "selection majorant for every t" : "selection tail not bounded for every t";
    return a;
  }
  // |e^{t lambda}|^2 <= e^{|t| 2|Re lambda|}: one profile covers every t.
  LogTerm phi = [&model](Index k) { return 2.0 * std::abs(model.point(k).re); };
  LogTerm psi = [&model, &f](Index k) { return 2.0 * f.coefficient(k, model.point(k)).log_mag; };
  a.profile = scale_profile(phi, psi, model.truncation() + 1);
  switch (a.profile->kind) {
    case ScaleKind::unbounded_ratio:
      a.verdict = Membership::yes;
      a.reason = "coefficients outrun e^{|t||Re lambda|} for every t";
      break;
    case ScaleKind::flat_scale:
      a.verdict = a.profile->flat->verdict == Verdict::converges ? Membership::yes : Membership::inconclusive;
      a.reason = "real parts bounded";
      break;
    case ScaleKind::vanishing_ratio:
    case ScaleKind::bounded_ratio:
      a.verdict = Membership::no;
      a.reason = "diverges for large |t|";
      break;
    case ScaleKind::unknown:
      a.reason = "tail profile not recognized";
      break;
  }
  return a;
}

/// e^{tA} f.
inline StateVector evolve(const SpectralModel& model, const StateVector& f, double t, bool unchecked = false) {
  return apply_borel(model, BorelFunction::exp(t), f, unchecked);
}

/// y(t0) = e^{t0 A} f as the initial value of the translated solution.
inline StateVector translate_solution(const SpectralModel& model, const StateVector& f, double t0) {
  return evolve(model, f, t0);
}

/// A^n e^{tA} f for n = 0..n_max; a DomainError carries the smallest failing n.
inline std::vector<StateVector> derivative_chain(const SpectralModel& model, const StateVector& f, double t,
                                                 int n_max) {
  if (n_max < 0) throw ValidationError("n_max out of range (must be >= 0)");
  std::vector<StateVector> chain{evolve(model, f, t)};
  for (int n = 1; n <= n_max; ++n) {
    StateVector next = chain.back().multiplied(BorelFunction::power(1));
    if (domain_test_direct(model, BorelFunction::one(), next).verdict == Verdict::diverges) {
      throw DomainError("y(t) is outside D(A^" + std::to_string(n) + ")", n);
    }
    chain.push_back(std::move(next));
  }
  return chain;
}

/// The model of -A and the same vector described against it, so that
/// evolve(reflected, f', t) = evolve(model, f, -t).
inline std::pair<SpectralModel, StateVector> reflect(const SpectralModel& model, const StateVector& f) {
  return {SpectralModel(negate(model.spectrum()), model.truncation(), model.m()), f.reflected()};
}

namespace detail {

// Composite Simpson rule for int_{t0}^{t} e^{s lambda} ds.
inline std::complex<double> simpson_exp(std::complex<double> lambda, double t0, double t, int nodes) {
  const int m = nodes - 1;
  const double h = (t - t0) / m;
  std::complex<double> acc{0.0, 0.0};
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * std::exp((t0 + i * h) * lambda);
  }
  return acc * (h / 3.0);
}

}  // namespace detail

/// ||y(t) - y(t0) - A Q(int_{t0}^t y)|| / ||y(t)|| with Simpson quadrature Q.
inline double mild_solution_check(const SpectralModel& model, const StateVector& f, double t0, double t,
                                  int nodes) {
  if (nodes < 3 || nodes % 2 == 0) throw ValidationError("quadrature_points out of range (odd and >= 3)");
  std::vector<double> res, ref;
  for (const auto& m : materialize_state(model, f)) {
    const std::complex<double> lambda = model.point(m.k).value();
    const std::complex<double> c = m.c.value;
    const std::complex<double> yt = std::exp(t * lambda) * c;
    const std::complex<double> y0 = std::exp(t0 * lambda) * c;
    const std::complex<double> r = yt - y0 - lambda * detail::simpson_exp(lambda, t0, t, nodes) * c;
    res.push_back(std::norm(r));
    ref.push_back(std::norm(yt));
  }
  const double num = std::sqrt(pairwise_sum(res));
  const double den = std::sqrt(pairwise_sum(ref));
  return den > 0.0 ? num / den : num;
}

struct MildConvergence {
  std::vector<int> nodes;
  std::vector<double> residuals;
  /// log2 of the first residual ratio (Simpson: about 4).
  double observed_order = 0.0;
};

/// Doubles the Simpson panels from `start` nodes until the residual stops
/// improving or 2^15 + 1 nodes are reached.
inline MildConvergence mild_convergence(const SpectralModel& model, const StateVector& f, double t0, double t,
                                        int start = 17) {
  MildConvergence out;
  constexpr int kCap = (1 << 15) + 1;
  for (int n = start; n <= kCap; n = 2 * n - 1) {
    const double r = mild_solution_check(model, f, t0, t, n);
    out.nodes.push_back(n);
    out.residuals.push_back(r);
    const std::size_t s = out.residuals.size();
    if (s >= 2 && !(out.residuals[s - 1] < 0.5 * out.residuals[s - 2])) break;
  }
  if (out.residuals.size() >= 2 && out.residuals[0] > 0.0 && out.residuals[1] > 0.0) {
    out.observed_order = std::log2(out.residuals[0] / out.residuals[1]);
  }
  return out;
}

struct TraceSample {
  double t = 0.0;
  double log_norm = kNegInf;
  /// log ||A^n y(t)||, n = 1..derivatives.
  std::vector<double> derivative_log_norms;
  /// Bound on the l^2 norm of the discarded tail k > N.
  double tail_bound = 0.0;
  bool certified = true;
  std::optional<double> mild_residual;
};

struct EvolutionTrace {
  Index truncation = 0;
  std::vector<TraceSample> samples;
  [[nodiscard]] bool certified() const {
    return std::all_of(samples.begin(), samples.end(), [](const TraceSample& s) { return s.certified; });
  }
};

namespace detail {

// sqrt(sum_{k > N} |y_k|^2) from a power majorant C k^{-1.5}: at most sqrt(2C / sqrt(N)).
inline std::pair<double, bool> tail_majorant(const SpectralModel& model, const StateVector& y) {
  if (is_finite_sum(model, y)) return {0.0, true};
  const SeriesParts parts = series_parts(model, BorelFunction::one(), y);
  Judgment j;
  Index start = model.truncation() + 1;
  if (parts.bounds) {
    if (!parts.bounds->majorant) return {kPosInf, false};
    j = judge_series({}, doubled(parts.bounds->majorant), parts.bounds->majorant_start);
    start = parts.bounds->majorant_start;
  } else {
    j = judge_series({}, doubled(parts.tail), parts.tail_start);
  }
  if (j.verdict != Verdict::converges) return {kPosInf, false};
  if (j.rule == "vanishing_tail") return {0.0, true};
  double log_c = kNegInf;
  for (const auto& [k, l] : j.window) log_c = std::max(log_c, l + 1.5 * std::log(static_cast<double>(k)));
  const double log_bound = 0.5 * (log_c + std::log(2.0) - 0.5 * std::log(static_cast<double>(start - 1 > 0 ? start - 1 : 1)));
  return {std::exp(log_bound), true};
}

}  // namespace detail

inline EvolutionTrace evolution_trace(const SpectralModel& model, const StateVector& f,
                                      const std::vector<double>& times, int derivatives = 0,
                                      bool check_mild = false) {
  EvolutionTrace trace;
  trace.truncation = model.truncation();
  for (double t : times) {
    TraceSample s;
    s.t = t;
    const StateVector y = evolve(model, f, t);
    s.log_norm = log_norm(model, y);
    if (derivatives > 0) {
      const auto chain = derivative_chain(model, f, t, derivatives);
      for (int n = 1; n <= derivatives; ++n) s.derivative_log_norms.push_back(log_norm(model, chain[n]));
    }
    std::tie(s.tail_bound, s.certified) = detail::tail_majorant(model, y);
    if (check_mild) s.mild_residual = mild_solution_check(model, f, 0.0, t == 0.0 ? 0.0 : t, t == 0.0 ? 3 : 129);
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

}  // namespace gevrey
