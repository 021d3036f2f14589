#pragma once

/**
 * @file counterexample.hpp
 * @brief Initial values whose two-sided weak solutions are not Roumieu
 *        Gevrey of order beta, built when sigma(A) escapes every cone
 *        P^beta_{b,b} along an unbounded sequence.
 *
 * Selection: scanning atoms by index, the n-th chosen point satisfies
 *
 *   -n^-2 |Im lambda_n|^(1/beta) < Re lambda_n < n^-2 |Im lambda_n|^(1/beta),
 *   |lambda_n| > max(n, |lambda_{n-1}|),  lambda_0 = 0.
 *
 * Bounded real parts (|Re| <= omega): f = sum k^-2 e_k. Real parts tending to
 * +infinity: after thinning to Re lambda_{n(k)} >= k,
 * f = sum e^{-n(k) Re lambda_{n(k)}} e_{n(k)}. Real parts tending to
 * -infinity are handled on the reflected operator.
 */

#include <gevrey/calculus.hpp>
#include <gevrey/error.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/region.hpp>
#include <gevrey/series.hpp>
#include <gevrey/state.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

struct EscapeEntry {
  /// 1-based position in the (thinned) selection.
  Index position = 1;
  /// Selection counter n of the point in the unthinned sequence.
  Index counter = 1;
  /// Atom index in the spectrum.
  Index index = 1;
  SpectralPoint lambda;
};

struct EscapeSelection {
  double beta = 1.0;
  EscapeRegime regime = EscapeRegime::bounded_real;
  double omega = 0.0;
  std::vector<EscapeEntry> entries;
  /// The selection provably continues forever (closed-form escape rule).
  bool infinite = false;
};

inline bool in_selection_strip(const SpectralPoint& p, Index n, double beta) {
  const double edge = std::pow(std::abs(p.im), 1.0 / beta) / (static_cast<double>(n) * static_cast<double>(n));
  return -edge < p.re && p.re < edge;
}

namespace detail {

struct RegimeInfo {
  EscapeRegime regime = EscapeRegime::bounded_real;
  double omega = 0.0;
};

// Sign pattern of Re lambda_k along a generator, known in closed form.
inline RegimeInfo generator_regime(const SpectrumSpec& spec) {
  RegimeInfo r = std::visit(
      [](const auto& g) -> RegimeInfo {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          return {g.sigma >= 0.0 ? EscapeRegime::unbounded_pos : EscapeRegime::unbounded_neg, 0.0};
        } else if constexpr (std::is_same_v<T, ImaginaryExponential>) {
          return {EscapeRegime::bounded_real, 0.0};
        } else if constexpr (std::is_same_v<T, ParabolaEdge>) {
          if (g.c == 0.0) return {EscapeRegime::bounded_real, 0.0};
          return {g.c > 0.0 ? EscapeRegime::unbounded_pos : EscapeRegime::unbounded_neg, 0.0};
        } else {
          if (g.b.real() == 0.0) return {EscapeRegime::bounded_real, std::abs(g.a.real())};
          return {g.b.real() > 0.0 ? EscapeRegime::unbounded_pos : EscapeRegime::unbounded_neg, 0.0};
        }
      },
      spec.law());
  if (spec.negated() && r.regime != EscapeRegime::bounded_real) {
    r.regime = r.regime == EscapeRegime::unbounded_pos ? EscapeRegime::unbounded_neg : EscapeRegime::unbounded_pos;
  }
  return r;
}

inline double regime_sign(EscapeRegime r) { return r == EscapeRegime::unbounded_neg ? -1.0 : 1.0; }

// A finite selection is unbounded of one sign when that sign dominates, the
// real parts increase strictly and enough points survive thinning.
inline RegimeInfo finite_regime(const std::vector<EscapeEntry>& cand, Index count) {
  double omega = 0.0;
  int pos = 0, neg = 0;
  for (const auto& c : cand) {
    omega = std::max(omega, std::abs(c.lambda.re));
    pos += c.lambda.re > 0.0;
    neg += c.lambda.re < 0.0;
  }
  const RegimeInfo bounded{EscapeRegime::bounded_real, omega};
  if (pos == neg) return bounded;
  const double sigma = pos > neg ? 1.0 : -1.0;
  double last = kNegInf;
  Index kept = 0;
  for (const auto& c : cand) {
    const double re = sigma * c.lambda.re;
    if (re <= 0.0) continue;
    if (!(re > last)) return bounded;
    last = re;
    if (re >= static_cast<double>(kept + 1)) ++kept;
  }
  if (kept < count) return bounded;
  return {sigma > 0.0 ? EscapeRegime::unbounded_pos : EscapeRegime::unbounded_neg, 0.0};
}

}  // namespace detail

/// Does sigma(A) leave every cone P^beta_{b,b} along an unbounded sequence?
/// Exact for generators (the escape rule at a vanishing b); false for finite lists.
inline bool escapes_every_cone(const SpectrumSpec& spec, double beta) {
  if (!spec.is_generator() || !modulus_unbounded(spec.law())) return false;
  return !exact_escape_profile(spec, Region(beta, 1e-12, 1e-12)).eventually_inside;
}

/// Greedy selection of `count` escaping points among atoms 1..N.
inline EscapeSelection select_escaping(const SpectrumSpec& spec, double beta, Index count, Index n) {
  if (!(beta >= 1.0)) throw ValidationError("beta out of range (must be >= 1)");
  if (count < 1) throw ValidationError("count out of range (must be >= 1)");
  EscapeSelection sel;
  sel.beta = beta;
  sel.infinite = escapes_every_cone(spec, beta);

  std::vector<std::pair<Index, SpectralPoint>> atoms;
  if (spec.is_generator()) {
    for (Index k = 1; k <= n; ++k) {
      const SpectralPoint p = spec.point(k);
      if (!p.finite()) break;
      atoms.emplace_back(k, p);
    }
    const auto info = detail::generator_regime(spec);
    sel.regime = info.regime;
    sel.omega = info.omega;
  } else {
    for (const auto& a : materialize(spec, n)) atoms.emplace_back(a.index, SpectralPoint::from(a.lambda));
    std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  }

  std::vector<EscapeEntry> candidates;
  double prev = 0.0;
  for (const auto& [k, p] : atoms) {
    const Index next = static_cast<Index>(candidates.size()) + 1;
    const double mod = p.modulus();
    if (!in_selection_strip(p, next, beta) || !(mod > std::max(static_cast<double>(next), prev))) continue;
    prev = mod;
    candidates.push_back({next, next, k, p});
  }
  if (!spec.is_generator()) {
    const auto info = detail::finite_regime(candidates, count);
    sel.regime = info.regime;
    sel.omega = info.omega;
  }

  for (const auto& c : candidates) {
    if (static_cast<Index>(sel.entries.size()) >= count) break;
    const Index position = static_cast<Index>(sel.entries.size()) + 1;
    // Thinning: keep only points with +-Re >= their new position.
    if (sel.regime != EscapeRegime::bounded_real &&
        !(detail::regime_sign(sel.regime) * c.lambda.re >= static_cast<double>(position))) {
      continue;
    }
    sel.entries.push_back({position, c.counter, c.index, c.lambda});
  }
  if (static_cast<Index>(sel.entries.size()) < count) {
    throw ValidationError("insufficient escape depth: found " + std::to_string(sel.entries.size()) + " of " +
                          std::to_string(count) + " points among " + std::to_string(atoms.size()) +
                          " atoms; increase N");
  }
  return sel;
}

struct DiskSystem {
  std::vector<SpectralPoint> centers;
  std::vector<double> radii;
  std::vector<Index> counters;
};

namespace detail {

// Largest eps for which the box |Re| + eps, |Im| - eps stays inside the strip.
inline double strip_margin(const SpectralPoint& c, Index n, double beta) {
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  auto g = [&](double eps) {
    return std::pow(std::max(std::abs(c.im) - eps, 0.0), 1.0 / beta) / n2 - std::abs(c.re) - eps;
  };
  double lo = 0.0, hi = std::abs(c.im);
  if (g(hi) > 0.0) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

/// Disks Delta_n = {|lambda - lambda_n| < eps_n} with eps_n < 1/n, pairwise
/// disjoint and inside the selection strip of their counter.
inline DiskSystem build_disks(const EscapeSelection& sel) {
  DiskSystem d;
  const std::size_t m = sel.entries.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& e = sel.entries[i];
    double eps = 0.5 / static_cast<double>(e.counter);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dist = std::abs(e.lambda.value() - sel.entries[j].lambda.value());
      eps = std::min(eps, 0.49 * dist);
    }
    eps = std::min(eps, 0.5 * detail::strip_margin(e.lambda, e.counter, sel.beta));
    d.centers.push_back(e.lambda);
    d.radii.push_back(eps);
    d.counters.push_back(e.counter);
  }
  return d;
}

struct SeriesRecord {
  double s = 0.0;
  /// The l^2 series of e^{s|A|^{1/beta}} f.
  Judgment direct;
  /// The pairing of e^{s|lambda|^{1/beta}} with v(f, h*, .) bounded from below
  /// as in the construction.
  std::optional<Judgment> paired;
};

struct Certificate {
  std::string kind = "roumieu_refutation";
  double beta = 1.0;
  std::vector<double> s_tested;
  std::vector<SeriesRecord> records;
  Membership membership = Membership::inconclusive;
  bool valid = false;
};

struct Synthesis {
  EscapeSelection selection;
  DiskSystem disks;
  StateVector f = StateVector::finite({});
  std::optional<StateVector> h;
  StateVector h_star = StateVector::finite({});
  Certificate certificate;
  Admissibility admissibility;
};

/// Runs the Roumieu series at every s; throws ConstructionViolated if any
/// converges (or if the membership path disagrees).
inline Certificate certify_refutation(const SpectralModel& model, const StateVector& f, double beta,
                                      const std::vector<double>& s_grid) {
  Certificate c;
  c.beta = beta;
  c.s_tested = s_grid;
  bool all_div = true;
  for (double s : s_grid) {
    SeriesRecord r;
    r.s = s;
    r.direct = domain_test_direct(model, BorelFunction::exp_modulus(s, beta), f);
    if (r.direct.verdict == Verdict::converges) {
      throw ConstructionViolated("construction violated: the Roumieu series converges at s = " +
                                 detail::num(s) + " (" + r.direct.rule + ")");
    }
    all_div = all_div && r.direct.verdict == Verdict::diverges;
    c.records.push_back(std::move(r));
  }
  std::vector<double> grid = s_grid;
  std::sort(grid.begin(), grid.end());
  c.membership = class_membership(model, f, {beta, Flavor::roumieu, grid}).member;
  if (c.membership == Membership::yes) {
    throw ConstructionViolated("construction violated: class membership reports yes");
  }
  c.valid = all_div && c.membership == Membership::no;
  return c;
}

namespace detail {

inline constexpr double kAdmissibilityT = 3.0;

// Paired series of the bounded construction: sum k^-4 e^{s|lambda_{n(k)}|^{1/beta}}
// on the head, then the minorant k^-4 e^{s k^{1/beta}} (|lambda_{n(k)}| > k).
inline Judgment paired_bounded(const EscapeSelection& sel, double s) {
  std::vector<std::pair<Index, double>> head;
  for (const auto& e : sel.entries) {
    const double k = static_cast<double>(e.position);
    head.emplace_back(e.position, -4.0 * std::log(k) + s * std::exp(e.lambda.log_abs / sel.beta));
  }
  if (!sel.infinite) return judge_series(head);
  const double beta = sel.beta;
  LogTerm tail = [s, beta](Index k) {
    const double kk = static_cast<double>(k);
    return -4.0 * std::log(kk) + s * std::pow(kk, 1.0 / beta);
  };
  Judgment j = judge_series(head, tail, static_cast<Index>(sel.entries.size()) + 1);
  j.rule = "paired_minorant/" + j.rule;
  return j;
}

// Paired series of the unbounded construction:
// sum e^{-n Re} e^{s n^2 (Re - 1/n)} n^-2 on the head, then e^n n^-2 >= e^k k^-2
// once s n >= s + 2.
inline Judgment paired_unbounded(const EscapeSelection& sel, double s) {
  const double sigma = regime_sign(sel.regime);
  std::vector<std::pair<Index, double>> head;
  for (const auto& e : sel.entries) {
    const double n = static_cast<double>(e.counter);
    const double re = sigma * e.lambda.re;
    head.emplace_back(e.position, -n * re + s * n * n * (re - 1.0 / n) - 2.0 * std::log(n));
  }
  if (!sel.infinite) return judge_series(head);
  const Index start = std::max<Index>({static_cast<Index>(sel.entries.size()) + 1, 2,
                                       static_cast<Index>(std::ceil((s + 2.0) / s))});
  LogTerm tail = [](Index k) {
    const double kk = static_cast<double>(k);
    return kk - 2.0 * std::log(kk);
  };
  Judgment j = judge_series(head, tail, start);
  j.rule = "paired_minorant/" + j.rule;
  return j;
}

inline void attach_paired(Certificate& c, const EscapeSelection& sel) {
  for (auto& r : c.records) {
    r.paired = sel.regime == EscapeRegime::bounded_real ? paired_bounded(sel, r.s) : paired_unbounded(sel, r.s);
  }
}

inline StateVector selection_state(const EscapeSelection& sel, TailCoefficient law, double weight) {
  StateVector::Entries head;
  std::vector<double> logs;
  const double sigma = regime_sign(sel.regime);
  for (const auto& e : sel.entries) {
    double l = 0.0;
    if (law == TailCoefficient::inverse_square) {
      const double c = static_cast<double>(sel.regime == EscapeRegime::bounded_real ? e.position : e.counter);
      l = -2.0 * std::log(c);
    } else {
      l = -weight * static_cast<double>(e.counter) * sigma * e.lambda.re;
    }
    head.emplace_back(e.index, std::complex<double>{std::exp(l), 0.0});
    logs.push_back(l);
  }
  if (!sel.infinite) return StateVector::finite(head);
  SelectionTail tail{sel.regime, sel.omega, sel.beta, law, weight};
  return StateVector::selected(head, tail, logs);
}

}  // namespace detail

inline const std::vector<double>& default_s_grid() {
  static const std::vector<double> grid{0.1, 0.5, 1.0, 2.0};
  return grid;
}

/// Bounded real parts: f = h* = sum k^-2 e_{n(k)}.
inline Synthesis synthesize_bounded(const SpectralModel& model, const EscapeSelection& sel,
                                    const std::vector<double>& s_grid = default_s_grid()) {
  if (sel.regime != EscapeRegime::bounded_real) throw ValidationError("regime mismatch: expected bounded_real");
  Synthesis out;
  out.selection = sel;
  out.disks = build_disks(sel);
  out.f = detail::selection_state(sel, TailCoefficient::inverse_square, 1.0);
  out.h_star = out.f;
  out.admissibility =
      admissible_two_sided(model, out.f, {-detail::kAdmissibilityT, detail::kAdmissibilityT});
  out.certificate = certify_refutation(model, out.f, sel.beta, s_grid);
  detail::attach_paired(out.certificate, sel);
  return out;
}

/// Real parts tending to +infinity: f = sum e^{-n(k) Re} e_{n(k)},
/// h = sum e^{-(n(k)/2) Re} e_{n(k)}, h* = sum n(k)^-2 e_{n(k)}.
inline Synthesis synthesize_unbounded(const SpectralModel& model, const EscapeSelection& sel,
                                      const std::vector<double>& s_grid = default_s_grid()) {
  if (sel.regime != EscapeRegime::unbounded_pos) throw ValidationError("regime mismatch: expected unbounded_pos");
  Synthesis out;
  out.selection = sel;
  out.disks = build_disks(sel);
  out.f = detail::selection_state(sel, TailCoefficient::exp_re, 1.0);
  out.h = detail::selection_state(sel, TailCoefficient::exp_re, 0.5);
  out.h_star = detail::selection_state(sel, TailCoefficient::inverse_square, 1.0);
  out.admissibility =
      admissible_two_sided(model, out.f, {-detail::kAdmissibilityT, detail::kAdmissibilityT});
  out.certificate = certify_refutation(model, out.f, sel.beta, s_grid);
  detail::attach_paired(out.certificate, sel);
  return out;
}

/// The selection of the reflected spectrum: every lambda negated.
inline EscapeSelection reflect_selection(EscapeSelection sel) {
  for (auto& e : sel.entries) {
    e.lambda.re = -e.lambda.re;
    e.lambda.im = -e.lambda.im;
  }
  if (sel.regime != EscapeRegime::bounded_real) {
    sel.regime = sel.regime == EscapeRegime::unbounded_pos ? EscapeRegime::unbounded_neg : EscapeRegime::unbounded_pos;
  }
  return sel;
}

/// Dispatches on the regime; Re -> -infinity is built on -A and mapped back.
inline Synthesis synthesize(const SpectralModel& model, const EscapeSelection& sel,
                            const std::vector<double>& s_grid = default_s_grid()) {
  if (sel.regime == EscapeRegime::bounded_real) return synthesize_bounded(model, sel, s_grid);
  if (sel.regime == EscapeRegime::unbounded_pos) return synthesize_unbounded(model, sel, s_grid);
  const auto [mirror, unused] = reflect(model, StateVector::finite({}));
  (void)unused;
  Synthesis s = synthesize_unbounded(mirror, reflect_selection(sel), s_grid);
  s.selection = sel;
  s.disks = build_disks(sel);
  s.f = s.f.reflected();
  if (s.h) s.h = s.h->reflected();
  s.h_star = s.h_star.reflected();
  s.admissibility = admissible_two_sided(model, s.f, {-detail::kAdmissibilityT, detail::kAdmissibilityT});
  return s;
}

namespace detail {

inline Json judgment_to_json(const Judgment& j) {
  Json w = Json::array();
  for (const auto& [k, l] : j.window) w.push_back({k, l});
  return {{"verdict", verdict_name(j.verdict)},
          {"rule", j.rule},
          {"index", j.index},
          {"head_terms", j.head_terms},
          {"head_log_sum", j.head_log_sum},
          {"window", std::move(w)}};
}

}  // namespace detail

inline Json certificate_to_json(const Certificate& c) {
  Json records = Json::array();
  for (const auto& r : c.records) {
    Json rec = {{"s", r.s}, {"direct", detail::judgment_to_json(r.direct)}};
    if (r.paired) rec["paired"] = detail::judgment_to_json(*r.paired);
    records.push_back(std::move(rec));
  }
  return {{"kind", c.kind},
          {"target_class", {{"beta", c.beta}, {"flavor", "roumieu"}}},
          {"s_tested", c.s_tested},
          {"judgments", std::move(records)},
          {"membership", membership_name(c.membership)},
          {"valid", c.valid}};
}

/// Recomputes the certificate of `f` and compares canonical bytes.
inline bool replay_certificate(const SpectralModel& model, const StateVector& f, const Certificate& c,
                               const EscapeSelection* sel = nullptr) {
  Certificate again = certify_refutation(model, f, c.beta, c.s_tested);
  if (sel) detail::attach_paired(again, *sel);
  return canonical_dump(certificate_to_json(again)) == canonical_dump(certificate_to_json(c));
}

}  // namespace gevrey
