#pragma once

/**
 * @file calculus.hpp
 * @brief Diagonal model of a scalar-type spectral operator on l^2: spectral
 *        projections, the Borel calculus F(A), domain tests and the splitting
 *        A = A_- + A_+.
 *
 * (F(A) f)_k = F(lambda_k) f_k, so f lies in D(F(A)) exactly when
 * sum_k |F(lambda_k)|^2 |f_k|^2 converges. The dual form pairs f with
 * functionals g and asks for sum_k |F(lambda_k)| |f_k| |g_k| < infinity
 * together with vanishing tails over {|F| > n}.
 */

#include <gevrey/borel.hpp>
#include <gevrey/error.hpp>
#include <gevrey/logmath.hpp>
#include <gevrey/series.hpp>
#include <gevrey/spectrum.hpp>
#include <gevrey/state.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

/// sigma(A) together with the active truncation N and the spectral-measure
/// bound M (M = 1 for the orthonormal model; carried into inequalities only).
class SpectralModel {
 public:
  explicit SpectralModel(SpectrumSpec spec, Index n = 0, double m = 1.0)
      : spec_(std::move(spec)), n_(n > 0 ? n : spec_.truncation_default()), m_(m) {
    if (!(m_ >= 1.0)) throw ValidationError("M out of range (must be >= 1)");
    atoms_ = materialize(spec_, n_);
  }

  [[nodiscard]] const SpectrumSpec& spectrum() const { return spec_; }
  [[nodiscard]] Index truncation() const { return n_; }
  [[nodiscard]] double m() const { return m_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  [[nodiscard]] SpectralPoint point(Index k) const { return spec_.point(k); }

  /// Indices summed explicitly for a law state: 1..N on generators (through
  /// `point`, which survives overflow), the listed atoms otherwise.
  [[nodiscard]] std::vector<Index> head_indices() const {
    std::vector<Index> out;
    if (spec_.is_generator()) {
      for (Index k = 1; k <= n_; ++k) out.push_back(k);
    } else {
      for (const auto& a : atoms_) out.push_back(a.index);
    }
    return out;
  }

 private:
  SpectrumSpec spec_;
  Index n_;
  double m_;
  std::vector<Atom> atoms_;
};

/// Lower and upper bounds for log|F(lambda) f| on the tail of a selected state,
/// indexed by selection position. Empty functions mean "no bound".
struct TailBounds {
  LogTerm minorant;
  Index minorant_start = 1;
  LogTerm majorant;
  Index majorant_start = 1;
};

/// Bounds implied by the selection invariants for the product of `factors`
/// with the tail coefficients.
inline TailBounds selected_tail_bounds(const SelectionTail& tail, const std::vector<Factor>& factors,
                                       Index first_position) {
  TailBounds out;
  double log_c = 0.0;
  if (tail.regime == EscapeRegime::bounded_real) {
    // |Re| <= omega, |lambda| > k, counter = position.
    struct Piece {
      double lo_s = 0.0, lo_b = 1.0;  // s k^(1/b)
      double hi_s = 0.0, hi_b = 1.0;
    };
    bool lo_ok = true, hi_ok = true;
    double lo_const = 0.0, hi_const = 0.0, lo_logk = 0.0;
    std::vector<Piece> mods;
    for (const auto& f : factors) {
      if (const auto* p = std::get_if<Power>(&f)) {
        lo_logk += p->n;
        hi_ok = false;
      } else if (const auto* e = std::get_if<Exp>(&f)) {
        if (e->z.imag() != 0.0) {
          lo_ok = hi_ok = false;
        } else {
          lo_const -= std::abs(e->z.real()) * tail.omega;
          hi_const += std::abs(e->z.real()) * tail.omega;
        }
      } else if (const auto* m = std::get_if<ExpModulus>(&f)) {
        if (m->s >= 0.0) {
          mods.push_back({m->s, m->beta, 0.0, 1.0});
          hi_ok = false;
        } else {
          mods.push_back({0.0, 1.0, m->s, m->beta});
          lo_ok = false;
        }
      } else if (std::get_if<Indicator>(&f)) {
        lo_ok = false;
      } else {
        log_c += log_abs(std::get<Constant>(f).c);
      }
    }
    auto base = [tail](double k) {
      return tail.coefficient == TailCoefficient::inverse_square ? -2.0 * std::log(k) : 0.0;
    };
    const double w_omega = tail.coefficient == TailCoefficient::exp_re ? tail.weight * tail.omega : 0.0;
    if (lo_ok) {
      out.minorant = [=](Index k) {
        const double kk = static_cast<double>(k);
        double v = base(kk) - w_omega * kk + lo_const + log_c + lo_logk * std::log(kk);
        for (const auto& m : mods) v += m.lo_s * std::pow(kk, 1.0 / m.lo_b);
        return v;
      };
      out.minorant_start = first_position;
    }
    if (hi_ok) {
      out.majorant = [=](Index k) {
        const double kk = static_cast<double>(k);
        double v = base(kk) + w_omega * kk + hi_const + log_c;
        for (const auto& m : mods) v += m.hi_s * std::pow(kk, 1.0 / m.hi_b);
        return v;
      };
      out.majorant_start = first_position;
    }
    return out;
  }

  // Unbounded regime, with Re' = sigma Re >= k and counter n >= k.
  const double sigma = tail.regime == EscapeRegime::unbounded_pos ? 1.0 : -1.0;
  double tau = 0.0;
  bool maj_ok = true, min_ok = true;
  double s_main = 0.0;
  for (const auto& f : factors) {
    if (std::get_if<Power>(&f)) {
      maj_ok = false;  // |lambda|^n >= 1 keeps the minorant
    } else if (const auto* e = std::get_if<Exp>(&f)) {
      if (e->z.imag() != 0.0) {
        maj_ok = min_ok = false;
      } else {
        tau += sigma * e->z.real();
      }
    } else if (const auto* m = std::get_if<ExpModulus>(&f)) {
      maj_ok = false;
      if (m->s < 0.0) min_ok = false;
      if (m->s > 0.0 && m->beta <= tail.beta) s_main = std::max(s_main, m->s);
    } else if (std::get_if<Indicator>(&f)) {
      min_ok = false;
    } else {
      log_c += log_abs(std::get<Constant>(f).c);
    }
  }
  if (tail.coefficient == TailCoefficient::inverse_square) {
    // n^-2 <= k^-2; e^{tau Re'} <= 1 needs tau <= 0.
    if (maj_ok && tau <= 0.0) {
      out.majorant = [log_c](Index k) { return log_c - 2.0 * std::log(static_cast<double>(k)); };
      out.majorant_start = first_position;
    }
    return out;
  }
  const double w = tail.weight;
  if (maj_ok) {
    // (tau - w n) Re' <= -Re' <= -k once w n - tau >= 1.
    out.majorant = [log_c](Index k) { return log_c - static_cast<double>(k); };
    out.majorant_start =
        std::max(first_position, static_cast<Index>(std::ceil((std::max(tau, 0.0) + 1.0) / w)));
  }
  if (min_ok && s_main > 0.0) {
    // s|lambda|^(1/b) >= s|Im|^(1/beta) > s n^2 Re', so the exponent is at
    // least (s n^2 - w n + tau) Re' >= Re' >= k once s n^2 - w n + tau >= 1.
    const double n0 = (w + std::sqrt(w * w + 4.0 * s_main * std::max(0.0, 1.0 - tau))) / (2.0 * s_main);
    out.minorant = [log_c](Index k) { return log_c + static_cast<double>(k); };
    out.minorant_start = std::max(first_position, static_cast<Index>(std::ceil(n0)));
  }
  return out;
}

/// The terms log|F(lambda_k) f_k| of a state against a model.
struct SeriesParts {
  std::vector<std::pair<Index, double>> head;
  /// Law tails: log|F f_k| for atom index k >= tail_start.
  LogTerm tail;
  Index tail_start = 1;
  /// Selected tails.
  std::optional<TailBounds> bounds;
};

namespace detail {

inline std::vector<Index> state_head_indices(const SpectralModel& model, const StateVector& f) {
  if (f.kind() == StateKind::law) return model.head_indices();
  std::vector<Index> out;
  for (const auto& [k, c] : f.coeffs()) {
    if (!model.spectrum().has_index(k)) {
      throw ValidationError("state coefficient index " + std::to_string(k) + " has no atom in the spectrum");
    }
    out.push_back(k);
  }
  return out;
}

inline double term_log(const SpectralModel& model, const BorelFunction& fn, const StateVector& f, Index k) {
  const SpectralPoint p = model.point(k);
  const double c = f.coefficient(k, p).log_mag;
  if (c == kNegInf) return kNegInf;
  const double v = fn.log_abs(p);
  if (v == kNegInf) return kNegInf;
  return c + v;
}

}  // namespace detail

inline SeriesParts series_parts(const SpectralModel& model, const BorelFunction& fn, const StateVector& f) {
  SeriesParts out;
  for (Index k : detail::state_head_indices(model, f)) out.head.emplace_back(k, detail::term_log(model, fn, f, k));
  if (f.kind() == StateKind::law && model.spectrum().is_generator()) {
    out.tail = [&model, fn, f](Index k) { return detail::term_log(model, fn, f, k); };
    out.tail_start = model.truncation() + 1;
  } else if (f.kind() == StateKind::selected) {
    std::vector<Factor> factors = fn.factors();
    const auto& more = f.applied().factors();
    factors.insert(factors.end(), more.begin(), more.end());
    out.bounds = selected_tail_bounds(*f.tail(), factors, static_cast<Index>(f.coeffs().size()) + 1);
  }
  return out;
}

namespace detail {

inline LogTerm doubled(LogTerm t) {
  return [t = std::move(t)](Index k) { return 2.0 * t(k); };
}

inline Judgment judge_squared(const SeriesParts& parts) {
  std::vector<std::pair<Index, double>> head;
  for (const auto& [k, l] : parts.head) head.emplace_back(k, 2.0 * l);
  if (!parts.bounds) {
    return judge_series(head, parts.tail ? doubled(parts.tail) : LogTerm{}, parts.tail_start);
  }
  Judgment h = judge_series(head);
  if (h.verdict != Verdict::converges) return h;
  const TailBounds& b = *parts.bounds;
  if (b.minorant) {
    Judgment m = judge_series({}, doubled(b.minorant), b.minorant_start);
    if (m.verdict == Verdict::diverges) {
      m.rule = "proof_minorant/" + m.rule;
      m.head_terms = h.head_terms;
      m.head_log_sum = h.head_log_sum;
      return m;
    }
  }
  if (b.majorant) {
    Judgment m = judge_series({}, doubled(b.majorant), b.majorant_start);
    if (m.verdict == Verdict::converges) {
      m.rule = "proof_majorant/" + m.rule;
      m.head_terms = h.head_terms;
      m.head_log_sum = h.head_log_sum;
      return m;
    }
  }
  h.verdict = Verdict::inconclusive;
  h.rule = "selection_tail_unbounded";
  return h;
}

}  // namespace detail

/// f in D(F(A))?  Decides sum |F(lambda_k)|^2 |f_k|^2 < infinity.
inline Judgment domain_test_direct(const SpectralModel& model, const BorelFunction& fn, const StateVector& f) {
  return detail::judge_squared(series_parts(model, fn, f));
}

struct DualTest {
  Verdict verdict = Verdict::converges;
  /// One judgment of sum |F| v_k(f, g) per supplied dual, then the canonical one.
  std::vector<Judgment> pairings;
  /// T(n) = sum_{|F| > n} |F| v_k on the head, n = 10^0..10^6, per pairing (log scale).
  std::vector<std::vector<double>> tails;
  bool tails_vanish = true;
};

namespace detail {

inline std::vector<double> tail_profile(const std::vector<std::pair<Index, double>>& f_logs,
                                        const std::vector<double>& weights_log) {
  std::vector<double> out;
  for (int j = 0; j <= 6; ++j) {
    const double log_n = j * std::log(10.0);
    std::vector<double> terms;
    for (std::size_t i = 0; i < f_logs.size(); ++i) {
      if (f_logs[i].second > log_n) terms.push_back(weights_log[i]);
    }
    out.push_back(log_sum_exp(terms));
  }
  return out;
}

inline bool profile_vanishes(const std::vector<double>& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] < kPosInf)) return false;
    if (i > 0 && !(t[i] <= t[i - 1] || t[i] == kNegInf)) return false;
  }
  return true;
}

}  // namespace detail

/// Dual (total variation) form of the domain test.
inline DualTest domain_test_dual(const SpectralModel& model, const BorelFunction& fn, const StateVector& f,
                                 const std::vector<StateVector>& duals) {
  DualTest out;
  auto combine = [&out](Verdict v) {
    if (v == Verdict::diverges || out.verdict == Verdict::diverges) {
      out.verdict = Verdict::diverges;
    } else if (v == Verdict::inconclusive) {
      out.verdict = Verdict::inconclusive;
    }
  };

  for (const auto& g : duals) {
    std::set<Index> idx;
    for (Index k : detail::state_head_indices(model, f)) idx.insert(k);
    for (Index k : detail::state_head_indices(model, g)) idx.insert(k);
    std::vector<std::pair<Index, double>> head, fvals;
    std::vector<double> weights;
    for (Index k : idx) {
      const SpectralPoint p = model.point(k);
      const double lf = fn.log_abs(p);
      const double a = f.coefficient(k, p).log_mag, b = g.coefficient(k, p).log_mag;
      const double t = (a == kNegInf || b == kNegInf || lf == kNegInf) ? kNegInf : lf + a + b;
      head.emplace_back(k, t);
      fvals.emplace_back(k, lf);
      weights.push_back(t);
    }
    const bool f_inf = f.kind() != StateKind::finite, g_inf = g.kind() != StateKind::finite;
    Judgment j;
    if (f_inf && g_inf && model.spectrum().is_generator()) {
      if (f.kind() == StateKind::law && g.kind() == StateKind::law) {
        LogTerm tail = [&model, fn, f, g](Index k) {
          const SpectralPoint p = model.point(k);
          const double a = f.coefficient(k, p).log_mag, b = g.coefficient(k, p).log_mag, c = fn.log_abs(p);
          if (a == kNegInf || b == kNegInf || c == kNegInf) return kNegInf;
          return a + b + c;
        };
        j = judge_series(head, tail, model.truncation() + 1);
      } else {
        j = judge_series(head);
        if (j.verdict == Verdict::converges) {
          j.verdict = Verdict::inconclusive;
          j.rule = "pairing_tail_unknown";
        }
      }
    } else {
      j = judge_series(head);
    }
    out.tails.push_back(detail::tail_profile(fvals, weights));
    out.tails_vanish = out.tails_vanish && detail::profile_vanishes(out.tails.back());
    combine(j.verdict);
    out.pairings.push_back(std::move(j));
  }

  // Canonical dual g_k = conj(phase(F f_k)) |F f_k| / ||F f||_N: the pairing
  // is ||F f||^2 / ||F f||_N, i.e. the direct series up to a constant.
  const SeriesParts parts = series_parts(model, fn, f);
  Judgment canonical = detail::judge_squared(parts);
  {
    std::vector<std::pair<Index, double>> fvals;
    std::vector<double> weights;
    for (const auto& [k, l] : parts.head) {
      fvals.emplace_back(k, fn.log_abs(model.point(k)));
      weights.push_back(2.0 * l);
    }
    out.tails.push_back(detail::tail_profile(fvals, weights));
    out.tails_vanish = out.tails_vanish && detail::profile_vanishes(out.tails.back());
  }
  combine(canonical.verdict);
  out.pairings.push_back(std::move(canonical));
  if (out.verdict == Verdict::converges && !out.tails_vanish) out.verdict = Verdict::inconclusive;
  return out;
}

/// E_A(delta) f.
inline StateVector project(const SpectralModel&, const Predicate& delta, const StateVector& f) {
  return f.multiplied(BorelFunction::indicator(delta));
}

/// F(A) f; checks f in D(F(A)) unless `unchecked`.
inline StateVector apply_borel(const SpectralModel& model, const BorelFunction& fn, const StateVector& f,
                               bool unchecked = false) {
  if (!unchecked) {
    const Judgment j = domain_test_direct(model, fn, f);
    if (j.verdict == Verdict::diverges) {
      throw DomainError("vector is outside the domain of " + fn.text() + " (" + j.rule + ")", j.index);
    }
  }
  return f.multiplied(fn);
}

struct MaterializedCoefficient {
  Index k = 1;
  Coefficient c;
};

/// Coefficients of f on the explicit head of the model.
inline std::vector<MaterializedCoefficient> materialize_state(const SpectralModel& model, const StateVector& f) {
  std::vector<MaterializedCoefficient> out;
  for (Index k : detail::state_head_indices(model, f)) out.push_back({k, f.coefficient(k, model.point(k))});
  return out;
}

/// log ||f|| over the explicit head.
inline double log_norm(const SpectralModel& model, const StateVector& f) {
  std::vector<double> logs;
  for (const auto& m : materialize_state(model, f)) logs.push_back(m.c.log_mag);
  return log_norm(std::span<const double>(logs));
}

inline double norm(const SpectralModel& model, const StateVector& f) { return std::exp(log_norm(model, f)); }

/// sum over atoms in delta of |f_k| |g_k| on the explicit head.
inline double variation(const SpectralModel& model, const StateVector& f, const StateVector& g,
                        const Predicate& delta) {
  std::set<Index> idx;
  for (Index k : detail::state_head_indices(model, f)) idx.insert(k);
  for (Index k : detail::state_head_indices(model, g)) idx.insert(k);
  std::vector<double> terms;
  for (Index k : idx) {
    const SpectralPoint p = model.point(k);
    if (!delta(p)) continue;
    const double a = f.coefficient(k, p).log_mag, b = g.coefficient(k, p).log_mag;
    if (a != kNegInf && b != kNegInf) terms.push_back(a + b);
  }
  return std::exp(log_sum_exp(terms));
}

/// A = A_- + A_+ with A_- = A E(Re < 0), A_+ = A E(Re >= 0).
struct SplitModel {
  /// The atoms each part keeps (its spectrum apart from the point 0).
  SpectrumSpec minus_kept;
  SpectrumSpec plus_kept;
  /// The operators themselves: excluded atoms carry lambda = 0.
  SpectralModel minus;
  SpectralModel plus;
};

inline SplitModel split_operator(const SpectralModel& model) {
  std::vector<Atom> kept_minus, kept_plus, op_minus, op_plus;
  for (const auto& a : model.atoms()) {
    const bool right = a.lambda.real() >= 0.0;
    (right ? kept_plus : kept_minus).push_back(a);
    op_minus.push_back({a.index, right ? std::complex<double>{} : a.lambda});
    op_plus.push_back({a.index, right ? a.lambda : std::complex<double>{}});
  }
  const Index n = std::max<Index>(1, static_cast<Index>(model.atoms().size()));
  return {SpectrumSpec::finite_list(kept_minus, n), SpectrumSpec::finite_list(kept_plus, n),
          SpectralModel(SpectrumSpec::finite_list(op_minus, n), n, model.m()),
          SpectralModel(SpectrumSpec::finite_list(op_plus, n), n, model.m())};
}

}  // namespace gevrey
