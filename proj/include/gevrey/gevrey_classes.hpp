#pragma once

/**
 * @file gevrey_classes.hpp
 * @brief Gevrey vector classes of A through exponential domains.
 *
 *   E^{beta}(A)   = union_{s>0}        D(e^{s|A|^{1/beta}})   (Roumieu)
 *   E^{(beta)}(A) = intersection_{s>0} D(e^{s|A|^{1/beta}})   (Beurling)
 *   E^{0}(A)      = union_{alpha>0}    E_A({|lambda| <= alpha}) X
 *
 * The quantifier over s is resolved on a grid and, for closed-form tails, by
 * the scale profile of s phi(k) + psi(k) with phi = 2|lambda_k|^{1/beta} and
 * psi = 2 log|f_k|.
 */

#include <gevrey/calculus.hpp>
#include <gevrey/error.hpp>
#include <gevrey/series.hpp>
#include <gevrey/state.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

enum class Flavor { roumieu, beurling };
enum class Membership { yes, no, inconclusive };

inline const char* flavor_name(Flavor f) { return f == Flavor::roumieu ? "roumieu" : "beurling"; }
inline const char* membership_name(Membership m) {
  switch (m) {
    case Membership::yes: return "yes";
    case Membership::no: return "no";
    case Membership::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ClassQuery {
  double beta = 1.0;
  Flavor flavor = Flavor::roumieu;
  std::vector<double> s_grid{0.5, 1.0, 2.0};
};

struct GevreyVerdict {
  Membership member = Membership::inconclusive;
  std::optional<double> witness_s;
  std::optional<double> refuting_s;
  /// Every direct-series judgment made, keyed by s.
  std::vector<std::pair<double, Judgment>> judgments;
  std::optional<ScaleProfile> profile;
  /// How the verdict was reached.
  std::string reason;
};

namespace detail {

inline void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw ValidationError(std::string(name) + " must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw ValidationError(std::string(name) + " must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ValidationError(std::string(name) + " must be ascending");
  }
}

inline bool has_closed_tail(const SpectralModel& model, const StateVector& f) {
  return f.kind() == StateKind::law && model.spectrum().is_generator();
}

inline bool is_finite_sum(const SpectralModel& model, const StateVector& f) {
  return f.kind() == StateKind::finite || (f.kind() == StateKind::law && !model.spectrum().is_generator());
}

// Proof minorants of selected states do not depend on the size of s > 0.
inline bool minorant_for_every_s(const Judgment& j) { return j.rule.rfind("proof_minorant", 0) == 0; }

}  // namespace detail

/// Scale profile of the Gevrey series of a law state on a generator spectrum.
inline ScaleProfile gevrey_profile(const SpectralModel& model, const StateVector& f, double beta) {
  LogTerm phi = [&model, beta](Index k) {
    const SpectralPoint p = model.point(k);
    return p.log_abs == kNegInf ? 0.0 : 2.0 * std::exp(p.log_abs / beta);
  };
  LogTerm psi = [&model, &f](Index k) { return 2.0 * f.coefficient(k, model.point(k)).log_mag; };
  return scale_profile(phi, psi, model.truncation() + 1);
}

inline GevreyVerdict class_membership(const SpectralModel& model, const StateVector& f, const ClassQuery& q) {
  if (q.beta == 0.0) throw ValidationError("beta = 0: use class0_membership");
  if (!(q.beta > 0.0) || !std::isfinite(q.beta)) throw ValidationError("beta out of range (must be > 0)");
  detail::check_grid(q.s_grid, "s_grid");

  GevreyVerdict v;
  auto judge = [&](double s) {
    Judgment j = domain_test_direct(model, BorelFunction::exp_modulus(s, q.beta), f);
    v.judgments.emplace_back(s, j);
    return j;
  };
  std::vector<Verdict> grid;
  for (double s : q.s_grid) grid.push_back(judge(s).verdict);

  const bool finite = detail::is_finite_sum(model, f);
  const bool closed = detail::has_closed_tail(model, f);
  if (closed) v.profile = gevrey_profile(model, f, q.beta);
  const ScaleKind kind = v.profile ? v.profile->kind : ScaleKind::unknown;
  const bool flat_div = kind == ScaleKind::flat_scale && v.profile->flat->verdict == Verdict::diverges;
  const bool flat_conv = kind == ScaleKind::flat_scale && v.profile->flat->verdict == Verdict::converges;

  if (q.flavor == Flavor::roumieu) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == Verdict::converges) {
        v.member = Membership::yes;
        v.witness_s = q.s_grid[i];
        v.reason = "series converges at grid s";
        return v;
      }
    }
    const bool all_div = std::all_of(grid.begin(), grid.end(), [](Verdict x) { return x == Verdict::diverges; });
    if (kind == ScaleKind::vanishing_ratio || flat_div) {
      v.member = Membership::no;
      v.refuting_s = q.s_grid.front();
      v.reason = std::string("diverges for every s (") + scale_kind_name(kind) + ")";
      return v;
    }
    if (kind == ScaleKind::bounded_ratio && v.profile->ratio > 0.0) {
      const double s = v.profile->ratio / 2.0;
      if (judge(s).verdict == Verdict::converges) {
        v.member = Membership::yes;
        v.witness_s = s;
        v.reason = "series converges below the limiting ratio";
        return v;
      }
    }
    if (f.kind() == StateKind::selected && all_div &&
        std::all_of(v.judgments.begin(), v.judgments.end(),
                    [](const auto& sj) { return detail::minorant_for_every_s(sj.second); })) {
      v.member = Membership::no;
      v.refuting_s = q.s_grid.front();
      v.reason = "selection minorant diverges for every s";
      return v;
    }
    v.member = Membership::inconclusive;
    v.reason = "no grid s converges and divergence for every s is not established";
    return v;
  }

  // Beurling.
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (grid[i] == Verdict::diverges) {
      v.member = Membership::no;
      v.refuting_s = q.s_grid[i];
      v.reason = "series diverges at grid s";
      return v;
    }
  }
  const bool all_conv = std::all_of(grid.begin(), grid.end(), [](Verdict x) { return x == Verdict::converges; });
  if (finite && all_conv) {
    v.member = Membership::yes;
    v.reason = "finite sum";
    return v;
  }
  if (kind == ScaleKind::unbounded_ratio || flat_conv) {
    if (all_conv) {
      v.member = Membership::yes;
      v.reason = std::string("converges for every s (") + scale_kind_name(kind) + ")";
      return v;
    }
  }
  if (kind == ScaleKind::vanishing_ratio) {
    v.member = Membership::no;
    v.refuting_s = q.s_grid.back();
    v.reason = "diverges for every s (vanishing_ratio)";
    return v;
  }
  if (kind == ScaleKind::bounded_ratio && v.profile->ratio > 0.0) {
    const double s = 2.0 * v.profile->ratio;
    if (judge(s).verdict == Verdict::diverges) {
      v.member = Membership::no;
      v.refuting_s = s;
      v.reason = "series diverges above the limiting ratio";
      return v;
    }
  }
  v.member = Membership::inconclusive;
  v.reason = "convergence for every s is not established";
  return v;
}

struct Class0Verdict {
  Membership member = Membership::inconclusive;
  /// max |lambda_k| over the support of f.
  std::optional<double> alpha;
  std::string reason;
};

/// f in E_A({|lambda| <= alpha}) X for some alpha?
inline Class0Verdict class0_membership(const SpectralModel& model, const StateVector& f,
                                       const std::vector<double>& alpha_grid = {}) {
  Class0Verdict v;
  auto finite_support = [&](const std::vector<Index>& indices) {
    double alpha = 0.0;
    for (Index k : indices) {
      const SpectralPoint p = model.point(k);
      if (f.coefficient(k, p).log_mag != kNegInf) alpha = std::max(alpha, std::exp(p.log_abs));
    }
    v.member = Membership::yes;
    v.alpha = alpha;
    // The grid only reports whether a listed alpha also works.
    v.reason = "finite support";
    for (double a : alpha_grid) {
      if (a >= alpha) {
        v.reason = "finite support within grid alpha";
        break;
      }
    }
  };
  if (detail::is_finite_sum(model, f)) {
    finite_support(detail::state_head_indices(model, f));
    return v;
  }
  // An indicator of a bounded set cuts an infinite law down to finite support
  // (generator moduli are nondecreasing).
  double cut = kPosInf;
  for (const auto& fac : f.applied().factors()) {
    if (const auto* ind = std::get_if<Indicator>(&fac)) {
      if (ind->set.kind == PredicateKind::modulus_le && !ind->set.reflected) cut = std::min(cut, ind->set.r);
      if (ind->set.kind == PredicateKind::nothing) cut = -1.0;
    }
  }
  if (f.kind() == StateKind::law && std::isfinite(cut)) {
    std::vector<Index> idx;
    for (Index k = 1; k <= (Index{1} << 40); ++k) {
      if (model.point(k).log_abs > std::log(std::max(cut, 0.0))) break;
      idx.push_back(k);
    }
    finite_support(idx);
    return v;
  }
  v.member = Membership::no;
  v.reason = f.kind() == StateKind::law ? "coefficient law never vanishes on an unbounded spectrum"
                                        : "selection has unbounded support";
  return v;
}

struct OrderEstimate {
  double beta_hat = 0.0;
  double alpha_hat = 0.0;
  double c_hat = 0.0;
  double residual = 0.0;
  int n_lo = 2;
  int n_hi = 2;
  /// (n, log m_n, fitted log m_n) for n = n_lo..n_hi.
  std::vector<std::tuple<int, double, double>> rows;
};

/// Fits log ||A^n f|| ~ log c + n log alpha + beta n log n on n = 2..n_max.
inline OrderEstimate estimate_order(const SpectralModel& model, const StateVector& f, int n_max) {
  if (n_max < 9) throw ValidationError("n_max out of range (must be >= 9 so the fit has 8 points)");
  for (int n = 1; n <= n_max; ++n) {
    const Judgment j = domain_test_direct(model, BorelFunction::power(n), f);
    if (j.verdict == Verdict::diverges) {
      throw DomainError("vector is outside D(A^" + std::to_string(n) + ")", n);
    }
  }
  std::vector<double> log_lambda, log_f;
  for (const auto& m : materialize_state(model, f)) {
    if (m.c.log_mag == kNegInf) continue;
    log_lambda.push_back(model.point(m.k).log_abs);
    log_f.push_back(m.c.log_mag);
  }
  if (log_f.empty()) throw ValidationError("estimate_order needs a nonzero vector");

  OrderEstimate out;
  out.n_hi = n_max;
  const int rows = n_max - out.n_lo + 1;
  Eigen::MatrixXd basis(rows, 3);
  Eigen::VectorXd y(rows);
  std::vector<double> terms(log_f.size());
  for (int n = out.n_lo; n <= n_max; ++n) {
    for (std::size_t i = 0; i < log_f.size(); ++i) {
      terms[i] = log_lambda[i] == kNegInf ? kNegInf : 2.0 * (n * log_lambda[i] + log_f[i]);
    }
    const double log_m = 0.5 * log_sum_exp(terms);
    if (!std::isfinite(log_m)) throw DomainError("||A^n f|| is not finite", n);
    const int r = n - out.n_lo;
    basis(r, 0) = 1.0;
    basis(r, 1) = n;
    basis(r, 2) = n * std::log(static_cast<double>(n));
    y(r) = log_m;
  }
  const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fitted = basis * coef;
  out.beta_hat = coef(2);
  out.alpha_hat = std::exp(coef(1));
  out.c_hat = std::exp(coef(0));
  out.residual = std::sqrt((y - fitted).squaredNorm() / rows);
  for (int r = 0; r < rows; ++r) out.rows.emplace_back(r + out.n_lo, y(r), fitted(r));
  return out;
}

struct GrowthSample {
  std::complex<double> z;
  double log_norm = kNegInf;
};

struct GrowthCheck {
  Membership status = Membership::inconclusive;  // yes = holds, no = fails
  std::optional<double> gamma;
  /// log M for the reported gamma (or for the largest gamma when failing).
  double log_m = kNegInf;
};

inline constexpr double kGrowthMaxM = 1e12;

/// Does ||g(z)|| <= M e^{gamma |z|^{1/(1-beta)}} hold with M <= max_m for some grid gamma?
inline GrowthCheck growth_type_check(const std::vector<GrowthSample>& samples, double beta,
                                     const std::vector<double>& gamma_grid, double max_m = kGrowthMaxM) {
  if (!(max_m > 0.0)) throw ValidationError("max_m out of range (must be > 0)");
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta out of range (must be in [0, 1))");
  if (gamma_grid.empty()) throw ValidationError("gamma_grid must be nonempty");
  GrowthCheck out;
  std::set<double> moduli;
  for (const auto& s : samples) moduli.insert(std::abs(s.z));
  if (moduli.size() < 16) return out;
  const double order = 1.0 / (1.0 - beta);
  for (double gamma : gamma_grid) {
    double log_m = kNegInf;
    for (const auto& s : samples) log_m = std::max(log_m, s.log_norm - gamma * std::pow(std::abs(s.z), order));
    out.gamma = gamma;
    out.log_m = log_m;
    if (log_m <= std::log(max_m)) {
      out.status = Membership::yes;
      return out;
    }
  }
  out.status = Membership::no;
  return out;
}

/// ||e^{zA} f|| at z = r e^{i theta}, r = R j / count (j = 1..count), on
/// `rays` equally spaced directions.
inline std::vector<GrowthSample> orbit_samples(const SpectralModel& model, const StateVector& f, double radius,
                                               int rays, int count) {
  std::vector<GrowthSample> out;
  for (int a = 0; a < rays; ++a) {
    const double theta = 2.0 * std::numbers::pi * a / rays;
    for (int j = 1; j <= count; ++j) {
      const std::complex<double> z = std::polar(radius * j / count, theta);
      out.push_back({z, log_norm(model, f.multiplied(BorelFunction::exp(z)))});
    }
  }
  return out;
}

struct InclusionEntry {
  double beta = 1.0;
  Flavor flavor = Flavor::beurling;
  GevreyVerdict verdict;
};

struct InclusionAudit {
  std::vector<InclusionEntry> entries;
  bool violation = false;
};

/// Walks E^{(b1)} ⊆ E^{b1} ⊆ E^{(b2)} ⊆ ... and flags any non-yes after a yes.
inline InclusionAudit inclusion_audit(const SpectralModel& model, const StateVector& f,
                                      const std::vector<double>& betas, const std::vector<double>& s_grid) {
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) throw ValidationError("beta list must be ascending");
  }
  InclusionAudit out;
  bool seen_yes = false;
  for (double beta : betas) {
    for (Flavor fl : {Flavor::beurling, Flavor::roumieu}) {
      GevreyVerdict v = class_membership(model, f, {beta, fl, s_grid});
      if (seen_yes && v.member != Membership::yes) out.violation = true;
      seen_yes = seen_yes || v.member == Membership::yes;
      out.entries.push_back({beta, fl, std::move(v)});
    }
  }
  return out;
}

}  // namespace gevrey
