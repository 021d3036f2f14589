#pragma once

/**
 * @file verify.hpp
 * @brief Seeded randomized suites that check the characterization theorems
 *        on catalog spectra where every trial is decidable in closed form.
 */

#include <gevrey/calculus.hpp>
#include <gevrey/counterexample.hpp>
#include <gevrey/error.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/region.hpp>
#include <gevrey/spectrum.hpp>
#include <gevrey/state.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace gevrey {

enum class Suite { theorem_real, ol1, smoothness_improvement, self_adjoint };

inline const char* suite_name(Suite s) {
  switch (s) {
    case Suite::theorem_real: return "theorem_real";
    case Suite::ol1: return "ol1";
    case Suite::smoothness_improvement: return "smoothness_improvement";
    case Suite::self_adjoint: return "self_adjoint";
  }
  return "?";
}

inline std::optional<Suite> suite_from_name(const std::string& s) {
  for (Suite x : {Suite::theorem_real, Suite::ol1, Suite::smoothness_improvement, Suite::self_adjoint}) {
    if (s == suite_name(x)) return x;
  }
  return std::nullopt;
}

enum class Outcome { agree, disagree, inconclusive };

struct TrialResult {
  Outcome outcome = Outcome::inconclusive;
  Json spectrum;
  std::uint64_t seed = 0;
  std::string detail;
};

struct Disagreement {
  Json spectrum;
  std::uint64_t seed = 0;
  std::string detail;
};

struct VerifyReport {
  Suite suite = Suite::theorem_real;
  std::uint64_t seed = 0;
  int trials = 0;
  int agreements = 0;
  int inconclusives = 0;
  std::vector<Disagreement> disagreements;
  std::vector<TrialResult> results;
};

struct VerifyOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<double> betas{1.0, 2.0};
  Index truncation = 4096;
  bool allow_inconclusive = false;
};

/// 0 agreement, 3 any disagreement, 4 more than 10% inconclusive.
inline int exit_code(const VerifyReport& r) {
  if (!r.disagreements.empty()) return 3;
  if (10 * r.inconclusives > r.trials) return 4;
  return 0;
}

inline const std::vector<double>& default_b_grid() {
  static const std::vector<double> grid{1.0, 0.5, 0.25, 0.1, 0.01};
  return grid;
}

inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GEVREY_SPECTRAL_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

namespace detail {

using TrialFn = std::function<TrialResult(std::uint64_t seed)>;

// Trial seeds are drawn up front so results do not depend on scheduling.
inline VerifyReport run_trials(Suite suite, const VerifyOptions& opt, const TrialFn& fn) {
  if (opt.trials < 1) throw ValidationError("trials out of range (must be >= 1)");
  std::mt19937_64 master(opt.seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(opt.trials));
  for (auto& s : seeds) s = master();

  std::vector<TrialResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = fn(seeds[i]);
      } catch (const std::exception& e) {
        results[i].outcome = Outcome::disagree;
        results[i].detail = std::string("exception: ") + e.what();
      }
      results[i].seed = seeds[i];
    }
  };
  const unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  VerifyReport r;
  r.suite = suite;
  r.seed = opt.seed;
  r.trials = opt.trials;
  for (auto& res : results) {
    switch (res.outcome) {
      case Outcome::agree: ++r.agreements; break;
      case Outcome::inconclusive: ++r.inconclusives; break;
      case Outcome::disagree: r.disagreements.push_back({res.spectrum, res.seed, res.detail}); break;
    }
  }
  r.results = std::move(results);
  return r;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline double random_sign(std::mt19937_64& rng) { return (rng() & 1u) ? 1.0 : -1.0; }

struct CatalogCase {
  SpectrumSpec spec;
  StateVector f;
  /// Does sigma(A) \ P^beta_{b,b} stay bounded for some b > 0, by construction?
  std::optional<bool> criterion;
};

// Real parts growing like k^p with the matching sign; f_k = e^{-|a| k |Re lambda_k|}.
inline CatalogCase real_power_case(std::mt19937_64& rng, Index n) {
  const double sigma = random_sign(rng);
  const double p = uniform(rng, 0.5, 2.0);
  const double a = sigma * uniform(rng, 0.5, 2.0);
  return {SpectrumSpec::generator(RealPower{sigma, p}, n), StateVector::law(CoefficientLaw::exp_lambda_re, a), true};
}

// Re lambda = c m^{1/beta0}, Im lambda = m = k^q with beta0 <= beta: eventually inside.
inline CatalogCase parabola_inside_case(std::mt19937_64& rng, double beta, Index n) {
  const double c = random_sign(rng) * uniform(rng, 0.3, 1.0);
  const double beta0 = uniform(rng, 1.0, beta);
  const double q = uniform(rng, 1.0, 2.0);
  const double a = (c > 0.0 ? 1.0 : -1.0) * uniform(rng, 0.5, 2.0);
  return {SpectrumSpec::generator(ParabolaEdge{c, beta0, q}, n), StateVector::law(CoefficientLaw::exp_lambda_re, a),
          true};
}

inline CatalogCase imaginary_case(std::mt19937_64& rng, Index n) {
  const double s = random_sign(rng) * uniform(rng, 0.5, 2.0);
  const double r = uniform(rng, 1.5, 3.0);
  return {SpectrumSpec::generator(ImaginaryExponential{s, r}, n), StateVector::finite({}), false};
}

// beta0 = 2 beta: the real parts lag behind |Im|^{1/beta}.
inline CatalogCase parabola_violating_case(std::mt19937_64& rng, double beta, Index n) {
  const double c = random_sign(rng) * uniform(rng, 0.3, 1.0);
  const bool neg = (rng() & 1u) != 0;
  return {SpectrumSpec::generator(ParabolaEdge{c, 2.0 * beta, 8.0 * beta}, n, neg), StateVector::finite({}), false};
}

// Random affine spectra; the criterion is left to the region module.
inline CatalogCase affine_case(std::mt19937_64& rng, Index n) {
  const AffineShape shapes[] = {AffineShape::linear, AffineShape::square, AffineShape::sqrt, AffineShape::log1p};
  const AffineShape g = shapes[rng() % 4];
  const std::complex<double> b{uniform(rng, -1.0, 1.0), uniform(rng, -2.0, 2.0)};
  const std::complex<double> a = 0.4 * std::abs(b) * std::polar(1.0, uniform(rng, -3.14, 3.14));
  const SpectrumSpec spec = SpectrumSpec::generator(AffineCustom{a, b, g}, n);
  StateVector f = b.real() == 0.0 ? StateVector::law(CoefficientLaw::exp_quadratic, 1.0)
                                  : StateVector::law(CoefficientLaw::exp_lambda_re, b.real() > 0.0 ? 1.0 : -1.0);
  return {spec, f, std::nullopt};
}

inline constexpr Index kRefutationDepth = 4;

inline std::string membership_list(const std::vector<Membership>& ms) {
  std::string out;
  for (auto m : ms) out += std::string(out.empty() ? "" : ",") + membership_name(m);
  return out;
}

// Counterexample branch: the synthesized f must be admissible and refuted.
inline TrialResult refute_case(const SpectrumSpec& spec, double beta, Index n, Index depth) {
  TrialResult r;
  r.spectrum = spectrum_to_json(spec);
  const SpectralModel model(spec, n);
  const EscapeSelection sel = select_escaping(spec, beta, depth, n);
  const Synthesis syn = synthesize(model, sel);
  const bool adm = syn.admissibility.verdict == Membership::yes;
  r.outcome = adm && syn.certificate.valid ? Outcome::agree : Outcome::disagree;
  if (syn.admissibility.verdict == Membership::inconclusive) r.outcome = Outcome::inconclusive;
  r.detail = std::string("counterexample: admissible=") + membership_name(syn.admissibility.verdict) +
             " certificate=" + (syn.certificate.valid ? "valid" : "invalid");
  return r;
}

}  // namespace detail

/// Criterion (iii) against the Gevrey behaviour of every weak solution.
inline VerifyReport run_verify_theorem_real(const VerifyOptions& opt) {
  for (double b : opt.betas) {
    if (!(b >= 1.0)) throw ValidationError("beta out of range (theorem_real needs beta >= 1)");
  }
  if (opt.betas.empty()) throw ValidationError("beta grid must be nonempty");
  return detail::run_trials(Suite::theorem_real, opt, [opt](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double beta = opt.betas[rng() % opt.betas.size()];
    const int categories = opt.allow_inconclusive ? 5 : 4;
    const int cat = static_cast<int>(rng() % static_cast<std::uint64_t>(categories));
    detail::CatalogCase c = cat == 0   ? detail::real_power_case(rng, opt.truncation)
                            : cat == 1 ? detail::parabola_inside_case(rng, beta, opt.truncation)
                            : cat == 2 ? detail::imaginary_case(rng, opt.truncation)
                            : cat == 3 ? detail::parabola_violating_case(rng, beta, opt.truncation)
                                       : detail::affine_case(rng, opt.truncation);
    const RegionVerdict region = search_b(c.spec, beta, opt.truncation, default_b_grid());
    TrialResult r;
    r.spectrum = spectrum_to_json(c.spec);
    if (c.criterion && *c.criterion != region.complement_bounded) {
      r.outcome = Outcome::disagree;
      r.detail = "region criterion disagrees with the catalog";
      return r;
    }
    if (!region.complement_bounded) {
      try {
        return detail::refute_case(c.spec, beta, opt.truncation, detail::kRefutationDepth);
      } catch (const ValidationError& e) {
        // Too few escaping points below N decides nothing about an uncatalogued spectrum.
        if (c.criterion) throw;
        r.outcome = Outcome::inconclusive;
        r.detail = e.what();
        return r;
      }
    }
    const SpectralModel model(c.spec, opt.truncation);
    const Admissibility adm = admissible_two_sided(model, c.f, {-3.0, 3.0});
    if (adm.verdict != Membership::yes) {
      r.outcome = Outcome::inconclusive;
      r.detail = "catalog state not certified admissible: " + adm.reason;
      return r;
    }
    std::vector<Membership> ms;
    for (double t : {-1.0, 0.0, 1.0}) {
      const StateVector y = evolve(model, c.f, t);
      ms.push_back(class_membership(model, y, {beta, Flavor::beurling, {0.5, 1.0, 2.0}}).member);
    }
    const bool any_no = std::count(ms.begin(), ms.end(), Membership::no) > 0;
    const bool all_yes = std::count(ms.begin(), ms.end(), Membership::yes) == 3;
    r.outcome = any_no ? Outcome::disagree : all_yes ? Outcome::agree : Outcome::inconclusive;
    r.detail = "beurling at t=-1,0,1: " + detail::membership_list(ms);
    return r;
  });
}

/// Unbounded A has an orbit outside every class of order < 1; bounded A has
/// only entire orbits of exponential type.
inline VerifyReport run_verify_ol1(const VerifyOptions& opt) {
  if (opt.betas.empty()) throw ValidationError("beta grid must be nonempty");
  for (double b : opt.betas) {
    if (!(b >= 0.0 && b < 1.0)) throw ValidationError("beta out of range (ol1 needs beta in [0, 1))");
  }
  return detail::run_trials(Suite::ol1, opt, [opt](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrialResult r;
    const int cat = static_cast<int>(rng() % 4);
    std::vector<Membership> ms;
    if (cat < 3) {
      SpectrumSpec spec = SpectrumSpec::finite_list({});
      if (cat == 0) {
        spec = SpectrumSpec::generator(RealPower{detail::random_sign(rng), detail::uniform(rng, 1.0, 2.0)},
                                       opt.truncation);
      } else if (cat == 1) {
        spec = SpectrumSpec::generator(ParabolaEdge{detail::random_sign(rng) * detail::uniform(rng, 0.3, 1.0),
                                                    detail::uniform(rng, 1.0, 3.0), detail::uniform(rng, 1.0, 2.0)},
                                       opt.truncation);
      } else {
        const std::complex<double> b = std::polar(detail::uniform(rng, 0.5, 2.0), detail::uniform(rng, -3.14, 3.14));
        const std::complex<double> a = 0.4 * std::abs(b) * std::polar(1.0, detail::uniform(rng, -3.14, 3.14));
        spec = SpectrumSpec::generator(AffineCustom{a, b, AffineShape::linear}, opt.truncation);
      }
      r.spectrum = spectrum_to_json(spec);
      const SpectralModel model(spec, opt.truncation);
      const StateVector f = StateVector::law(CoefficientLaw::exp_linear, 1.0);
      for (double beta : opt.betas) {
        ms.push_back(beta == 0.0 ? class0_membership(model, f).member
                                 : class_membership(model, f, {beta, Flavor::roumieu, {0.5, 1.0, 2.0}}).member);
      }
      const bool any_yes = std::count(ms.begin(), ms.end(), Membership::yes) > 0;
      const bool all_no = std::count(ms.begin(), ms.end(), Membership::no) == static_cast<long>(ms.size());
      r.outcome = any_yes ? Outcome::disagree : all_no ? Outcome::agree : Outcome::inconclusive;
      r.detail = "unbounded, e^{-k} state, roumieu: " + detail::membership_list(ms);
      return r;
    }
    // Bounded: a finite list with |lambda| <= 4 and a random finite state.
    const int count = 1 + static_cast<int>(rng() % 8);
    std::vector<Atom> atoms;
    StateVector::Entries coeffs;
    double gamma = 0.0;
    for (int k = 1; k <= count; ++k) {
      const std::complex<double> z = std::polar(detail::uniform(rng, 0.0, 4.0), detail::uniform(rng, -3.14, 3.14));
      atoms.push_back({k, z});
      gamma = std::max(gamma, std::abs(z));
      coeffs.emplace_back(k, std::complex<double>{detail::uniform(rng, -1.0, 1.0), detail::uniform(rng, -1.0, 1.0)});
    }
    const SpectrumSpec spec = SpectrumSpec::finite_list(atoms);
    r.spectrum = spectrum_to_json(spec);
    const SpectralModel model(spec);
    const StateVector f = StateVector::finite(coeffs);
    for (double beta : opt.betas) {
      if (beta > 0.0) {
        ms.push_back(class_membership(model, f, {beta, Flavor::roumieu, {0.5, 1.0, 2.0}}).member);
        continue;
      }
      const Membership c0 = class0_membership(model, f).member;
      const double bound = norm(model, f) * (1.0 + 1e-9);
      const GrowthCheck g = growth_type_check(orbit_samples(model, f, 2.0, 8, 16), 0.0, {gamma}, bound);
      ms.push_back(c0 == Membership::yes && g.status == Membership::yes ? Membership::yes : Membership::no);
    }
    const bool all_yes = std::count(ms.begin(), ms.end(), Membership::yes) == static_cast<long>(ms.size());
    r.outcome = all_yes ? Outcome::agree : Outcome::disagree;
    r.detail = "bounded, finite state: " + detail::membership_list(ms);
    return r;
  });
}

/// An orbit that is Gevrey of order 1 near one time is entire at every time.
inline VerifyReport run_verify_smoothness_improvement(const VerifyOptions& opt) {
  return detail::run_trials(Suite::smoothness_improvement, opt, [opt](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int cat = static_cast<int>(rng() % 5);
    TrialResult r;
    if (cat == 4) {
      // A single atom: every orbit is a finite sum.
      const std::complex<double> z{detail::uniform(rng, -3.0, 3.0), detail::uniform(rng, -3.0, 3.0)};
      const SpectrumSpec spec = SpectrumSpec::finite_list({{1, z}});
      r.spectrum = spectrum_to_json(spec);
      const SpectralModel model(spec);
      const StateVector f = StateVector::finite({{1, {1.0, 0.0}}});
      std::vector<Membership> ms;
      for (double t0 : {0.0, -1.0, -0.5, 0.5, 1.0}) {
        const StateVector y = translate_solution(model, f, t0);
        ms.push_back(class_membership(model, y, {1.0, Flavor::roumieu, {0.5, 1.0, 2.0}}).member);
        ms.push_back(class_membership(model, y, {1.0, Flavor::beurling, {0.5, 1.0, 2.0}}).member);
      }
      const bool all_yes = std::count(ms.begin(), ms.end(), Membership::yes) == static_cast<long>(ms.size());
      r.outcome = all_yes ? Outcome::agree : Outcome::disagree;
      r.detail = "single atom: " + detail::membership_list(ms);
      return r;
    }
    detail::CatalogCase c = cat == 0   ? detail::real_power_case(rng, opt.truncation)
                            : cat == 1 ? detail::parabola_inside_case(rng, 1.0, opt.truncation)
                            : cat == 2 ? detail::imaginary_case(rng, opt.truncation)
                                       : detail::parabola_violating_case(rng, 1.0, opt.truncation);
    r.spectrum = spectrum_to_json(c.spec);
    const SpectralModel model(c.spec, opt.truncation);
    if (!*c.criterion) {
      const EscapeSelection sel = select_escaping(c.spec, 1.0, detail::kRefutationDepth, opt.truncation);
      const Synthesis syn = synthesize(model, sel);
      const StateVector y0 = translate_solution(model, syn.f, 0.0);
      const Membership m = class_membership(model, y0, {1.0, Flavor::roumieu, {0.5, 1.0, 2.0}}).member;
      r.outcome = m == Membership::no ? Outcome::agree : m == Membership::yes ? Outcome::disagree : Outcome::inconclusive;
      r.detail = std::string("synthesized orbit at t0=0, roumieu: ") + membership_name(m);
      return r;
    }
    const Membership m0 =
        class_membership(model, translate_solution(model, c.f, 0.0), {1.0, Flavor::roumieu, {0.5, 1.0, 2.0}}).member;
    if (m0 != Membership::yes) {
      r.outcome = m0 == Membership::no ? Outcome::disagree : Outcome::inconclusive;
      r.detail = std::string("orbit at t0=0, roumieu: ") + membership_name(m0);
      return r;
    }
    std::vector<Membership> ms;
    for (double t0 : {-1.0, -0.5, 0.5, 1.0}) {
      const StateVector y = translate_solution(model, c.f, t0);
      ms.push_back(class_membership(model, y, {1.0, Flavor::roumieu, {0.5, 1.0, 2.0}}).member);
    }
    for (double t0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const StateVector y = translate_solution(model, c.f, t0);
      ms.push_back(class_membership(model, y, {1.0, Flavor::beurling, {0.5, 1.0, 2.0}}).member);
    }
    const bool any_no = std::count(ms.begin(), ms.end(), Membership::no) > 0;
    const bool all_yes = std::count(ms.begin(), ms.end(), Membership::yes) == static_cast<long>(ms.size());
    r.outcome = any_no ? Outcome::disagree : all_yes ? Outcome::agree : Outcome::inconclusive;
    r.detail = "roumieu at t0=+-1,+-0.5 then beurling at t0=-1..1: " + detail::membership_list(ms);
    return r;
  });
}

/// Real spectra: the region criterion holds with an empty complement and
/// every admissible state has entire orbits.
inline VerifyReport run_verify_self_adjoint(const VerifyOptions& opt) {
  return detail::run_trials(Suite::self_adjoint, opt, [opt](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrialResult r;
    SpectrumSpec spec = SpectrumSpec::finite_list({});
    StateVector f = StateVector::finite({});
    if (rng() & 1u) {
      auto c = detail::real_power_case(rng, opt.truncation);
      spec = c.spec;
      f = c.f;
    } else {
      const int count = 1 + static_cast<int>(rng() % 16);
      std::vector<Atom> atoms;
      StateVector::Entries coeffs;
      for (int k = 1; k <= count; ++k) {
        atoms.push_back({k, {detail::uniform(rng, -50.0, 50.0), 0.0}});
        coeffs.emplace_back(k, std::complex<double>{detail::uniform(rng, -1.0, 1.0), 0.0});
      }
      spec = SpectrumSpec::finite_list(atoms);
      f = StateVector::finite(coeffs);
    }
    r.spectrum = spectrum_to_json(spec);
    const SpectralModel model(spec, opt.truncation);
    const RegionVerdict region = complement_bounded(spec, Region(1.0, 1.0, 1.0), opt.truncation);
    const bool empty = region.complement_bounded && region.radius && *region.radius == 0.0;
    const Admissibility adm = admissible_two_sided(model, f, {-3.0, 3.0});
    const Membership m = class_membership(model, f, {1.0, Flavor::beurling, {0.5, 1.0, 2.0}}).member;
    r.outcome = empty && adm.verdict == Membership::yes && m == Membership::yes ? Outcome::agree : Outcome::disagree;
    if (empty && (adm.verdict == Membership::inconclusive || m == Membership::inconclusive)) {
      r.outcome = Outcome::inconclusive;
    }
    r.detail = std::string("complement empty=") + (empty ? "true" : "false") +
               " admissible=" + membership_name(adm.verdict) + " beurling=" + membership_name(m);
    return r;
  });
}

inline VerifyReport run_verify(Suite suite, const VerifyOptions& opt) {
  switch (suite) {
    case Suite::theorem_real: return run_verify_theorem_real(opt);
    case Suite::ol1: return run_verify_ol1(opt);
    case Suite::smoothness_improvement: return run_verify_smoothness_improvement(opt);
    case Suite::self_adjoint: return run_verify_self_adjoint(opt);
  }
  throw ValidationError("unknown suite");
}

inline Json report_to_json(const VerifyReport& r) {
  Json dis = Json::array();
  for (const auto& d : r.disagreements) {
    dis.push_back({{"spectrum", d.spectrum}, {"seed", d.seed}, {"detail", d.detail}});
  }
  return {{"suite", suite_name(r.suite)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"agreements", r.agreements},
          {"inconclusives", r.inconclusives},
          {"disagreements", std::move(dis)},
          {"exit_code", exit_code(r)}};
}

}  // namespace gevrey
