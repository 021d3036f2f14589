#pragma once

/**
 * @file region.hpp
 * @brief The two-sided power cone P^beta_{b-,b+} and the boundedness test
 *        for the part of a spectrum lying outside it.
 *
 *   P = { lambda : Re lambda <= -b- |Im lambda|^(1/beta)  or
 *                  Re lambda >=  b+ |Im lambda|^(1/beta) }
 *
 * P is closed (ties belong to P). For generator spectra the boundedness of
 * sigma(A) \ P is decided by a closed-form rule per family; the finite-prefix
 * stall test is computed alongside as a cross-check and is the fallback when
 * no rule exists.
 */

#include <gevrey/error.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/spectrum.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

struct Region {
  double beta = 1.0;
  double b_minus = 1.0;
  double b_plus = 1.0;

  Region(double beta_, double b_minus_, double b_plus_) : beta(beta_), b_minus(b_minus_), b_plus(b_plus_) {
    if (!(beta >= 1.0) || !std::isfinite(beta)) throw ValidationError("beta out of range (must be >= 1)");
    if (!(b_minus > 0.0) || !std::isfinite(b_minus)) throw ValidationError("b_minus out of range (must be > 0)");
    if (!(b_plus > 0.0) || !std::isfinite(b_plus)) throw ValidationError("b_plus out of range (must be > 0)");
  }

  /// The region P^beta_{b+,b-}: image of this region under lambda -> -lambda.
  [[nodiscard]] Region mirrored() const { return {beta, b_plus, b_minus}; }
};

inline bool in_region(const SpectralPoint& p, const Region& region) {
  const double edge = std::pow(std::abs(p.im), 1.0 / region.beta);
  return p.re <= -region.b_minus * edge || p.re >= region.b_plus * edge;
}

inline bool in_region(std::complex<double> lambda, const Region& region) {
  return in_region(SpectralPoint::from(lambda), region);
}

enum class RegionMethod { finite_spectrum, exact_asymptotic, stall_heuristic };

inline const char* method_name(RegionMethod m) {
  switch (m) {
    case RegionMethod::finite_spectrum: return "finite_spectrum";
    case RegionMethod::exact_asymptotic: return "exact_asymptotic";
    case RegionMethod::stall_heuristic: return "stall_heuristic";
  }
  return "?";
}

struct RegionVerdict {
  bool complement_bounded = true;
  /// sup |lambda| over the escaping atoms; empty when unbounded.
  std::optional<double> radius;
  /// Escaping atoms of largest modulus (at most 10) when unbounded.
  std::vector<Atom> witnesses;
  std::optional<std::pair<double, double>> b_found;
  RegionMethod method = RegionMethod::finite_spectrum;
  /// Verdict of the finite-prefix stall test on the same prefix.
  bool heuristic_bounded = true;
  /// `radius` is a bound computed from a far index rather than a scan.
  bool radius_is_bound = false;
};

/// Eventual behaviour of a generator relative to a region: every index
/// k > `settled_after` is inside P (`eventually_inside`) or outside it.
struct EscapeProfile {
  bool eventually_inside = true;
  Index settled_after = 0;
};

namespace detail {

inline constexpr Index kIndexCap = Index{1} << 60;

inline Index clamp_index(double k) {
  if (!(k < static_cast<double>(kIndexCap))) return kIndexCap;
  if (k <= 0.0) return 0;
  return static_cast<Index>(std::ceil(k));
}

// Positive root of c u^beta - B u - C (c > 0, B, C >= 0, beta >= 1): the
// polynomial is convex with p(0) <= 0, so it is positive beyond this root.
inline double convex_root(double c, double big_b, double big_c, double beta) {
  auto p = [&](double u) { return c * std::pow(u, beta) - big_b * u - big_c; };
  double hi = 1.0;
  while (p(hi) < 0.0 && hi < 1e150) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

inline EscapeProfile affine_profile(const AffineCustom& g, const Region& region) {
  const double a_re = g.a.real(), a_im = g.a.imag(), b_re = g.b.real(), b_im = g.b.imag();
  auto after_g = [&](double g_star) { return EscapeProfile{true, clamp_index(shape_inverse(g.g, g_star)) + 1}; };
  if (b_re == 0.0 && b_im == 0.0) {
    return {in_region(std::complex<double>{a_re, a_im}, region), 0};
  }
  if (b_re == 0.0) return {false, 0};  // Re constant, |Im| -> infinity
  const double side = b_re > 0.0 ? 1.0 : -1.0;
  const double b_side = side > 0.0 ? region.b_plus : region.b_minus;
  if (b_im == 0.0) {
    const double edge = b_side * std::pow(std::abs(a_im), 1.0 / region.beta);
    return after_g(std::max(0.0, (edge - side * a_re) / std::abs(b_re)));
  }
  if (region.beta == 1.0) {
    // Beyond g_s the sign of Im is that of b_im and the margin is affine in g.
    const double g_s = std::max(0.0, -a_im / b_im);
    const double slope = std::abs(b_re) - b_side * std::abs(b_im);
    const double offset = side * a_re - b_side * a_im * (b_im > 0.0 ? 1.0 : -1.0);
    if (slope > 0.0) return after_g(std::max(g_s, -offset / slope));
    if (slope < 0.0) return {false, 0};
    return offset >= 0.0 ? after_g(g_s) : EscapeProfile{false, 0};
  }
  // beta > 1: |b_re| g dominates b (|a_im| + |b_im| g)^(1/beta); with
  // u = g^(1/beta) the margin is at least |b_re| u^beta - B u - C.
  const double big_b = b_side * std::pow(std::abs(b_im), 1.0 / region.beta);
  const double big_c = std::abs(a_re) + b_side * std::pow(std::abs(a_im), 1.0 / region.beta);
  const double u = convex_root(std::abs(b_re), big_b, big_c, region.beta);
  return after_g(std::pow(u, region.beta));
}

inline EscapeProfile parabola_profile(const ParabolaEdge& g, const Region& region) {
  if (g.c == 0.0) return {false, 0};
  const double b_side = g.c > 0.0 ? region.b_plus : region.b_minus;
  const double ratio = b_side / std::abs(g.c);
  const double e = 1.0 / g.beta0 - 1.0 / region.beta;
  // Inside iff |c| m^(1/beta0) >= b m^(1/beta), i.e. m^e >= b/|c|.
  if (e == 0.0) return {std::abs(g.c) >= b_side, 0};
  // m^e is monotone in m, so the sign of e decides which side is eventual.
  const double m_star = std::pow(ratio, 1.0 / e);
  return {e > 0.0, clamp_index(std::pow(m_star, 1.0 / g.q)) + 1};
}

}  // namespace detail

/// Closed-form eventual escape behaviour of a generator spectrum.
inline EscapeProfile exact_escape_profile(const SpectrumSpec& spec, const Region& region) {
  if (!spec.is_generator()) throw ValidationError("exact escape profile needs a generator spectrum");
  // lambda in P(b-,b+)  <=>  -lambda in P(b+,b-)
  const Region r = spec.negated() ? region.mirrored() : region;
  return std::visit(
      [&r](const auto& g) -> EscapeProfile {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          return {true, 0};
        } else if constexpr (std::is_same_v<T, ImaginaryExponential>) {
          return {false, 0};
        } else if constexpr (std::is_same_v<T, ParabolaEdge>) {
          return detail::parabola_profile(g, r);
        } else {
          return detail::affine_profile(g, r);
        }
      },
      spec.law());
}

namespace detail {

inline std::vector<Atom> top_by_modulus(std::vector<Atom> atoms, std::size_t count) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
    if (ma != mb) return ma > mb;
    return a.index < b.index;
  });
  if (atoms.size() > count) atoms.resize(count);
  return atoms;
}

}  // namespace detail

/// Finite-prefix test: bounded iff no escaping atom lies in the top decile of
/// |lambda| among the given atoms.
inline RegionVerdict stall_test(const std::vector<Atom>& atoms, const Region& region) {
  RegionVerdict v;
  v.method = RegionMethod::stall_heuristic;
  std::vector<double> moduli;
  std::vector<Atom> escaping;
  for (const auto& a : atoms) {
    moduli.push_back(std::abs(a.lambda));
    if (!in_region(a.lambda, region)) escaping.push_back(a);
  }
  double threshold = kPosInf;
  if (!moduli.empty()) {
    std::sort(moduli.begin(), moduli.end());
    const auto top = moduli.size() - std::max<std::size_t>(1, moduli.size() / 10);
    threshold = moduli[top];
  }
  double radius = 0.0;
  bool stalled = true;
  for (const auto& a : escaping) {
    radius = std::max(radius, std::abs(a.lambda));
    if (std::abs(a.lambda) >= threshold) stalled = false;
  }
  v.complement_bounded = stalled;
  v.heuristic_bounded = stalled;
  if (stalled) {
    v.radius = radius;
  } else {
    v.witnesses = detail::top_by_modulus(escaping, 10);
  }
  return v;
}

inline RegionVerdict complement_bounded(const SpectrumSpec& spec, const Region& region, Index n) {
  const std::vector<Atom> atoms = materialize(spec, n);
  const RegionVerdict heuristic = stall_test(atoms, region);
  RegionVerdict v;
  v.heuristic_bounded = heuristic.complement_bounded;

  double scanned_radius = 0.0;
  std::vector<Atom> escaping;
  for (const auto& a : atoms) {
    if (!in_region(a.lambda, region)) {
      escaping.push_back(a);
      scanned_radius = std::max(scanned_radius, std::abs(a.lambda));
    }
  }

  if (!spec.is_generator()) {
    // A finite point set has bounded complement whatever the region.
    v.method = RegionMethod::finite_spectrum;
    v.complement_bounded = true;
    v.radius = scanned_radius;
    return v;
  }

  v.method = RegionMethod::exact_asymptotic;
  const EscapeProfile profile = exact_escape_profile(spec, region);
  if (!profile.eventually_inside && modulus_unbounded(spec.law())) {
    v.complement_bounded = false;
    std::vector<Atom> witnesses = detail::top_by_modulus(escaping, 10);
    // The escaping tail may start past the materialized prefix.
    for (Index k = static_cast<Index>(atoms.size()) + 1; witnesses.size() < 10 && k <= n + 4096; ++k) {
      const SpectralPoint p = spec.point(k);
      if (!p.finite()) break;
      if (!in_region(p, region)) witnesses.push_back({k, p.value()});
    }
    v.witnesses = detail::top_by_modulus(witnesses, 10);
    return v;
  }
  if (!profile.eventually_inside) {
    // Constant spectrum outside P: a single point.
    v.complement_bounded = true;
    v.radius = std::exp(spec.point(1).log_abs);
    return v;
  }

  // Escapes are confined to k <= settled_after: scan them directly when
  // feasible, otherwise bound by the (monotone) modulus at that index.
  constexpr Index kScanCap = 2'000'000;
  double radius = scanned_radius;
  const Index last = profile.settled_after;
  if (last <= kScanCap) {
    for (Index k = static_cast<Index>(atoms.size()) + 1; k <= last; ++k) {
      const SpectralPoint p = spec.point(k);
      if (!in_region(p, region)) radius = std::max(radius, std::exp(p.log_abs));
    }
  } else {
    radius = std::max(radius, std::exp(spec.point(last).log_abs));
    v.radius_is_bound = true;
  }
  v.complement_bounded = true;
  v.radius = radius;
  return v;
}

/// First grid value g with sigma(A) \ P^beta_{g,g} bounded.
inline RegionVerdict search_b(const SpectrumSpec& spec, double beta, Index n, const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("b grid must be nonempty");
  RegionVerdict last;
  for (double g : grid) {
    last = complement_bounded(spec, Region(beta, g, g), n);
    if (last.complement_bounded) {
      last.b_found = std::make_pair(g, g);
      return last;
    }
  }
  return last;
}

/// Smallest beta on the grid for which `search_b` succeeds.
inline std::optional<double> minimal_beta(const SpectrumSpec& spec, const std::vector<double>& beta_grid, Index n,
                                          const std::vector<double>& b_grid) {
  if (beta_grid.empty()) throw ValidationError("beta grid must be nonempty");
  std::vector<double> betas = beta_grid;
  std::sort(betas.begin(), betas.end());
  for (double beta : betas) {
    if (search_b(spec, beta, n, b_grid).b_found) return beta;
  }
  return std::nullopt;
}

/// CSV of the two boundary curves Re = -b-|Im|^(1/beta) and Re = b+|Im|^(1/beta).
inline std::string boundary_csv(const Region& region, double im_max, int samples) {
  std::ostringstream out;
  out << "im,re_minus,re_plus\n";
  for (int i = 0; i < samples; ++i) {
    const double im = -im_max + 2.0 * im_max * i / std::max(1, samples - 1);
    const double edge = std::pow(std::abs(im), 1.0 / region.beta);
    out << format_double(im) << ',' << format_double(-region.b_minus * edge) << ',' << format_double(region.b_plus * edge)
        << '\n';
  }
  return out.str();
}

}  // namespace gevrey
