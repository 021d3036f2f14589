#pragma once

/**
 * @file spectrum.hpp
 * @brief Atomic spectra: explicit point lists and closed-form generator laws.
 *
 * A spectrum is either a finite list of atoms (index, lambda) or one of four
 * parametric laws that produce lambda_k for every k >= 1:
 *
 *   real_power             lambda_k = sigma * k^p
 *   imaginary_exponential  lambda_k = i * s * r^k
 *   parabola_edge          lambda_k = c * m_k^(1/beta0) + i * m_k,  m_k = k^q
 *   affine_custom          lambda_k = a + b * g(k),  g in {k, k^2, sqrt(k), log(1+k)}
 *
 * Generators can be evaluated far beyond any materialized prefix through
 * `SpectrumSpec::point`, which also reports log|lambda_k| analytically so
 * that tails stay usable after the complex value itself overflows.
 */

#include <gevrey/error.hpp>
#include <gevrey/logmath.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gevrey {

using Index = std::int64_t;

struct Atom {
  Index index = 1;
  std::complex<double> lambda;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// A spectral value in a form that survives overflow of its components:
/// `re`/`im` may be +-inf, `log_abs` stays finite for every generator index.
struct SpectralPoint {
  double re = 0.0;
  double im = 0.0;
  double log_abs = kNegInf;

  static SpectralPoint from(std::complex<double> z) {
    return {z.real(), z.imag(), gevrey::log_abs(z)};
  }
  [[nodiscard]] bool finite() const { return std::isfinite(re) && std::isfinite(im); }
  [[nodiscard]] std::complex<double> value() const { return {re, im}; }
  [[nodiscard]] double modulus() const { return std::exp(log_abs); }
};

enum class AffineShape { linear, square, sqrt, log1p };

struct RealPower {
  double sigma = 1.0;
  double p = 1.0;
};
struct ImaginaryExponential {
  double s = 1.0;
  double r = 2.0;
};
struct ParabolaEdge {
  double c = 1.0;
  double beta0 = 1.0;
  double q = 1.0;
};
struct AffineCustom {
  std::complex<double> a{0.0, 0.0};
  std::complex<double> b{1.0, 0.0};
  AffineShape g = AffineShape::linear;
};

using GeneratorLaw = std::variant<RealPower, ImaginaryExponential, ParabolaEdge, AffineCustom>;

inline const char* family_name(const GeneratorLaw& law) {
  constexpr const char* names[] = {"real_power", "imaginary_exponential", "parabola_edge",
                                   "affine_custom"};
  return names[law.index()];
}

inline const char* shape_name(AffineShape g) {
  switch (g) {
    case AffineShape::linear: return "k";
    case AffineShape::square: return "k^2";
    case AffineShape::sqrt: return "sqrt(k)";
    case AffineShape::log1p: return "log(1+k)";
  }
  return "?";
}

inline std::optional<AffineShape> shape_from_name(const std::string& name) {
  for (auto g : {AffineShape::linear, AffineShape::square, AffineShape::sqrt, AffineShape::log1p}) {
    if (name == shape_name(g)) return g;
  }
  return std::nullopt;
}

inline double shape_value(AffineShape g, double k) {
  switch (g) {
    case AffineShape::linear: return k;
    case AffineShape::square: return k * k;
    case AffineShape::sqrt: return std::sqrt(k);
    case AffineShape::log1p: return std::log1p(k);
  }
  return k;
}

/// Smallest real k with g(k) >= value (g is increasing on k >= 0).
inline double shape_inverse(AffineShape g, double value) {
  if (value <= 0.0) return 0.0;
  switch (g) {
    case AffineShape::linear: return value;
    case AffineShape::square: return std::sqrt(value);
    case AffineShape::sqrt: return value * value;
    case AffineShape::log1p: return value > 700.0 ? kPosInf : std::expm1(value);
  }
  return value;
}

namespace detail {

inline void require(bool ok, const std::string& param, const std::string& rule) {
  if (!ok) throw ValidationError(param + " out of range (" + rule + ")");
}

inline bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

/// Throws ValidationError naming the first parameter outside its documented
/// range. The ranges guarantee |lambda_k| nondecreasing in k.
inline void validate(const GeneratorLaw& law) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          detail::require(std::isfinite(g.sigma), "sigma", "must be finite");
          detail::require(std::isfinite(g.p) && g.p > 0.0, "p", "must be > 0");
        } else if constexpr (std::is_same_v<T, ImaginaryExponential>) {
          detail::require(std::isfinite(g.s) && g.s != 0.0, "s", "must be finite and nonzero");
          detail::require(std::isfinite(g.r) && g.r > 1.0, "r", "must be > 1");
        } else if constexpr (std::is_same_v<T, ParabolaEdge>) {
          detail::require(std::isfinite(g.c), "c", "must be finite");
          detail::require(std::isfinite(g.beta0) && g.beta0 >= 1.0, "beta0", "must be >= 1");
          detail::require(std::isfinite(g.q) && g.q > 0.0, "q", "must be > 0");
        } else {
          detail::require(detail::finite_all({g.a.real(), g.a.imag()}), "a", "must be finite");
          detail::require(detail::finite_all({g.b.real(), g.b.imag()}), "b", "must be finite");
          // d/dg |a + b g|^2 >= 0 from g(1) onwards keeps the modulus monotone.
          const double slope = (g.a * std::conj(g.b)).real() + std::norm(g.b) * shape_value(g.g, 1.0);
          detail::require(slope >= 0.0, "a",
                          "Re(a*conj(b)) + |b|^2 g(1) must be >= 0 for a monotone modulus");
        }
      },
      law);
}

inline SpectralPoint generator_point(const GeneratorLaw& law, Index k) {
  const double kk = static_cast<double>(k);
  return std::visit(
      [kk](const auto& g) -> SpectralPoint {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          const double mag = std::pow(kk, g.p);
          return {g.sigma * mag, 0.0,
                  g.sigma == 0.0 ? kNegInf : std::log(std::abs(g.sigma)) + g.p * std::log(kk)};
        } else if constexpr (std::is_same_v<T, ImaginaryExponential>) {
          const double log_mag = std::log(std::abs(g.s)) + kk * std::log(g.r);
          const double mag = std::abs(g.s) * std::pow(g.r, kk);
          return {0.0, g.s > 0.0 ? mag : -mag, log_mag};
        } else if constexpr (std::is_same_v<T, ParabolaEdge>) {
          const double log_m = g.q * std::log(kk);
          const double m = std::pow(kk, g.q);
          const double re = g.c * std::exp(log_m / g.beta0);
          // |lambda| = m * sqrt(1 + (c m^(1/beta0 - 1))^2), the ratio is <= |c|.
          const double ratio = g.c * std::exp(log_m * (1.0 / g.beta0 - 1.0));
          return {re, m, log_m + 0.5 * std::log1p(ratio * ratio)};
        } else {
          const double gv = shape_value(g.g, kk);
          const std::complex<double> z = g.a + g.b * gv;
          return SpectralPoint::from(z);
        }
      },
      law);
}

enum class SpectrumKind { finite_list, generator };

/// Immutable description of sigma(A).
class SpectrumSpec {
 public:
  static SpectrumSpec finite_list(std::vector<Atom> atoms, Index truncation_default = 64) {
    SpectrumSpec spec;
    spec.kind_ = SpectrumKind::finite_list;
    std::set<Index> seen;
    for (const auto& atom : atoms) {
      if (atom.index < 1) throw ValidationError("atom index must be >= 1");
      if (!std::isfinite(atom.lambda.real()) || !std::isfinite(atom.lambda.imag())) {
        throw ValidationError("atom lambda must be finite (index " + std::to_string(atom.index) + ")");
      }
      if (!seen.insert(atom.index).second) {
        throw ValidationError("duplicate atom index " + std::to_string(atom.index));
      }
    }
    if (truncation_default < 1) throw ValidationError("truncation_default out of range (must be >= 1)");
    spec.atoms_ = std::move(atoms);
    spec.truncation_default_ = truncation_default;
    return spec;
  }

  static SpectrumSpec generator(GeneratorLaw law, Index truncation_default = 64, bool negated = false) {
    validate(law);
    if (truncation_default < 1) throw ValidationError("truncation_default out of range (must be >= 1)");
    SpectrumSpec spec;
    spec.kind_ = SpectrumKind::generator;
    spec.law_ = law;
    spec.truncation_default_ = truncation_default;
    spec.negated_ = negated;
    return spec;
  }

  [[nodiscard]] SpectrumKind kind() const { return kind_; }
  [[nodiscard]] bool is_generator() const { return kind_ == SpectrumKind::generator; }
  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  [[nodiscard]] const GeneratorLaw& law() const { return *law_; }
  [[nodiscard]] Index truncation_default() const { return truncation_default_; }
  /// Generator output is multiplied by -1 (reflection of the generator law).
  [[nodiscard]] bool negated() const { return negated_; }

  [[nodiscard]] bool has_index(Index k) const {
    if (kind_ == SpectrumKind::generator) return k >= 1;
    for (const auto& atom : atoms_) {
      if (atom.index == k) return true;
    }
    return false;
  }

  /// lambda_k for any index the spectrum contains.
  [[nodiscard]] SpectralPoint point(Index k) const {
    if (kind_ == SpectrumKind::finite_list) {
      for (const auto& atom : atoms_) {
        if (atom.index == k) return SpectralPoint::from(atom.lambda);
      }
      throw ValidationError("spectrum has no atom with index " + std::to_string(k));
    }
    if (k < 1) throw ValidationError("generator index must be >= 1");
    SpectralPoint p = generator_point(*law_, k);
    if (negated_) {
      p.re = -p.re;
      p.im = -p.im;
    }
    return p;
  }

 private:
  SpectrumSpec() = default;

  SpectrumKind kind_ = SpectrumKind::finite_list;
  std::vector<Atom> atoms_;
  std::optional<GeneratorLaw> law_;
  Index truncation_default_ = 64;
  bool negated_ = false;
};

/// Atoms 1..N of the spectrum. Finite lists return their first min(N, size)
/// atoms in list order. Generators stop early at the first index whose value
/// is not representable in double precision (the atom invariant requires
/// finite lambda); `SpectrumSpec::point` still reaches beyond that index.
inline std::vector<Atom> materialize(const SpectrumSpec& spec, Index n) {
  if (n < 1) throw ValidationError("N out of range (must be >= 1)");
  std::vector<Atom> out;
  if (spec.kind() == SpectrumKind::finite_list) {
    const auto& atoms = spec.atoms();
    const auto count = std::min<std::size_t>(atoms.size(), static_cast<std::size_t>(n));
    out.assign(atoms.begin(), atoms.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  for (Index k = 1; k <= n; ++k) {
    const SpectralPoint p = spec.point(k);
    if (!p.finite()) break;
    out.push_back({k, p.value()});
  }
  return out;
}

/// The spectrum of -A.
inline SpectrumSpec negate(const SpectrumSpec& spec) {
  if (spec.kind() == SpectrumKind::finite_list) {
    std::vector<Atom> atoms = spec.atoms();
    for (auto& atom : atoms) atom.lambda = -atom.lambda;
    return SpectrumSpec::finite_list(std::move(atoms), spec.truncation_default());
  }
  return SpectrumSpec::generator(spec.law(), spec.truncation_default(), !spec.negated());
}

/// True when |lambda_k| -> infinity along the generator.
inline bool modulus_unbounded(const GeneratorLaw& law) {
  return std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          return g.sigma != 0.0;
        } else if constexpr (std::is_same_v<T, AffineCustom>) {
          return g.b != std::complex<double>{};
        } else {
          return true;
        }
      },
      law);
}

}  // namespace gevrey
