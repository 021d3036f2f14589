#pragma once

/**
 * @file borel.hpp
 * @brief Borel functions of lambda from the catalog used by the calculus:
 *        products of lambda^n, exp(z lambda), exp(s |lambda|^(1/beta)),
 *        indicators of spectral sets and constants.
 */

#include <gevrey/error.hpp>
#include <gevrey/logmath.hpp>
#include <gevrey/region.hpp>
#include <gevrey/spectrum.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gevrey {

enum class PredicateKind { everything, nothing, re_nonneg, re_neg, modulus_le, modulus_gt, in_region, outside_region };

/// A Borel set of the catalog, as a predicate on lambda.
struct Predicate {
  PredicateKind kind = PredicateKind::everything;
  double r = 0.0;
  double beta = 1.0;
  double b_minus = 1.0;
  double b_plus = 1.0;
  /// Evaluate at -lambda instead of lambda.
  bool reflected = false;

  static Predicate everything() { return {}; }
  static Predicate nothing() { return {PredicateKind::nothing}; }
  static Predicate re_nonneg() { return {PredicateKind::re_nonneg}; }
  static Predicate re_neg() { return {PredicateKind::re_neg}; }
  static Predicate modulus_le(double r) { return {PredicateKind::modulus_le, r}; }
  static Predicate modulus_gt(double r) { return {PredicateKind::modulus_gt, r}; }
  static Predicate in_region(const Region& g) {
    return {PredicateKind::in_region, 0.0, g.beta, g.b_minus, g.b_plus};
  }

  bool operator()(const SpectralPoint& p0) const {
    SpectralPoint p = p0;
    if (reflected) {
      p.re = -p.re;
      p.im = -p.im;
    }
    switch (kind) {
      case PredicateKind::everything: return true;
      case PredicateKind::nothing: return false;
      case PredicateKind::re_nonneg: return p.re >= 0.0;
      case PredicateKind::re_neg: return p.re < 0.0;
      case PredicateKind::modulus_le: return p.log_abs <= std::log(r);
      case PredicateKind::modulus_gt: return p.log_abs > std::log(r);
      case PredicateKind::in_region: return gevrey::in_region(p, Region(beta, b_minus, b_plus));
      case PredicateKind::outside_region: return !gevrey::in_region(p, Region(beta, b_minus, b_plus));
    }
    return false;
  }

  [[nodiscard]] Predicate complement() const {
    Predicate c = *this;
    switch (kind) {
      case PredicateKind::everything: c.kind = PredicateKind::nothing; break;
      case PredicateKind::nothing: c.kind = PredicateKind::everything; break;
      case PredicateKind::re_nonneg: c.kind = PredicateKind::re_neg; break;
      case PredicateKind::re_neg: c.kind = PredicateKind::re_nonneg; break;
      case PredicateKind::modulus_le: c.kind = PredicateKind::modulus_gt; break;
      case PredicateKind::modulus_gt: c.kind = PredicateKind::modulus_le; break;
      case PredicateKind::in_region: c.kind = PredicateKind::outside_region; break;
      case PredicateKind::outside_region: c.kind = PredicateKind::in_region; break;
    }
    return c;
  }

  [[nodiscard]] std::string text() const;
};

namespace detail {

inline std::string num(double x) {
  char buf[40];
  return {buf, std::to_chars(buf, buf + sizeof buf, x).ptr};
}

inline std::string complex_text(std::complex<double> z) {
  if (z.imag() == 0.0) return num(z.real());
  return "(" + num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i)";
}

}  // namespace detail

inline std::string Predicate::text() const {
  const std::string x = reflected ? "-lambda" : "lambda";
  switch (kind) {
    case PredicateKind::everything: return "chi(C)";
    case PredicateKind::nothing: return "chi(empty)";
    case PredicateKind::re_nonneg: return "chi(Re(" + x + ")>=0)";
    case PredicateKind::re_neg: return "chi(Re(" + x + ")<0)";
    case PredicateKind::modulus_le: return "chi(|" + x + "|<=" + detail::num(r) + ")";
    case PredicateKind::modulus_gt: return "chi(|" + x + "|>" + detail::num(r) + ")";
    case PredicateKind::in_region:
    case PredicateKind::outside_region:
      return std::string("chi(") + (kind == PredicateKind::outside_region ? "!" : "") + "P[" + detail::num(beta) +
             "," + detail::num(b_minus) + "," + detail::num(b_plus) + "](" + x + "))";
  }
  return "?";
}

/// lambda^n, n >= 0.
struct Power {
  int n = 1;
};
/// exp(z lambda).
struct Exp {
  std::complex<double> z;
};
/// exp(s |lambda|^(1/beta)).
struct ExpModulus {
  double s = 1.0;
  double beta = 1.0;
};
struct Indicator {
  Predicate set;
};
struct Constant {
  std::complex<double> c{1.0, 0.0};
};

using Factor = std::variant<Power, Exp, ExpModulus, Indicator, Constant>;

namespace detail {

// Direct double-precision evaluation; empty when the value would overflow.
inline std::optional<std::complex<double>> factor_value(const Factor& f, const SpectralPoint& p) {
  if (!p.finite()) return std::nullopt;
  const std::complex<double> lambda = p.value();
  return std::visit(
      [&](const auto& g) -> std::optional<std::complex<double>> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Power>) {
          if (g.n * p.log_abs > 700.0) return std::nullopt;
          std::complex<double> out{1.0, 0.0};
          for (int i = 0; i < g.n; ++i) out *= lambda;
          return out;
        } else if constexpr (std::is_same_v<T, Exp>) {
          const std::complex<double> w = g.z * lambda;
          if (std::abs(w.real()) > 700.0 || !std::isfinite(w.imag())) return std::nullopt;
          return std::exp(w);
        } else if constexpr (std::is_same_v<T, ExpModulus>) {
          const double e = g.s * std::exp(p.log_abs / g.beta);
          if (e > 700.0) return std::nullopt;
          return std::complex<double>{std::exp(e), 0.0};
        } else if constexpr (std::is_same_v<T, Indicator>) {
          return std::complex<double>{g.set(p) ? 1.0 : 0.0, 0.0};
        } else {
          return g.c;
        }
      },
      f);
}

inline LogPolar factor_log(const Factor& f, const SpectralPoint& p) {
  return std::visit(
      [&](const auto& g) -> LogPolar {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Power>) {
          if (g.n == 0) return {0.0, 0.0};
          return {g.n * p.log_abs, g.n * std::atan2(p.im, p.re)};
        } else if constexpr (std::is_same_v<T, Exp>) {
          const double re = mul0(g.z.real(), p.re) - mul0(g.z.imag(), p.im);
          const double im = mul0(g.z.real(), p.im) + mul0(g.z.imag(), p.re);
          return {re, im};
        } else if constexpr (std::is_same_v<T, ExpModulus>) {
          return {p.log_abs == kNegInf ? 0.0 : g.s * std::exp(p.log_abs / g.beta), 0.0};
        } else if constexpr (std::is_same_v<T, Indicator>) {
          return g.set(p) ? LogPolar{0.0, 0.0} : LogPolar{};
        } else {
          return LogPolar::from(g.c);
        }
      },
      f);
}

inline Factor reflect_factor(const Factor& f) {
  return std::visit(
      [](const auto& g) -> Factor {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Exp>) {
          return Exp{-g.z};
        } else if constexpr (std::is_same_v<T, Indicator>) {
          Indicator out = g;
          out.set.reflected = !out.set.reflected;
          return out;
        } else {
          return g;
        }
      },
      f);
}

inline std::string factor_text(const Factor& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Power>) {
          return "lambda^" + std::to_string(g.n);
        } else if constexpr (std::is_same_v<T, Exp>) {
          return "exp(" + complex_text(g.z) + "*lambda)";
        } else if constexpr (std::is_same_v<T, ExpModulus>) {
          return "exp(" + num(g.s) + "*|lambda|^(1/" + num(g.beta) + "))";
        } else if constexpr (std::is_same_v<T, Indicator>) {
          return g.set.text();
        } else {
          return complex_text(g.c);
        }
      },
      f);
}

}  // namespace detail

/// A finite product of catalog factors; the empty product is F = 1.
class BorelFunction {
 public:
  BorelFunction() = default;
  BorelFunction(std::initializer_list<Factor> fs) : factors_(fs) {}
  explicit BorelFunction(std::vector<Factor> fs) : factors_(std::move(fs)) {}

  static BorelFunction one() { return {}; }
  static BorelFunction power(int n) {
    if (n < 0) throw ValidationError("n out of range (must be >= 0)");
    return {Power{n}};
  }
  static BorelFunction exp(std::complex<double> z) { return {Exp{z}}; }
  static BorelFunction exp_modulus(double s, double beta) {
    if (!(beta > 0.0)) throw ValidationError("beta out of range (must be > 0)");
    return {ExpModulus{s, beta}};
  }
  static BorelFunction indicator(const Predicate& set) { return {Indicator{set}}; }
  static BorelFunction constant(std::complex<double> c) { return {Constant{c}}; }

  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }

  friend BorelFunction operator*(const BorelFunction& a, const BorelFunction& b) {
    std::vector<Factor> fs = a.factors_;
    fs.insert(fs.end(), b.factors_.begin(), b.factors_.end());
    return BorelFunction(std::move(fs));
  }

  [[nodiscard]] LogPolar log_value(const SpectralPoint& p) const {
    LogPolar out{0.0, 0.0};
    bool zero = false;
    for (const auto& f : factors_) {
      const LogPolar v = detail::factor_log(f, p);
      if (v.log_mag == kNegInf) {
        zero = true;
        continue;
      }
      out.log_mag += v.log_mag;
      out.phase += v.phase;
    }
    if (zero) return {};
    return out;
  }

  [[nodiscard]] double log_abs(const SpectralPoint& p) const { return log_value(p).log_mag; }

  /// F(lambda) in double precision when representable; otherwise empty.
  [[nodiscard]] std::optional<std::complex<double>> value(const SpectralPoint& p) const {
    std::complex<double> out{1.0, 0.0};
    for (const auto& f : factors_) {
      const auto v = detail::factor_value(f, p);
      if (!v) return std::nullopt;
      out *= *v;
    }
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) return std::nullopt;
    return out;
  }

  /// The function lambda -> F(-lambda).
  [[nodiscard]] BorelFunction reflected() const {
    std::vector<Factor> fs;
    for (const auto& f : factors_) {
      fs.push_back(detail::reflect_factor(f));
      if (const auto* p = std::get_if<Power>(&f); p && p->n % 2 == 1) fs.push_back(Constant{{-1.0, 0.0}});
    }
    return BorelFunction(std::move(fs));
  }

  [[nodiscard]] std::string text() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& f : factors_) {
      if (!out.empty()) out += "*";
      out += detail::factor_text(f);
    }
    return out;
  }

 private:
  std::vector<Factor> factors_;
};

namespace detail {

inline std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t') out += c;
  }
  return out;
}

inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline double parse_scalar(const std::string& tok, const std::map<std::string, double>& params, const std::string& what) {
  if (auto it = params.find(tok); it != params.end()) return it->second;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("fn: cannot read " + what + " \"" + tok + "\" (give a number or pass the parameter)");
}

inline bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }
inline bool ends_with(const std::string& s, const std::string& p) {
  return s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0;
}

inline Factor parse_factor(const std::string& tok, const std::map<std::string, double>& params) {
  if (tok == "lambda") return Power{1};
  if (starts_with(tok, "lambda^")) {
    const double n = parse_scalar(tok.substr(7), params, "power");
    if (n < 0 || std::floor(n) != n || n > 1e6) throw ValidationError("fn: power must be a nonnegative integer");
    return Power{static_cast<int>(n)};
  }
  if (starts_with(tok, "exp(") && ends_with(tok, "*lambda)")) {
    return Exp{{parse_scalar(tok.substr(4, tok.size() - 12), params, "exponent"), 0.0}};
  }
  if (starts_with(tok, "exp(") && tok.find("*|lambda|^(1/") != std::string::npos && ends_with(tok, "))")) {
    const auto star = tok.find("*|lambda|^(1/");
    const double s = parse_scalar(tok.substr(4, star - 4), params, "s");
    const std::string b = tok.substr(star + 13, tok.size() - star - 15);
    const double beta = parse_scalar(b, params, "beta");
    if (!(beta > 0.0)) throw ValidationError("fn: beta must be > 0");
    return ExpModulus{s, beta};
  }
  if (starts_with(tok, "chi(|lambda|<=") && ends_with(tok, ")")) {
    return Indicator{Predicate::modulus_le(parse_scalar(tok.substr(14, tok.size() - 15), params, "radius"))};
  }
  if (starts_with(tok, "chi(|lambda|>") && ends_with(tok, ")")) {
    return Indicator{Predicate::modulus_gt(parse_scalar(tok.substr(13, tok.size() - 14), params, "radius"))};
  }
  if (tok == "chi(Re(lambda)>=0)") return Indicator{Predicate::re_nonneg()};
  if (tok == "chi(Re(lambda)<0)") return Indicator{Predicate::re_neg()};
  try {
    std::size_t used = 0;
    const double c = std::stod(tok, &used);
    if (used == tok.size()) return Constant{{c, 0.0}};
  } catch (const std::exception&) {
  }
  if (auto it = params.find(tok); it != params.end()) return Constant{{it->second, 0.0}};
  throw ValidationError("fn: unrecognized factor \"" + tok + "\"");
}

}  // namespace detail

/// Parses "1", "lambda^N", "exp(t*lambda)", "exp(s*|lambda|^(1/beta))",
/// "chi(|lambda|<=R)", "chi(|lambda|>R)", "chi(Re(lambda)>=0)",
/// "chi(Re(lambda)<0)" and products joined by '*'. Symbolic names are taken
/// from `params`.
inline BorelFunction parse_borel(const std::string& text, const std::map<std::string, double>& params = {}) {
  const std::string s = detail::strip_spaces(text);
  if (s.empty()) throw ValidationError("fn: empty function");
  std::vector<Factor> fs;
  // A '*' inside parentheses belongs to the factor, so split at depth 0.
  for (const auto& tok : detail::split_top_level(s, '*')) {
    if (tok.empty()) throw ValidationError("fn: empty factor");
    if (tok == "1") continue;
    fs.push_back(detail::parse_factor(tok, params));
  }
  return BorelFunction(std::move(fs));
}

}  // namespace gevrey
