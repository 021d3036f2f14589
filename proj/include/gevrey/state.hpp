#pragma once

/**
 * @file state.hpp
 * @brief Vectors f = sum f_k e_k in the orthonormal spectral basis.
 *
 * Three representations share one interface:
 *
 *   finite    explicit coefficients on finitely many indices
 *   law       a closed-form coefficient law on every index of the spectrum
 *   selected  explicit coefficients on a selected subsequence of atoms plus
 *             a certified description of its infinite continuation
 *
 * Operators are never applied destructively: every state carries a symbolic
 * Borel function `applied`, and the coefficient at lambda_k is
 * base_k * applied(lambda_k). This keeps e^{tA}, A^n and projections exact on
 * infinite laws and lets domain tests see the full series.
 */

#include <gevrey/borel.hpp>
#include <gevrey/error.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/logmath.hpp>
#include <gevrey/spectrum.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

enum class StateKind { finite, law, selected };

enum class CoefficientLaw { inverse_square, exp_linear, exp_quadratic, exp_lambda_re };

inline const char* law_name(CoefficientLaw l) {
  switch (l) {
    case CoefficientLaw::inverse_square: return "inverse_square";
    case CoefficientLaw::exp_linear: return "exp_linear";
    case CoefficientLaw::exp_quadratic: return "exp_quadratic";
    case CoefficientLaw::exp_lambda_re: return "exp_lambda_re";
  }
  return "?";
}

inline std::optional<CoefficientLaw> law_from_name(const std::string& s) {
  for (auto l : {CoefficientLaw::inverse_square, CoefficientLaw::exp_linear, CoefficientLaw::exp_quadratic,
                 CoefficientLaw::exp_lambda_re}) {
    if (s == law_name(l)) return l;
  }
  return std::nullopt;
}

enum class EscapeRegime { bounded_real, unbounded_pos, unbounded_neg };

inline const char* regime_name(EscapeRegime r) {
  switch (r) {
    case EscapeRegime::bounded_real: return "bounded_real";
    case EscapeRegime::unbounded_pos: return "unbounded_pos";
    case EscapeRegime::unbounded_neg: return "unbounded_neg";
  }
  return "?";
}

inline std::optional<EscapeRegime> regime_from_name(const std::string& s) {
  for (auto r : {EscapeRegime::bounded_real, EscapeRegime::unbounded_pos, EscapeRegime::unbounded_neg}) {
    if (s == regime_name(r)) return r;
  }
  return std::nullopt;
}

/// Coefficients of the selected atoms beyond the explicit head.
enum class TailCoefficient {
  /// c^{-2} with c the selection counter.
  inverse_square,
  /// exp(-weight * c * |Re lambda|).
  exp_re,
};

/// What is known about an infinite escaping selection past its explicit
/// head. At position k >= 1 with selection counter n(k) >= k:
///   -n^-2 |Im|^(1/beta) < Re < n^-2 |Im|^(1/beta),  |lambda| > n;
///   bounded_real:        |Re| <= omega and n(k) = k;
///   unbounded_pos / neg: +-Re >= k.
struct SelectionTail {
  EscapeRegime regime = EscapeRegime::bounded_real;
  double omega = 0.0;
  double beta = 1.0;
  TailCoefficient coefficient = TailCoefficient::inverse_square;
  double weight = 1.0;

  friend bool operator==(const SelectionTail&, const SelectionTail&) = default;
};

struct Coefficient {
  std::complex<double> value;
  double log_mag = kNegInf;
};

class StateVector {
 public:
  using Entries = std::vector<std::pair<Index, std::complex<double>>>;

  static StateVector finite(Entries coeffs) {
    StateVector s;
    s.kind_ = StateKind::finite;
    s.coeffs_ = checked(std::move(coeffs));
    return s;
  }

  static StateVector law(CoefficientLaw l, double a = 1.0) {
    if (!std::isfinite(a)) throw ValidationError("a out of range (must be finite)");
    if (l != CoefficientLaw::inverse_square && l != CoefficientLaw::exp_lambda_re && !(a > 0.0)) {
      throw ValidationError("a out of range (must be > 0 for " + std::string(law_name(l)) + ")");
    }
    StateVector s;
    s.kind_ = StateKind::law;
    s.law_ = l;
    s.a_ = a;
    return s;
  }

  /// Explicit head on the selected atoms (in selection order) and its tail.
  /// `head_log` optionally gives log|c| per entry for coefficients that
  /// underflow in double precision (their stored value is then 0).
  static StateVector selected(Entries head, SelectionTail tail, std::vector<double> head_log = {}) {
    StateVector s;
    s.kind_ = StateKind::selected;
    for (const auto& [k, c] : head) {
      if (k < 1) throw ValidationError("coefficient index must be >= 1");
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ValidationError("coefficient must be finite");
    }
    if (!head_log.empty() && head_log.size() != head.size()) {
      throw ValidationError("head_log must match the head length");
    }
    s.coeffs_ = std::move(head);
    s.head_log_ = std::move(head_log);
    s.tail_ = tail;
    return s;
  }

  [[nodiscard]] StateKind kind() const { return kind_; }
  [[nodiscard]] const Entries& coeffs() const { return coeffs_; }
  [[nodiscard]] CoefficientLaw law() const { return law_; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] const std::optional<SelectionTail>& tail() const { return tail_; }
  [[nodiscard]] const BorelFunction& applied() const { return applied_; }
  [[nodiscard]] const std::vector<double>& head_log() const { return head_log_; }

  /// F(A) applied symbolically.
  [[nodiscard]] StateVector multiplied(const BorelFunction& f) const {
    StateVector s = *this;
    s.applied_ = f * applied_;
    return s;
  }

  [[nodiscard]] StateVector scaled(std::complex<double> c) const { return multiplied(BorelFunction::constant(c)); }

  /// The same vector described against the negated spectrum: every
  /// lambda-dependent ingredient is evaluated at -lambda.
  [[nodiscard]] StateVector reflected() const {
    StateVector s = *this;
    s.applied_ = applied_.reflected();
    if (kind_ == StateKind::law && law_ == CoefficientLaw::exp_lambda_re) s.a_ = -a_;
    if (tail_ && tail_->regime != EscapeRegime::bounded_real) {
      s.tail_->regime =
          tail_->regime == EscapeRegime::unbounded_pos ? EscapeRegime::unbounded_neg : EscapeRegime::unbounded_pos;
    }
    return s;
  }

  /// log of the law coefficient at index k (law states only).
  [[nodiscard]] double law_log(Index k, const SpectralPoint& p) const {
    const double kk = static_cast<double>(k);
    switch (law_) {
      case CoefficientLaw::inverse_square: return std::log(std::abs(a_)) - 2.0 * std::log(kk);
      case CoefficientLaw::exp_linear: return -a_ * kk;
      case CoefficientLaw::exp_quadratic: return -a_ * kk * kk;
      case CoefficientLaw::exp_lambda_re: return -mul0(a_ * kk, p.re);
    }
    return kNegInf;
  }

  /// Base coefficient (before `applied`) at index k, if the state has one.
  [[nodiscard]] std::optional<LogPolar> base(Index k) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].first != k) continue;
      const std::complex<double> c = coeffs_[i].second;
      if (!head_log_.empty()) return LogPolar{head_log_[i], c == std::complex<double>{} ? 0.0 : std::arg(c)};
      return LogPolar::from(c);
    }
    return std::nullopt;
  }

  /// f_k = base_k * applied(lambda_k).
  [[nodiscard]] Coefficient coefficient(Index k, const SpectralPoint& p) const {
    const auto direct = applied_.value(p);
    if (kind_ == StateKind::law) {
      const double lb = law_log(k, p);
      if (lb == kNegInf) return {};
      if (direct && std::abs(lb) < 700.0) {
        const std::complex<double> v = std::exp(lb) * *direct;
        return {v, log_abs(v)};
      }
      const LogPolar lp = LogPolar{lb, 0.0} * applied_.log_value(p);
      return {lp.value(), lp.log_mag};
    }
    const auto b = base(k);
    if (!b || b->log_mag == kNegInf) return {};
    if (direct && std::abs(b->log_mag) < 700.0) {
      // Multiply the stored value itself so that F = 1 reproduces it exactly.
      const std::complex<double> raw = head_log_.empty() ? raw_value(k) : b->value();
      const std::complex<double> v = raw * *direct;
      if (std::isfinite(v.real()) && std::isfinite(v.imag())) return {v, log_abs(v)};
    }
    const LogPolar lp = *b * applied_.log_value(p);
    return {lp.value(), lp.log_mag};
  }

 private:
  StateVector() = default;

  [[nodiscard]] std::complex<double> raw_value(Index k) const {
    for (const auto& [i, c] : coeffs_) {
      if (i == k) return c;
    }
    return {};
  }

  static Entries checked(Entries coeffs) {
    std::sort(coeffs.begin(), coeffs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i].first < 1) throw ValidationError("coefficient index must be >= 1");
      if (i > 0 && coeffs[i].first == coeffs[i - 1].first) {
        throw ValidationError("duplicate coefficient index " + std::to_string(coeffs[i].first));
      }
      const auto c = coeffs[i].second;
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw ValidationError("coefficient must be finite (index " + std::to_string(coeffs[i].first) + ")");
      }
    }
    return coeffs;
  }

  StateKind kind_ = StateKind::finite;
  Entries coeffs_;
  CoefficientLaw law_ = CoefficientLaw::inverse_square;
  double a_ = 1.0;
  std::vector<double> head_log_;
  std::optional<SelectionTail> tail_;
  BorelFunction applied_;
};

namespace detail {

inline Json entries_to_json(const StateVector::Entries& entries, const std::vector<double>& logs = {}) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [k, c] = entries[i];
    Json e = {{"k", k}, {"re", c.real()}, {"im", c.imag()}};
    if (!logs.empty()) e["log_abs"] = logs[i];
    arr.push_back(std::move(e));
  }
  return arr;
}

// `logs` receives the optional "log_abs" fields (selected heads only).
inline StateVector::Entries entries_from_json(const Json& j, const std::string& where,
                                              std::vector<double>* logs = nullptr) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of coefficients");
  StateVector::Entries out;
  std::size_t pos = 0;
  bool any_log = false;
  for (const auto& c : j) {
    const std::string at = where + "/" + std::to_string(pos++);
    if (!c.is_object()) throw ValidationError(at + ": expected an object");
    any_log = any_log || c.contains("log_abs");
    if (logs) {
      reject_unknown_keys(c, {"k", "re", "im", "log_abs"}, at);
    } else {
      reject_unknown_keys(c, {"k", "re", "im"}, at);
    }
    if (!c.contains("k")) throw ValidationError(at + "/k: missing field");
    const Index k = read_integer(c, "k", 0, at);
    if (k < 1) throw ValidationError(at + "/k: k out of range (must be >= 1)");
    const std::complex<double> v{read_number(c, "re", 0.0, at), read_number(c, "im", 0.0, at)};
    out.emplace_back(k, v);
    if (logs) logs->push_back(c.contains("log_abs") ? read_number(c, "log_abs", 0.0, at) : log_abs(v));
  }
  if (logs && !any_log) logs->clear();
  return out;
}

}  // namespace detail

inline Json state_to_json(const StateVector& f) {
  Json j = Json::object();
  switch (f.kind()) {
    case StateKind::finite:
      j["kind"] = "finite";
      j["coeffs"] = detail::entries_to_json(f.coeffs());
      break;
    case StateKind::law:
      j["kind"] = "law";
      j["law"] = law_name(f.law());
      j["a"] = f.a();
      break;
    case StateKind::selected: {
      j["kind"] = "selected";
      j["coeffs"] = detail::entries_to_json(f.coeffs(), f.head_log());
      const SelectionTail& t = *f.tail();
      j["tail"] = {{"regime", regime_name(t.regime)},
                   {"omega", t.omega},
                   {"beta", t.beta},
                   {"coefficient", t.coefficient == TailCoefficient::inverse_square ? "inverse_square" : "exp_re"},
                   {"weight", t.weight}};
      break;
    }
  }
  if (!f.applied().factors().empty()) j["applied"] = f.applied().text();
  return j;
}

inline std::string serialize_state(const StateVector& f) { return canonical_dump(state_to_json(f)); }

inline StateVector state_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw ValidationError("/: state document must be a JSON object");
  const std::string kind = read_string(j, "kind", "");
  StateVector out = StateVector::finite({});
  if (kind == "finite") {
    reject_unknown_keys(j, {"kind", "coeffs", "applied"}, "");
    if (!j.contains("coeffs")) throw ValidationError("/coeffs: missing field");
    out = with_location("/coeffs", [&] { return StateVector::finite(entries_from_json(j.at("coeffs"), "/coeffs")); });
  } else if (kind == "law") {
    reject_unknown_keys(j, {"kind", "law", "a", "applied"}, "");
    const std::string name = read_string(j, "law", "");
    const auto l = law_from_name(name);
    if (!l) {
      throw ValidationError("/law: unknown law \"" + name +
                            "\" (use inverse_square, exp_linear, exp_quadratic, exp_lambda_re)");
    }
    const double a = read_number(j, "a", 1.0, "");
    out = with_location("/a", [&] { return StateVector::law(*l, a); });
  } else if (kind == "selected") {
    reject_unknown_keys(j, {"kind", "coeffs", "tail", "applied"}, "");
    if (!j.contains("tail") || !j.at("tail").is_object()) throw ValidationError("/tail: expected an object");
    const Json& t = j.at("tail");
    reject_unknown_keys(t, {"regime", "omega", "beta", "coefficient", "weight"}, "/tail");
    SelectionTail tail;
    const std::string regime = read_string(t, "regime", "/tail");
    const auto r = regime_from_name(regime);
    if (!r) throw ValidationError("/tail/regime: unknown regime \"" + regime + "\"");
    tail.regime = *r;
    tail.omega = read_number(t, "omega", 0.0, "/tail");
    tail.beta = read_number(t, "beta", 1.0, "/tail");
    tail.weight = read_number(t, "weight", 1.0, "/tail");
    const std::string c = read_string(t, "coefficient", "/tail");
    if (c == "inverse_square") {
      tail.coefficient = TailCoefficient::inverse_square;
    } else if (c == "exp_re") {
      tail.coefficient = TailCoefficient::exp_re;
    } else {
      throw ValidationError("/tail/coefficient: unknown coefficient law");
    }
    if (!(tail.beta >= 1.0) || !(tail.omega >= 0.0) || !(tail.weight > 0.0)) {
      throw ValidationError("/tail: beta >= 1, omega >= 0 and weight > 0 required");
    }
    std::vector<double> logs;
    const auto head = entries_from_json(j.contains("coeffs") ? j.at("coeffs") : Json::array(), "/coeffs", &logs);
    out = with_location("/coeffs", [&] { return StateVector::selected(head, tail, logs); });
  } else {
    throw ValidationError("/kind: unknown kind \"" + kind + "\"");
  }
  if (j.contains("applied")) {
    const std::string text = read_string(j, "applied", "");
    out = out.multiplied(with_location("/applied", [&] { return parse_borel(text); }));
  }
  return out;
}

inline StateVector parse_state(const std::string& text) { return state_from_json(parse_json_text(text)); }

}  // namespace gevrey
