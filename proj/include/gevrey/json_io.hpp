#pragma once

// Canonical JSON: keys sorted lexicographically, no whitespace, floating
// point numbers printed with "%.17g" (round-trip exact), non-finite numbers
// as null. Every document this library writes goes through canonical_dump.

#include <gevrey/error.hpp>
#include <gevrey/spectrum.hpp>

#include <json.hpp>

#include <cstdio>
#include <initializer_list>
#include <string>

namespace gevrey {

using Json = nlohmann::json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep integral-valued doubles recognizably floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void canonical_dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        canonical_dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        canonical_dump_into(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::canonical_dump_into(j, out);
  return out;
}

/// Parses text, converting library parse errors (which carry the byte
/// position) into ValidationError.
inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

namespace detail {

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok) throw ValidationError(where + "/" + it.key() + ": unknown field \"" + it.key() + "\"");
  }
}

inline double read_number(const Json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "/" + key + ": expected a number");
  return v.get<double>();
}

inline Index read_integer(const Json& obj, const char* key, Index fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<Index>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<Index>(d);
  }
  throw ValidationError(where + "/" + key + ": expected an integer");
}

inline bool read_bool(const Json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError(where + "/" + key + ": expected true or false");
  return v.get<bool>();
}

inline std::string read_string(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + "/" + key + ": missing field");
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(where + "/" + key + ": expected a string");
  return v.get<std::string>();
}

// Runs construction-time validation; range errors are prefixed with the JSON
// location. An empty `where` means "/<parameter named by the message>".
template <class Fn>
auto with_location(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    const std::string loc = where.empty() ? "/" + msg.substr(0, msg.find(' ')) : where;
    throw ValidationError(loc + ": " + msg);
  }
}

}  // namespace detail

inline Json spectrum_to_json(const SpectrumSpec& spec) {
  Json j = Json::object();
  j["truncation_default"] = spec.truncation_default();
  if (spec.kind() == SpectrumKind::finite_list) {
    j["kind"] = "finite_list";
    Json atoms = Json::array();
    for (const auto& atom : spec.atoms()) {
      atoms.push_back({{"k", atom.index}, {"re", atom.lambda.real()}, {"im", atom.lambda.imag()}});
    }
    j["atoms"] = std::move(atoms);
    return j;
  }
  j["kind"] = "generator";
  j["negate"] = spec.negated();
  const GeneratorLaw& law = spec.law();
  j["family"] = family_name(law);
  std::visit(
      [&j](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RealPower>) {
          j["sigma"] = g.sigma;
          j["p"] = g.p;
        } else if constexpr (std::is_same_v<T, ImaginaryExponential>) {
          j["s"] = g.s;
          j["r"] = g.r;
        } else if constexpr (std::is_same_v<T, ParabolaEdge>) {
          j["c"] = g.c;
          j["beta0"] = g.beta0;
          j["q"] = g.q;
        } else {
          j["a_re"] = g.a.real();
          j["a_im"] = g.a.imag();
          j["b_re"] = g.b.real();
          j["b_im"] = g.b.imag();
          j["g"] = shape_name(g.g);
        }
      },
      law);
  return j;
}

inline std::string serialize_spectrum(const SpectrumSpec& spec) { return canonical_dump(spectrum_to_json(spec)); }

inline SpectrumSpec spectrum_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw ValidationError("/: spectrum document must be a JSON object");
  const std::string kind = read_string(j, "kind", "");
  const Index truncation = read_integer(j, "truncation_default", 64, "");
  if (kind == "finite_list") {
    reject_unknown_keys(j, {"kind", "atoms", "truncation_default"}, "");
    if (!j.contains("atoms") || !j.at("atoms").is_array()) {
      throw ValidationError("/atoms: expected an array of atoms");
    }
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    for (const auto& a : j.at("atoms")) {
      const std::string where = "/atoms/" + std::to_string(pos++);
      if (!a.is_object()) throw ValidationError(where + ": expected an object");
      reject_unknown_keys(a, {"k", "re", "im"}, where);
      if (!a.contains("k")) throw ValidationError(where + "/k: missing field");
      const Index k = read_integer(a, "k", 0, where);
      if (k < 1) throw ValidationError(where + "/k: k out of range (must be >= 1)");
      atoms.push_back({k, {read_number(a, "re", 0.0, where), read_number(a, "im", 0.0, where)}});
    }
    return with_location("/atoms", [&] { return SpectrumSpec::finite_list(std::move(atoms), truncation); });
  }
  if (kind != "generator") throw ValidationError("/kind: unknown kind \"" + kind + "\"");
  const std::string family = read_string(j, "family", "");
  const bool negated = read_bool(j, "negate", false, "");
  GeneratorLaw law;
  if (family == "real_power") {
    reject_unknown_keys(j, {"kind", "family", "truncation_default", "negate", "sigma", "p"}, "");
    law = RealPower{read_number(j, "sigma", 1.0, ""), read_number(j, "p", 1.0, "")};
  } else if (family == "imaginary_exponential") {
    reject_unknown_keys(j, {"kind", "family", "truncation_default", "negate", "s", "r"}, "");
    law = ImaginaryExponential{read_number(j, "s", 1.0, ""), read_number(j, "r", 2.0, "")};
  } else if (family == "parabola_edge") {
    reject_unknown_keys(j, {"kind", "family", "truncation_default", "negate", "c", "beta0", "q"}, "");
    law = ParabolaEdge{read_number(j, "c", 1.0, ""), read_number(j, "beta0", 1.0, ""),
                       read_number(j, "q", 1.0, "")};
  } else if (family == "affine_custom") {
    reject_unknown_keys(j, {"kind", "family", "truncation_default", "negate", "a_re", "a_im", "b_re", "b_im", "g"},
                        "");
    AffineCustom g;
    g.a = {read_number(j, "a_re", 0.0, ""), read_number(j, "a_im", 0.0, "")};
    g.b = {read_number(j, "b_re", 1.0, ""), read_number(j, "b_im", 0.0, "")};
    if (j.contains("g")) {
      const std::string name = read_string(j, "g", "");
      const auto shape = shape_from_name(name);
      if (!shape) throw ValidationError("/g: unknown shape \"" + name + "\" (use k, k^2, sqrt(k), log(1+k))");
      g.g = *shape;
    }
    law = g;
  } else {
    throw ValidationError("/family: unknown family \"" + family + "\"");
  }
  return with_location("", [&] { return SpectrumSpec::generator(law, truncation, negated); });
}

inline SpectrumSpec parse_spectrum(const std::string& text) { return spectrum_from_json(parse_json_text(text)); }

}  // namespace gevrey
