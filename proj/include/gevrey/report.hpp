#pragma once

/**
 * @file report.hpp
 * @brief Canonical JSON and plot-ready CSV for every result type.
 */

#include <gevrey/calculus.hpp>
#include <gevrey/counterexample.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/region.hpp>
#include <gevrey/verify.hpp>

#include <fstream>
#include <string>

namespace gevrey {

enum class Format { json, csv };

inline std::optional<Format> format_from_name(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  return std::nullopt;
}

namespace detail {

inline Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

inline Json profile_to_json(const std::optional<ScaleProfile>& p) {
  if (!p) return nullptr;
  Json j = {{"kind", scale_kind_name(p->kind)}, {"ratio", p->ratio}, {"log_slope", p->log_slope}};
  j["flat"] = p->flat ? judgment_to_json(*p->flat) : Json(nullptr);
  return j;
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

}  // namespace detail

inline Json region_verdict_to_json(const RegionVerdict& v) {
  Json w = Json::array();
  for (const auto& a : v.witnesses) w.push_back({{"k", a.index}, {"re", a.lambda.real()}, {"im", a.lambda.imag()}});
  Json b = v.b_found ? Json::array({v.b_found->first, v.b_found->second}) : Json(nullptr);
  return {{"complement_bounded", v.complement_bounded},
          {"radius", detail::optional_number(v.radius)},
          {"radius_is_bound", v.radius_is_bound},
          {"witnesses", std::move(w)},
          {"b_found", std::move(b)},
          {"method", method_name(v.method)},
          {"heuristic_bounded", v.heuristic_bounded}};
}

inline Json gevrey_verdict_to_json(const GevreyVerdict& v, const ClassQuery& q) {
  Json js = Json::array();
  for (const auto& [s, j] : v.judgments) {
    Json e = detail::judgment_to_json(j);
    e["s"] = s;
    js.push_back(std::move(e));
  }
  return {{"member", membership_name(v.member)},
          {"beta", q.beta},
          {"flavor", flavor_name(q.flavor)},
          {"s_grid", q.s_grid},
          {"witness_s", detail::optional_number(v.witness_s)},
          {"refuting_s", detail::optional_number(v.refuting_s)},
          {"judgments", std::move(js)},
          {"profile", detail::profile_to_json(v.profile)},
          {"reason", v.reason}};
}

inline Json class0_to_json(const Class0Verdict& v) {
  return {{"member", membership_name(v.member)}, {"beta", 0.0}, {"alpha", detail::optional_number(v.alpha)},
          {"reason", v.reason}};
}

inline Json order_estimate_to_json(const OrderEstimate& e) {
  Json rows = Json::array();
  for (const auto& [n, y, fit] : e.rows) rows.push_back({{"n", n}, {"log_m_n", y}, {"fitted_log_m_n", fit}});
  return {{"beta_hat", e.beta_hat}, {"alpha_hat", e.alpha_hat}, {"c_hat", e.c_hat}, {"residual", e.residual},
          {"n_lo", e.n_lo}, {"n_hi", e.n_hi}, {"rows", std::move(rows)}};
}

inline std::string order_estimate_csv(const OrderEstimate& e) {
  std::string out = "n,log_m_n,fitted_log_m_n\n";
  for (const auto& [n, y, fit] : e.rows) out += detail::csv_row({std::to_string(n), format_double(y), format_double(fit)});
  return out;
}

inline Json trace_to_json(const EvolutionTrace& t) {
  Json samples = Json::array();
  for (const auto& s : t.samples) {
    Json j = {{"t", s.t},
              {"log_norm", s.log_norm},
              {"derivative_log_norms", s.derivative_log_norms},
              {"tail_bound", s.tail_bound},
              {"certified", s.certified}};
    j["mild_residual"] = detail::optional_number(s.mild_residual);
    samples.push_back(std::move(j));
  }
  return {{"truncation", t.truncation}, {"certified", t.certified()}, {"samples", std::move(samples)}};
}

/// t, ||y(t)||, ||y^(n)(t)|| for n = 1..d, tail bound.
inline std::string trace_csv(const EvolutionTrace& t) {
  std::size_t d = 0;
  for (const auto& s : t.samples) d = std::max(d, s.derivative_log_norms.size());
  std::string out = "t,norm";
  for (std::size_t n = 1; n <= d; ++n) out += ",norm_d" + std::to_string(n);
  out += ",tail_bound,certified\n";
  for (const auto& s : t.samples) {
    out += format_double(s.t) + ',' + format_double(std::exp(s.log_norm));
    for (std::size_t n = 0; n < d; ++n) {
      out += ',';
      if (n < s.derivative_log_norms.size()) out += format_double(std::exp(s.derivative_log_norms[n]));
    }
    out += ',' + format_double(s.tail_bound) + ',' + (s.certified ? "true" : "false") + '\n';
  }
  return out;
}

inline Json selection_to_json(const EscapeSelection& sel) {
  Json entries = Json::array();
  for (const auto& e : sel.entries) {
    entries.push_back({{"position", e.position}, {"counter", e.counter}, {"k", e.index}, {"re", e.lambda.re},
                       {"im", e.lambda.im}});
  }
  return {{"beta", sel.beta}, {"regime", regime_name(sel.regime)}, {"omega", sel.omega},
          {"infinite", sel.infinite}, {"entries", std::move(entries)}};
}

inline Json disks_to_json(const DiskSystem& d) {
  Json out = Json::array();
  for (std::size_t i = 0; i < d.centers.size(); ++i) {
    out.push_back({{"counter", d.counters[i]}, {"re", d.centers[i].re}, {"im", d.centers[i].im}, {"radius", d.radii[i]}});
  }
  return out;
}

inline Json synthesis_to_json(const Synthesis& s) {
  Json adm = {{"verdict", membership_name(s.admissibility.verdict)},
              {"t_max", s.admissibility.t_max},
              {"forward", detail::judgment_to_json(s.admissibility.forward)},
              {"backward", detail::judgment_to_json(s.admissibility.backward)},
              {"reason", s.admissibility.reason}};
  Json j = {{"selection", selection_to_json(s.selection)},
            {"disks", disks_to_json(s.disks)},
            {"f", state_to_json(s.f)},
            {"h_star", state_to_json(s.h_star)},
            {"admissibility", std::move(adm)},
            {"certificate", certificate_to_json(s.certificate)}};
  j["h"] = s.h ? state_to_json(*s.h) : Json(nullptr);
  return j;
}

/// trial, seed, outcome, detail.
inline std::string report_csv(const VerifyReport& r) {
  std::string out = "trial,seed,outcome,detail\n";
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const auto& t = r.results[i];
    const char* o = t.outcome == Outcome::agree ? "agree" : t.outcome == Outcome::disagree ? "disagree" : "inconclusive";
    out += detail::csv_row({std::to_string(i), std::to_string(t.seed), o, detail::csv_escape(t.detail)});
  }
  return out;
}

/// Canonical JSON followed by a newline.
inline std::string emit_json(const Json& j) { return canonical_dump(j) + '\n'; }

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace gevrey
