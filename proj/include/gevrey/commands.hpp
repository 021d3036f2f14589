#pragma once

/**
 * @file commands.hpp
 * @brief One function per CLI command: parsed inputs in, output bytes out.
 */

#include <gevrey/borel.hpp>
#include <gevrey/calculus.hpp>
#include <gevrey/counterexample.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/region.hpp>
#include <gevrey/report.hpp>
#include <gevrey/state.hpp>
#include <gevrey/verify.hpp>

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gevrey {

struct CommandResult {
  CommandResult() = default;
  CommandResult(std::string out, int code = 0) : output(std::move(out)), exit_code(code) {}

  std::string output;
  int exit_code = 0;
  /// Extra files requested by the command: (path, bytes).
  std::vector<std::pair<std::string, std::string>> files;
};

/// "a,b,c" -> {a, b, c}.
inline std::vector<double> parse_list(const std::string& text, const char* name) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw ValidationError(std::string(name) + ": cannot read number '" + item + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

/// "start:stop:step" -> start, start + step, ... up to stop (inclusive within
/// half a step); a plain list is accepted as well.
inline std::vector<double> parse_range(const std::string& text, const char* name) {
  if (text.find(':') == std::string::npos) return parse_list(text, name);
  std::string joined = text;
  for (char& c : joined) c = c == ':' ? ',' : c;
  const auto v = parse_list(joined, name);
  if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0]) {
    throw ValidationError(std::string(name) + ": expected start:stop:step with step > 0 and stop >= start");
  }
  const long count = std::lround(std::floor((v[1] - v[0]) / v[2] + 0.5));
  if (count > 100000) throw ValidationError(std::string(name) + ": more than 100000 points");
  std::vector<double> out;
  for (long i = 0; i <= count; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
  return out;
}

inline std::string render(const Json& j) { return emit_json(j); }

inline CommandResult cmd_classify(const SpectrumSpec& spec, double beta, const std::vector<double>& b_grid, Index n,
                                  Format format, double boundary_im_max = 10.0) {
  const RegionVerdict v = search_b(spec, beta, n, b_grid);
  if (format == Format::csv) {
    const double b = v.b_found ? v.b_found->first : b_grid.front();
    return {boundary_csv(Region(beta, b, b), boundary_im_max, 201)};
  }
  return {render(region_verdict_to_json(v))};
}

inline CommandResult cmd_apply(const SpectrumSpec& spec, const StateVector& f, const std::string& fn_text,
                               const std::map<std::string, double>& params, Index n) {
  const SpectralModel model(spec, n);
  const BorelFunction fn = parse_borel(fn_text, params);
  const Judgment j = domain_test_direct(model, fn, f);
  Json out = {{"fn", fn.text()}, {"domain", detail::judgment_to_json(j)}};
  if (j.verdict == Verdict::diverges) {
    out["state"] = nullptr;
    return {render(out), 1};
  }
  const StateVector g = apply_borel(model, fn, f, true);
  out["state"] = state_to_json(g);
  out["log_norm"] = log_norm(model, g);
  return {render(out)};
}

inline CommandResult cmd_evolve(const SpectrumSpec& spec, const StateVector& f, const std::vector<double>& times,
                                int derivatives, bool check_mild, Index n, Format format) {
  const SpectralModel model(spec, n);
  const EvolutionTrace trace = evolution_trace(model, f, times, derivatives, check_mild);
  return {format == Format::csv ? trace_csv(trace) : render(trace_to_json(trace))};
}

inline CommandResult cmd_gevrey(const SpectrumSpec& spec, const StateVector& f, double beta, Flavor flavor,
                                const std::vector<double>& s_grid, Index n) {
  const SpectralModel model(spec, n);
  if (beta == 0.0) return {render(class0_to_json(class0_membership(model, f)))};
  const ClassQuery q{beta, flavor, s_grid};
  return {render(gevrey_verdict_to_json(class_membership(model, f, q), q))};
}

inline CommandResult cmd_estimate(const SpectrumSpec& spec, const StateVector& f, int n_max, Index n, Format format) {
  const SpectralModel model(spec, n);
  const OrderEstimate e = estimate_order(model, f, n_max);
  return {format == Format::csv ? order_estimate_csv(e) : render(order_estimate_to_json(e))};
}

/// `out_paths` may name the state file and the certificate file.
inline CommandResult cmd_counterexample(const SpectrumSpec& spec, double beta, Index count,
                                        const std::vector<double>& s_grid, Index n,
                                        const std::vector<std::string>& out_paths) {
  const SpectralModel model(spec, n);
  const EscapeSelection sel = select_escaping(spec, beta, count, n);
  const Synthesis syn = synthesize(model, sel, s_grid);
  CommandResult r{render(synthesis_to_json(syn))};
  if (!out_paths.empty()) r.files.emplace_back(out_paths[0], render(state_to_json(syn.f)));
  if (out_paths.size() > 1) r.files.emplace_back(out_paths[1], render(certificate_to_json(syn.certificate)));
  return r;
}

inline CommandResult cmd_verify(Suite suite, const VerifyOptions& opt, Format format) {
  const VerifyReport rep = run_verify(suite, opt);
  return {format == Format::csv ? report_csv(rep) : render(report_to_json(rep)), exit_code(rep)};
}

}  // namespace gevrey
