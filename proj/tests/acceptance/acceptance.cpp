// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
// `acceptance --write-golden` regenerates tests/golden from the current CLI.

#include <gevrey/gevrey.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace gevrey;
namespace fs = std::filesystem;
using C = std::complex<double>;

namespace {

struct Tally {
  int failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<C> coeffs(const SpectralModel& model, const StateVector& f) {
  std::vector<C> out;
  for (const auto& m : materialize_state(model, f)) out.push_back(m.c.value);
  return out;
}

double rel_error(const std::vector<C>& a, const std::vector<C>& b) {
  if (a.size() != b.size()) return kPosInf;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

SpectralModel list_model(const std::vector<C>& lambdas) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < lambdas.size(); ++i) atoms.push_back({static_cast<Index>(i + 1), lambdas[i]});
  return SpectralModel(SpectrumSpec::finite_list(atoms));
}

struct FiniteCase {
  SpectralModel model;
  StateVector f;
  std::vector<C> lambdas;
};

// Random finite list with |lambda| <= radius and a random state on it.
FiniteCase random_finite(std::mt19937_64& rng, double radius, int max_len) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
  std::vector<C> lambdas;
  StateVector::Entries e;
  for (int k = 1; k <= len; ++k) {
    C l;
    do l = {radius * u(rng), radius * u(rng)};
    while (std::abs(l) > radius);
    lambdas.push_back(l);
    e.emplace_back(k, C{u(rng), u(rng)});
  }
  return {list_model(lambdas), StateVector::finite(e), lambdas};
}

bool report(const char* id, const Tally& t, const std::string& summary) {
  std::cout << id << ' ' << (t.failures == 0 ? "PASS" : "FAIL") << ": " << summary;
  if (t.failures) std::cout << " [" << t.failures << " failed; first: " << t.first << ']';
  std::cout << std::endl;
  return t.failures == 0;
}

bool ac1() {
  Tally t;
  VerifyOptions opt;
  opt.trials = 100;
  opt.seed = 7;
  opt.betas = {1.0, 2.0};
  const auto t0 = std::chrono::steady_clock::now();
  const VerifyReport r = run_verify(Suite::theorem_real, opt);
  const double secs = seconds_since(t0);
  t.expect(r.disagreements.empty(), "disagreements: " + std::to_string(r.disagreements.size()));
  t.expect(r.inconclusives <= 5, "inconclusives: " + std::to_string(r.inconclusives));
  t.expect(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  t.expect(r.agreements + r.inconclusives + static_cast<int>(r.disagreements.size()) == r.trials, "trial count");
  std::ostringstream s;
  s << "theorem_real 100 trials seed 7: " << r.agreements << " agree, " << r.disagreements.size() << " disagree, "
    << r.inconclusives << " inconclusive in " << secs << " s";
  return report("AC1", t, s.str());
}

bool ac2() {
  Tally t;
  VerifyOptions opt;
  opt.trials = 20;
  opt.seed = 11;
  const VerifyReport r = run_verify(Suite::self_adjoint, opt);
  t.expect(r.agreements == 20, "agreements: " + std::to_string(r.agreements));
  // Direct check on the λ_k = k family as well.
  const SpectrumSpec spec = SpectrumSpec::generator(RealPower{1, 1}, 4096);
  const RegionVerdict v = complement_bounded(spec, Region(1.0, 1.0, 1.0), 4096);
  t.expect(v.complement_bounded && v.radius && *v.radius == 0.0, "complement of the real axis not empty");
  const SpectralModel model(spec);
  const StateVector g = StateVector::law(CoefficientLaw::exp_quadratic, 1.0);
  t.expect(class_membership(model, g, {1.0, Flavor::beurling, {0.5, 1, 2}}).member == Membership::yes,
           "Gaussian state not entire");
  return report("AC2", t, "self_adjoint 20 trials: " + std::to_string(r.agreements) + " agree");
}

bool ac3() {
  Tally t;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    for (double beta : {1.0, 2.0}) {
      const Index n = 4096;
      for (const auto& c : {detail::imaginary_case(rng, n), detail::parabola_violating_case(rng, beta, n)}) {
        const std::string where = "seed " + std::to_string(seed) + " beta " + format_double(beta) + " " +
                                  canonical_dump(spectrum_to_json(c.spec));
        try {
          const SpectralModel model(c.spec, n);
          const EscapeSelection sel = select_escaping(c.spec, beta, 4, n);
          const Synthesis s = synthesize(model, sel, {0.1, 0.5, 1.0, 2.0});
          t.expect(s.admissibility.verdict == Membership::yes, "not admissible: " + where);
          t.expect(s.certificate.valid, "certificate invalid: " + where);
          t.expect(replay_certificate(model, s.f, s.certificate, &s.selection), "replay differs: " + where);
        } catch (const std::exception& e) {
          t.expect(false, std::string(e.what()) + ": " + where);
        }
        ++runs;
      }
    }
  }
  return report("AC3", t, std::to_string(runs) + " syntheses over 10 seeds, beta in {1, 2}, s in {0.1, 0.5, 1, 2}");
}

bool ac4() {
  Tally t;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int diverging = 0;
  for (int trial = 0; trial < 500; ++trial) {
    SpectralModel model(SpectrumSpec::finite_list({}));
    StateVector f = StateVector::finite({}), g = StateVector::finite({});
    BorelFunction fn = BorelFunction::one();
    if (trial % 2 == 0) {
      const FiniteCase c = random_finite(rng, 10.0, 64);
      model = c.model;
      f = c.f;
      StateVector::Entries ge;
      for (std::size_t k = 1; k <= c.lambdas.size(); ++k) ge.emplace_back(static_cast<Index>(k), C{u(rng), u(rng)});
      g = StateVector::finite(ge);
      fn = trial % 4 == 0 ? BorelFunction::exp(u(rng)) : BorelFunction::exp_modulus(std::abs(u(rng)), 1.0 + std::abs(u(rng)));
    } else {
      // Truncated generator spectra with law states: verdicts of both signs.
      const Index n = 8 + static_cast<Index>(rng() % 57);
      model = SpectralModel(SpectrumSpec::generator(RealPower{1.0, 0.5 + std::abs(u(rng)) / 2.0}, n), n);
      const CoefficientLaw laws[] = {CoefficientLaw::inverse_square, CoefficientLaw::exp_linear,
                                     CoefficientLaw::exp_quadratic};
      f = StateVector::law(laws[rng() % 3], 0.5 + std::abs(u(rng)) / 2.0);
      g = StateVector::law(CoefficientLaw::exp_linear, 1.0);
      fn = BorelFunction::exp(u(rng));
    }
    const Verdict direct = domain_test_direct(model, fn, f).verdict;
    const Verdict dual = domain_test_dual(model, fn, f, {g}).verdict;
    if (direct == Verdict::diverges) ++diverging;
    t.expect(direct == dual, "trial " + std::to_string(trial) + ": direct " + verdict_name(direct) + ", dual " +
                                 verdict_name(dual));
  }
  return report("AC4", t, "500 instances, direct and dual verdicts agree (" + std::to_string(diverging) + " diverging)");
}

bool ac5() {
  Tally t;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(-2.0, 2.0);
  double worst_group = 0.0, worst_chain = 0.0, worst_norm = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [model, f, lambdas] = random_finite(rng, 4.0, 16);
    const double s = ut(rng), u = ut(rng);
    const double e = rel_error(coeffs(model, evolve(model, evolve(model, f, s), u)), coeffs(model, evolve(model, f, s + u)));
    worst_group = std::max(worst_group, e);
    t.expect(coeffs(model, evolve(model, f, 0.0)) == coeffs(model, f), "evolve at 0 is not the identity");
    const auto chain = derivative_chain(model, f, s, 3);
    const auto raw = materialize_state(model, f);
    for (int n = 1; n <= 3; ++n) {
      worst_chain = std::max(worst_chain, rel_error(coeffs(model, chain[n]),
                                                    coeffs(model, apply_borel(model, BorelFunction::power(n),
                                                                              evolve(model, f, s)))));
      // Independent oracle: lambda^n e^{s lambda} f_k formed directly.
      std::vector<C> direct;
      for (const auto& m : raw) {
        const C l = model.point(m.k).value();
        direct.push_back(std::pow(l, n) * std::exp(s * l) * m.c.value);
      }
      worst_chain = std::max(worst_chain, rel_error(coeffs(model, chain[n]), direct));
    }
  }
  const StateVector law = StateVector::law(CoefficientLaw::inverse_square);
  const SpectralModel big(SpectrumSpec::generator(RealPower{1, 1}, 1024));
  const StateVector gauss = StateVector::law(CoefficientLaw::exp_quadratic, 1.0);
  t.expect(coeffs(big, evolve(big, gauss, 0.0)) == coeffs(big, gauss), "evolve at 0 on a law state");
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 r2(100 + i);
    const auto c = detail::imaginary_case(r2, 512);
    const SpectralModel model(c.spec, 512);
    const double n0 = norm(model, law);
    for (double time : {-5.0, -0.3, 1.0, 7.25}) {
      worst_norm = std::max(worst_norm, std::abs(norm(model, evolve(model, law, time)) - n0) / n0);
    }
  }
  t.expect(worst_group <= 1e-12, "group law error " + format_double(worst_group));
  t.expect(worst_chain <= 1e-12, "derivative chain error " + format_double(worst_chain));
  t.expect(worst_norm <= 1e-13, "unitary norm error " + format_double(worst_norm));
  std::ostringstream s;
  s << "group law " << worst_group << ", chain " << worst_chain << ", unitary norm " << worst_norm;
  return report("AC5", t, s.str());
}

bool ac6() {
  Tally t;
  std::mt19937_64 rng(6);
  double worst = 0.0, lowest_order = kPosInf;
  for (int i = 0; i < 100; ++i) {
    const auto [model, f, lambdas] = random_finite(rng, 4.0, 16);
    const double r = mild_solution_check(model, f, 0.0, 0.5, 129);
    worst = std::max(worst, r);
    const MildConvergence c = mild_convergence(model, f, 0.0, 0.5);
    lowest_order = std::min(lowest_order, c.observed_order);
  }
  t.expect(worst <= 1e-8, "residual " + format_double(worst));
  t.expect(lowest_order >= 3.5, "observed order " + format_double(lowest_order));
  std::ostringstream s;
  s << "100 finite lists, |lambda| <= 4: max residual " << worst << " at 129 nodes, min order " << lowest_order;
  return report("AC6", t, s.str());
}

bool ac7() {
  Tally t;
  const SpectralModel big(SpectrumSpec::generator(RealPower{1, 1}, 10000), 10000);
  std::ostringstream s;
  auto timed = [&](const char* name, const SpectralModel& m, const StateVector& f, double target, double tol) {
    const auto t0 = std::chrono::steady_clock::now();
    const OrderEstimate e = estimate_order(m, f, 40);
    const double secs = seconds_since(t0);
    t.expect(std::abs(e.beta_hat - target) <= tol, std::string(name) + " beta_hat " + format_double(e.beta_hat));
    t.expect(secs <= 5.0, std::string(name) + " took " + format_double(secs) + " s");
    s << name << ' ' << e.beta_hat << " (" << secs << " s) ";
  };
  timed("e^{-k}:", big, StateVector::law(CoefficientLaw::exp_linear, 1.0), 1.0, 0.1);
  timed("e^{-k^2}:", big, StateVector::law(CoefficientLaw::exp_quadratic, 1.0), 0.5, 0.1);
  for (C l : {C{2, 0}, C{0, 3}, C{-1.5, 0.5}}) {
    const SpectralModel one(SpectrumSpec::finite_list({{1, l}}), 10000);
    timed("atom:", one, StateVector::finite({{1, {1, 0}}}), 0.0, 0.05);
  }
  return report("AC7", t, s.str());
}

bool ac8() {
  Tally t;
  const SpectralModel naturals(SpectrumSpec::generator(RealPower{1, 1}, 4096));
  const StateVector f = StateVector::law(CoefficientLaw::exp_linear, 1.0);
  for (double beta : {0.25, 0.5, 0.75}) {
    t.expect(class_membership(naturals, f, {beta, Flavor::roumieu, {0.5, 1, 2}}).member == Membership::no,
             "e^{-k} in the class of order " + format_double(beta));
  }
  std::mt19937_64 rng(8);
  int lists = 0;
  for (int i = 0; i < 100; ++i, ++lists) {
    const auto [model, g, lambdas] = random_finite(rng, 4.0, 16);
    double gamma = 0.0;
    for (C l : lambdas) gamma = std::max(gamma, std::abs(l));
    const double m = norm(model, g) * (1.0 + 1e-9);
    const GrowthCheck gc = growth_type_check(orbit_samples(model, g, 2.0, 16, 16), 0.0, {gamma}, m);
    t.expect(gc.status == Membership::yes, "growth check failed on list " + std::to_string(i));
  }
  VerifyOptions opt;
  opt.trials = 40;
  opt.seed = 8;
  opt.betas = {0.0, 0.25, 0.5, 0.75};
  const VerifyReport r = run_verify(Suite::ol1, opt);
  t.expect(r.disagreements.empty() && r.agreements == r.trials, "ol1 suite: " + std::to_string(r.agreements) + " agree");
  return report("AC8", t, "no at beta in {0.25, 0.5, 0.75}; growth bound on " + std::to_string(lists) +
                              " finite lists; ol1 suite " + std::to_string(r.agreements) + "/40");
}

struct Golden {
  std::string name;
  std::string args;
};

std::string sample(const std::string& name) { return std::string(GEVREY_SOURCE_DIR) + "/samples/" + name; }

std::vector<Golden> golden_runs() {
  const std::string rp = sample("real_power.json"), ie = sample("imaginary_exponential.json"),
                    fl = sample("finite_list.json"), el = sample("exp_linear.json"), fs = sample("finite_state.json");
  return {
      {"classify_real_power.json", "classify --spectrum " + rp + " --beta 1"},
      {"classify_imaginary.json", "classify --spectrum " + ie + " --beta 2"},
      {"classify_imaginary.csv", "classify --spectrum " + ie + " --beta 2 --format csv"},
      {"gevrey_roumieu.json", "gevrey --spectrum " + rp + " --state " + el + " --beta 1"},
      {"gevrey_beurling.json", "gevrey --spectrum " + rp + " --state " + el + " --beta 1 --flavor beurling"},
      {"gevrey_class0.json", "gevrey --spectrum " + fl + " --state " + fs + " --beta 0"},
      {"estimate.json", "estimate --spectrum " + rp + " --state " + el},
      {"estimate.csv", "estimate --spectrum " + rp + " --state " + el + " --format csv"},
      {"evolve.json", "evolve --spectrum " + fl + " --state " + fs + " --t-grid -0.5:0.5:0.25 --derivatives 2 --check-mild"},
      {"evolve.csv", "evolve --spectrum " + fl + " --state " + fs + " --t-grid -0.5:0.5:0.25 --derivatives 2 --format csv"},
      {"apply.json", "apply --spectrum " + fl + " --state " + fs + " --fn 'exp(t*lambda)' --t 0.5"},
      {"counterexample.json", "counterexample --spectrum " + ie + " --beta 1"},
      {"verify_theorem_real.json", "verify --suite theorem_real --trials 20 --seed 7"},
      {"verify_theorem_real.csv", "verify --suite theorem_real --trials 20 --seed 7 --format csv"},
      {"verify_ol1.json", "verify --suite ol1 --trials 10 --seed 7 --beta 0,0.5"},
      {"verify_smoothness.csv", "verify --suite smoothness_improvement --trials 10 --seed 7 --format csv"},
  };
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(GEVREY_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path golden_dir() { return fs::path(GEVREY_SOURCE_DIR) / "tests" / "golden"; }

bool ac9() {
  Tally t;
  const auto runs = golden_runs();
  for (const auto& g : runs) {
    const std::string a = run_cli(g.args), b = run_cli(g.args);
    t.expect(!a.empty(), g.name + ": no output");
    t.expect(a == b, g.name + ": two runs differ");
    t.expect(a == slurp(golden_dir() / g.name), g.name + ": differs from golden file");
  }
  return report("AC9", t, std::to_string(runs.size()) + " JSON/CSV outputs byte-equal to tests/golden across two runs");
}

int write_golden() {
  fs::create_directories(golden_dir());
  for (const auto& g : golden_runs()) {
    std::ofstream(golden_dir() / g.name, std::ios::binary) << run_cli(g.args);
    std::cout << "wrote " << (golden_dir() / g.name).string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--write-golden") return write_golden();
  const std::vector<std::function<bool()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  int failed = 0;
  for (const auto& c : criteria) {
    try {
      failed += c() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cout << "criterion aborted: " << e.what() << std::endl;
      ++failed;
    }
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
