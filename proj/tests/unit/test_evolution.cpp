#include <catch_amalgamated.hpp>

#include <gevrey/calculus.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace gevrey;
using Catch::Matchers::WithinAbs;

namespace {

using C = std::complex<double>;

std::vector<C> coeffs(const SpectralModel& model, const StateVector& f) {
  std::vector<C> out;
  for (const auto& m : materialize_state(model, f)) out.push_back(m.c.value);
  return out;
}

SpectralModel list_model(const std::vector<C>& lambdas) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < lambdas.size(); ++i) atoms.push_back({static_cast<Index>(i + 1), lambdas[i]});
  return SpectralModel(SpectrumSpec::finite_list(atoms));
}

StateVector state_of(const std::vector<C>& c) {
  StateVector::Entries e;
  for (std::size_t i = 0; i < c.size(); ++i) e.emplace_back(static_cast<Index>(i + 1), c[i]);
  return StateVector::finite(e);
}

double rel_error(const std::vector<C>& a, const std::vector<C>& b) {
  REQUIRE(a.size() == b.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct Instance {
  SpectralModel model;
  StateVector f;
};

Instance random_instance(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, 8);
  std::vector<C> lambdas, c;
  for (int i = len(rng); i > 0; --i) {
    C l;
    do l = {radius * u(rng), radius * u(rng)};
    while (std::abs(l) > radius);
    lambdas.push_back(l);
    c.emplace_back(u(rng), u(rng));
  }
  return {list_model(lambdas), state_of(c)};
}

const SpectralModel& naturals() {
  static const SpectralModel m(SpectrumSpec::generator(RealPower{1, 1}, 2048));
  return m;
}

}  // namespace

TEST_CASE("two-sided admissibility") {
  const SpectralModel imag(SpectrumSpec::generator(ImaginaryExponential{1, 2}, 512));
  for (auto law : {CoefficientLaw::inverse_square, CoefficientLaw::exp_linear}) {
    CHECK(admissible_two_sided(imag, StateVector::law(law, 1.0), {-3, 0, 3}).verdict == Membership::yes);
  }
  const Admissibility lin = admissible_two_sided(naturals(), StateVector::law(CoefficientLaw::exp_linear, 1.0), {-2, 2});
  CHECK(lin.verdict == Membership::no);
  CHECK(lin.forward.verdict == Verdict::diverges);
  CHECK(lin.backward.verdict == Verdict::converges);
  CHECK(admissible_two_sided(naturals(), StateVector::law(CoefficientLaw::exp_quadratic, 1.0), {-5, 5}).verdict ==
        Membership::yes);
  // Inside (-1, 1) the exponential law still passes both extremes but fails for large |t|.
  CHECK(admissible_two_sided(naturals(), StateVector::law(CoefficientLaw::exp_linear, 1.0), {-0.5, 0.5}).verdict ==
        Membership::no);
  CHECK_THROWS_AS(admissible_two_sided(naturals(), StateVector::finite({}), {0, 1}), ValidationError);
}

TEST_CASE("evolve") {
  const SpectralModel m = list_model({{0, 1}, {0, 2}});
  const StateVector f = state_of({1, 1});
  CHECK(coeffs(m, evolve(m, f, 0.0)) == coeffs(m, f));
  const auto y = coeffs(m, evolve(m, f, std::numbers::pi));
  CHECK_THAT(y[0].real(), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(y[1].real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(y[0].imag(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(y[1].imag(), WithinAbs(0.0, 1e-15));

  const StateVector g = StateVector::law(CoefficientLaw::exp_linear, 1.0);
  CHECK(coeffs(naturals(), evolve(naturals(), g, 0.0)) == coeffs(naturals(), g));
  CHECK_THROWS_AS(evolve(naturals(), g, 2.0), DomainError);
}

TEST_CASE("group law on random finite spectra") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ut(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const auto [model, f] = random_instance(rng, 4.0);
    const double s = ut(rng), t = ut(rng);
    const auto both = coeffs(model, evolve(model, evolve(model, f, s), t));
    // Independent oracle: e^{(s+t) lambda} f_k formed directly.
    std::vector<C> direct;
    for (const auto& m : materialize_state(model, f)) direct.push_back(std::exp((s + t) * model.point(m.k).value()) * m.c.value);
    CHECK(rel_error(both, direct) <= 1e-12);
    CHECK(rel_error(coeffs(model, evolve(model, f, s + t)), direct) <= 1e-12);
  }
}

TEST_CASE("unitary evolution keeps the norm") {
  const SpectralModel imag(SpectrumSpec::generator(ImaginaryExponential{0.7, 1.5}, 256));
  const StateVector f = StateVector::law(CoefficientLaw::inverse_square);
  const double n0 = norm(imag, f);
  for (double t : {-3.0, -0.4, 1.0, 17.5}) CHECK_THAT(norm(imag, evolve(imag, f, t)), WithinAbs(n0, 1e-13 * n0));
}

TEST_CASE("derivative chains") {
  const SpectralModel one = list_model({3});
  const auto chain = derivative_chain(one, state_of({1}), 0.0, 1);
  REQUIRE(chain.size() == 2);
  CHECK(coeffs(one, chain[1]) == std::vector<C>{3});

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto [model, f] = random_instance(rng, 4.0);
    const double t = 0.3;
    const auto ch = derivative_chain(model, f, t, 4);
    for (int n = 1; n <= 4; ++n) {
      const auto other = coeffs(model, apply_borel(model, BorelFunction::power(n), evolve(model, f, t)));
      CHECK(rel_error(coeffs(model, ch[n]), other) <= 1e-12);
    }
    // Central difference against A y(t).
    const double h = 1e-4;
    const auto yp = coeffs(model, evolve(model, f, t + h));
    const auto ym = coeffs(model, evolve(model, f, t - h));
    const auto ay = coeffs(model, ch[1]);
    std::vector<C> fd;
    for (std::size_t k = 0; k < yp.size(); ++k) fd.push_back((yp[k] - ym[k]) / (2 * h));
    CHECK(rel_error(fd, ay) <= 1e-6);
  }

  const SpectralModel imag(SpectrumSpec::generator(ImaginaryExponential{1, 2}, 512));
  try {
    derivative_chain(imag, StateVector::law(CoefficientLaw::inverse_square), 0.0, 2);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("mild solution identity") {
  const SpectralModel zero = list_model({0});
  CHECK(mild_solution_check(zero, state_of({1}), 0.0, 1.0, 129) == 0.0);

  const SpectralModel one = list_model({1});
  CHECK(mild_solution_check(one, state_of({1}), 0.0, 1.0, 129) <= 1e-10);
  // Independent oracle: Simpson on e^s over [0, 1].
  double q = 0.0;
  const int m = 128;
  for (int i = 0; i <= m; ++i) q += (i == 0 || i == m ? 1 : i % 2 ? 4 : 2) * std::exp(static_cast<double>(i) / m);
  q /= 3.0 * m;
  CHECK_THAT(mild_solution_check(one, state_of({1}), 0.0, 1.0, 129), WithinAbs(std::abs(q - (std::exp(1.0) - 1.0)) / std::exp(1.0), 1e-15));

  CHECK(mild_solution_check(list_model({{0, 1}, {0, 2}}), state_of({1, 1}), 0.0, 0.5, 129) <= 1e-10);
  CHECK_THROWS_AS(mild_solution_check(one, state_of({1}), 0.0, 1.0, 4), ValidationError);

  const MildConvergence c = mild_convergence(list_model({{3, 1}, {-2, 2}}), state_of({1, {0, 1}}), 0.0, 0.5);
  CHECK(c.observed_order >= 3.5);
}

TEST_CASE("reflection") {
  const SpectralModel one = list_model({1});
  const auto [r, g] = reflect(one, state_of({1}));
  const auto y = coeffs(r, evolve(r, g, 1.0));
  CHECK(y == coeffs(one, evolve(one, state_of({1}), -1.0)));
  CHECK_THAT(y[0].real(), WithinAbs(std::exp(-1.0), 1e-15));

  CHECK(canonical_dump(spectrum_to_json(negate(negate(naturals().spectrum())))) ==
        canonical_dump(spectrum_to_json(naturals().spectrum())));

  const StateVector f = StateVector::law(CoefficientLaw::exp_quadratic, 1.0);
  const auto [rn, rf] = reflect(naturals(), f);
  for (double t : {-1.5, 0.25, 2.0}) CHECK(coeffs(rn, evolve(rn, rf, t)) == coeffs(naturals(), evolve(naturals(), f, -t)));
}

TEST_CASE("translated solutions") {
  const StateVector f = StateVector::law(CoefficientLaw::exp_quadratic, 1.0);
  CHECK(coeffs(naturals(), translate_solution(naturals(), f, 0.0)) == coeffs(naturals(), f));
  const auto a = coeffs(naturals(), evolve(naturals(), translate_solution(naturals(), f, 0.3), 0.2));
  const auto b = coeffs(naturals(), evolve(naturals(), f, 0.5));
  CHECK(rel_error(a, b) <= 1e-12);

  // Entire on a real spectrum: membership at t0 = 0 propagates to every t0.
  for (double t0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const StateVector y = translate_solution(naturals(), f, t0);
    CHECK(class_membership(naturals(), y, {1.0, Flavor::roumieu, {0.5, 1, 2}}).member == Membership::yes);
  }
}

TEST_CASE("evolution trace") {
  const SpectralModel m = list_model({{0, 1}, {0, 2}});
  const EvolutionTrace tr = evolution_trace(m, state_of({1, 1}), {-1, 0, 0.5}, 2, true);
  REQUIRE(tr.samples.size() == 3);
  CHECK(tr.certified());
  for (const auto& s : tr.samples) {
    CHECK_THAT(s.log_norm, WithinAbs(0.5 * std::log(2.0), 1e-14));
    REQUIRE(s.derivative_log_norms.size() == 2);
    CHECK_THAT(s.derivative_log_norms[0], WithinAbs(0.5 * std::log(5.0), 1e-14));
    CHECK_THAT(s.derivative_log_norms[1], WithinAbs(0.5 * std::log(17.0), 1e-14));
    REQUIRE(s.mild_residual);
    CHECK(*s.mild_residual <= (std::abs(s.t) <= 0.5 ? 1e-10 : 1e-8));
  }

  const StateVector g = StateVector::law(CoefficientLaw::exp_quadratic, 1.0);
  const EvolutionTrace inf = evolution_trace(naturals(), g, {0, 1});
  CHECK(inf.certified());
  for (const auto& s : inf.samples) CHECK(s.tail_bound <= 1e-100);
}
