#include <catch_amalgamated.hpp>

#include <gevrey/json_io.hpp>
#include <gevrey/region.hpp>

#include <cmath>
#include <random>

using namespace gevrey;
using Catch::Matchers::WithinRel;

namespace {

// Independent membership oracle written straight from the defining inequalities.
bool inside(std::complex<double> z, double beta, double bm, double bp) {
  const double edge = std::pow(std::abs(z.imag()), 1.0 / beta);
  return z.real() <= -bm * edge || z.real() >= bp * edge;
}

}  // namespace

TEST_CASE("single points against the region") {
  for (double beta : {1.0, 2.0, 7.5}) CHECK(in_region(std::complex<double>{-5, 0}, Region(beta, 0.3, 4.0)));
  CHECK_FALSE(in_region(std::complex<double>{3, 8}, Region(1, 1, 1)));
  CHECK(in_region(std::complex<double>{9, 4}, Region(1, 1, 1)));
  CHECK(in_region(std::complex<double>{0, 0}, Region(1, 1, 1)));
}

TEST_CASE("region membership matches the inequalities on random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20, 20), b(0.05, 3), be(1, 4);
  for (int i = 0; i < 2000; ++i) {
    const std::complex<double> z{u(rng), u(rng)};
    const double beta = be(rng), bm = b(rng), bp = b(rng);
    CHECK(in_region(z, Region(beta, bm, bp)) == inside(z, beta, bm, bp));
  }
}

TEST_CASE("region parameters are validated") {
  CHECK_THROWS_AS(Region(0.5, 1, 1), ValidationError);
  CHECK_THROWS_AS(Region(1, 0, 1), ValidationError);
  CHECK_THROWS_AS(Region(1, 1, -1), ValidationError);
}

TEST_CASE("real spectrum has an empty complement") {
  const RegionVerdict v = complement_bounded(SpectrumSpec::generator(RealPower{1, 1}), Region(2, 1, 1), 1000);
  CHECK(v.complement_bounded);
  REQUIRE(v.radius);
  CHECK(*v.radius == 0.0);
  CHECK(v.method == RegionMethod::exact_asymptotic);
}

TEST_CASE("imaginary exponential escapes every cone") {
  const RegionVerdict v =
      complement_bounded(SpectrumSpec::generator(ImaginaryExponential{1, 2}), Region(1, 1, 1), 64);
  CHECK_FALSE(v.complement_bounded);
  CHECK_FALSE(v.radius);
  REQUIRE(v.witnesses.size() == 10);
  CHECK(v.witnesses.front().lambda == std::complex<double>{0, std::ldexp(1.0, 64)});
  for (const auto& w : v.witnesses) CHECK_FALSE(inside(w.lambda, 1, 1, 1));
}

TEST_CASE("finite list radius is the largest escaping modulus") {
  const SpectrumSpec spec = SpectrumSpec::finite_list({{1, {3, 8}}, {2, {9, 4}}});
  const RegionVerdict v = complement_bounded(spec, Region(1, 1, 1), 64);
  CHECK(v.complement_bounded);
  CHECK(v.method == RegionMethod::finite_spectrum);
  REQUIRE(v.radius);
  CHECK_THAT(*v.radius, WithinRel(std::sqrt(73.0), 1e-15));
}

TEST_CASE("b search") {
  const auto real = search_b(SpectrumSpec::generator(RealPower{-1, 2}), 1, 100, {0.7, 0.1});
  REQUIRE(real.b_found);
  CHECK(real.b_found->first == 0.7);

  CHECK_FALSE(search_b(SpectrumSpec::generator(ImaginaryExponential{1, 2}), 1, 64, {0.1, 1, 10}).b_found);

  const auto one = search_b(SpectrumSpec::finite_list({{1, {1, 1}}}), 1, 8, {0.5});
  REQUIRE(one.b_found);
  CHECK(*one.b_found == std::make_pair(0.5, 0.5));
  CHECK(*one.radius == 0.0);
}

TEST_CASE("minimal beta of a parabola is its own exponent") {
  const std::vector<double> betas{1.0, 1.5, 2.0, 3.0};
  const std::vector<double> b_grid{4.0, 1.0, 0.5};
  CHECK(minimal_beta(SpectrumSpec::generator(ParabolaEdge{1.0, 2.0, 1.0}), betas, 512, b_grid) == 2.0);
  CHECK(minimal_beta(SpectrumSpec::generator(RealPower{1, 1}), betas, 64, b_grid) == 1.0);
  CHECK_FALSE(minimal_beta(SpectrumSpec::generator(ImaginaryExponential{1, 2}), betas, 64, b_grid));
}

TEST_CASE("closed-form escape rules agree with a direct scan") {
  // Every catalog generator; the scan covers far more indices than the
  // predicted settling point.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.2, 2), be(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    GeneratorLaw law;
    if (trial % 2 == 0) {
      law = ParabolaEdge{u(rng), be(rng), pos(rng)};
    } else {
      const std::complex<double> b{u(rng), u(rng)};
      const std::complex<double> a = 0.4 * std::abs(b) * std::polar(1.0, 3 * u(rng));
      const AffineShape shapes[] = {AffineShape::linear, AffineShape::square, AffineShape::sqrt};
      law = AffineCustom{a, b, shapes[trial % 3]};
    }
    const SpectrumSpec spec = SpectrumSpec::generator(law, 64, trial % 4 == 1);
    const Region region(be(rng), pos(rng), pos(rng));
    const EscapeProfile prof = exact_escape_profile(spec, region);
    if (prof.settled_after > 20000) continue;
    const Index last = std::max<Index>(prof.settled_after, 1) * 4 + 200;
    bool tail_inside = true, tail_outside = true;
    for (Index k = prof.settled_after + 1; k <= last; ++k) {
      const SpectralPoint p = spec.point(k);
      const bool in = inside(p.value(), region.beta, region.b_minus, region.b_plus);
      tail_inside = tail_inside && in;
      tail_outside = tail_outside && !in;
    }
    INFO(serialize_spectrum(spec) << " beta=" << region.beta << " b-=" << region.b_minus << " b+=" << region.b_plus);
    if (prof.eventually_inside) {
      CHECK(tail_inside);
    } else {
      CHECK(tail_outside);
    }
  }
}

TEST_CASE("negating the spectrum swaps b- and b+") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const SpectrumSpec spec = SpectrumSpec::generator(ParabolaEdge{u(rng), 1.5, 1.0}, 256);
    const double bm = pos(rng), bp = pos(rng);
    const RegionVerdict a = complement_bounded(spec, Region(1.5, bm, bp), 256);
    const RegionVerdict b = complement_bounded(negate(spec), Region(1.5, bp, bm), 256);
    CHECK(a.complement_bounded == b.complement_bounded);
    CHECK(a.radius == b.radius);
  }
}

TEST_CASE("stall heuristic agrees with the exact rule on clear cases") {
  CHECK(complement_bounded(SpectrumSpec::generator(RealPower{1, 1}), Region(1, 1, 1), 512).heuristic_bounded);
  CHECK_FALSE(complement_bounded(SpectrumSpec::generator(ImaginaryExponential{1, 2}), Region(1, 1, 1), 512)
                  .heuristic_bounded);
}

TEST_CASE("boundary CSV") {
  const std::string csv = boundary_csv(Region(2, 1, 0.5), 4, 3);
  CHECK(csv == "im,re_minus,re_plus\n-4.0,-2.0,1.0\n0.0,-0.0,0.0\n4.0,-2.0,1.0\n");
}
