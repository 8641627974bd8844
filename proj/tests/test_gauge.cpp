#include "crtlab/gauge.hpp"

#include <doctest.h>

#include <cmath>

using namespace crtlab;

TEST_CASE("gauge values at e^-e and e^-1") {
    const double r = std::exp(-std::exp(1.0));
    CHECK(GaugeFunction::brownian_mass()(r) == doctest::Approx(std::exp(-2 * std::exp(1.0))).epsilon(1e-12));
    CHECK(GaugeFunction::brownian_level()(r) == doctest::Approx(std::exp(-std::exp(1.0))).epsilon(1e-12));
    CHECK(GaugeFunction::generic(3, 2, 0)(std::exp(-1.0)) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    const GaugeFunction s = GaugeFunction::stable_mass(1.5, 0.0);
    CHECK(s.a() == doctest::Approx(3.0));
    CHECK(s.b() == doctest::Approx(2.0));
    CHECK(s.d() == 0.0);
}

TEST_CASE("gauge domains") {
    const GaugeFunction bm = GaugeFunction::brownian_mass();
    CHECK(bm.r_max() < 0.5);
    CHECK(bm.in_domain(std::exp(-std::exp(1.0))));
    CHECK_FALSE(bm.in_domain(0.0));
    // positive and increasing across the domain
    double prev = 0.0;
    for (double r = 1e-30; r < bm.r_max(); r *= 1.5) {
        const double g = bm(r);
        CHECK(g > prev);
        prev = g;
    }
    CHECK(std::isinf(GaugeFunction::generic(2, 0, 0).r_max()));
    const GaugeFunction h = GaugeFunction::stable_mass(1.5, -2.0);
    CHECK(h.r_max() <= std::exp(-std::exp(1.0)));
}

TEST_CASE("doubling constants") {
    CHECK(doubling_constant(GaugeFunction::generic(1, 0, 0), 1e-6) == doctest::Approx(2 * kDoublingPad));
    CHECK(doubling_constant(GaugeFunction::generic(2, 0, 0), 1e-6) == doctest::Approx(4 * kDoublingPad));
    const double c = doubling_constant(GaugeFunction::brownian_mass(), std::ldexp(1.0, -40));
    CHECK(c > 4.0);
    CHECK(c < 4.5);
}

TEST_CASE("gauge parsing") {
    const GaugeFunction g = GaugeFunction::parse("stable_mass:1.5:-2");
    CHECK(g.kind() == GaugeKind::StableMass);
    CHECK(g.d() == -2.0);
    CHECK(GaugeFunction::parse("generic:2:0:1").kind() == GaugeKind::Generic);
    CHECK(GaugeFunction::parse("brownian_level").kind() == GaugeKind::BrownianLevel);
    CHECK_THROWS(GaugeFunction::parse("cubic"));
    CHECK_THROWS(GaugeFunction::parse("stable_mass:x:1"));
}
