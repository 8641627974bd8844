#include "crtlab/hausdorff.hpp"

#include <doctest.h>

#include <cmath>

using namespace crtlab;

namespace {

TreeIndex tent_index(std::size_t k) {
    ExcursionPath p;
    for (std::size_t i = 0; i <= 2 * k; ++i) p.values.push_back(1.0 - std::abs(double(i) - double(k)) / double(k));
    p.dt = 1.0 / double(k);
    return TreeIndex(std::move(p));
}

// Normalized Brownian excursion scaled to height about 1.
TreeIndex brownian_index(std::uint64_t steps, std::uint64_t seed) {
    return TreeIndex(normalized_brownian_excursion(steps, SeedSpec{seed, 77}));
}

}  // namespace

TEST_CASE("crossing times") {
    const TreeIndex t = tent_index(64);
    const auto c0 = crossing_times(t, 0);
    REQUIRE(c0.size() == 3);
    CHECK(c0[0].time == 0.0);
    CHECK(c0[1].level == 1);
    CHECK(c0[2].level == 0);
    CHECK(crossing_resolution_cap(t) == 2);  // 2^-n >= 16 / 64
    const TreeIndex fine = tent_index(1 << 10);
    for (int n = 1; n <= crossing_resolution_cap(fine); ++n) CHECK(crossing_times(fine, n).size() - 1 >= std::size_t(1) << n);
}

TEST_CASE("crossing coverings") {
    const TreeIndex t = tent_index(1 << 10);
    const Covering c1 = crossing_covering(t, 1);
    // every grid time falls in some element
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double s = i * t.dt();
        bool inside = false;
        for (const auto& el : c1.elements) inside = inside || (el.start <= s && s < el.end);
        CHECK(inside);
    }
    const Covering banded = crossing_covering(t, 3, Band{0.5, 1.0});
    REQUIRE_FALSE(banded.elements.empty());
    for (const auto& el : banded.elements) {
        const double base = t.value_at(el.start);
        CHECK(base >= 0.5 - 1e-12);
        CHECK(base <= 1.0 + 1e-12);
    }
    CHECK(banded.elements.size() < crossing_covering(t, 3).elements.size());
}

TEST_CASE("diameters stay below 4 2^-n") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const TreeIndex b = brownian_index(1 << 18, seed);
        const int cap = crossing_resolution_cap(b);
        for (int n = 0; n <= cap; n += 2) {
            for (const auto& el : crossing_covering(b, n).elements) REQUIRE(el.diameter <= 4.0 * std::ldexp(1.0, -n) + 1e-12);
            const double a = 0.5 * b.height();
            if (std::ldexp(1.0, -n) < a)
                for (const auto& el : level_crossing_covering(b, a, n).elements)
                    REQUIRE(el.diameter <= 4.0 * std::ldexp(1.0, -n) + 1e-12);
        }
    }
}

TEST_CASE("interval diameter against grid brute force") {
    const TreeIndex b = brownian_index(2000, 3);
    for (auto [i, j] : {std::pair{10, 400}, std::pair{0, 2000}, std::pair{777, 1500}}) {
        double best = 0.0;
        for (int s = i; s <= j; ++s)
            for (int u = s; u <= j; ++u) best = std::max(best, b.dist(s, u));
        CHECK(interval_diameter(b, i * b.dt(), j * b.dt()) == doctest::Approx(best));
    }
}

TEST_CASE("level-crossing coverings on the tent") {
    const TreeIndex t = tent_index(1 << 10);
    const Covering c = level_crossing_covering(t, 0.5, 2);
    CHECK(c.elements.size() == 2);
    CHECK(c.effective_count() == 1);
    CHECK(level_crossing_covering(t, 1.5, 2).elements.empty());
}

TEST_CASE("tent covering sums reach the segment length") {
    const TreeIndex t = tent_index(1 << 16);
    const GaugeFunction r = GaugeFunction::generic(1, 0, 0);
    for (int n = 0; n <= 12; ++n) {
        const double s = covering_sum(crossing_covering(t, n), r);
        CHECK(s >= 0.98);
        CHECK(s <= 1.02);
    }
    CHECK(covering_sum(Covering{}, r) == 0.0);
}

TEST_CASE("covering sums grow with u below e^-e") {
    // loglog(1/r) > 1 there, so h_u(r) increases with u
    const TreeIndex b = brownian_index(1 << 20, 1);
    const Covering c = crossing_covering(b, 6);
    for (const auto& el : c.elements) REQUIRE(el.diameter < std::exp(-std::exp(1.0)));
    double prev = 0.0;
    for (double u : {-2.0, 0.0, 1.0, 3.0}) {
        const double s = covering_sum(c, GaugeFunction::stable_mass(1.5, u));
        CHECK(std::isfinite(s));
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("density scan normalization") {
    // the grid ball around the apex holds 2r / dt + 1 grid points, so g(r) = r gives (2r + dt) / r
    const TreeIndex t = tent_index(1 << 14);
    DensityRequest req;
    req.points = {std::size_t(1) << 14};
    req.n_values = {2, 4, 6, 8};
    const DensityStats st = density_scan(t, req, GaugeFunction::generic(1, 0, 0));
    for (std::size_t k = 0; k < req.n_values.size(); ++k) {
        const double r = std::ldexp(1.0, -req.n_values[k]);
        CHECK(st.ratios[0][k] == doctest::Approx((2 * r + t.dt()) / r).epsilon(1e-12));
    }
    CHECK(st.median.size() == 4);
    CHECK_THROWS(density_scan(t, DensityRequest{}, GaugeFunction::generic(1, 0, 0)));
}

TEST_CASE("Hausdorff bounds from density statistics") {
    DensityStats ones;
    ones.n_values = {4, 5, 6};
    ones.ratios = {{1, 1, 1}, {1, 1, 1}};
    const HausdorffBounds b = hausdorff_bounds(ones, 1.0, 4.0, 1.0);
    REQUIRE(b.lower);
    REQUIRE(b.upper);
    CHECK(*b.lower == doctest::Approx(1.0 / 8.0));
    CHECK(*b.upper == doctest::Approx(128.0));
    const HausdorffBounds half = hausdorff_bounds(ones, 1.0, 4.0, 2.0);
    REQUIRE(half.lower);
    CHECK(*half.lower == doctest::Approx(*b.lower / 2.0));
    CHECK_FALSE(half.upper);

    DensityStats mixed = ones;
    mixed.ratios = {{0.5, 0.5, 0.5}, {3, 3, 3}};
    const HausdorffBounds m = hausdorff_bounds(mixed, 1.0, 4.0, 1.0);
    CHECK_FALSE(m.lower);
    CHECK_FALSE(m.upper);
}

TEST_CASE("series indicator") {
    CHECK(series_converges(1.5, 2.0 / 0.5 + 0.1));
    CHECK(series_converges(1.5, 2.0 / 0.5));
    CHECK_FALSE(series_converges(1.5, 0.0));
    CHECK_FALSE(series_converges(1.5, 2.0));
}

TEST_CASE("conjecture scans need a stable tree") {
    ConjectureEnsemble ens;
    CHECK_THROWS_AS(conjecture_scan(BranchingMechanism(2.0, 1.0), {1.0}, {4}, ens), std::invalid_argument);
    ens.n_trees = 2;
    ens.n_scale = 1024;
    ens.c_height = 1.0 / 64;
    const auto rows = conjecture_scan(BranchingMechanism(1.5, 1.0), {-2.0, 3.0}, {6}, ens);
    CHECK(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.covering_sum >= 0.0);
        CHECK(r.series_converges == series_converges(1.5, r.u));
    }
}
