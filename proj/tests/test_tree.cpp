#include "crtlab/tree.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>

using namespace crtlab;

namespace {

// Tent of the given height with k steps up and k down.
ExcursionPath tent(double height, std::size_t k, double duration) {
    ExcursionPath p;
    for (std::size_t i = 0; i <= 2 * k; ++i) p.values.push_back(height * (1.0 - std::abs(double(i) - double(k)) / double(k)));
    p.dt = duration / double(2 * k);
    return p;
}

ExcursionPath random_excursion(std::size_t n, Rng& rng) {
    ExcursionPath p;
    double x = 0.0;
    p.values.push_back(0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        x = std::abs(x + rng.normal());
        p.values.push_back(x);
    }
    p.values.push_back(0.0);
    p.dt = 1.0 / double(n - 1);
    return p;
}

}  // namespace

TEST_CASE("range minima") {
    const TreeIndex t(tent(1.0, 1, 2.0));
    CHECK(t.range_min(0, 2) == 0.0);
    CHECK(t.range_min(1, 1) == 1.0);
    CHECK(t.height() == 1.0);

    Rng rng(SeedSpec{1, 1});
    for (std::size_t n : {5u, 64u, 1000u, 5000u}) {
        const TreeIndex idx(random_excursion(n, rng));
        for (int q = 0; q < 1000; ++q) {
            const std::size_t i = rng.below(n), j = rng.below(n);
            const auto [lo, hi] = std::minmax(i, j);
            const double brute = *std::min_element(idx.path().values.begin() + lo, idx.path().values.begin() + hi + 1);
            CHECK(idx.range_min(i, j) == brute);
        }
    }
}

TEST_CASE("tree distance on the tent") {
    const TreeIndex t(tent(1.0, 1000, 2.0));
    CHECK(t.dist(37, 37) == 0.0);
    CHECK(t.dist_at(0.5, 1.5) == doctest::Approx(0.0).scale(1.0));
    CHECK(t.dist_at(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(t.value_at(0.25) == doctest::Approx(0.25));
}

TEST_CASE("contour distance equals graph distance") {
    const OffspringLaw law(1.5);
    Rng rng(SeedSpec{2, 2});
    int checked = 0;
    for (int attempt = 0; checked < 10; ++attempt) {
        DiscreteTree tree;
        GwOptions opt;
        opt.max_vertices = 200;
        if (!gw_tree(law, opt, rng, tree) || tree.vertices() < 20) continue;
        ++checked;
        const std::size_t V = tree.vertices();
        // vertex visited at each contour step
        std::vector<std::uint32_t> at{0};
        std::vector<std::uint32_t> stack{0};
        for (std::uint32_t v = 1; v < V; ++v) {
            while (stack.back() != tree.parent[v]) {
                stack.pop_back();
                at.push_back(stack.back());
            }
            stack.push_back(v);
            at.push_back(v);
        }
        while (stack.size() > 1) {
            stack.pop_back();
            at.push_back(stack.back());
        }
        std::vector<std::vector<std::uint32_t>> adj(V);
        for (std::uint32_t v = 1; v < V; ++v) {
            adj[v].push_back(tree.parent[v]);
            adj[tree.parent[v]].push_back(v);
        }
        std::vector<std::vector<int>> bfs(V, std::vector<int>(V, -1));
        for (std::uint32_t s = 0; s < V; ++s) {
            std::queue<std::uint32_t> q;
            q.push(s);
            bfs[s][s] = 0;
            while (!q.empty()) {
                const auto u = q.front();
                q.pop();
                for (auto w : adj[u])
                    if (bfs[s][w] < 0) {
                        bfs[s][w] = bfs[s][u] + 1;
                        q.push(w);
                    }
            }
        }
        const double edge = 0.125;
        const TreeIndex idx(contour_path(tree, edge, 1.0));
        REQUIRE(idx.size() == at.size());
        for (std::size_t i = 0; i < at.size(); ++i)
            for (std::size_t j = 0; j < at.size(); ++j) REQUIRE(idx.dist(i, j) == doctest::Approx(edge * bfs[at[i]][at[j]]));
    }
}

TEST_CASE("mass balls") {
    const TreeIndex t(tent(1.0, 1000, 2.0));
    CHECK(mass_ball(t, 1000, 0.25) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(mass_ball(t, 1000, 5.0) == doctest::Approx(t.duration()));
    CHECK(mass_ball(t, 1000, 1e-9) <= 3 * t.dt());
    Rng rng(SeedSpec{3, 3});
    const TreeIndex r(random_excursion(4001, rng));
    // brute force over all grid points with trapezoid weights
    for (std::size_t c : {17u, 1000u, 2500u}) {
        for (double eps : {0.1, 0.5, 2.0}) {
            double w = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j)
                if (r.dist(c, j) <= eps) w += (j == 0 || j + 1 == r.size()) ? 0.5 : 1.0;
            CHECK(mass_ball(r, c, eps) == doctest::Approx(w * r.dt()));
        }
    }
}

TEST_CASE("level sets and level balls") {
    const TreeIndex t(tent(1.0, 1000, 2.0));
    CHECK(level_set(t, 0.5, 0.25).atoms.size() == 1);
    CHECK(level_set(t, 1.5, 0.25).atoms.empty());

    Rng rng(SeedSpec{4, 4});
    const TreeIndex r(random_excursion(20001, rng));
    const double a = 0.3 * r.height();
    const LevelSetAtoms atoms = level_set(r, a, 0.01 * r.height());
    REQUIRE(atoms.atoms.size() > 3);
    const std::size_t mid = atoms.atoms.size() / 2;
    CHECK(local_time_ball(r, atoms, mid, 2 * a + 1e-9) == doctest::Approx(atoms.total_weight()));
    CHECK(local_time_ball(r, atoms, mid, 1e-12) >= atoms.atoms[mid].weight);
    // brute force: pairs at level a are within eps iff their common ancestor is at height >= a - eps/2
    const double eps = 0.2 * a;
    double brute = 0.0;
    for (std::size_t j = 0; j < atoms.atoms.size(); ++j)
        if (r.range_min(atoms.atoms[mid].index + 1, atoms.atoms[j].index + (j == mid)) >= a - eps / 2.0 - 1e-12)
            brute += atoms.atoms[j].weight;
    CHECK(local_time_ball(r, atoms, mid, eps) == doctest::Approx(brute));
}

TEST_CASE("subtrees above a level") {
    const TreeIndex t(tent(1.0, 1000, 2.0));
    const auto subs = subtrees_above(t, 0.5, 0.0);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].height() == doctest::Approx(0.5));
    CHECK(subs[0].values.front() == doctest::Approx(0.0).scale(1.0));
    CHECK(subtrees_above(t, 1.0, 0.0).empty());
}

TEST_CASE("point samplers") {
    Rng rng(SeedSpec{5, 5});
    const TreeIndex r(random_excursion(10001, rng));
    const int n = 100000;
    std::vector<int> deciles(10, 0);
    // depth histogram of sampled points against the occupation histogram of the path
    const int bins = 8;
    std::vector<double> depth(bins, 0.0), occupation(bins, 0.0);
    auto bin = [&](double x) { return std::min(bins - 1, static_cast<int>(x / r.height() * bins)); };
    for (std::size_t j = 0; j < r.size(); ++j) occupation[bin(r.value(j))] += (j == 0 || j + 1 == r.size()) ? 0.5 : 1.0;
    for (int i = 0; i < n; ++i) {
        const std::size_t j = sample_mass_point(r, rng);
        deciles[std::min<std::size_t>(9, j * 10 / r.size())]++;
        depth[bin(r.value(j))] += 1.0;
    }
    double chi2 = 0.0;
    for (int c : deciles) chi2 += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
    CHECK(chi2 < 27.9);  // chi-square(9) at 0.001
    double chi2_depth = 0.0;
    const double total_occ = r.size() - 1.0;
    for (int b = 0; b < bins; ++b) {
        const double expect = n * occupation[b] / total_occ;
        if (expect > 0) chi2_depth += (depth[b] - expect) * (depth[b] - expect) / expect;
    }
    CHECK(chi2_depth < 24.3);  // chi-square(7) at 0.001

    LevelSetAtoms single;
    single.atoms.push_back({3, 2.0});
    for (int i = 0; i < 10; ++i) CHECK(sample_level_point(single, rng) == 0);
}
