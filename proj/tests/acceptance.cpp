// One PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.
#include "crtlab/analytic.hpp"
#include "crtlab/gauge.hpp"
#include "crtlab/hausdorff.hpp"
#include "crtlab/verify.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

using namespace crtlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b, 1e-14);
}

// t - int_{v_inf_t}^inf du / (c u^alpha - gamma), in s = log(u/y* - 1).
double v_inf_residual(const BranchingMechanism& m, double gamma, double t) {
    const double alpha = m.alpha();
    const double y = m.fixed_point(gamma);
    const double s0 = v_inf_log_gap(m, gamma, t);
    auto f = [&](double s) {
        if (s > 200.0) return y / gamma * std::exp((1.0 - alpha) * s);
        const double w = std::exp(s);
        return y * w / (gamma * std::expm1(alpha * std::log1p(w)));
    };
    boost::math::quadrature::exp_sinh<double> q;
    return t - q.integrate([&](double x) { return f(s0 + x); }, 0.0, kInfinity, 1e-14);
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string describe(const ExperimentReport& r) {
    std::string s = r.name + "[";
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        const Check& c = r.checks[i];
        s += fmt("%s%s=%.4g target %.4g tol %.3g %s", i ? "; " : "", c.name.c_str(), c.statistic, c.target,
                 c.tolerance, c.pass() ? "ok" : "miss");
    }
    return s + fmt("] %.1fs", r.runtime_seconds);
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

void criterion_1() {
    const double alphas[] = {1.2, 1.5, 2.0}, ts[] = {0.1, 0.5, 1.0, 2.0, 5.0}, rs[] = {0.1, 0.5, 1.0, 2.0, 10.0};
    const auto t0 = Clock::now();
    double sink = 0.0;
    for (double alpha : alphas) {
        const BranchingMechanism m(alpha, 1.0);
        for (double t : ts)
            for (double r : rs) sink += csbp_laplace(m, t, r) + v0(m, r, t) + v_inf(m, r, t);
    }
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (double alpha : alphas) {
        const BranchingMechanism m(alpha, 1.0);
        for (double t : ts)
            for (double r : rs) {
                auto power_of = [&](auto f) { return [=, &m](double s) { return m.c() * std::pow(f(s), alpha); }; };
                const double u =
                    csbp_laplace(m, t, r) + integrate(power_of([&](double s) { return csbp_laplace(m, s, r); }), 0, t);
                const double v = v0(m, r, t) + integrate(power_of([&](double s) { return v0(m, r, s); }), 0, t);
                worst = std::max({worst, std::abs(u - r), std::abs(v - r * t), std::abs(v_inf_residual(m, r, t))});
            }
    }
    report(1, std::isfinite(sink) && worst < 1e-10 && elapsed < 5.0,
           fmt("max residual %.3g (< 1e-10), 225 evaluations in %.3fs (< 5s)", worst, elapsed));
}

void criterion_2() {
    const BranchingMechanism m(2.0, 1.0);
    double worst = 0.0, worst_u = 0.0;
    for (double gamma : {0.25, 1.0, 4.0})
        for (double t : {0.2, 1.0, 3.0}) {
            const double s = std::sqrt(gamma);
            worst = std::max(worst, std::abs(v0(m, gamma, t) - s * std::tanh(s * t)));
            worst = std::max(worst, std::abs(v_inf(m, gamma, t) - s / std::tanh(s * t)));
        }
    for (double lambda : {0.1, 1.0, 10.0})
        for (double t : {0.2, 1.0, 3.0})
            worst_u = std::max(worst_u, std::abs(csbp_laplace(m, t, lambda) - lambda / (1.0 + lambda * t)) /
                                            (lambda / (1.0 + lambda * t)));
    report(2, worst < 1e-8 && worst_u < 1e-14,
           fmt("tanh/coth max error %.3g (< 1e-8), u_t relative error %.3g", worst, worst_u));
}

void criterion_3() {
    double worst_scale = 0.0, worst_eps = 0.0;
    for (double alpha : {1.2, 1.5, 1.8, 2.0}) {
        const BranchingMechanism m(alpha, 1.0);
        const double p = alpha / (alpha - 1.0);
        for (double eps : {0.25, 0.5, 2.0, 4.0})
            for (double lambda : {0.1, 1.0, 5.0}) {
                for (double r : {0.3, 1.0, 2.0})
                    worst_scale = std::max(worst_scale, std::abs(v0(m, lambda, eps * r) -
                                                                 std::pow(eps, -1.0 / (alpha - 1.0)) *
                                                                     v0(m, std::pow(eps, p) * lambda, r)));
                worst_eps = std::max(worst_eps, std::abs(pointed_ball_laplace(m, lambda, eps) -
                                                         pointed_ball_laplace(m, std::pow(eps, p) * lambda, 1.0)));
            }
    }
    report(3, worst_scale < 1e-8 && worst_eps < 1e-8,
           fmt("scaling max error %.3g, eps-invariance max error %.3g (< 1e-8)", worst_scale, worst_eps));
}

void criterion_4() {
    const auto t0 = Clock::now();
    const double l2 = small_mass_log_laplace(BranchingMechanism(2.0, 1.0), 1e6);
    const double l15 = small_mass_log_laplace(BranchingMechanism(1.5, 1.0), 1e9);
    const double elapsed = seconds_since(t0);
    // closed form at alpha = 2: (log 2s - log sinh 2s) / s with s = sqrt(gamma)
    const double s = 1e3;
    const double oracle = (std::log(2 * s) - (2 * s - std::log(2.0) + std::log1p(-std::exp(-4 * s)))) / s;
    report(4, std::abs(l2 + 1.9917) <= 0.001 && std::abs(l2 - oracle) < 1e-4 && std::abs(l15 + 1.5) <= 0.05 && elapsed < 10.0,
           fmt("alpha=2: %.5f (oracle %.5f), alpha=1.5: %.4f, %.3fs", l2, oracle, l15, elapsed));
}

void criterion_10() {
    std::string detail;
    bool pass = true;
    for (double alpha : {1.3, 1.5, 1.8}) {
        PointedBallParams p;
        p.mech = BranchingMechanism(alpha, 1.0);
        p.n_points = 1000;
        const ExperimentReport r = verify_pointed_ball_law(p, SeedSpec{0, stable_hash("pointed_ball")}, 1);
        const Check* slope = nullptr;
        for (const auto& c : r.checks)
            if (c.name == "tail_slope") slope = &c;
        if (!slope) throw std::runtime_error("pointed_ball report has no tail_slope check");
        pass = pass && slope->pass();
        detail += fmt("%salpha=%.1f slope %.3f target %.2f %s", detail.empty() ? "" : "; ", alpha, slope->statistic,
                      slope->target, slope->pass() ? "ok" : "miss");
    }
    report(10, pass, detail + " (tol 0.15)");
}

TreeIndex tent(std::size_t k) {
    ExcursionPath p;
    for (std::size_t i = 0; i <= 2 * k; ++i) p.values.push_back(1.0 - std::abs(double(i) - double(k)) / double(k));
    p.dt = 1.0 / double(k);
    return TreeIndex(std::move(p));
}

void criterion_11() {
    const TreeIndex t = tent(1 << 16);
    const GaugeFunction r = GaugeFunction::generic(1, 0, 0);
    const double s12 = covering_sum(crossing_covering(t, 12), r);
    bool diam_ok = true;
    std::size_t elements = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const TreeIndex b(normalized_brownian_excursion(1 << 20, SeedSpec{seed, 11}));
        for (int n = 0; n <= crossing_resolution_cap(b); ++n)
            for (const auto& el : crossing_covering(b, n).elements) {
                ++elements;
                diam_ok = diam_ok && el.diameter <= 4.0 * std::ldexp(1.0, -n) + 1e-12;
            }
    }
    DensityStats ones;
    ones.n_values = {4, 5, 6};
    ones.ratios = {{1, 1, 1}, {1, 1, 1}};
    // doubling constant c = 4: the bounds are (2c)^-1 and 2 c^3
    const HausdorffBounds hb = hausdorff_bounds(ones, 1.0, 4.0, 1.0);
    const bool bounds_ok = hb.lower && hb.upper && std::abs(*hb.lower - 1.0 / 8.0) < 1e-12 && std::abs(*hb.upper - 128.0) < 1e-9;
    report(11, s12 >= 0.98 && s12 <= 1.02 && diam_ok && bounds_ok,
           fmt("tent sum at n=12 %.5f, %zu diameters checked %s, bounds %.4g/%.4g (expect 0.125/128)", s12, elements,
               diam_ok ? "ok" : "VIOLATED", hb.lower ? *hb.lower : NAN, hb.upper ? *hb.upper : NAN));
}

}  // namespace

int main() {
    guarded(1, criterion_1);
    guarded(2, criterion_2);
    guarded(3, criterion_3);
    guarded(4, criterion_4);

    std::vector<ExperimentReport> serial;
    std::map<std::string, const ExperimentReport*> by_name;
    bool suite_ok = true;
    try {
        serial = run_suite(SuiteParams{}, 0, {}, 1);
        for (const auto& r : serial) by_name[r.name] = &r;
    } catch (const std::exception& e) {
        suite_ok = false;
        std::printf("suite run failed: %s\n", e.what());
    }
    auto from_suite = [&](int id, std::vector<std::string> names, double max_runtime = kInfinity) {
        if (!suite_ok) return report(id, false, "suite run failed");
        bool pass = true;
        std::string detail;
        for (const auto& n : names) {
            const ExperimentReport& r = *by_name.at(n);
            pass = pass && r.verdict() && r.runtime_seconds < max_runtime;
            detail += (detail.empty() ? "" : " ") + describe(r);
        }
        if (std::isfinite(max_runtime)) detail += fmt(" (runtime < %.0fs)", max_runtime);
        report(id, pass, detail);
    };
    from_suite(5, {"pitman"}, 60.0);
    from_suite(6, {"downcrossing"});
    from_suite(7, {"crossing_identity"});
    from_suite(8, {"ray_knight"}, 300.0);
    from_suite(9, {"level_ball"});
    guarded(10, criterion_10);
    guarded(11, criterion_11);
    from_suite(12, {"crt_density", "stable_density"});

    guarded(13, [&] {
        if (!suite_ok) throw std::runtime_error("suite run failed");
        const auto parallel = run_suite(SuiteParams{}, 0, {}, 8);
        std::string a, b;
        for (const auto& r : serial) a += report_json_line(r) + "\n";
        for (const auto& r : parallel) b += report_json_line(r) + "\n";
        report(13, a == b, fmt("%zu JSONL lines, workers 1 vs 8 %s", serial.size(), a == b ? "identical" : "differ"));
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
