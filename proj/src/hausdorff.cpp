#include "crtlab/hausdorff.hpp"

#include "crtlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace crtlab {

int crossing_resolution_cap(const TreeIndex& idx) {
    const auto& v = idx.path().values;
    double step = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) step = std::max(step, std::abs(v[i] - v[i - 1]));
    if (step == 0.0) return 60;
    return static_cast<int>(std::floor(std::log2(1.0 / (16.0 * step))));
}

namespace {

void check_resolution(const TreeIndex& idx, int n) {
    const int cap = crossing_resolution_cap(idx);
    if (n > cap)
        throw std::invalid_argument("crossing scale n = " + std::to_string(n) + " exceeds the path resolution cap " +
                                    std::to_string(cap));
}

double cross_time(const TreeIndex& idx, std::size_t i, double level) {
    const double x0 = idx.value(i - 1), x1 = idx.value(i);
    const double frac = x1 == x0 ? 1.0 : std::clamp((level - x0) / (x1 - x0), 0.0, 1.0);
    return (static_cast<double>(i - 1) + frac) * idx.dt();
}

// First-visit time of the tree point coded by each grid index: the last time
// before it at which the path was strictly lower, or -inf at the first visit from the root.
std::vector<double> first_visit_times(const TreeIndex& idx) {
    const auto& v = idx.path().values;
    const std::size_t n = v.size();
    std::vector<double> rep(n);
    std::vector<std::size_t> stack;
    for (std::size_t u = 0; u < n; ++u) {
        while (!stack.empty() && v[stack.back()] >= v[u]) stack.pop_back();
        if (stack.empty()) {
            rep[u] = -std::numeric_limits<double>::infinity();
        } else {
            const std::size_t p = stack.back();
            const double frac = (v[u] - v[p]) / (v[p + 1] - v[p]);
            rep[u] = (static_cast<double>(p) + frac) * idx.dt();
        }
        stack.push_back(u);
    }
    return rep;
}

bool has_new_point(const TreeIndex& idx, const std::vector<double>& rep, double s, double t) {
    const double dt = idx.dt();
    auto first = static_cast<std::size_t>(std::ceil(s / dt - 1e-9));
    const double slack = 1e-9 * dt;
    for (std::size_t u = first; u < idx.size() && static_cast<double>(u) * dt < t - slack; ++u)
        if (rep[u] > s + slack) return true;
    return false;
}

void finish(const TreeIndex& idx, Covering& cov) {
    const std::vector<double> rep = first_visit_times(idx);
    const double bound = 4.0 * std::ldexp(1.0, -cov.n) + 1e-12;
    for (auto& el : cov.elements) {
        el.diameter = interval_diameter(idx, el.start, el.end);
        if (el.diameter > bound)
            throw std::logic_error("covering element diameter " + std::to_string(el.diameter) + " exceeds 4 * 2^-n");
        el.effective = has_new_point(idx, rep, el.start, el.end);
    }
}

}  // namespace

std::vector<Crossing> crossing_times(const TreeIndex& idx, int n) {
    check_resolution(idx, n);
    const double delta = std::ldexp(1.0, -n);
    std::vector<Crossing> out{{0.0, 0}};
    long long k = 0;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        const double x = idx.value(i);
        while (true) {
            const double up = static_cast<double>(k + 1) * delta;
            const double down = static_cast<double>(k - 1) * delta;
            if (x >= up) {
                out.push_back({cross_time(idx, i, up), ++k});
            } else if (k > 0 && x <= down) {
                out.push_back({cross_time(idx, i, down), --k});
            } else {
                break;
            }
        }
    }
    return out;
}

double interval_diameter(const TreeIndex& idx, double s, double t) {
    if (s > t) std::swap(s, t);
    // max over i <= j of x_i + x_j - 2 min(x_i..x_j), one pass:
    // best_j = max_{i <= j}(x_i - 2 min(x_i..x_j)) = max(best_{j-1}, max_{i <= j} x_i - 2 x_j).
    double run_max = -kInfinity, best = -kInfinity, diam = 0.0;
    auto push = [&](double x) {
        run_max = std::max(run_max, x);
        best = std::max(best, run_max - 2.0 * x);
        diam = std::max(diam, x + best);
    };
    push(idx.value_at(s));
    const double dt = idx.dt();
    const auto first = static_cast<std::size_t>(std::floor(s / dt)) + 1;
    for (std::size_t u = first; u < idx.size() && static_cast<double>(u) * dt < t; ++u) push(idx.value(u));
    push(idx.value_at(t));
    return diam;
}

std::size_t Covering::effective_count() const {
    return static_cast<std::size_t>(
        std::count_if(elements.begin(), elements.end(), [](const CoverElement& e) { return e.effective; }));
}

Covering crossing_covering(const TreeIndex& idx, int n, std::optional<Band> band) {
    const std::vector<Crossing> cr = crossing_times(idx, n);
    const double delta = std::ldexp(1.0, -n);
    Covering cov;
    cov.n = n;
    for (std::size_t k = 0; k + 1 < cr.size(); ++k) {
        const double base = static_cast<double>(cr[k].level) * delta;
        if (band && (base < band->lo || base > band->hi)) continue;
        cov.elements.push_back({cr[k].time, cr[k + 1].time, 0.0, false});
    }
    finish(idx, cov);
    return cov;
}

Covering level_crossing_covering(const TreeIndex& idx, double a, int n) {
    check_resolution(idx, n);
    const double delta = std::ldexp(1.0, -n);
    if (!(delta < a)) throw std::invalid_argument("level_crossing_covering: need 2^-n < a");
    Covering cov;
    cov.n = n;
    if (a > idx.height()) return cov;
    enum class Phase { SeekLevel, SeekExit };
    Phase phase = Phase::SeekLevel;
    bool below = true;  // side of a we are on while seeking the level
    double start = 0.0;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        const double x = idx.value(i);
        if (phase == Phase::SeekLevel) {
            if (below ? x >= a : x <= a) {
                start = cross_time(idx, i, a);
                phase = Phase::SeekExit;
            }
        }
        if (phase == Phase::SeekExit) {
            if (x >= a + delta || x <= a - delta) {
                const double lv = x >= a + delta ? a + delta : a - delta;
                cov.elements.push_back({start, cross_time(idx, i, lv), 0.0, false});
                below = lv < a;
                phase = Phase::SeekLevel;
            }
        }
    }
    finish(idx, cov);
    return cov;
}

double covering_sum(const Covering& cov, const GaugeFunction& g) {
    double s = 0.0;
    for (const auto& el : cov.elements)
        if (el.effective && el.diameter > 0.0) s += g(el.diameter);
    return s;
}

namespace {

double quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

DensityStats density_scan(const TreeIndex& idx, const DensityRequest& req, const GaugeFunction& g) {
    if (req.points.empty() || req.n_values.empty()) throw std::invalid_argument("density_scan: empty points or n range");
    if (req.measure == MeasureKind::Level && req.atoms == nullptr)
        throw std::invalid_argument("density_scan: level measure needs an atom set");
    DensityStats st;
    st.n_values = req.n_values;
    st.gauge = g.describe();
    st.ratios.assign(req.points.size(), std::vector<double>(req.n_values.size()));
    for (std::size_t k = 0; k < req.n_values.size(); ++k) {
        const double r = std::ldexp(1.0, -req.n_values[k]);
        const double gr = g(r);
        for (std::size_t p = 0; p < req.points.size(); ++p) {
            const double ball = req.measure == MeasureKind::Mass ? mass_ball(idx, req.points[p], r, req.stride)
                                                                 : local_time_ball(idx, *req.atoms, req.points[p], r);
            st.ratios[p][k] = ball / gr;
        }
    }
    for (std::size_t k = 0; k < req.n_values.size(); ++k) {
        std::vector<double> col(req.points.size());
        for (std::size_t p = 0; p < col.size(); ++p) col[p] = st.ratios[p][k];
        st.median.push_back(quantile(col, 0.5));
        st.q90.push_back(quantile(col, 0.9));
        st.max.push_back(*std::max_element(col.begin(), col.end()));
    }
    return st;
}

HausdorffBounds hausdorff_bounds(const DensityStats& stats, double total_mass, double doubling, double threshold) {
    if (stats.ratios.empty() || stats.n_values.empty()) throw std::invalid_argument("hausdorff_bounds: empty stats");
    if (!(threshold > 0.0) || !(doubling > 0.0)) throw std::invalid_argument("hausdorff_bounds: need positive constants");
    std::vector<std::size_t> order(stats.n_values.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return stats.n_values[x] > stats.n_values[y]; });
    const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, stats.proxy_top)), order.size());
    bool all_below = true, all_above = true;
    for (const auto& row : stats.ratios) {
        if (row.size() != stats.n_values.size()) throw std::invalid_argument("hausdorff_bounds: ragged table");
        double proxy = 0.0;
        for (std::size_t j = 0; j < top; ++j) proxy = std::max(proxy, row[order[j]]);
        all_below = all_below && proxy <= threshold;
        all_above = all_above && proxy >= threshold;
    }
    const DensityComparisonConstants m = density_comparison_constants(doubling);
    HausdorffBounds out;
    if (all_below) out.lower = m.lower / threshold * total_mass;
    if (all_above) out.upper = m.upper / threshold * total_mass;
    return out;
}

bool series_converges(double alpha, double u) { return u * (alpha - 1.0) > 1.0; }

std::vector<ConjectureRow> conjecture_scan(const BranchingMechanism& mech, const std::vector<double>& u_grid,
                                           const std::vector<int>& n_values, const ConjectureEnsemble& ens) {
    const double alpha = mech.alpha();
    if (!(alpha < 2.0)) throw std::invalid_argument("conjecture_scan: needs 1 < alpha < 2");
    if (u_grid.empty() || n_values.empty()) throw std::invalid_argument("conjecture_scan: empty grid");
    std::vector<GaugeFunction> gauges;
    for (double u : u_grid) gauges.push_back(GaugeFunction::stable_mass(alpha, u));
    auto per_tree = parallel_map<std::vector<ConjectureRow>>(ens.n_trees, ens.workers, [&](std::size_t t) {
        ItoSample s = ito_excursion_above_height(mech, ens.c_height, ens.n_scale, ens.seed.child(t));
        TreeIndex idx(std::move(s.path));
        std::vector<ConjectureRow> rows;
        std::vector<std::vector<double>> sums(u_grid.size(), std::vector<double>(n_values.size()));
        for (std::size_t k = 0; k < n_values.size(); ++k) {
            const Covering cov = crossing_covering(idx, n_values[k]);
            for (std::size_t j = 0; j < u_grid.size(); ++j) sums[j][k] = covering_sum(cov, gauges[j]);
        }
        for (std::size_t j = 0; j < u_grid.size(); ++j)
            for (std::size_t k = 0; k < n_values.size(); ++k)
                rows.push_back({t, u_grid[j], n_values[k], sums[j][k], series_converges(alpha, u_grid[j])});
        return rows;
    });
    std::vector<ConjectureRow> out;
    for (auto& rows : per_tree) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

}  // namespace crtlab
