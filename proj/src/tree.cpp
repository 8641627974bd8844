#include "crtlab/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace crtlab {

TreeIndex::TreeIndex(ExcursionPath path) : path_(std::move(path)) {
    path_.validate();
    height_ = path_.height();
    const std::size_t n = path_.values.size();
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> base(blocks);
    for (std::size_t b = 0; b < blocks; ++b) base[b] = scan(b * kBlock, std::min(n, (b + 1) * kBlock) - 1);
    table_.push_back(std::move(base));
    for (std::size_t k = 1; (std::size_t{1} << k) <= blocks; ++k) {
        const std::vector<double>& prev = table_.back();
        const std::size_t half = std::size_t{1} << (k - 1);
        std::vector<double> row(blocks - (std::size_t{1} << k) + 1);
        for (std::size_t b = 0; b < row.size(); ++b) row[b] = std::min(prev[b], prev[b + half]);
        table_.push_back(std::move(row));
    }
}

double TreeIndex::scan(std::size_t i, std::size_t j) const {
    const double* v = path_.values.data();
    double m = v[i];
    for (std::size_t k = i + 1; k <= j; ++k) m = std::min(m, v[k]);
    return m;
}

double TreeIndex::range_min(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (j >= size()) throw std::out_of_range("range_min: index past the end of the path");
    const std::size_t bi = i / kBlock, bj = j / kBlock;
    if (bi == bj) return scan(i, j);
    double m = std::min(scan(i, (bi + 1) * kBlock - 1), scan(bj * kBlock, j));
    if (bj > bi + 1) {
        const std::size_t lo = bi + 1, count = bj - bi - 1;
        const auto k = static_cast<std::size_t>(std::bit_width(count) - 1);
        m = std::min({m, table_[k][lo], table_[k][bj - (std::size_t{1} << k)]});
    }
    return m;
}

double TreeIndex::dist(std::size_t s, std::size_t t) const {
    return value(s) + value(t) - 2.0 * range_min(s, t);
}

double TreeIndex::value_at(double t) const {
    if (!(t >= 0.0) || t > duration() * (1.0 + 1e-12)) throw std::out_of_range("tree time outside [0, duration]");
    const double x = std::min(t / dt(), static_cast<double>(size() - 1));
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= size()) return value(size() - 1);
    const double f = x - static_cast<double>(i);
    return value(i) + f * (value(i + 1) - value(i));
}

double TreeIndex::range_min_at(double s, double t) const {
    if (s > t) std::swap(s, t);
    double m = std::min(value_at(s), value_at(t));
    const auto first = static_cast<std::size_t>(std::floor(s / dt())) + 1;
    const auto last = static_cast<std::size_t>(std::ceil(t / dt()));
    if (last >= 1 && first <= last - 1 && last - 1 < size()) m = std::min(m, range_min(first, last - 1));
    return m;
}

double TreeIndex::dist_at(double s, double t) const {
    return value_at(s) + value_at(t) - 2.0 * range_min_at(s, t);
}

double mass_ball(const TreeIndex& idx, std::size_t center, double eps, std::size_t stride) {
    if (!(eps > 0.0)) throw std::invalid_argument("mass_ball: eps must be positive");
    if (stride < 1) throw std::invalid_argument("mass_ball: stride must be >= 1");
    if (center >= idx.size()) throw std::out_of_range("mass_ball: center outside the path");
    const double* v = idx.path().values.data();
    const std::size_t n = idx.size();
    const double ec = v[center];
    const double floor = ec - eps;
    double count = 0.0;
    auto weight = [&](std::size_t j) { return (stride == 1 && (j == 0 || j == n - 1)) ? 0.5 : 1.0; };
    count += weight(center);
    if (stride == 1) {
        double m = ec;
        for (std::size_t j = center + 1; j < n; ++j) {
            m = std::min(m, v[j]);
            if (m < floor) break;
            if (ec + v[j] - 2.0 * m <= eps) count += weight(j);
        }
        m = ec;
        for (std::size_t j = center; j-- > 0;) {
            m = std::min(m, v[j]);
            if (m < floor) break;
            if (ec + v[j] - 2.0 * m <= eps) count += weight(j);
        }
    } else {
        double m = ec;
        for (std::size_t j = center + stride; j < n; j += stride) {
            m = std::min(m, idx.range_min(j - stride + 1, j));
            if (m < floor) break;
            if (ec + v[j] - 2.0 * m <= eps) count += 1.0;
        }
        m = ec;
        for (std::size_t j = center; j >= stride;) {
            j -= stride;
            m = std::min(m, idx.range_min(j, j + stride - 1));
            if (m < floor) break;
            if (ec + v[j] - 2.0 * m <= eps) count += 1.0;
        }
    }
    return count * idx.dt() * static_cast<double>(stride);
}

double LevelSetAtoms::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

namespace {

struct Run {
    std::size_t start, end;  // inclusive indices with e > level
    double max;
};

double level_tol(double a) { return 1e-9 * std::max(1.0, std::abs(a)); }

std::vector<Run> runs_above(const TreeIndex& idx, double a) {
    const double* v = idx.path().values.data();
    const std::size_t n = idx.size();
    const double thr = a + level_tol(a);
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < n) {
        if (v[i] <= thr) {
            ++i;
            continue;
        }
        Run r{i, i, v[i]};
        while (i < n && v[i] > thr) {
            r.max = std::max(r.max, v[i]);
            r.end = i++;
        }
        runs.push_back(r);
    }
    return runs;
}

}  // namespace

LevelSetAtoms level_set(const TreeIndex& idx, double a, double eps) {
    if (!(a > 0.0) || !(eps > 0.0)) throw std::invalid_argument("level_set: need a > 0 and eps > 0");
    LevelSetAtoms out;
    out.level = a;
    out.eps = eps;
    if (a >= idx.height()) return out;
    const double weight = 1.0 / height_tail(idx.path().mech, eps);
    const double tol = level_tol(a);
    const std::vector<Run> runs = runs_above(idx, a);
    // Runs separated only by touching the level belong to one vertex at that level.
    std::size_t g = 0;
    while (g < runs.size()) {
        std::size_t h = g;
        double group_max = runs[g].max;
        while (h + 1 < runs.size() && idx.range_min(runs[h].end + 1, runs[h + 1].start - 1) >= a - tol) {
            ++h;
            group_max = std::max(group_max, runs[h].max);
        }
        if (group_max >= a + eps - tol) out.atoms.push_back({runs[g].start - 1, weight});
        g = h + 1;
    }
    return out;
}

double local_time_ball(const TreeIndex& idx, const LevelSetAtoms& atoms, std::size_t center, double eps) {
    if (center >= atoms.atoms.size()) throw std::out_of_range("local_time_ball: center is not an atom");
    if (!(eps > 0.0)) throw std::invalid_argument("local_time_ball: eps must be positive");
    const double thr = atoms.level - eps / 2.0 - level_tol(atoms.level);
    const auto& at = atoms.atoms;
    double total = at[center].weight;
    double m = kInfinity;
    for (std::size_t j = center + 1; j < at.size(); ++j) {
        m = std::min(m, idx.range_min(at[j - 1].index + 1, at[j].index));
        if (m < thr) break;
        total += at[j].weight;
    }
    m = kInfinity;
    for (std::size_t j = center; j-- > 0;) {
        m = std::min(m, idx.range_min(at[j].index + 1, at[j + 1].index));
        if (m < thr) break;
        total += at[j].weight;
    }
    return total;
}

std::vector<ExcursionPath> subtrees_above(const TreeIndex& idx, double a, double min_height) {
    if (!(a > 0.0)) throw std::invalid_argument("subtrees_above: a must be positive");
    std::vector<ExcursionPath> out;
    if (a >= idx.height()) return out;
    const double* v = idx.path().values.data();
    for (const Run& r : runs_above(idx, a)) {
        if (!(r.max - a > min_height)) continue;
        ExcursionPath p;
        p.dt = idx.dt();
        p.mech = idx.path().mech;
        p.values.reserve(r.end - r.start + 3);
        p.values.push_back(0.0);
        for (std::size_t i = r.start; i <= r.end; ++i) p.values.push_back(v[i] - a);
        p.values.push_back(0.0);
        out.push_back(std::move(p));
    }
    return out;
}

std::size_t sample_mass_point(const TreeIndex& idx, Rng& rng) {
    const double x = rng.uniform() * static_cast<double>(idx.size() - 1);
    return static_cast<std::size_t>(std::llround(x));
}

std::size_t sample_level_point(const LevelSetAtoms& atoms, Rng& rng) {
    if (atoms.atoms.empty()) throw std::invalid_argument("sample_level_point: empty atom set");
    const double target = rng.uniform() * atoms.total_weight();
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.atoms.size(); ++i) {
        acc += atoms.atoms[i].weight;
        if (target < acc) return i;
    }
    return atoms.atoms.size() - 1;
}

}  // namespace crtlab
