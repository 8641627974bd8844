#include "crtlab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace crtlab {

double ExcursionPath::height() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

void ExcursionPath::validate() const {
    if (values.size() < 2) throw std::invalid_argument("excursion path needs at least 2 samples");
    if (!(dt > 0.0)) throw std::invalid_argument("excursion path needs dt > 0");
    if (values.front() != 0.0 || values.back() != 0.0) throw std::invalid_argument("excursion path must start and end at 0");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("excursion path must be nonnegative and finite");
}

std::uint32_t DiscreteTree::height() const {
    return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
}

void DiscreteTree::validate() const {
    if (parent.empty() || parent.size() != depth.size()) throw std::invalid_argument("tree: empty or inconsistent arrays");
    if (parent[0] != kNoParent || depth[0] != 0) throw std::invalid_argument("tree: vertex 0 must be the root");
    for (std::size_t i = 1; i < parent.size(); ++i) {
        if (parent[i] >= i) throw std::invalid_argument("tree: parent must precede child in preorder");
        if (depth[i] != depth[parent[i]] + 1) throw std::invalid_argument("tree: depth inconsistent with parent");
        // Preorder: the parent of i lies on the root path of i - 1.
        std::uint32_t u = static_cast<std::uint32_t>(i - 1);
        while (depth[u] > depth[parent[i]]) u = parent[u];
        if (u != parent[i]) throw std::invalid_argument("tree: not in depth-first order");
    }
}

DiscreteTree DiscreteTree::from_parents(std::vector<std::uint32_t> parent) {
    DiscreteTree t;
    t.depth.resize(parent.size());
    for (std::size_t i = 1; i < parent.size(); ++i) {
        if (parent[i] >= i) throw std::invalid_argument("tree: parent must precede child in preorder");
        t.depth[i] = t.depth[parent[i]] + 1;
    }
    t.parent = std::move(parent);
    t.validate();
    return t;
}

// P(xi > k) = (alpha-1) Gamma(k+1-alpha) / (alpha Gamma(2-alpha) Gamma(k+1)) for k >= 1,
// P(xi > 0) = (alpha-1)/alpha, and P(xi = k) = P(xi > k-1) alpha / k for k >= 2.
OffspringLaw::OffspringLaw(double alpha) : alpha_(alpha), tail_const_(0.0), table_limit_(kDefaultTableLimit) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("offspring law: alpha must lie in (1, 2]");
    if (alpha == 2.0) {
        surv_ = {0.5, 0.5, 0.0};
        table_limit_ = 2;
        sb_surv_ = {1.0, 1.0, 0.0};
        return;
    }
    tail_const_ = (alpha - 1.0) / (alpha * std::tgamma(2.0 - alpha));
    surv_.resize(table_limit_ + 1);
    surv_[0] = (alpha - 1.0) / alpha;
    surv_[1] = surv_[0];
    for (std::uint64_t k = 2; k <= table_limit_; ++k)
        surv_[k] = surv_[k - 1] * (static_cast<double>(k) - alpha) / static_cast<double>(k);
    sb_surv_.resize(4097);
    for (std::size_t k = 0; k < sb_surv_.size(); ++k)
        sb_surv_[k] = static_cast<double>(k + 1) * surv_[k] + survival_tail_sum(k);
}

double OffspringLaw::survival_exact(double k) const {
    return std::exp(std::log(alpha_ - 1.0) + std::lgamma(k + 1.0 - alpha_) - std::log(alpha_) -
                    std::lgamma(2.0 - alpha_) - std::lgamma(k + 1.0));
}

double OffspringLaw::survival(std::uint64_t k) const {
    if (k <= table_limit_) return surv_[k];
    return survival_exact(static_cast<double>(k));
}

double OffspringLaw::p(std::uint64_t k) const {
    if (k == 0) return 1.0 / alpha_;
    if (k == 1) return 0.0;
    if (alpha_ == 2.0) return k == 2 ? 0.5 : 0.0;
    return survival(k - 1) * alpha_ / static_cast<double>(k);
}

double OffspringLaw::survival_tail_sum(std::uint64_t k) const {
    if (alpha_ == 2.0) return k == 0 ? 0.5 : 0.0;
    const double kk = static_cast<double>(k);
    return tail_const_ * std::exp(std::lgamma(kk + 2.0 - alpha_) - std::lgamma(kk + 1.0)) / (alpha_ - 1.0);
}

// Inverse CDF: xi = min{k : P(xi > k) < V} with V uniform on (0, 1].
std::uint64_t OffspringLaw::inverse(double v) const {
    if (surv_[table_limit_] < v) {
        // Small offspring counts carry almost all the mass; scan them before bisecting.
        const std::uint64_t head = std::min<std::uint64_t>(16, table_limit_);
        for (std::uint64_t k = 0; k <= head; ++k)
            if (surv_[k] < v) return k;
        auto it = std::upper_bound(surv_.begin() + static_cast<std::ptrdiff_t>(head), surv_.end(), v,
                                   [](double x, double s) { return s < x; });
        return static_cast<std::uint64_t>(it - surv_.begin());
    }
    double k0 = static_cast<double>(table_limit_) * std::pow(surv_[table_limit_] / v, 1.0 / alpha_);
    if (!(k0 < 1e18)) return static_cast<std::uint64_t>(1e18);
    auto k = static_cast<std::uint64_t>(k0);
    k = std::max(k, table_limit_ + 1);
    while (k > table_limit_ + 1 && !(survival(k - 1) >= v)) --k;
    while (!(survival(k) < v)) ++k;
    return k;
}

std::uint64_t OffspringLaw::sample(Rng& rng) const { return inverse(rng.uniform_pos()); }

std::uint64_t OffspringLaw::sample_above(std::uint64_t k, Rng& rng) const {
    return std::max(k + 1, inverse(rng.uniform_pos() * survival(k)));
}

// P(xi_hat > k) = sum_{j > k} j p_j = (k + 1) P(xi > k) + sum_{j > k} P(xi > j).
double OffspringLaw::size_biased_survival(double k) const {
    if (k < 0.0) return 1.0;
    k = std::floor(k);
    if (k < static_cast<double>(sb_surv_.size())) return sb_surv_[static_cast<std::size_t>(k)];
    if (alpha_ == 2.0) return 0.0;
    return (k + 1.0) * survival_exact(k) +
           tail_const_ * std::exp(std::lgamma(k + 2.0 - alpha_) - std::lgamma(k + 1.0)) / (alpha_ - 1.0);
}

double OffspringLaw::sample_size_biased(Rng& rng) const {
    const double v = rng.uniform_pos();
    if (sb_surv_.back() < v) {
        auto it = std::upper_bound(sb_surv_.begin(), sb_surv_.end(), v, [](double x, double s) { return s < x; });
        return static_cast<double>(it - sb_surv_.begin());
    }
    double lo = static_cast<double>(sb_surv_.size() - 1), hi = 2.0 * lo;
    while (size_biased_survival(hi) >= v) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return hi;
    }
    while (hi - lo > std::max(1.0, lo * 1e-15)) {
        const double mid = std::floor(0.5 * (lo + hi));
        if (mid <= lo) break;
        (size_biased_survival(mid) >= v ? lo : hi) = mid;
    }
    return hi;
}

OffspringLaw canonical_offspring_law(double alpha) { return OffspringLaw(alpha); }

namespace {

std::shared_ptr<const OffspringLaw> cached_law(double alpha) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const OffspringLaw>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[alpha];
    if (!slot) slot = std::make_shared<const OffspringLaw>(alpha);
    return slot;
}

}  // namespace

double offspring_sum(const OffspringLaw& law, double z, Rng& rng) {
    if (!(z > 0.0)) return 0.0;
    if (z >= kMeanFieldPopulation) return z;
    auto rem = static_cast<std::uint64_t>(z);
    double total = 0.0;
    if (rem < 64) {
        for (std::uint64_t i = 0; i < rem; ++i) total += static_cast<double>(law.sample(rng));
        return total;
    }
    // Split off the individuals with exactly k children until few are left.
    std::uint64_t k = 0;
    double at_least = 1.0;  // P(xi >= k)
    while (rem >= 32 && at_least > 0.0) {
        const double q = std::min(1.0, law.p(k) / at_least);
        const std::uint64_t nk = q > 0.0 ? rng.binomial(rem, q) : 0;
        total += static_cast<double>(k) * static_cast<double>(nk);
        rem -= nk;
        at_least = law.survival(k);
        ++k;
    }
    for (std::uint64_t i = 0; i < rem; ++i) total += static_cast<double>(law.sample_above(k - 1, rng));
    return total;
}

bool gw_tree(const OffspringLaw& law, const GwOptions& opt, Rng& rng, DiscreteTree& out) {
    out.parent.clear();
    out.depth.clear();
    out.parent.push_back(kNoParent);
    out.depth.push_back(0);
    struct Frame {
        std::uint32_t vertex;
        std::uint64_t remaining;
    };
    std::vector<Frame> stack;
    const bool truncate = opt.max_depth > 0;
    const std::uint64_t root_children = law.sample(rng);
    if (root_children > opt.max_vertices) return false;
    if (root_children > 0) stack.push_back({0, root_children});
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.remaining == 0) {
            stack.pop_back();
            continue;
        }
        --top.remaining;
        const std::uint32_t d = out.depth[top.vertex] + 1;
        const auto v = static_cast<std::uint32_t>(out.parent.size());
        if (out.parent.size() >= opt.max_vertices) return false;
        out.parent.push_back(top.vertex);
        out.depth.push_back(d);
        if (truncate && d >= opt.max_depth) continue;
        const std::uint64_t k = law.sample(rng);
        if (k > opt.max_vertices) return false;
        if (k > 0) stack.push_back({v, k});
    }
    return true;
}

GwSample gw_tree_conditioned_height(const OffspringLaw& law, std::uint32_t min_height, const GwOptions& opt,
                                    const SeedSpec& seed) {
    if (min_height < 1) throw std::invalid_argument("gw_tree_conditioned_height: min_height must be >= 1");
    if (opt.max_depth > 0 && opt.max_depth < min_height)
        throw std::invalid_argument("gw_tree_conditioned_height: max_depth below min_height");
    Rng rng(seed);
    GwSample out;
    while (true) {
        ++out.attempts;
        if (!gw_tree(law, opt, rng, out.tree)) {
            ++out.oversize_attempts;
            if (out.oversize_attempts > opt.retry_cap)
                throw BudgetExhausted("gw_tree_conditioned_height: " + std::to_string(out.oversize_attempts) +
                                      " attempts exceeded max_vertices = " + std::to_string(opt.max_vertices) +
                                      " after " + std::to_string(out.attempts) + " attempts");
            continue;
        }
        if (out.tree.height() >= min_height) return out;
    }
}

ExcursionPath contour_path(const DiscreteTree& tree, double edge_len, double step_dt) {
    if (tree.parent.empty()) throw std::invalid_argument("contour_path: empty tree");
    if (!(edge_len > 0.0) || !(step_dt > 0.0)) throw std::invalid_argument("contour_path: need positive scales");
    ExcursionPath path;
    path.dt = step_dt;
    path.values.reserve(2 * tree.edges() + 1);
    path.values.push_back(0.0);
    std::uint32_t cur = 0;
    for (std::size_t i = 1; i < tree.vertices(); ++i) {
        const std::uint32_t target = tree.depth[tree.parent[i]];
        while (cur > target) path.values.push_back(--cur * edge_len);
        path.values.push_back(++cur * edge_len);
    }
    while (cur > 0) path.values.push_back(--cur * edge_len);
    return path;
}

ExcursionPath normalized_brownian_excursion(std::uint64_t n_steps, const SeedSpec& seed) {
    if (n_steps < 2 || n_steps % 2 != 0) throw std::invalid_argument("normalized_brownian_excursion: n_steps must be even and >= 2");
    Rng rng(seed);
    std::vector<std::int8_t> steps(n_steps);
    std::fill(steps.begin(), steps.begin() + n_steps / 2, 1);
    std::fill(steps.begin() + n_steps / 2, steps.end(), -1);
    for (std::uint64_t i = n_steps - 1; i > 0; --i) std::swap(steps[i], steps[rng.below(i + 1)]);

    std::int64_t s = 0, best = 0;
    std::uint64_t argmin = 0;
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        s += steps[i];
        if (s < best) {
            best = s;
            argmin = i + 1;
        }
    }
    ExcursionPath path;
    path.dt = 1.0 / static_cast<double>(n_steps);
    path.mech = BranchingMechanism(2.0, 1.0);
    path.values.resize(n_steps + 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_steps));
    std::int64_t h = 0;
    path.values[0] = 0.0;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        h += steps[(argmin + k) % n_steps];
        path.values[k + 1] = static_cast<double>(h) * scale;
    }
    path.values[n_steps] = 0.0;
    return path;
}

SimScale sim_scale(const BranchingMechanism& mech, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("sim_scale: n must be positive");
    const double a = mech.alpha();
    const double rho = (1.0 / a) / mech.c();
    const auto sim_n = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(rho * static_cast<double>(n))));
    const double nd = static_cast<double>(sim_n);
    return {sim_n, rho / nd, rho / std::pow(nd, a / (a - 1.0)), std::pow(nd, 1.0 / (a - 1.0))};
}

double pointed_mass_ball(const BranchingMechanism& mech, double eps, std::uint64_t n, Rng& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("pointed_mass_ball: eps must be positive");
    const SimScale sc = sim_scale(mech, n);
    const OffspringLaw& law = *cached_law(mech.alpha());
    const auto e = static_cast<long long>(std::floor(eps / sc.edge_len + 1e-9));
    if (e < 1) throw std::invalid_argument("pointed_mass_ball: eps below one edge");
    // b holds the non-spine vertices at distance e - r from sigma; each one
    // has the same distance budget r left as its cousins in that bucket.
    double count = static_cast<double>(e + 1), b = 0.0;
    for (long long r = e - 1; r >= 0; --r) {
        const long long s = e - r - 1;  // spine vertex whose children enter this bucket
        const double fresh = s == 0 ? static_cast<double>(law.sample(rng)) : law.sample_size_biased(rng) - 1.0;
        b = offspring_sum(law, b, rng) + fresh;
        count += b;
    }
    return count * sc.vertex_mass;
}

double pointed_level_ball(const BranchingMechanism& mech, double eps, std::uint64_t n, Rng& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("pointed_level_ball: eps must be positive");
    const SimScale sc = sim_scale(mech, n);
    const OffspringLaw& law = *cached_law(mech.alpha());
    // Level points within eps share an ancestor at most eps/2 above the level.
    const auto h = static_cast<long long>(std::floor(eps / (2.0 * sc.edge_len) + 1e-9));
    double w = 0.0;
    for (long long s = h; s >= 1; --s) w = offspring_sum(law, w, rng) + law.sample_size_biased(rng) - 1.0;
    return (w + 1.0) / sc.pop_scale;
}

ItoSample ito_excursion_above_height(const BranchingMechanism& mech, double c_height, std::uint64_t n,
                                     const SeedSpec& seed, const ItoOptions& opt) {
    if (!(c_height > 0.0) || n == 0 || c_height * static_cast<double>(n) < 1.0)
        throw std::invalid_argument("ito_excursion_above_height: need c_height * n >= 1");
    const double a = mech.alpha();
    const SimScale sc = sim_scale(mech, n);
    const std::uint64_t sim_n = sc.sim_n;
    const double edge_len = sc.edge_len;
    const double step_dt = sc.vertex_mass / 2.0;

    const auto min_height = static_cast<std::uint32_t>(std::ceil(c_height / edge_len - 1e-9));
    GwOptions gw = opt.gw;
    if (std::isfinite(opt.max_height)) {
        if (opt.max_height < c_height) throw std::invalid_argument("ito_excursion_above_height: max_height below c_height");
        gw.max_depth = static_cast<std::uint32_t>(std::ceil(opt.max_height / edge_len)) + 1;
    }
    GwSample g = gw_tree_conditioned_height(*cached_law(a), std::max<std::uint32_t>(1, min_height), gw, seed);
    ItoSample out;
    out.path = contour_path(g.tree, edge_len, step_dt);
    out.path.mech = mech;
    out.attempts = g.attempts;
    out.sim_scale = sim_n;
    return out;
}

namespace {

// Minimum of a Brownian bridge from x to y over a step of variance dx.
double bridge_min(double x, double y, double dx, Rng& rng) {
    const double d = x - y;
    return 0.5 * (x + y - std::sqrt(d * d - 2.0 * dx * std::log(rng.uniform_pos())));
}

}  // namespace

PitmanPath pitman_path(double a, double horizon, double dx, const SeedSpec& seed) {
    if (!(dx > 0.0)) throw std::invalid_argument("pitman_path: dx must be positive");
    if (!(a >= 0.0) || !(horizon > 0.0)) throw std::invalid_argument("pitman_path: need a >= 0 and horizon > 0");
    Rng rng(seed);
    PitmanPath out;
    out.dx = dx;
    const auto steps = static_cast<std::uint64_t>(std::ceil(horizon / dx - 1e-9));
    const double sd = std::sqrt(dx);
    double b = a, inf = a;
    out.b.push_back(b);
    out.r.push_back(0.0);
    for (std::uint64_t i = 0; i < steps; ++i) {
        const double next = b + sd * rng.normal();
        inf = std::min(inf, bridge_min(b, next, dx, rng));
        if (a > 0.0 && inf <= 0.0) {
            out.hit_zero = true;
            out.b.push_back(0.0);
            out.r.push_back(a);
            break;
        }
        b = next;
        out.b.push_back(b);
        out.r.push_back(a + b - 2.0 * inf);
    }
    return out;
}

double pitman_endpoint(double horizon, double dx, Rng& rng) {
    const auto steps = static_cast<std::uint64_t>(std::ceil(horizon / dx - 1e-9));
    const double sd = std::sqrt(dx);
    double b = 0.0, inf = 0.0;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const double next = b + sd * rng.normal();
        inf = std::min(inf, bridge_min(b, next, dx, rng));
        b = next;
    }
    return b - 2.0 * inf;
}

RwExcursion rw_positive_excursion(const SeedSpec& seed, std::uint64_t max_len, std::uint64_t retry_cap) {
    if (max_len < 2) throw std::invalid_argument("rw_positive_excursion: max_len must be >= 2");
    Rng rng(seed);
    RwExcursion out;
    while (true) {
        out.path.assign({0, 1});
        std::int64_t x = 1;
        std::uint64_t bits = 0;
        int left = 0;
        while (x > 0 && out.path.size() - 1 <= max_len) {
            if (left == 0) {
                bits = rng.next();
                left = 64;
            }
            x += (bits & 1) ? 1 : -1;
            bits >>= 1;
            --left;
            out.path.push_back(x);
        }
        if (x == 0 && out.path.size() - 1 <= max_len) return out;
        if (++out.rejected > retry_cap) throw BudgetExhausted("rw_positive_excursion: retry cap exceeded");
    }
}

}  // namespace crtlab
