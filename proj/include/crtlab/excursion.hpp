#ifndef CRTLAB_EXCURSION_HPP
#define CRTLAB_EXCURSION_HPP

#include "crtlab/analytic.hpp"
#include "crtlab/random.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace crtlab {

/// Raised when a rejection sampler runs out of its documented budget.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Nonnegative path on a uniform grid, the coding function of a tree.
 *
 * `mech` records which branching mechanism the coded tree approximates;
 * level-set weights use it.
 */
struct ExcursionPath {
    std::vector<double> values;
    double dt = 1.0;
    BranchingMechanism mech{2.0, 1.0};

    std::size_t size() const { return values.size(); }
    double duration() const { return static_cast<double>(values.size() - 1) * dt; }
    double height() const;

    /// Throws std::invalid_argument unless the path is a valid excursion.
    void validate() const;
};

inline constexpr std::uint32_t kNoParent = 0xffffffffu;

/// Rooted plane tree in depth-first (preorder) numbering.
struct DiscreteTree {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> depth;

    std::size_t vertices() const { return parent.size(); }
    std::size_t edges() const { return parent.empty() ? 0 : parent.size() - 1; }
    std::uint32_t height() const;
    void validate() const;

    static DiscreteTree from_parents(std::vector<std::uint32_t> parent);
};

/// Offspring law with generating function f(s) = s + (1-s)^alpha / alpha.
class OffspringLaw {
public:
    explicit OffspringLaw(double alpha);

    double alpha() const { return alpha_; }
    double p(std::uint64_t k) const;
    /// P(xi > k).
    double survival(std::uint64_t k) const;
    /// sum_{j > k} P(xi > j), which equals E[xi] - sum_{j <= k} P(xi > j).
    double survival_tail_sum(std::uint64_t k) const;
    std::uint64_t sample(Rng& rng) const;
    /// Draw conditioned on xi > k.
    std::uint64_t sample_above(std::uint64_t k, Rng& rng) const;

    /// P(xi_hat > k) for the size-biased law P(xi_hat = k) = k p_k; k may exceed 2^64.
    double size_biased_survival(double k) const;
    /// Size-biased draw, returned as a double since the tail is too heavy for 64 bits.
    double sample_size_biased(Rng& rng) const;

    /// Index up to which the tabulated inverse CDF is used.
    std::uint64_t table_limit() const { return table_limit_; }

private:
    double alpha_;
    double tail_const_;
    std::uint64_t table_limit_;
    std::vector<double> surv_;  // surv_[k] = P(xi > k), nonincreasing

    std::vector<double> sb_surv_;  // sb_surv_[k] = P(xi_hat > k) for small k
    double survival_exact(double k) const;
    std::uint64_t inverse(double v) const;
};

inline constexpr std::uint64_t kDefaultTableLimit = 1000000;

OffspringLaw canonical_offspring_law(double alpha);

/// Populations above this size advance by their mean (relative fluctuation below z^(1/alpha - 1)).
inline constexpr double kMeanFieldPopulation = 1e9;

/// Total offspring of z independent individuals: multinomial splitting over small counts,
/// individual draws for the rest, the mean above kMeanFieldPopulation.
double offspring_sum(const OffspringLaw& law, double z, Rng& rng);

struct GwOptions {
    std::uint64_t max_vertices = 10000000;
    std::uint64_t retry_cap = 10000;
    /// Children of vertices at this depth are not generated (0 = no truncation).
    std::uint32_t max_depth = 0;
};

struct GwSample {
    DiscreteTree tree;
    std::uint64_t attempts = 0;
    std::uint64_t oversize_attempts = 0;
};

/// One unconditioned critical GW tree in preorder. Returns false once the
/// vertex budget is exceeded.
bool gw_tree(const OffspringLaw& law, const GwOptions& opt, Rng& rng, DiscreteTree& out);

GwSample gw_tree_conditioned_height(const OffspringLaw& law, std::uint32_t min_height, const GwOptions& opt,
                                    const SeedSpec& seed);

/// Contour (depth-first walk) coding of a plane tree.
ExcursionPath contour_path(const DiscreteTree& tree, double edge_len, double step_dt);

/// Random-walk bridge shifted at its first minimum (Vervaat), scaled to duration 1.
ExcursionPath normalized_brownian_excursion(std::uint64_t n_steps, const SeedSpec& seed);

struct ItoOptions {
    GwOptions gw;
    /// Truncate the tree above this height, in target distance units (infinite = none).
    double max_height = kInfinity;
};

struct ItoSample {
    ExcursionPath path;
    std::uint64_t attempts = 0;
    std::uint64_t sim_scale = 0;
};

/**
 * Contour of a canonical GW tree conditioned on height >= c_height, scaled so
 * that the coded tree approximates mech's law conditioned on H > c_height.
 *
 * The canonical law has mechanism c = 1/alpha at edge length 1/N. For a
 * target constant c the simulation runs at N = rho n with rho = (1/alpha)/c
 * and rescales distances and masses by rho.
 */
ItoSample ito_excursion_above_height(const BranchingMechanism& mech, double c_height, std::uint64_t n,
                                     const SeedSpec& seed, const ItoOptions& opt = {});

/// Discretization used to approximate mech at target scale n (see ito_excursion_above_height).
struct SimScale {
    std::uint64_t sim_n;
    double edge_len;
    double vertex_mass;  // contour time per vertex, 2 step_dt
    double pop_scale;    // sim_n^(1/(alpha-1)) individuals per unit of local time
};
SimScale sim_scale(const BranchingMechanism& mech, std::uint64_t n);

/**
 * Samplers of the l^a-pointed law through the size-biased (spine) GW tree.
 *
 * Ancestors of the pointed vertex have size-biased offspring and every other
 * vertex is an ordinary GW individual, so only the generations within the
 * ball are simulated. Both need eps <= a, and neither depends on a otherwise.
 */
/// m(B(sigma, eps)) in target mass units.
double pointed_mass_ball(const BranchingMechanism& mech, double eps, std::uint64_t n, Rng& rng);
/// l^a(B(sigma, eps)) in target local-time units.
double pointed_level_ball(const BranchingMechanism& mech, double eps, std::uint64_t n, Rng& rng);

struct PitmanPath {
    std::vector<double> b;  // Brownian path from a on the grid
    std::vector<double> r;  // a + B - 2 I
    double dx = 0.0;
    bool hit_zero = false;
};

/// Brownian motion from a with step variance dx until it hits 0 (a > 0) or reaches horizon.
/// The running minimum includes the exact bridge minimum between grid points.
PitmanPath pitman_path(double a, double horizon, double dx, const SeedSpec& seed);

/// Value R_horizon of the Pitman transform with a = 0, without storing the path.
double pitman_endpoint(double horizon, double dx, Rng& rng);

struct RwExcursion {
    std::vector<std::int64_t> path;
    std::uint64_t rejected = 0;
};

/// Simple walk from 1 absorbed at 0, returned as [0, 1, ..., 0]; rejects walks longer than max_len steps.
RwExcursion rw_positive_excursion(const SeedSpec& seed, std::uint64_t max_len, std::uint64_t retry_cap = 10000);

}  // namespace crtlab

#endif
