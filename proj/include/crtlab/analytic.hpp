#ifndef CRTLAB_ANALYTIC_HPP
#define CRTLAB_ANALYTIC_HPP

#include <limits>
#include <stdexcept>
#include <string>

namespace crtlab {

/// Raised when a quantity cannot be represented in double precision.
class PrecisionLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Stable branching mechanism psi(u) = c * u^alpha with 1 < alpha <= 2.
 *
 * c = 1 is the normalization of the stable tree laws. The canonical
 * discrete offspring law in excursion.hpp converges to c = 1 / alpha.
 */
class BranchingMechanism {
public:
    explicit BranchingMechanism(double alpha = 2.0, double c = 1.0);

    static BranchingMechanism canonical_discrete(double alpha) { return BranchingMechanism(alpha, 1.0 / alpha); }

    double alpha() const { return alpha_; }
    double c() const { return c_; }
    double psi(double u) const;

    /// Fixed point (gamma / c)^(1/alpha) of v' = gamma - c v^alpha.
    double fixed_point(double gamma) const;

    /// alpha / (alpha - 1): mass scaling exponent.
    double mass_exponent() const { return alpha_ / (alpha_ - 1.0); }

    bool operator==(const BranchingMechanism&) const = default;

private:
    double alpha_;
    double c_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// v(eps) = Theta(H > eps), the root of  int_v^inf du / psi(u) = eps.
double height_tail(const BranchingMechanism& mech, double eps);

/// u_t(lambda) = (lambda^(1-alpha) + (alpha-1) c t)^(1/(1-alpha)).
/// lambda = infinity returns height_tail(t).
double csbp_laplace(const BranchingMechanism& mech, double t, double lambda);

/// Solution of v' = gamma - c v^alpha, v(0) = lambda (lambda may be infinite).
double v_joint(const BranchingMechanism& mech, double gamma, double lambda, double t);

/// v0_t(gamma) = v_joint(gamma, 0, t), below the fixed point.
double v0(const BranchingMechanism& mech, double gamma, double t);

/// v_inf_t(gamma) = v_joint(gamma, infinity, t), above the fixed point.
double v_inf(const BranchingMechanism& mech, double gamma, double t);

/// Relative distance of v0 / v_inf from the fixed point, in log form:
/// log(1 - v0/y*) and log(v_inf/y* - 1). Never underflows.
double v0_log_gap(const BranchingMechanism& mech, double gamma, double t);
double v_inf_log_gap(const BranchingMechanism& mech, double gamma, double t);

/// Laplace transform of m(B(sigma, eps)) under the l^a-pointed law (eps <= a).
double pointed_ball_laplace(const BranchingMechanism& mech, double lambda, double eps);

/// Laplace transform of l^1(B(sigma, eps)) under the l^1-pointed law, 0 < eps <= 1.
/// Closed form for c = 1; the integral form otherwise.
double level_ball_laplace(const BranchingMechanism& mech, double lambda, double eps);
double level_ball_laplace_closed(const BranchingMechanism& mech, double lambda, double eps);
double level_ball_laplace_integral(const BranchingMechanism& mech, double lambda, double eps);

/// v_inf_1(gamma) - v0_1(gamma) = Theta(1{H >= 1} exp(-gamma m(T_{<=1}))).
/// Throws PrecisionLoss when the difference underflows.
double small_mass_laplace(const BranchingMechanism& mech, double gamma);

/// log(v_inf_1(gamma) - v0_1(gamma)) / gamma^(1 - 1/alpha); tends to -alpha (c = 1).
/// Valid up to gamma = kSmallMassGammaCeiling.
double small_mass_log_laplace(const BranchingMechanism& mech, double gamma);
inline constexpr double kSmallMassGammaCeiling = 1e300;

/// E[m(T_{<=h}) | H > h] = h alpha / ((2 alpha - 1) v(h)).
double conditioned_lower_mass_mean(const BranchingMechanism& mech, double h);

/// Constants M1 = (2c)^-1, M2 = 2c^3 of the density comparison lemma.
struct DensityComparisonConstants {
    double lower;
    double upper;
};
DensityComparisonConstants density_comparison_constants(double doubling_constant);

}  // namespace crtlab

#endif
