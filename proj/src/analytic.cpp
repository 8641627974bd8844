#include "crtlab/analytic.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>

namespace crtlab {

namespace {

constexpr double kQuadTol = 1e-13;
constexpr double kSeriesEdge = 1e-5;

template <class F>
double integrate(F f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    // Double-exponential rule: the integrands have algebraic endpoint cusps for alpha < 2.
    static thread_local boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(f, lo, hi, kQuadTol);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// The ODE v' = gamma - c v^alpha is solved through its defining integrals,
// rescaled by the fixed point y* = (gamma/c)^(1/alpha). Writing v = y*(1 - w)
// below y* and v = y*(1 + w) above it, the elapsed time in units of
// y*/gamma is
//   K(w) = int_w^1 ds / (1 - (1-s)^alpha)      (below)
//   J(w) = int_w^inf ds / ((1+s)^alpha - 1)    (above)
// Both behave like -log(w)/alpha as w -> 0, so they are evaluated and
// inverted in the variable omega = -log(w), which keeps the gap w exact
// even when it is far below the double range.
class ScaledSolver {
public:
    explicit ScaledSolver(double alpha)
        : alpha_(alpha),
          a_((alpha - 1.0) / 2.0),
          b_((alpha - 1.0) * (alpha - 2.0) / 6.0),
          beta_(alpha / (alpha - 1.0)) {
        r0_ = r_head(kSeriesEdge) + integrate([this](double s) { return r(s); }, kSeriesEdge, 1.0);
        q0_ = q_head(kSeriesEdge) + integrate([this](double s) { return q(s); }, kSeriesEdge, 1.0);
        j1_ = j_big(1.0);
    }

    // K as a function of omega = -log(w), omega >= 0.
    double k_of(double omega) const {
        if (omega <= 0.0) return 0.0;
        const double w = std::exp(-omega);
        return omega / alpha_ + r_tail(w);
    }

    // J as a function of omega = -log(w), any real omega.
    double j_of(double omega) const {
        if (omega >= 0.0) {
            const double w = std::exp(-omega);
            return omega / alpha_ + q_tail(w) + j1_;
        }
        return j_big_log(-omega);
    }

    double solve_lower(double target) const {
        if (target <= 0.0) return 0.0;
        double lo = std::max(0.0, alpha_ * (target - r0_));
        double hi = alpha_ * target;
        return newton_bracketed([this](double om) { return k_of(om); }, [this](double om) { return dk(om); }, target, lo, hi);
    }

    double solve_upper(double target) const {
        if (target <= 0.0) throw std::invalid_argument("upper branch needs positive elapsed time");
        double lo, hi;
        if (target >= j1_) {
            lo = alpha_ * (target - j1_);
            hi = alpha_ * (target - j1_ - q0_);
        } else {
            hi = 0.0;
            lo = -1.0;
            while (j_of(lo) > target) {
                lo *= 2.0;
                if (lo < -1e6) throw PrecisionLoss("upper branch bracket failed");
            }
        }
        return newton_bracketed([this](double om) { return j_of(om); }, [this](double om) { return dj(om); }, target, lo, hi);
    }

private:
    double alpha_, a_, b_, beta_;
    double r0_ = 0, q0_ = 0, j1_ = 0;

    double r(double s) const {
        if (s < kSeriesEdge) return (a_ + (a_ * a_ - b_) * s) / alpha_;
        const double d = -std::expm1(alpha_ * std::log1p(-s));
        return 1.0 / d - 1.0 / (alpha_ * s);
    }

    double q(double s) const {
        if (s < kSeriesEdge) return (-a_ + (a_ * a_ - b_) * s) / alpha_;
        const double d = std::expm1(alpha_ * std::log1p(s));
        return 1.0 / d - 1.0 / (alpha_ * s);
    }

    // int_w^1 r(s) ds
    double r_tail(double w) const {
        if (w >= 1.0) return 0.0;
        if (w >= 1e-3) return integrate([this](double s) { return r(s); }, w, 1.0);
        return r0_ - r_head(w);
    }

    // int_0^w r(s) ds, series below kSeriesEdge so no quadrature panel straddles the switch.
    double r_head(double w) const {
        const double e = std::min(w, kSeriesEdge);
        const double series = (a_ * e + (a_ * a_ - b_) * e * e / 2.0) / alpha_;
        return series + integrate([this](double s) { return r(s); }, kSeriesEdge, w);
    }

    double q_head(double w) const {
        const double e = std::min(w, kSeriesEdge);
        const double series = (-a_ * e + (a_ * a_ - b_) * e * e / 2.0) / alpha_;
        return series + integrate([this](double s) { return q(s); }, kSeriesEdge, w);
    }

    double q_tail(double w) const {
        if (w >= 1.0) return 0.0;
        if (w >= 1e-3) return integrate([this](double s) { return q(s); }, w, 1.0);
        return q0_ - q_head(w);
    }

    // J(w) for w >= 1 through u = (1+s)^(1-alpha).
    double j_big(double w) const { return j_big_log(std::log(w)); }

    double j_big_log(double log_w) const {
        const double log1p_w = log_w > 36.0 ? log_w + std::exp(-log_w) : std::log1p(std::exp(log_w));
        const double upper = std::exp((1.0 - alpha_) * log1p_w);
        const double inner = integrate([this](double u) { return 1.0 / (1.0 - std::pow(u, beta_)); }, 0.0, upper);
        return inner / (alpha_ - 1.0);
    }

    // dK/domega = w / (1 - (1-w)^alpha)
    double dk(double omega) const {
        const double w = std::exp(-omega);
        if (w < kSeriesEdge) return 1.0 / alpha_ + a_ * w / alpha_;
        return w / -std::expm1(alpha_ * std::log1p(-w));
    }

    // dJ/domega = w / ((1+w)^alpha - 1)
    double dj(double omega) const {
        if (omega < -30.0) return std::exp(-omega + alpha_ * omega);
        const double w = std::exp(-omega);
        if (w < kSeriesEdge) return 1.0 / alpha_ - a_ * w / alpha_;
        return w / std::expm1(alpha_ * std::log1p(w));
    }

    // Newton on an increasing function, falling back to bisection when a step leaves the bracket.
    template <class F, class DF>
    static double newton_bracketed(F f, DF df, double target, double lo, double hi) {
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double g = f(x) - target;
            if (g == 0.0) return x;
            if (g < 0.0)
                lo = x;
            else
                hi = x;
            double next = x - g / df(x);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - x);
            x = next;
            if (step <= 4e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) break;
        }
        return x;
    }
};

void check_gamma_t(double gamma, double t) {
    require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive and finite");
    require(t > 0.0, "t must be positive");
}

}  // namespace

BranchingMechanism::BranchingMechanism(double alpha, double c) : alpha_(alpha), c_(c) {
    require(alpha > 1.0 && alpha <= 2.0, "alpha must lie in (1, 2], got " + std::to_string(alpha));
    require(c > 0.0 && std::isfinite(c), "mechanism constant c must be positive, got " + std::to_string(c));
}

double BranchingMechanism::psi(double u) const { return c_ * std::pow(u, alpha_); }

double BranchingMechanism::fixed_point(double gamma) const { return std::pow(gamma / c_, 1.0 / alpha_); }

double height_tail(const BranchingMechanism& mech, double eps) {
    require(eps > 0.0, "height_tail: eps must be positive");
    if (std::isinf(eps)) return 0.0;
    const double a = mech.alpha();
    return std::pow((a - 1.0) * mech.c() * eps, -1.0 / (a - 1.0));
}

double csbp_laplace(const BranchingMechanism& mech, double t, double lambda) {
    require(t >= 0.0, "csbp_laplace: t must be nonnegative");
    require(lambda >= 0.0, "csbp_laplace: lambda must be nonnegative");
    if (lambda == 0.0) return 0.0;
    if (t == 0.0) return lambda;
    if (std::isinf(lambda)) return height_tail(mech, t);
    const double a = mech.alpha();
    const double ct = mech.c() * t;
    if (a == 2.0) return lambda / (1.0 + lambda * ct);
    return lambda * std::pow(1.0 + (a - 1.0) * ct * std::pow(lambda, a - 1.0), 1.0 / (1.0 - a));
}

double v_joint(const BranchingMechanism& mech, double gamma, double lambda, double t) {
    require(gamma >= 0.0 && std::isfinite(gamma), "v_joint: gamma must be nonnegative");
    require(lambda >= 0.0, "v_joint: lambda must be nonnegative");
    require(t >= 0.0, "v_joint: t must be nonnegative");
    if (t == 0.0) return lambda;
    if (gamma == 0.0) return csbp_laplace(mech, t, lambda);

    const double ystar = mech.fixed_point(gamma);
    const double tau = t * gamma / ystar;
    if (lambda == ystar) return ystar;

    ScaledSolver solver(mech.alpha());
    if (lambda < ystar) {
        const double w = 1.0 - lambda / ystar;
        const double start = solver.k_of(-std::log(w));
        const double omega = solver.solve_lower(start + tau);
        return -ystar * std::expm1(-omega);
    }
    double start = 0.0;
    if (!std::isinf(lambda)) start = solver.j_of(-std::log(lambda / ystar - 1.0));
    const double omega = solver.solve_upper(start + tau);
    return ystar * (1.0 + std::exp(-omega));
}

double v0(const BranchingMechanism& mech, double gamma, double t) {
    check_gamma_t(gamma, t);
    return v_joint(mech, gamma, 0.0, t);
}

double v_inf(const BranchingMechanism& mech, double gamma, double t) {
    require(gamma >= 0.0 && std::isfinite(gamma), "v_inf: gamma must be nonnegative");
    require(t > 0.0, "v_inf: t must be positive");
    return v_joint(mech, gamma, kInfinity, t);
}

double v0_log_gap(const BranchingMechanism& mech, double gamma, double t) {
    check_gamma_t(gamma, t);
    const double tau = t * gamma / mech.fixed_point(gamma);
    return -ScaledSolver(mech.alpha()).solve_lower(tau);
}

double v_inf_log_gap(const BranchingMechanism& mech, double gamma, double t) {
    check_gamma_t(gamma, t);
    const double tau = t * gamma / mech.fixed_point(gamma);
    return -ScaledSolver(mech.alpha()).solve_upper(tau);
}

// With v' = lambda - c v^alpha the substitution dr = dv / (lambda - c v^alpha) gives
// alpha c int_0^eps v0_r^(alpha-1) dr = -log(1 - c v0_eps^alpha / lambda), and
// 1 - c v^alpha / lambda = 1 - (1 - w)^alpha in the scaled gap w.
double pointed_ball_laplace(const BranchingMechanism& mech, double lambda, double eps) {
    require(eps > 0.0 && std::isfinite(eps), "pointed_ball_laplace: eps must be positive");
    require(lambda >= 0.0 && std::isfinite(lambda), "pointed_ball_laplace: lambda must be nonnegative");
    if (lambda == 0.0) return 1.0;
    const double a = mech.alpha();
    const double tau = eps * lambda / mech.fixed_point(lambda);
    const double omega = ScaledSolver(a).solve_lower(tau);
    return -std::expm1(a * std::log1p(-std::exp(-omega)));
}

double level_ball_laplace_closed(const BranchingMechanism& mech, double lambda, double eps) {
    const double a = mech.alpha();
    return std::pow(1.0 + (a - 1.0) * mech.c() * std::pow(lambda, a - 1.0) * eps / 2.0, -a / (a - 1.0));
}

double level_ball_laplace_integral(const BranchingMechanism& mech, double lambda, double eps) {
    if (lambda == 0.0) return 1.0;
    const double a = mech.alpha();
    const double integral =
        integrate([&](double r) { return std::pow(csbp_laplace(mech, r, lambda), a - 1.0); }, 0.0, eps / 2.0);
    return std::exp(-a * mech.c() * integral);
}

double level_ball_laplace(const BranchingMechanism& mech, double lambda, double eps) {
    require(eps > 0.0 && eps <= 1.0, "level_ball_laplace: eps must lie in (0, 1]");
    require(lambda >= 0.0 && std::isfinite(lambda), "level_ball_laplace: lambda must be nonnegative");
    if (lambda == 0.0) return 1.0;
    if (mech.c() == 1.0) return level_ball_laplace_closed(mech, lambda, eps);
    return level_ball_laplace_integral(mech, lambda, eps);
}

namespace {

double small_mass_log_difference(const BranchingMechanism& mech, double gamma) {
    require(gamma > 0.0, "small_mass: gamma must be positive");
    if (!(gamma <= kSmallMassGammaCeiling)) throw PrecisionLoss("small_mass: gamma above the documented ceiling");
    const double a = mech.alpha();
    const double ystar = mech.fixed_point(gamma);
    const double tau = gamma / ystar;
    ScaledSolver solver(a);
    const double om_lo = solver.solve_lower(tau);
    const double om_hi = solver.solve_upper(tau);
    const double m = std::min(om_lo, om_hi);
    const double log_gap_sum = -m + std::log1p(std::exp(-std::abs(om_lo - om_hi)));
    return (std::log(gamma) - std::log(mech.c())) / a + log_gap_sum;
}

}  // namespace

double small_mass_laplace(const BranchingMechanism& mech, double gamma) {
    const double log_diff = small_mass_log_difference(mech, gamma);
    const double value = std::exp(log_diff);
    if (!(value >= std::numeric_limits<double>::min()))
        throw PrecisionLoss("small_mass_laplace: v_inf - v0 underflows at gamma = " + std::to_string(gamma));
    return value;
}

double small_mass_log_laplace(const BranchingMechanism& mech, double gamma) {
    const double log_diff = small_mass_log_difference(mech, gamma);
    const double value = log_diff / std::pow(gamma, 1.0 - 1.0 / mech.alpha());
    if (!std::isfinite(value)) throw PrecisionLoss("small_mass_log_laplace: non-finite result");
    return value;
}

double conditioned_lower_mass_mean(const BranchingMechanism& mech, double h) {
    require(h > 0.0, "conditioned_lower_mass_mean: h must be positive");
    const double a = mech.alpha();
    return h * a / ((2.0 * a - 1.0) * height_tail(mech, h));
}

DensityComparisonConstants density_comparison_constants(double doubling_constant) {
    require(doubling_constant > 0.0, "doubling constant must be positive");
    const double c = doubling_constant;
    return {1.0 / (2.0 * c), 2.0 * c * c * c};
}

}  // namespace crtlab
