#ifndef CRTLAB_GAUGE_HPP
#define CRTLAB_GAUGE_HPP

#include <string>

namespace crtlab {

enum class GaugeKind { BrownianMass, BrownianLevel, StableMass, StableLevel, Generic };

/**
 * Gauge g(r) = r^a (log 1/r)^b (log log 1/r)^d on (0, r_max).
 *
 * The named kinds are shorthands:
 *   BrownianMass      r^2 loglog(1/r)
 *   BrownianLevel     r loglog(1/r)
 *   StableMass(u)     r^(alpha/(alpha-1)) (log 1/r)^(1/(alpha-1)) (loglog 1/r)^u
 *   StableLevel(u)    r^(1/(alpha-1))     (log 1/r)^(1/(alpha-1)) (loglog 1/r)^u
 */
class GaugeFunction {
public:
    static GaugeFunction brownian_mass();
    static GaugeFunction brownian_level();
    static GaugeFunction stable_mass(double alpha, double u);
    static GaugeFunction stable_level(double alpha, double u);
    static GaugeFunction generic(double a, double b, double d);

    /// Parses "brownian_mass", "stable_mass:1.5:-2", "generic:2:0:1", ...
    static GaugeFunction parse(const std::string& spec);

    GaugeKind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double d() const { return d_; }
    double r_max() const { return r_max_; }

    double operator()(double r) const;
    bool in_domain(double r) const { return r > 0.0 && r < r_max_; }

    std::string describe() const;

private:
    GaugeFunction(GaugeKind kind, double a, double b, double d);

    GaugeKind kind_;
    double a_, b_, d_;
    double r_max_;
    std::string label_;
};

/// sup of g(2r)/g(r) on a log grid over [r_min, r_max/2], padded by 1.01.
double doubling_constant(const GaugeFunction& g, double r_min);

inline constexpr int kDoublingGridPoints = 1024;
inline constexpr double kDoublingPad = 1.01;

}  // namespace crtlab

#endif
