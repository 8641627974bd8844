#include "crtlab/gauge.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace crtlab {

namespace {

constexpr double kShrink = 1.0 - 1e-9;

// Largest r with d/d(log r) log g > 0 for g = r^a loglog(1/r)^d, d > 0, b = 0:
// x log x = d / a in the variable x = log(1/r).
double loglog_monotone_edge(double a, double d) {
    const double target = d / a;
    auto f = [target](double x) { return x * std::log(x) - target; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::bisect(f, 1.0, std::max(10.0, target + 10.0), tol, iters);
    return std::exp(-0.5 * (lo + hi));
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

GaugeFunction::GaugeFunction(GaugeKind kind, double a, double b, double d) : kind_(kind), a_(a), b_(b), d_(d) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(d))
        throw std::invalid_argument("gauge: need a > 0 and finite exponents");
    if (kind == GaugeKind::BrownianMass || kind == GaugeKind::BrownianLevel) {
        r_max_ = loglog_monotone_edge(a, d) * kShrink;
    } else if (d != 0.0) {
        // x = log(1/r) >= e keeps loglog >= 1; check the log-derivative stays positive there.
        const double slack = a - std::max(b, 0.0) / M_E - std::max(d, 0.0) / M_E;
        if (!(slack > 0.0)) throw std::invalid_argument("gauge: not monotone on (0, e^-e)");
        r_max_ = std::exp(-M_E) * kShrink;
    } else if (b > 0.0) {
        r_max_ = std::min(1.0, std::exp(-b / a)) * kShrink;
    } else if (b < 0.0) {
        r_max_ = kShrink;
    } else {
        r_max_ = std::numeric_limits<double>::infinity();
    }
}

GaugeFunction GaugeFunction::brownian_mass() {
    GaugeFunction g(GaugeKind::BrownianMass, 2.0, 0.0, 1.0);
    g.label_ = "brownian_mass";
    return g;
}

GaugeFunction GaugeFunction::brownian_level() {
    GaugeFunction g(GaugeKind::BrownianLevel, 1.0, 0.0, 1.0);
    g.label_ = "brownian_level";
    return g;
}

GaugeFunction GaugeFunction::stable_mass(double alpha, double u) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("gauge: alpha must lie in (1, 2]");
    GaugeFunction g(GaugeKind::StableMass, alpha / (alpha - 1.0), 1.0 / (alpha - 1.0), u);
    g.label_ = "stable_mass:" + fmt(alpha) + ":" + fmt(u);
    return g;
}

GaugeFunction GaugeFunction::stable_level(double alpha, double u) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("gauge: alpha must lie in (1, 2]");
    GaugeFunction g(GaugeKind::StableLevel, 1.0 / (alpha - 1.0), 1.0 / (alpha - 1.0), u);
    g.label_ = "stable_level:" + fmt(alpha) + ":" + fmt(u);
    return g;
}

GaugeFunction GaugeFunction::generic(double a, double b, double d) {
    GaugeFunction g(GaugeKind::Generic, a, b, d);
    g.label_ = "generic:" + fmt(a) + ":" + fmt(b) + ":" + fmt(d);
    return g;
}

GaugeFunction GaugeFunction::parse(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("gauge: empty spec");
    auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("gauge: bad number in '" + spec + "'");
        }
    };
    const std::string& head = parts[0];
    if (head == "brownian_mass" && parts.size() == 1) return brownian_mass();
    if (head == "brownian_level" && parts.size() == 1) return brownian_level();
    if (head == "stable_mass" && parts.size() == 3) return stable_mass(num(1), num(2));
    if (head == "stable_level" && parts.size() == 3) return stable_level(num(1), num(2));
    if (head == "generic" && parts.size() == 4) return generic(num(1), num(2), num(3));
    throw std::invalid_argument("gauge: unknown spec '" + spec + "'");
}

double GaugeFunction::operator()(double r) const {
    if (!in_domain(r)) throw std::invalid_argument("gauge: r = " + fmt(r) + " outside (0, " + fmt(r_max_) + ")");
    double log_g = a_ * std::log(r);
    if (b_ != 0.0 || d_ != 0.0) {
        const double x = -std::log(r);
        if (b_ != 0.0) log_g += b_ * std::log(x);
        if (d_ != 0.0) log_g += d_ * std::log(std::log(x));
    }
    return std::exp(log_g);
}

std::string GaugeFunction::describe() const { return label_; }

double doubling_constant(const GaugeFunction& g, double r_min) {
    const double r_hi = std::min(g.r_max(), 1.0) / 2.0;
    if (!(r_min > 0.0) || !(r_min < r_hi)) throw std::invalid_argument("doubling_constant: empty range");
    const double lo = std::log(r_min), hi = std::log(r_hi);
    double sup = 0.0;
    for (int i = 0; i < kDoublingGridPoints; ++i) {
        double r = std::exp(lo + (hi - lo) * i / (kDoublingGridPoints - 1));
        r = std::min(r, r_hi);
        const double two_r = std::min(2.0 * r, g.r_max() * kShrink);
        sup = std::max(sup, g(two_r) / g(r));
    }
    return sup * kDoublingPad;
}

}  // namespace crtlab
