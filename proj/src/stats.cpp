#include "crtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crtlab {

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample_statistic(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample_statistic: empty sample");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
    const double sq = std::sqrt(ne);
    return kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
}

double mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

namespace {

std::vector<double> batch_sums(const std::vector<double>& x, std::size_t batches) {
    std::vector<double> out(batches, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i * batches / x.size()] += x[i];
    return out;
}

std::vector<double> batch_sizes(std::size_t n, std::size_t batches) {
    std::vector<double> out(batches, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i * batches / n] += 1.0;
    return out;
}

}  // namespace

double batch_means_se(const std::vector<double>& x, std::size_t batches) {
    if (batches < 2 || x.size() < batches) throw std::invalid_argument("batch_means_se: need at least `batches` samples");
    const std::vector<double> sums = batch_sums(x, batches), sizes = batch_sizes(x.size(), batches);
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) means[b] = sums[b] / sizes[b];
    const double m = mean(means);
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    const double var_batch = ss / static_cast<double>(batches - 1);
    return std::sqrt(var_batch / static_cast<double>(batches));
}

double bootstrap_se(const std::vector<double>& x, std::size_t resamples, Rng& rng) {
    if (x.size() < 2 || resamples < 2) throw std::invalid_argument("bootstrap_se: sample too small");
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[rng.below(x.size())];
        m = s / static_cast<double>(x.size());
    }
    const double mu = mean(means);
    double ss = 0.0;
    for (double v : means) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(resamples - 1));
}

double hill_tail_index(std::vector<double> x, std::size_t k) {
    if (k < 2 || k >= x.size()) throw std::invalid_argument("hill_tail_index: need 2 <= k < n");
    std::sort(x.begin(), x.end(), std::greater<>());
    const double ref = x[k];
    if (!(ref > 0.0)) throw std::invalid_argument("hill_tail_index: data must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / ref);
    return static_cast<double>(k) / s;
}

double loglog_tail_slope(std::vector<double> x, std::size_t k) {
    if (k < 2 || k > x.size()) throw std::invalid_argument("loglog_tail_slope: need 2 <= k <= n");
    std::sort(x.begin(), x.end(), std::greater<>());
    if (!(x[k - 1] > 0.0)) throw std::invalid_argument("loglog_tail_slope: data must be positive");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double lx = std::log(x[i]), ly = std::log((static_cast<double>(i) + 1.0) / n);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double kk = static_cast<double>(k), den = kk * sxx - sx * sx;
    if (!(den > 0.0)) throw std::invalid_argument("loglog_tail_slope: top values are tied");
    return (kk * sxy - sx * sy) / den;
}

double ratio_batch_se(const std::vector<double>& y, const std::vector<double>& x, std::size_t batches) {
    if (y.size() != x.size() || x.size() < batches || batches < 2)
        throw std::invalid_argument("ratio_batch_se: need paired samples, at least `batches` of them");
    const std::vector<double> sy = batch_sums(y, batches), sx = batch_sums(x, batches);
    const double ry = std::accumulate(sy.begin(), sy.end(), 0.0), rx = std::accumulate(sx.begin(), sx.end(), 0.0);
    const double r = ry / rx;
    const double mx = rx / static_cast<double>(batches);
    double ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const double resid = sy[b] - r * sx[b];
        ss += resid * resid;
    }
    const double var = ss / static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches)) / mx;
}

double bessel3_cdf(double x) {
    if (x <= 0.0) return 0.0;
    return std::erf(x / std::sqrt(2.0)) - std::sqrt(2.0 / M_PI) * x * std::exp(-x * x / 2.0);
}

}  // namespace crtlab
