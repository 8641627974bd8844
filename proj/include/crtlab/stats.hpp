#ifndef CRTLAB_STATS_HPP
#define CRTLAB_STATS_HPP

#include "crtlab/random.hpp"

#include <functional>
#include <vector>

namespace crtlab {

/// sup |F_n - F| of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample sup |F_n - G_m|.
double ks_two_sample_statistic(std::vector<double> x, std::vector<double> y);

/// Asymptotic Kolmogorov tail P(K > lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

/// p-value of a two-sample KS distance with Stephens' small-sample correction.
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

double mean(const std::vector<double>& x);

/// Standard error of the mean from the spread of `batches` contiguous batch means.
double batch_means_se(const std::vector<double>& x, std::size_t batches = 32);

/// Bootstrap standard error of the mean.
double bootstrap_se(const std::vector<double>& x, std::size_t resamples, Rng& rng);

/// Hill estimate of the tail index from the k largest values (positive data).
double hill_tail_index(std::vector<double> x, std::size_t k);

/// Least-squares slope of log empirical survival (i/n) against log x over the k largest values.
double loglog_tail_slope(std::vector<double> x, std::size_t k);

/// Standard error of a ratio of means sum(y)/sum(x) from batch means of (y, x) pairs.
double ratio_batch_se(const std::vector<double>& y, const std::vector<double>& x, std::size_t batches = 32);

/// CDF of |N(0, I_3)|, the Bessel(3) process at time 1 from 0.
double bessel3_cdf(double x);

}  // namespace crtlab

#endif
