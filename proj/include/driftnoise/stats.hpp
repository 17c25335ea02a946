#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace driftnoise {

/// Order-independent pairwise summation; used by every Monte Carlo reduction
/// so results do not depend on worker partitioning.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::int64_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> values);

/// Pearson correlation of paired samples.
double correlation(std::span<const double> xs, std::span<const double> ys);

/// One-sample Kolmogorov-Smirnov statistic against a CDF evaluated at the
/// sorted sample points (cdf_at[i] = F(sorted_sample[i])).
double ks_statistic(std::span<const double> sorted_cdf_values);

/// chi^2 statistic for independence of two +/-1 sign sequences (df = 1).
double chi2_sign_independence(std::span<const signed char> s1, std::span<const signed char> s2);

/// CDF of the arcsine law on [0,1]: P(argmin <= x) = (2/pi) asin(sqrt(x)).
double arcsine_cdf(double x);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace driftnoise
