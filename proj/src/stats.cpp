#include "driftnoise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driftnoise {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> values) {
    MeanStderr r;
    r.n = static_cast<std::int64_t>(values.size());
    if (r.n == 0) return r;
    r.mean = pairwise_sum(values) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double d = values[i] - r.mean;
        sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
    r.stderr_mean = std::sqrt(var / static_cast<double>(r.n));
    return r;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("correlation: bad sample sizes");
    double mx = pairwise_sum(xs) / static_cast<double>(xs.size());
    double my = pairwise_sum(ys) / static_cast<double>(ys.size());
    std::vector<double> cxy(xs.size()), cxx(xs.size()), cyy(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        cxy[i] = dx * dy;
        cxx[i] = dx * dx;
        cyy[i] = dy * dy;
    }
    double denom = std::sqrt(pairwise_sum(cxx) * pairwise_sum(cyy));
    if (denom == 0.0) return 0.0;
    return pairwise_sum(cxy) / denom;
}

double ks_statistic(std::span<const double> sorted_cdf_values) {
    double n = static_cast<double>(sorted_cdf_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_cdf_values.size(); ++i) {
        double f = sorted_cdf_values[i];
        double lo = f - static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n - f;
        d = std::max({d, lo, hi});
    }
    return d;
}

double chi2_sign_independence(std::span<const signed char> s1, std::span<const signed char> s2) {
    if (s1.size() != s2.size() || s1.empty()) throw std::invalid_argument("chi2: bad sample sizes");
    double counts[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < s1.size(); ++i) counts[s1[i] > 0 ? 1 : 0][s2[i] > 0 ? 1 : 0] += 1.0;
    double n = static_cast<double>(s1.size());
    double chi2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double row = counts[i][0] + counts[i][1];
            double col = counts[0][j] + counts[1][j];
            double expect = row * col / n;
            if (expect > 0) {
                double d = counts[i][j] - expect;
                chi2 += d * d / expect;
            }
        }
    }
    return chi2;
}

double arcsine_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return (2.0 / M_PI) * std::asin(std::sqrt(x));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace driftnoise
