#include "lecam/stats.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

namespace lecam {

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Jacobi-transformed series converges fast for small lambda.
        const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
        double s = 0.0;
        for (int k = 1; k < 40; k += 2) s += std::pow(y, k * k);
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    require(!samples.empty(), "ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d), 0};
}

double chi2_sf(double x, double k) {
    require(k > 0.0, "chi2_sf: degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

TestResult chi_square_test(std::span<const double> observed, std::span<const double> expected,
                           double min_expected, int fitted_params) {
    require(observed.size() == expected.size() && !observed.empty(),
            "chi_square_test: observed and expected must have equal, nonzero length");
    std::vector<double> o;
    std::vector<double> e;
    double acc_o = 0.0;
    double acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += expected[i];
        if (acc_e >= min_expected) {
            o.push_back(acc_o);
            e.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (e.empty()) {
            o.push_back(acc_o);
            e.push_back(acc_e);
        } else {
            o.back() += acc_o;
            e.back() += acc_e;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
        require(e[i] > 0.0, "chi_square_test: zero expected count");
        const double d = o[i] - e[i];
        stat += d * d / e[i];
    }
    const int dof = static_cast<int>(o.size()) - 1 - fitted_params;
    require(dof >= 1, "chi_square_test: not enough cells after pooling");
    return {stat, chi2_sf(stat, dof), dof};
}

MeanEstimate mean_stderr(std::span<const double> xs) {
    require(xs.size() >= 2, "mean_stderr: need at least two values");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace lecam
