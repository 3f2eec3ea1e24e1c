#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lecam {

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;
};

/// Kolmogorov survival function P(K > lambda).
double kolmogorov_sf(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
/// The p-value uses the Stephens small-sample correction.
TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Chi-square upper tail P(X > x) with k degrees of freedom.
double chi2_sf(double x, double k);

/// Pearson chi-square test. Cells with expected counts below `min_expected`
/// are pooled with their right neighbour. `fitted_params` reduces the dof.
TestResult chi_square_test(std::span<const double> observed, std::span<const double> expected,
                           double min_expected = 5.0, int fitted_params = 0);

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
};

MeanEstimate mean_stderr(std::span<const double> xs);

}  // namespace lecam
