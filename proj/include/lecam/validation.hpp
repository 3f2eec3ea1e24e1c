#pragma once

#include "lecam/approx.hpp"
#include "lecam/measures.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace lecam {

/// Outcome of one statistical check. `p_value` is NaN for checks that are
/// judged by a z-score or by exact agreement.
struct CheckResult {
    std::string name;
    bool pass = false;
    double statistic = 0.0;
    double p_value = std::numeric_limits<double>::quiet_NaN();
    nlohmann::json detail = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
};

struct BatteryConfig {
    std::uint64_t seed = 42;
    long long n_jumps = 100000;
    long long n_paths = 10000;
    long long n_reps = 10000;
    long long roundtrip_max_k = 1000000;
    double alpha = 0.01;
    double z_max = 3.0;
};

/// Exact CDF of f-hat dnu0 / iota on (eps, sup I], by quadrature between
/// cached knots.
class HatCdf {
public:
    explicit HatCdf(const HatDensity& hat);
    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double total() const { return total_; }

private:
    HatDensity hat_;
    std::vector<double> knots_;
    std::vector<double> cum_;
    double total_ = 0.0;
};

/// gaussian_to_poisson(poisson_to_gaussian(k, u)) == k for every k up to
/// roundtrip_max_k, with u spread over [-1/2, 1/2 - 1e-6].
CheckResult check_coupling_roundtrip(const BatteryConfig& cfg);

/// Jumps of f dnu0 restricted beyond eps, pushed through M, are KS-tested
/// against f-hat dnu0 / iota.
CheckResult check_redistribute_ks(const BatteryConfig& cfg, const DensitySpec& f,
                                  const WeightFamily& weights, std::uint64_t stream,
                                  const std::string& label);

/// Per-bin jump counts of n_paths compound-Poisson paths against
/// Poisson(T nu(J_j)), summed over bins into one chi-square.
CheckResult check_counts_chi2(const BatteryConfig& cfg, const DensitySpec& f, const Grid& grid,
                              double T, std::uint64_t stream);

/// Bernoulli surrogate samples, binned and pushed back through the kernel:
/// the nonzero values are KS-tested against f-hat dnu0 / iota and the share
/// of zeros against its binomial law.
CheckResult check_multinomial_ks(const BatteryConfig& cfg, const DensitySpec& f,
                                 const WeightFamily& weights, double delta, long long n,
                                 std::uint64_t stream);

/// Mean, Var[Y*_t] = nu0([eps, t])/(4T) and Cov(Y*_s, Y*_t) = nu0([eps, s ^ t])/(4T)
/// over n_reps replications, each within z_max standard errors.
std::vector<CheckResult> check_ystar_moments(const BatteryConfig& cfg, const DensitySpec& f,
                                             const WeightFamily& weights, double T,
                                             const std::vector<double>& times,
                                             std::uint64_t stream);

/// The default battery run by `lecam validate`.
std::vector<CheckResult> run_battery(const BatteryConfig& cfg);

}  // namespace lecam
