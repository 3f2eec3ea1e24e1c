#pragma once

#include "lecam/approx.hpp"
#include "lecam/density.hpp"
#include "lecam/measures.hpp"
#include "lecam/path.hpp"

#include <optional>
#include <span>
#include <string>

#include <json.hpp>

namespace lecam {

/// Discrepancies between f and its approximations on one grid.
/// Hellinger here is the full convention: hellinger^2 = int (sqrt f - sqrt f_hat)^2 dnu0.
struct DiscrepancyReport {
    double a_m = 0.0;
    double b_m = 0.0;
    double c_m = 0.0;
    double l2 = 0.0;
    double hellinger = 0.0;
    double region_lo = 0.0;
    double region_hi = 0.0;
    std::string grid_id;

    /// l2^2/(4M) <= hellinger^2 <= l2^2/(4 kappa), up to `rel_tol`.
    [[nodiscard]] bool sandwich_holds(double kappa, double M, double rel_tol = 1e-6) const;
    [[nodiscard]] nlohmann::json to_json() const;
    static std::string csv_header();
    [[nodiscard]] std::string csv_row() const;
};

/// A_m, B_m, C_m, L2(f, f_hat) and H(f, f_hat). When `horizon` is given the
/// A, L2 and H integrals stop at it (the tail is bounded separately).
DiscrepancyReport compute_abc(const DensitySpec& f, const WeightFamily& weights,
                              std::optional<double> horizon = std::nullopt);

/// sqrt(int_region (sqrt f1 - sqrt f2)^2 dnu0).
double hellinger_levy(const DensitySpec& f1, const DensitySpec& f2, const BaseMeasure& nu0,
                      double lo, double hi);

/// H^2 = 1 - BC between Poisson(l1) and Poisson(l2).
double hellinger_poisson(double l1, double l2);

/// Upper bound on TV between N(mu1, s1^2) and N(mu2, s2^2).
double tv_bound_gaussian(double mu1, double s1, double mu2, double s2);

/// sqrt(int_0^T (h1 - h2)^2 / sigma^2 ds).
double l1_bound_gaussian_drift(const RealFn& h1, const RealFn& h2, const RealFn& sigma, double T);

/// sqrt(T/2) * H(nu1, nu2): bounds both the path-law Hellinger distance and
/// the TV between the time-T marginals.
double process_hellinger_bound(const DensitySpec& f1, const DensitySpec& f2, const BaseMeasure& nu0,
                               double lo, double hi, double T);

/// min(sum of entries, 2) for squared Hellinger distances in [0, 2].
double product_hellinger(std::span<const double> components);

/// 2 sqrt(sum lambda_i^2).
double bernoulli_poisson_tv_bound(std::span<const double> lambdas);

/// sqrt(T / kappa * L2(f, f_hat)^2).
double poisson_hat_bound(const DensitySpec& f, const HatDensity& hat, double kappa, double T);

/// Log-likelihood ratio U_t of the compound-Poisson laws with densities f1, f2
/// (relative to nu0, restricted to the region), observed up to time t.
double loglik_ratio_finite(const JumpPath& path, const DensitySpec& f1, const DensitySpec& f2,
                           const BaseMeasure& nu0, double lo, double hi, double t);

}  // namespace lecam
