#pragma once

#include "lecam/approx.hpp"
#include "lecam/measures.hpp"
#include "lecam/path.hpp"
#include "lecam/rng.hpp"
#include "lecam/sampling.hpp"

#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace lecam {

/// Jump counts per bin J_2..J_m. For multinomial vectors `total` is n and
/// Z_1 = n - sum of the bin counts; otherwise `total` is -1.
struct BinCounts {
    std::vector<long long> counts;
    long long total = -1;

    [[nodiscard]] long long count(int j) const { return counts[j - 2]; }
    [[nodiscard]] long long zeros() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// The kernel M(x, .) = sum_j 1_{J_j}(x) V_j nu0: given x in J_j, draws from
/// the law V_j dnu0 / int V_j dnu0. Tables for every j are built up front.
class MKernel {
public:
    explicit MKernel(const WeightFamily& weights, int cells = 2048);

    [[nodiscard]] const WeightFamily& weights() const { return w_; }
    /// Draw from M(x, .); x must lie beyond eps.
    [[nodiscard]] double sample(double x, Philox& rng) const;
    /// Draw from the normalized V_j dnu0.
    [[nodiscard]] double sample_bin(int j, Philox& rng) const;

private:
    WeightFamily w_;
    std::vector<InverseCdfTable> tables_;
};

BinCounts sufficient_stat_counts(const JumpPath& path, const Grid& grid);

double sample_M(double x, const MKernel& kernel, Philox& rng);

/// Replaces each jump size y in J_j by a draw from M(y, .); times are kept.
/// Requires normalized weights and all jumps beyond eps.
JumpPath redistribute_jumps(const JumpPath& path, const MKernel& kernel, Philox& rng);

/// z = 2 sgn(k + u) sqrt|k + u| for jitter u in [-1/2, 1/2).
double poisson_to_gaussian(long long k, double jitter);
double poisson_to_gaussian(long long k, Philox& rng);
/// Nearest integer to sgn(z) (z/2)^2, clamped at 0. Inverts the forward map
/// except for jitter within about 1e-14 k of +1/2, where the two preimages
/// coincide in floating point.
long long gaussian_to_poisson(double z);

/// Z_1 counts zeros, Z_j counts samples in J_j.
BinCounts bin_to_multinomial(std::span<const double> samples, const Grid& grid);

/// Z_1 zeros and, for every unit of Z_j, one draw from M(x_j*, .), shuffled.
std::vector<double> multinomial_to_samples(const BinCounts& counts, const MKernel& kernel,
                                           Philox& rng);

/// F_j(t) = int_eps^t V_j dnu0 for all j = 2..m.
std::vector<double> pulled_back_times(const WeightFamily& weights, double t);

/// Y*_t = sum_j Ybar_j F_j(t) + (2 sqrt T)^{-1} sum_j sqrt(nu0(J_j)) B_j(F_j(t)),
/// with one independent standard Brownian bridge B_j per bin, sampled only at
/// the pulled-back times of `eval_times`. `bar_increments` holds Ybar_2..Ybar_m.
std::vector<double> construct_ystar(std::span<const double> bar_increments,
                                    const WeightFamily& weights, double T,
                                    std::span<const double> eval_times, Philox& rng);

/// Variance function tau(t) = int_0^t (4 T g)^{-1} dz of the Gaussian added on [0, eps].
double ksharp_variance(const BaseMeasure& nu0, double T, double t);

/// Extends a trajectory observed beyond eps to all of I: the output is
/// omega(max(t, eps)) + B_{min(t, eps)}, with B Gaussian of mean t and
/// covariance tau(s ^ t). Returned at `eval_times` (increasing).
std::vector<double> extend_path_ksharp(const std::function<double(double)>& omega,
                                       const BaseMeasure& nu0, double eps, double T,
                                       std::span<const double> eval_times, Philox& rng);

enum class DriftDirection { ExtractJumps, SubtractBaseDrift };

/// gamma^{nu0} = int_{(0,1]} y nu0(dy); throws when infinite.
double base_drift(const BaseMeasure& nu0);

/// ExtractJumps keeps only the jump part (drift 0); SubtractBaseDrift lowers
/// the drift rate by gamma^{nu0}.
JumpPath drift_adjust(const JumpPath& path, const BaseMeasure& nu0, DriftDirection direction);

}  // namespace lecam
