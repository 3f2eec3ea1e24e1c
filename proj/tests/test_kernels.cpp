#include "lecam/error.hpp"
#include "lecam/kernels.hpp"
#include "lecam/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace lecam;

namespace {

// CDF of V_2 dnu0 on the Lebesgue grid with m = 3 (linear weights).
double v2_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x <= 0.25) return 2.0 * x;
    if (x >= 0.75) return 1.0;
    return 0.5 + 4.0 * (0.75 * (x - 0.25) - 0.5 * (x * x - 0.0625));
}

Grid leb3() { return build_grid(BaseMeasure::lebesgue_unit(), 3, 0.0); }

}  // namespace

TEST(Counts, PerBin) {
    JumpPath p;
    p.T = 1.0;
    p.jumps = {{0.1, 0.3}, {0.2, 0.6}, {0.3, 0.61}};
    const BinCounts c = sufficient_stat_counts(p, leb3());
    EXPECT_EQ(c.count(2), 1);
    EXPECT_EQ(c.count(3), 2);
    EXPECT_EQ(c.total, -1);
}

TEST(Coupling, ForwardExamples) {
    EXPECT_NEAR(poisson_to_gaussian(5, 0.25), 2.0 * std::sqrt(5.25), 1e-15);
    EXPECT_NEAR(poisson_to_gaussian(5, 0.25), 4.58257569496, 1e-10);
    EXPECT_DOUBLE_EQ(poisson_to_gaussian(0, -0.25), -1.0);
    EXPECT_EQ(gaussian_to_poisson(-1.0), 0);
    EXPECT_EQ(gaussian_to_poisson(4.58257569496), 5);
}

TEST(Coupling, RoundTripsOverJitter) {
    Philox rng(3);
    for (long long k : {0LL, 1LL, 2LL, 17LL, 1000LL, 123456LL}) {
        for (int i = 0; i < 200; ++i) ASSERT_EQ(gaussian_to_poisson(poisson_to_gaussian(k, rng)), k);
        EXPECT_EQ(gaussian_to_poisson(poisson_to_gaussian(k, -0.5)), k);
    }
}

TEST(Coupling, PoissonMeanBecomesRootScale) {
    // For k ~ Poisson(lambda) the transform has mean close to 2 sqrt(lambda) and variance close to 1.
    Philox rng(11);
    std::poisson_distribution<long long> pois(400.0);
    std::vector<double> z(40000);
    for (double& v : z) v = poisson_to_gaussian(pois(rng), rng);
    const MeanEstimate m = mean_stderr(z);
    EXPECT_NEAR(m.mean, 40.0, 0.05);
    EXPECT_NEAR(m.se * std::sqrt(z.size()), 1.0, 0.03);
}

TEST(Kernel, SampleMFollowsWeightLaw) {
    const MKernel k(build_weights_linear(leb3()));
    Philox rng(17);
    std::vector<double> xs(20000);
    for (double& x : xs) x = sample_M(0.3, k, rng);
    EXPECT_GT(ks_test(xs, v2_cdf).p_value, 0.001);
    for (double& x : xs) x = sample_M(0.9, k, rng);
    EXPECT_GT(ks_test(xs, [](double x) { return 1.0 - v2_cdf(1.0 - x); }).p_value, 0.001);
}

TEST(Kernel, RedistributeKeepsTimesAndCount) {
    const MKernel k(build_weights_linear(leb3()));
    JumpPath p;
    p.T = 2.0;
    p.drift_rate = 0.25;
    p.jumps = {{0.1, 0.3}, {0.7, 0.55}, {1.9, 0.99}};
    Philox rng(1);
    const JumpPath q = redistribute_jumps(p, k, rng);
    ASSERT_EQ(q.jumps.size(), p.jumps.size());
    for (std::size_t i = 0; i < p.jumps.size(); ++i) EXPECT_EQ(q.jumps[i].time, p.jumps[i].time);
    EXPECT_EQ(q.T, p.T);
    EXPECT_EQ(q.drift_rate, p.drift_rate);
    EXPECT_NO_THROW(q.validate());
}

TEST(Kernel, RedistributeRejectsUnnormalizedWeights) {
    const Grid g = build_grid(BaseMeasure::one_over_x_unit(), 8, 1e-3);
    const MKernel k(build_weights_linear(g));
    JumpPath p;
    p.T = 1.0;
    p.jumps = {{0.5, 0.5}};
    Philox rng(1);
    EXPECT_THROW((void)redistribute_jumps(p, k, rng), Error);
}

TEST(Multinomial, BinningAndBack) {
    const Grid g = leb3();
    const std::vector<double> xs = {0.0, 0.2, 0.0, 0.7, 0.8, 0.5};
    const BinCounts c = bin_to_multinomial(xs, g);
    EXPECT_EQ(c.total, 6);
    EXPECT_EQ(c.zeros(), 2);
    EXPECT_EQ(c.count(2), 2);
    EXPECT_EQ(c.count(3), 2);
    const MKernel k(build_weights_linear(g));
    Philox rng(2);
    const std::vector<double> back = multinomial_to_samples(c, k, rng);
    ASSERT_EQ(back.size(), 6u);
    EXPECT_EQ(std::count(back.begin(), back.end(), 0.0), 2);
}

TEST(PulledBack, TimesRunFromZeroToOne) {
    const WeightFamily w = build_weights_corrected(build_grid(BaseMeasure::one_over_x_unit(), 16, 1e-2));
    const std::vector<double> lo = pulled_back_times(w, 1e-2);
    const std::vector<double> mid = pulled_back_times(w, 0.3);
    const std::vector<double> hi = pulled_back_times(w, 1.0);
    for (std::size_t i = 0; i < hi.size(); ++i) {
        EXPECT_NEAR(lo[i], 0.0, 1e-12);
        EXPECT_GE(mid[i], -1e-12);
        EXPECT_LE(mid[i], hi[i] + 1e-12);
        EXPECT_NEAR(hi[i], 1.0, 1e-8);
    }
}

TEST(KSharp, VarianceFunction) {
    EXPECT_NEAR(ksharp_variance(BaseMeasure::lebesgue_unit(), 2.0, 0.3), 0.3 / 8.0, 1e-12);
    EXPECT_NEAR(ksharp_variance(BaseMeasure::one_over_x_unit(), 2.0, 0.3), 0.09 / 16.0, 1e-12);
    EXPECT_EQ(ksharp_variance(BaseMeasure::lebesgue_unit(), 2.0, 0.0), 0.0);
}

TEST(KSharp, ZeroEpsIsIdentity) {
    Philox rng(4);
    const std::vector<double> ts = {0.1, 0.5, 1.0};
    const auto omega = [](double t) { return 3.0 * t; };
    const std::vector<double> y = extend_path_ksharp(omega, BaseMeasure::lebesgue_unit(), 0.0, 1.0, ts, rng);
    for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(y[i], omega(ts[i]), 1e-12);
}

TEST(KSharp, MomentsBelowEps) {
    Philox rng(8);
    const double eps = 0.2, T = 1.0;
    const std::vector<double> ts = {0.1, 0.5};
    const auto omega = [](double t) { return t; };
    std::vector<double> a, b;
    for (int r = 0; r < 20000; ++r) {
        const auto y = extend_path_ksharp(omega, BaseMeasure::lebesgue_unit(), eps, T, ts, rng);
        a.push_back(y[0]);
        b.push_back(y[1]);
    }
    const MeanEstimate ma = mean_stderr(a);
    const MeanEstimate mb = mean_stderr(b);
    EXPECT_NEAR(ma.mean, omega(eps) + 0.1, 4 * ma.se);
    EXPECT_NEAR(mb.mean, 0.5 + eps, 4 * mb.se);
    EXPECT_NEAR(ma.se * ma.se * a.size(), 0.1 / (4 * T), 0.002);
    EXPECT_NEAR(mb.se * mb.se * b.size(), eps / (4 * T), 0.003);
}

TEST(Drift, BaseDrift) {
    EXPECT_DOUBLE_EQ(base_drift(BaseMeasure::lebesgue_unit()), 0.5);
    EXPECT_NEAR(base_drift(BaseMeasure::one_over_x_unit()), 1.0, 1e-12);
    EXPECT_THROW(base_drift(BaseMeasure::one_over_x_squared()), Error);
}

TEST(Drift, Adjustments) {
    JumpPath p;
    p.T = 1.0;
    p.drift_rate = 2.0;
    p.jumps = {{0.5, 0.3}};
    const auto leb = BaseMeasure::lebesgue_unit();
    EXPECT_EQ(drift_adjust(p, leb, DriftDirection::ExtractJumps).drift_rate, 0.0);
    EXPECT_DOUBLE_EQ(drift_adjust(p, leb, DriftDirection::SubtractBaseDrift).drift_rate, 1.5);
    EXPECT_EQ(drift_adjust(p, leb, DriftDirection::ExtractJumps).jumps.size(), 1u);
}

TEST(Drift, ExtractAfterSubtractRestoresPureJumpPath) {
    JumpPath p;
    p.T = 1.0;
    p.jumps = {{0.2, 0.4}, {0.6, 0.9}};
    const auto leb = BaseMeasure::lebesgue_unit();
    const JumpPath q = drift_adjust(drift_adjust(p, leb, DriftDirection::SubtractBaseDrift), leb,
                                    DriftDirection::ExtractJumps);
    EXPECT_EQ(q.drift_rate, 0.0);
    ASSERT_EQ(q.jumps.size(), p.jumps.size());
    for (std::size_t i = 0; i < p.jumps.size(); ++i) {
        EXPECT_EQ(q.jumps[i].time, p.jumps[i].time);
        EXPECT_EQ(q.jumps[i].size, p.jumps[i].size);
    }
}
