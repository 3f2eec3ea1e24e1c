#include "lecam/bounds.hpp"
#include "lecam/error.hpp"
#include "lecam/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using namespace lecam;

TEST(Schedule, CompoundPoissonDiscrete) {
    const RateSchedule s = schedule_for(Example::CPP, 0.8, 1.0);
    EXPECT_NEAR(s.m_exponent, 0.24, 1e-15);
    EXPECT_NEAR(s.rate_exponent, -0.26, 1e-15);
    EXPECT_EQ(s.eps_rule, EpsRule::Zero);
    const RateSchedule low = schedule_for(Example::CPP, 0.6, 1.0);
    EXPECT_NEAR(low.m_exponent, 0.4, 1e-15);
    EXPECT_NEAR(low.rate_exponent, -0.1, 1e-15);
    // gamma = 1/4: the threshold (2 + 2 gamma)/(3 + 2 gamma) is 5/7.
    const RateSchedule rough = schedule_for(Example::CPP, 0.9, 0.25);
    EXPECT_NEAR(rough.m_exponent, 1.1 / 4.5, 1e-15);
    EXPECT_NEAR(rough.rate_exponent, -1.15 / 4.5, 1e-15);
    const RateSchedule rough_low = schedule_for(Example::CPP, 0.6, 0.25);
    EXPECT_NEAR(rough_low.m_exponent, 0.4, 1e-15);
    EXPECT_NEAR(rough_low.rate_exponent, -0.1, 1e-15);
}

TEST(Schedule, CompoundPoissonContinuous) {
    const RateSchedule a = schedule_continuous(Example::CPP, 0.25);
    EXPECT_NEAR(a.m_exponent, 1.0 / 2.25, 1e-15);
    EXPECT_NEAR(a.rate_exponent, -0.25 / 4.5, 1e-15);
    const RateSchedule b = schedule_continuous(Example::CPP, 1.0);
    EXPECT_NEAR(b.m_exponent, 0.4, 1e-15);
    EXPECT_NEAR(b.rate_exponent, -0.1, 1e-15);
}

TEST(Schedule, TruncatedGamma) {
    const RateSchedule a = schedule_for(Example::TruncGamma, 0.8);
    EXPECT_NEAR(a.rate_exponent, -0.3, 1e-15);
    EXPECT_NEAR(a.m_exponent, (5 - 3.2) / 14.0, 1e-15);
    EXPECT_EQ(a.eps_rule, EpsRule::PowerOfM);
    EXPECT_EQ(a.eps_exponent, 16.0);
    EXPECT_NEAR(schedule_for(Example::TruncGamma, 0.95).rate_exponent, -2.9 / 7.0, 1e-15);
    const RateSchedule c = schedule_continuous(Example::TruncGamma);
    EXPECT_NEAR(c.m_exponent, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.rate_exponent, -1.0 / 6.0, 1e-15);
    EXPECT_EQ(c.log_power, 2.5);
}

TEST(Schedule, InverseSquare) {
    const RateSchedule c = schedule_continuous(Example::InvSquare);
    EXPECT_NEAR(c.m_exponent, 9.0 / 17.0, 1e-15);
    EXPECT_NEAR(c.rate_exponent, -3.0 / 34.0, 1e-15);
    EXPECT_NEAR(c.log_power, 7.0 / 6.0, 1e-15);
    EXPECT_EQ(c.eta, 3.0);
    const RateSchedule d = schedule_for(Example::InvSquare, 0.8);
    EXPECT_NEAR(d.rate_exponent, 0.5 - 1.6 / 3.0, 1e-15);
    EXPECT_EQ(d.eta, 2.0);
    const RateSchedule e = schedule_for(Example::InvSquare, 0.95);
    EXPECT_NEAR(e.rate_exponent, -1.0 / 6.0 + 0.95 / 18.0, 1e-15);
    EXPECT_NEAR(e.log_power, 7.0 / 6.0, 1e-15);
}

TEST(Schedule, RejectsOutOfRange) {
    EXPECT_THROW(schedule_for(Example::CPP, 0.4), Error);
    EXPECT_THROW(schedule_for(Example::CPP, 1.0), Error);
    EXPECT_THROW(schedule_for(Example::InvSquare, 0.7), Error);
    EXPECT_THROW(schedule_for(Example::CPP, 0.8, 1.5), Error);
    EXPECT_THROW(example_from_string("gamma"), Error);
    EXPECT_EQ(example_from_string("invsquare"), Example::InvSquare);
    EXPECT_EQ(to_string(Example::TruncGamma), "truncgamma");
}

TEST(Schedule, InstanceMatchesExponents) {
    const RateSchedule s = schedule_for(Example::CPP, 0.8, 1.0);
    const double n = size_for_m(s, 64);
    const ScheduleInstance i = instantiate(s, n);
    EXPECT_EQ(i.m, 64);
    EXPECT_NEAR(i.delta, std::pow(n, -0.8), 1e-12 * i.delta);
    EXPECT_NEAR(i.T, n * i.delta, 1e-9 * i.T);
    EXPECT_FALSE(i.horizon.has_value());
}

TEST(Fit, ExactPowerLaw) {
    std::vector<double> x, y;
    for (double m : {8.0, 16.0, 32.0, 64.0, 128.0}) {
        x.push_back(m);
        y.push_back(3.0 * std::pow(m, -1.5));
    }
    const RateFit f = fit_rate(x, y);
    EXPECT_NEAR(f.slope, -1.5, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
    EXPECT_NEAR(f.se, 0.0, 1e-10);
    EXPECT_EQ(f.points, 5);
}

TEST(Fit, NoisyPowerLaw) {
    Philox rng(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> x, y;
    for (int m = 8; m <= 4096; m *= 2) {
        x.push_back(m);
        y.push_back(std::pow(m, -1.0) * std::exp(noise(rng)));
    }
    const RateFit f = fit_rate(x, y);
    EXPECT_NEAR(f.slope, -1.0, 0.05);
    EXPECT_LT(f.ci_lo, f.slope);
    EXPECT_GT(f.ci_hi, f.slope);
}

TEST(Fit, ConstantAndDegenerate) {
    const std::vector<double> x = {1, 2, 4, 8}, c = {5, 5, 5, 5};
    EXPECT_NEAR(fit_rate(x, c).slope, 0.0, 1e-14);
    const std::vector<double> same = {4, 4, 4, 4};
    try {
        (void)fit_rate(same, c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
    }
    const std::vector<double> three = {1, 2, 4};
    EXPECT_THROW(fit_rate(three, three), Error);
}

TEST(Terms, ConstantDensityLeavesOnlyPoissonGaussTerm) {
    const Grid g = build_grid(BaseMeasure::lebesgue_unit(), 16, 0.0);
    const DiscrepancyReport r = compute_abc(DensitySpec::constant(1.0), build_weights_linear(g));
    const BoundBreakdown b = theorem1_terms(r, g, ObservationScheme::continuous(100.0));
    EXPECT_NEAR(b.term("abc_term"), 0.0, 1e-5);
    EXPECT_NEAR(b.term("poisson_gauss_term"), std::sqrt(16.0 / (100.0 * g.mu())), 1e-12);
    double sum = 0.0;
    for (const auto& [name, v] : b.terms) sum += v;
    EXPECT_NEAR(b.total, sum, 1e-15);
    EXPECT_THROW(BoundBreakdown{}.add("x", -1.0), Error);
}

TEST(Terms, DiscreteMultinomialTerm) {
    const Grid g = build_grid(BaseMeasure::lebesgue_unit(), 16, 0.0);
    const DiscrepancyReport r = compute_abc(DensitySpec::constant(1.0), build_weights_linear(g));
    const BoundBreakdown b = theorem2_terms(r, g, 10000.0, 1e-3, 0.0);
    EXPECT_NEAR(b.term("multinomial_term"), 16.0 * std::log(16.0) / 100.0, 1e-12);
    EXPECT_EQ(b.term("truncation_term"), 0.0);
}

TEST(Terms, HorizonTail) {
    for (double H : {2.0, 5.0, 20.0})
        EXPECT_NEAR(horizon_tail_term(DensitySpec::inv_square_example(1.0), H), 8.0 / H, 1e-12);
    EXPECT_NEAR(inv_square_tail_term(1.0, 2.0), 4.0 * std::exp(-16.0) / 2.0, 1e-20);
}

TEST(Sweep, CompoundPoissonRate) {
    SweepConfig cfg;
    cfg.example = Example::CPP;
    cfg.ms = {32, 64, 128, 256};
    const auto rows = rate_sweep(cfg);
    const RateFit f = fit_sweep(rows);
    EXPECT_NEAR(f.slope, -1.5, 0.15);
}

class SweepMonotone : public ::testing::TestWithParam<std::tuple<Example, double>> {};

// Bound totals decrease along each schedule once m is moderately large.
// The truncated-gamma continuous schedule is excluded: its bound grows over
// these sizes, as does T^{-1/6} (ln T)^{5/2}.
TEST_P(SweepMonotone, TotalsDecrease) {
    const auto [ex, beta] = GetParam();
    SweepConfig cfg;
    cfg.example = ex;
    if (beta > 0) cfg.beta = beta;
    cfg.ms = {32, 64, 128, 256};
    const auto rows = rate_sweep(cfg);
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_LT(rows[i].bound.total, rows[i - 1].bound.total) << "m=" << rows[i].m;
}

INSTANTIATE_TEST_SUITE_P(Schedules, SweepMonotone,
                         ::testing::Values(std::make_tuple(Example::CPP, 0.0), std::make_tuple(Example::CPP, 0.8),
                                           std::make_tuple(Example::InvSquare, 0.0),
                                           std::make_tuple(Example::InvSquare, 0.8),
                                           std::make_tuple(Example::TruncGamma, 0.8)));

TEST(Sweep, CsvHasOneLinePerRow) {
    SweepConfig cfg;
    cfg.example = Example::CPP;
    cfg.ms = {8, 16};
    const auto rows = rate_sweep(cfg);
    std::ostringstream os;
    write_sweep_csv(os, rows);
    const std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
    EXPECT_EQ(s.rfind("m,n,delta,T,eps,H,quantity,", 0), 0u);
}
