// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Tolerances, sizes and seeds are fixed below.

#include "lecam/approx.hpp"
#include "lecam/bounds.hpp"
#include "lecam/functionals.hpp"
#include "lecam/kernels.hpp"
#include "lecam/measures.hpp"
#include "lecam/quadrature.hpp"
#include "lecam/simulate.hpp"
#include "lecam/stats.hpp"
#include "lecam/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace lecam;

namespace {

constexpr double kGridRelTol = 1e-9;
constexpr double kRootTol = 1e-10;
constexpr double kNormTol = 1e-6;
constexpr double kCppSlope = -1.5, kCppSlopeTol = 0.15;
constexpr double kGammaSlopeLo = -2.3, kGammaSlopeHi = -1.7;
constexpr double kInvSqSlope = -0.5, kInvSqSlopeTol = 0.1;
constexpr double kCouplingConst = 16.0;
constexpr long long kCouplingDraws = 1000000;
constexpr double kSeriesTol = 1e-10;
constexpr double kZMax = 3.0;
constexpr int kDominanceCases = 20;

struct Outcome {
    bool pass = false;
    std::string detail;
};

QuadOptions fine() {
    QuadOptions o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-12;
    o.max_subintervals = 50000;
    return o;
}

double raw(const BaseMeasure& nu0, const RealFn& h, double a, double b) {
    return integrate_or_throw([&](double x) { return h(x) * nu0.density(x); }, a, b, fine());
}

double raw_weight_integral(const WeightFamily& w, int j) {
    const Grid& g = w.grid();
    const auto [lo, hi] = w.support(j);
    std::vector<double> bp = {std::max(lo, g.eps())};
    for (double k : w.kinks())
        if (k > bp.back() && k < hi) bp.push_back(k);
    bp.push_back(hi);
    double s = 0.0;
    for (std::size_t i = 1; i < bp.size(); ++i)
        s += raw(g.measure(), [&](double x) { return w.eval(j, x); }, bp[i - 1], bp[i]);
    return s;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Equal masses and centroids against plain quadrature; the numeric
// measure against closed forms.
Outcome grid_exactness() {
    double worst = 0.0;
    const BaseMeasure kinds[] = {BaseMeasure::lebesgue_unit(), BaseMeasure::one_over_x_unit(),
                                 BaseMeasure::one_over_x_squared()};
    const double epss[] = {0.0, 1e-3, 0.5};
    for (int k = 0; k < 3; ++k) {
        for (int m : {3, 8, 64}) {
            const Grid g = build_grid(kinds[k], m, epss[k]);
            for (int j = 2; j <= m; ++j) {
                const double mass = raw(kinds[k], [](double) { return 1.0; }, g.v(j - 1), g.v(j));
                worst = std::max(worst, std::abs(mass / g.mu() - 1.0));
                if (!g.has_x_star(j)) continue;
                const double first = raw(kinds[k], [](double x) { return x; }, g.v(j - 1), g.v(j));
                worst = std::max(worst, std::abs(g.x_star(j) * mass / first - 1.0));
            }
        }
    }
    double generic = 0.0;
    const BaseMeasure num = BaseMeasure::numeric([](double) { return 1.0; }, 0.0, 1.0);
    for (int m : {3, 8, 64}) {
        const Grid a = build_grid(num, m, 0.0);
        const Grid b = build_grid(BaseMeasure::lebesgue_unit(), m, 0.0);
        for (int j = 1; j <= m; ++j) generic = std::max(generic, std::abs(a.v(j) - b.v(j)));
        for (int j = 2; j <= m; ++j) generic = std::max(generic, std::abs(a.x_star(j) - b.x_star(j)));
    }
    return {worst <= kGridRelTol && generic <= kRootTol,
            "max rel err " + fmt("%.2e", worst) + ", numeric vs closed form " + fmt("%.2e", generic)};
}

// 2. int V_j dnu0 = 1 for every j, both families where defined.
Outcome weight_normalization() {
    struct Case {
        const char* label;
        BaseMeasure nu0;
        double eps;
        bool linear;
        int m;
    };
    const Case cases[] = {
        {"lebesgue/linear", BaseMeasure::lebesgue_unit(), 0.0, true, 64},
        {"lebesgue/corrected", BaseMeasure::lebesgue_unit(), 0.0, false, 64},
        {"inv/linear", BaseMeasure::one_over_x_unit(), 1e-3, true, 64},
        {"inv/corrected", BaseMeasure::one_over_x_unit(), 1e-3, false, 64},
        {"invsq/corrected", BaseMeasure::one_over_x_squared(), 0.5, false, 256},
    };
    bool pass = true;
    std::ostringstream os;
    for (const Case& c : cases) {
        const Grid g = build_grid(c.nu0, c.m, c.eps);
        const WeightFamily w = c.linear ? build_weights_linear(g) : build_weights_corrected(g);
        double worst = 0.0;
        int where = 0;
        for (int j = 2; j <= c.m; ++j) {
            const double e = std::abs(raw_weight_integral(w, j) - 1.0);
            if (e > worst) {
                worst = e;
                where = j;
            }
        }
        pass = pass && worst <= kNormTol;
        os << c.label << " m=" << c.m << " max " << fmt("%.1e", worst) << " (j=" << where << "); ";
    }
    return {pass, os.str()};
}

Outcome slope_within(const SweepConfig& cfg, int min_m, double lo, double hi) {
    const auto rows = rate_sweep(cfg);
    const RateFit f = fit_sweep(rows, min_m);
    return {f.slope >= lo && f.slope <= hi, "slope " + fmt("%.4f", f.slope) + " CI [" + fmt("%.4f", f.ci_lo) + ", " +
                                                fmt("%.4f", f.ci_hi) + "], target [" + fmt("%.2f", lo) + ", " +
                                                fmt("%.2f", hi) + "]"};
}

// 3. Holder class, gamma = 1, Lebesgue.
Outcome rate_cpp() {
    SweepConfig cfg;
    cfg.example = Example::CPP;
    cfg.gamma = 1.0;
    cfg.ms = {32, 64, 128, 256, 512};
    return slope_within(cfg, 32, kCppSlope - kCppSlopeTol, kCppSlope + kCppSlopeTol);
}

// 4. e^{-x} on 1/x with eps = m^{-2}.
Outcome rate_trunc_gamma() {
    SweepConfig cfg;
    cfg.example = Example::TruncGamma;
    cfg.lambda = 1.0;
    cfg.ms = {64, 128, 256, 512, 1024};
    return slope_within(cfg, 64, kGammaSlopeLo, kGammaSlopeHi);
}

// 5. 1/x^2 with H = sqrt(eps m), corrected weights, fitted against eps m.
Outcome rate_inv_square() {
    SweepConfig cfg;
    cfg.example = Example::InvSquare;
    cfg.ms = {32, 64, 128, 256, 512};
    return slope_within(cfg, 32, kInvSqSlope - kInvSqSlopeTol, kInvSqSlope + kInvSqSlopeTol);
}

// 6. H^2 between the jittered root transform of Poisson(lambda) and N(2 sqrt(lambda), 1).
Outcome poisson_gaussian_coupling() {
    std::vector<double> h2;
    bool pass = true;
    std::ostringstream os;
    for (double lambda : {4.0, 16.0, 64.0, 256.0}) {
        const double centre = 2.0 * std::sqrt(lambda);
        Philox rng(42, static_cast<std::uint64_t>(lambda));
        std::poisson_distribution<long long> pois(lambda);
        std::normal_distribution<double> normal(centre, 1.0);
        auto coupled = [&](Philox& r) { return poisson_to_gaussian(pois(r), r); };
        auto gauss = [&](Philox& r) { return normal(r); };
        // Z = 2 sgn(w) sqrt|w| with w = k + u, so dw/dz = |z|/2.
        auto coupled_density = [lambda](double z) {
            const double w = std::copysign(0.25 * z * z, z);
            const double k = std::floor(w + 0.5);
            if (k < 0) return 0.0;
            const double pk = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
            return pk * std::abs(z) / 2.0;
        };
        auto gauss_density = [centre](double z) {
            return std::exp(-0.5 * (z - centre) * (z - centre)) / std::sqrt(2.0 * std::numbers::pi);
        };
        const HellingerEstimate e =
            estimate_hellinger_mc(coupled, gauss, coupled_density, gauss_density, kCouplingDraws, rng);
        if (!h2.empty() && !(e.estimate < h2.back())) pass = false;
        if (!(lambda * e.estimate <= kCouplingConst)) pass = false;
        h2.push_back(e.estimate);
        os << "lambda=" << lambda << " H2=" << fmt("%.3e", e.estimate) << " (se " << fmt("%.1e", e.se)
           << ", lambda*H2=" << fmt("%.3f", lambda * e.estimate) << "); ";
    }
    return {pass, os.str()};
}

std::vector<CheckResult> battery_subset(bool gaussian) {
    BatteryConfig cfg;
    cfg.seed = 42;
    cfg.n_jumps = 100000;
    cfg.n_paths = 10000;
    cfg.n_reps = 10000;
    cfg.z_max = kZMax;
    std::vector<CheckResult> out;
    const DensitySpec holder = DensitySpec::holder_example(1.0);
    const BaseMeasure leb = BaseMeasure::lebesgue_unit();
    if (gaussian) {
        const WeightFamily inv16 =
            build_weights_corrected(build_grid(BaseMeasure::one_over_x_unit(), 16, 1e-2));
        return check_ystar_moments(cfg, DensitySpec::exp_decay(1.0), inv16, 4.0, {0.05, 0.3, 0.8}, 5);
    }
    const WeightFamily leb16 = build_weights_linear(build_grid(leb, 16, 0.0));
    out.push_back(check_redistribute_ks(cfg, holder, leb16, 1, "lebesgue"));
    const WeightFamily sq16 = build_weights_corrected(build_grid(BaseMeasure::one_over_x_squared(), 16, 0.5));
    out.push_back(check_redistribute_ks(cfg, DensitySpec::inv_square_example(1.0), sq16, 2, "invsq"));
    out.push_back(check_counts_chi2(cfg, holder, build_grid(leb, 8, 0.0), 40.0, 3));
    out.push_back(check_multinomial_ks(cfg, holder, leb16, 0.1, cfg.n_jumps, 4));
    return out;
}

Outcome summarize(const std::vector<CheckResult>& checks) {
    bool pass = true;
    std::ostringstream os;
    for (const CheckResult& c : checks) {
        pass = pass && c.pass;
        os << c.name << (c.pass ? " ok" : " FAILED");
        if (!std::isnan(c.p_value)) os << " p=" << fmt("%.3f", c.p_value);
        else os << " z=" << fmt("%.2f", c.statistic);
        os << "; ";
    }
    return {pass, os.str()};
}

// 7. Redistributed jumps, per-bin counts and the multinomial pushforward.
Outcome kernel_pushforwards() { return summarize(battery_subset(false)); }

// 8. Mean, variance and covariance of Y*.
Outcome gaussian_construction() { return summarize(battery_subset(true)); }

double poisson_series(double l1, double l2) {
    // Terms peak near k = sqrt(l1 l2); run well past it.
    const int kmax = static_cast<int>(std::sqrt(l1 * l2) + 40.0 * std::sqrt(std::max(l1, l2)) + 60.0);
    double bc = 0.0;
    for (int k = 0; k <= kmax; ++k)
        bc += std::exp(-0.5 * (l1 + l2) + 0.5 * k * std::log(l1 * l2) - std::lgamma(k + 1.0));
    return 1.0 - bc;
}

// 9. Poisson Hellinger against its series, and E[exp U_t] = 1 under the
// second law.
Outcome distance_oracles() {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double l1 = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
            const double l2 = std::pow(10.0, -2.0 + 4.0 * j / 19.0);
            worst = std::max(worst, std::abs(hellinger_poisson(l1, l2) - poisson_series(l1, l2)));
        }
    }
    const BaseMeasure leb = BaseMeasure::lebesgue_unit();
    const DensitySpec f1 = DensitySpec::holder_example(1.0);
    const DensitySpec f2 = DensitySpec::constant(1.0);
    const JumpLaw law(f2.f, leb, 0.0, 1.0);
    const double T = 2.0;
    Philox rng(42, 9);
    std::vector<double> e;
    e.reserve(100000);
    for (int r = 0; r < 100000; ++r) {
        const JumpPath p = sample_compound_poisson(law, T, rng);
        e.push_back(std::exp(loglik_ratio_finite(p, f1, f2, leb, 0.0, 1.0, T)));
    }
    const MeanEstimate m = mean_stderr(e);
    const double z = (m.mean - 1.0) / m.se;
    return {worst <= kSeriesTol && std::abs(z) <= kZMax,
            "series max err " + fmt("%.2e", worst) + "; E[exp U]=" + fmt("%.5f", m.mean) + " (z=" + fmt("%.2f", z) +
                ")"};
}

// Density of a sum of k independent U(0,1], k >= 1.
double irwin_hall(int k, double x) {
    if (x <= 0.0 || x >= k) return 0.0;
    double s = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= static_cast<int>(std::floor(x)) && j <= k; ++j) {
        s += (j % 2 ? -1.0 : 1.0) * binom * std::pow(x - j, k - 1);
        binom = binom * (k - j) / (j + 1);
    }
    return std::max(s / std::tgamma(k), 0.0);
}

// Law of a compound-Poisson sum with intensity a and U(0,1] jumps, relative
// to the Dirac mass at 0 plus Lebesgue.
double cpp_uniform_density(double a, double x) {
    if (x == 0.0) return std::exp(-a);
    double s = 0.0;
    double pk = std::exp(-a);
    for (int k = 1; k <= 40; ++k) {
        pk *= a / k;
        if (k > x) s += pk * irwin_hall(k, x);
        if (pk < 1e-18 && k > x) break;
    }
    return s;
}

// 10. TV(increments, Bernoulli surrogate) and marginal Hellinger against their bounds.
Outcome bound_dominance() {
    const BaseMeasure leb = BaseMeasure::lebesgue_unit();
    int tv_ok = 0, h_ok = 0;
    double worst_tv = 0.0, worst_h = 0.0;
    for (int c = 1; c <= kDominanceCases; ++c) {
        Philox params(42, 1000 + c);
        const double rate = 0.5 + 1.5 * params.uniform();
        const double delta = (0.02 + 0.3 * params.uniform()) / rate;
        const long long n = 1 + static_cast<long long>(20 * params.uniform());
        const double a = rate * delta;

        // TV = E_P[(1 - q/p)_+] over the n-vector of increments.
        const JumpLaw law([rate](double) { return rate; }, leb, 0.0, 1.0);
        Philox rng(42, c);
        const ObservationScheme scheme = ObservationScheme::make(n, delta);
        const double q_zero = 1.0 - a * std::exp(-a);
        const double q_jump = a * std::exp(-a);
        double tv = 0.0;
        const int draws = 20000;
        for (int r = 0; r < draws; ++r) {
            const ExperimentSample s = sample_discrete_increments(law, scheme, rng);
            double log_ratio = 0.0;
            for (double x : s.increments) {
                const double p = cpp_uniform_density(a, x);
                const double q = x == 0.0 ? q_zero : (x <= 1.0 ? q_jump : 0.0);
                log_ratio += q > 0.0 ? std::log(q / p) : -INFINITY;
            }
            tv += std::max(1.0 - std::exp(log_ratio), 0.0);
        }
        tv /= draws;
        const std::vector<double> lambdas(static_cast<std::size_t>(n), a);
        const double tv_bound = bernoulli_poisson_tv_bound(lambdas);
        if (tv < tv_bound) ++tv_ok;
        worst_tv = std::max(worst_tv, tv / tv_bound);

        // Marginals at T of two compound-Poisson laws with constant densities.
        const double c1 = rate, c2 = 0.5 + 1.5 * params.uniform();
        const double T = 0.5 + params.uniform();
        const JumpLaw law1([c1](double) { return c1; }, leb, 0.0, 1.0);
        const JumpLaw law2([c2](double) { return c2; }, leb, 0.0, 1.0);
        auto marginal = [T](const JumpLaw& l) {
            return [&l, T](Philox& r) { return sample_compound_poisson(l, T, r).value_at(T); };
        };
        const HellingerEstimate h = estimate_hellinger_mc(
            marginal(law1), marginal(law2), [&](double x) { return cpp_uniform_density(c1 * T, x); },
            [&](double x) { return cpp_uniform_density(c2 * T, x); }, draws, rng);
        const double h_bound = process_hellinger_bound(DensitySpec::constant(c1), DensitySpec::constant(c2), leb,
                                                       0.0, 1.0, T);
        const double h_est = std::sqrt(std::max(h.estimate, 0.0));
        if (h_est < h_bound) ++h_ok;
        worst_h = std::max(worst_h, h_est / h_bound);
    }
    return {tv_ok == kDominanceCases && h_ok == kDominanceCases,
            "TV below bound " + std::to_string(tv_ok) + "/" + std::to_string(kDominanceCases) + " (max ratio " +
                fmt("%.3f", worst_tv) + "); Hellinger below bound " + std::to_string(h_ok) + "/" +
                std::to_string(kDominanceCases) + " (max ratio " + fmt("%.3f", worst_h) + ")"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "grid exactness", 1.0, grid_exactness},
        {2, "weight normalization", 10.0, weight_normalization},
        {3, "rate: compound Poisson on Lebesgue", 30.0, rate_cpp},
        {4, "rate: truncated gamma on 1/x", 60.0, rate_trunc_gamma},
        {5, "rate: 1/x^2 with horizon", 120.0, rate_inv_square},
        {6, "Poisson-Gaussian coupling", 60.0, poisson_gaussian_coupling},
        {7, "kernel pushforwards", 120.0, kernel_pushforwards},
        {8, "Gaussian construction moments", 60.0, gaussian_construction},
        {9, "closed-form distance oracles", 30.0, distance_oracles},
        {10, "bound dominance", 120.0, bound_dominance},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %2d %s: %s | %s| %.2fs of %.0fs%s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
