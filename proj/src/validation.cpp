#include "lecam/validation.hpp"

#include "lecam/error.hpp"
#include "lecam/kernels.hpp"
#include "lecam/simulate.hpp"
#include "lecam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lecam {

namespace {

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double poisson_pmf(double lambda, long long k) {
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

nlohmann::json CheckResult::to_json() const {
    nlohmann::json j = {{"name", name}, {"pass", pass}, {"statistic", json_number(statistic)}};
    j["p_value"] = std::isnan(p_value) ? nlohmann::json(nullptr) : json_number(p_value);
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

HatCdf::HatCdf(const HatDensity& hat) : hat_(hat) {
    const Grid& g = hat_.weights().grid();
    const BaseMeasure& nu0 = g.measure();
    const double lo = std::max(g.eps(), nu0.lower());
    knots_.push_back(lo);
    for (double k : hat_.weights().kinks())
        if (k > lo && std::isfinite(k) && k < nu0.upper()) knots_.push_back(k);
    if (std::isfinite(nu0.upper())) knots_.push_back(nu0.upper());
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
    const auto h = [this](double x) { return hat_(x); };
    cum_.assign(knots_.size(), 0.0);
    for (std::size_t i = 1; i < knots_.size(); ++i)
        cum_[i] = cum_[i - 1] + nu0.integrate(h, knots_[i - 1], knots_[i]);
    total_ = cum_.back();
    if (!std::isfinite(nu0.upper())) total_ += nu0.integrate(h, knots_.back(), nu0.upper());
}

double HatCdf::operator()(double x) const {
    if (x <= knots_.front()) return 0.0;
    const BaseMeasure& nu0 = hat_.weights().grid().measure();
    if (x >= nu0.upper()) return 1.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x) - 1;
    const auto i = static_cast<std::size_t>(it - knots_.begin());
    const double part = nu0.integrate([this](double y) { return hat_(y); }, knots_[i], x);
    return std::clamp((cum_[i] + part) / total_, 0.0, 1.0);
}

CheckResult check_coupling_roundtrip(const BatteryConfig& cfg) {
    Philox rng(cfg.seed, 0);
    long long failures = 0;
    long long first_bad = -1;
    auto probe = [&](long long k, double u) {
        if (gaussian_to_poisson(poisson_to_gaussian(k, u)) != k) {
            if (failures++ == 0) first_bad = k;
        }
    };
    constexpr double width = 1.0 - 1e-6;
    for (long long k = 0; k <= cfg.roundtrip_max_k; ++k) probe(k, -0.5 + width * rng.uniform());
    for (long long k : {0LL, 1LL, 10LL, 1000LL, cfg.roundtrip_max_k}) {
        probe(k, -0.5);
        probe(k, 0.5 - 1e-6);
    }
    CheckResult r;
    r.name = "coupling_roundtrip";
    r.pass = failures == 0;
    r.statistic = static_cast<double>(failures);
    r.detail = {{"max_k", cfg.roundtrip_max_k}, {"failures", failures}};
    if (failures > 0) r.detail["first_failure_k"] = first_bad;
    return r;
}

CheckResult check_redistribute_ks(const BatteryConfig& cfg, const DensitySpec& f,
                                  const WeightFamily& weights, std::uint64_t stream,
                                  const std::string& label) {
    const Grid& grid = weights.grid();
    const BaseMeasure& nu0 = grid.measure();
    Philox rng(cfg.seed, stream);
    const JumpLaw law(f.f, nu0, grid.eps(), nu0.upper());

    JumpPath path;
    path.T = 1.0;
    path.jumps.resize(static_cast<std::size_t>(cfg.n_jumps));
    for (long long i = 0; i < cfg.n_jumps; ++i)
        path.jumps[i] = {static_cast<double>(i + 1) / static_cast<double>(cfg.n_jumps), law.sample_size(rng)};

    const MKernel kernel(weights);
    const JumpPath moved = redistribute_jumps(path, kernel, rng);
    std::vector<double> sizes;
    sizes.reserve(moved.jumps.size());
    for (const Jump& jp : moved.jumps) sizes.push_back(jp.size);

    const HatCdf cdf(project_hat(f, weights));
    const TestResult t = ks_test(std::move(sizes), [&cdf](double x) { return cdf(x); });
    CheckResult r;
    r.name = "redistribute_ks_" + label;
    r.statistic = t.statistic;
    r.p_value = t.p_value;
    r.pass = t.p_value > cfg.alpha;
    r.detail = {{"n_jumps", cfg.n_jumps}, {"m", grid.m()}, {"measure", nu0.name()}};
    return r;
}

CheckResult check_counts_chi2(const BatteryConfig& cfg, const DensitySpec& f, const Grid& grid,
                              double T, std::uint64_t stream) {
    const BaseMeasure& nu0 = grid.measure();
    Philox rng(cfg.seed, stream);
    const JumpLaw law(f.f, nu0, grid.eps(), nu0.upper(), grid.cut_points());

    const int bins = grid.m() - 1;
    std::vector<std::vector<long long>> hist(bins);
    for (long long p = 0; p < cfg.n_paths; ++p) {
        const BinCounts c = sufficient_stat_counts(sample_compound_poisson(law, T, rng), grid);
        for (int i = 0; i < bins; ++i) {
            const auto k = static_cast<std::size_t>(c.counts[i]);
            if (hist[i].size() <= k) hist[i].resize(k + 1, 0);
            ++hist[i][k];
        }
    }

    double stat = 0.0;
    int dof = 0;
    const double N = static_cast<double>(cfg.n_paths);
    for (int j = 2; j <= grid.m(); ++j) {
        const double lambda = T * nu0.integrate(f.f, grid.bin_lo(j), grid.bin_hi(j));
        const std::vector<long long>& h = hist[j - 2];
        std::vector<double> obs(h.begin(), h.end());
        std::vector<double> expd(h.size());
        double below = 0.0;
        for (std::size_t k = 0; k + 1 < h.size(); ++k) {
            expd[k] = N * poisson_pmf(lambda, static_cast<long long>(k));
            below += expd[k];
        }
        expd.back() = std::max(N - below, 0.0);  // P(X >= K) tail cell
        const TestResult t = chi_square_test(obs, expd);
        stat += t.statistic;
        dof += t.dof;
    }
    CheckResult r;
    r.name = "counts_chi2";
    r.statistic = stat;
    r.p_value = chi2_sf(stat, dof);
    r.pass = r.p_value > cfg.alpha;
    r.detail = {{"n_paths", cfg.n_paths}, {"T", T}, {"m", grid.m()}, {"dof", dof}};
    return r;
}

CheckResult check_multinomial_ks(const BatteryConfig& cfg, const DensitySpec& f,
                                 const WeightFamily& weights, double delta, long long n,
                                 std::uint64_t stream) {
    const Grid& grid = weights.grid();
    const BaseMeasure& nu0 = grid.measure();
    Philox rng(cfg.seed, stream);
    const JumpLaw law(f.f, nu0, grid.eps(), nu0.upper());
    const ExperimentSample s = sample_bernoulli_surrogate(law, ObservationScheme::make(n, delta), rng);

    const MKernel kernel(weights);
    const std::vector<double> out = multinomial_to_samples(bin_to_multinomial(s.increments, grid), kernel, rng);
    std::vector<double> nonzero;
    for (double x : out)
        if (x != 0.0) nonzero.push_back(x);

    const HatCdf cdf(project_hat(f, weights));
    const double iota = nu0.integrate(f.f, std::max(grid.eps(), nu0.lower()), nu0.upper());
    const double p1 = iota * delta * std::exp(-iota * delta);
    const double nn = static_cast<double>(n);
    const double z = (static_cast<double>(nonzero.size()) - nn * p1) / std::sqrt(nn * p1 * (1.0 - p1));

    const TestResult t = ks_test(std::move(nonzero), [&cdf](double x) { return cdf(x); });
    CheckResult r;
    r.name = "multinomial_ks";
    r.statistic = t.statistic;
    r.p_value = t.p_value;
    r.pass = t.p_value > cfg.alpha && std::abs(z) < cfg.z_max;
    r.detail = {{"n", n}, {"delta", delta}, {"nonzero_z", json_number(z)},
                {"nonzero_p_value", json_number(normal_two_sided_p(z))}};
    return r;
}

std::vector<CheckResult> check_ystar_moments(const BatteryConfig& cfg, const DensitySpec& f,
                                             const WeightFamily& weights, double T,
                                             const std::vector<double>& times,
                                             std::uint64_t stream) {
    const Grid& grid = weights.grid();
    const BaseMeasure& nu0 = grid.measure();
    const int bins = grid.m() - 1;
    const std::size_t nt = times.size();
    Philox rng(cfg.seed, stream);

    std::vector<double> c(bins);
    const auto sqrt_f = [&f](double x) { return std::sqrt(f(x)); };
    for (int j = 2; j <= grid.m(); ++j) c[j - 2] = nu0.integrate(sqrt_f, grid.bin_lo(j), grid.bin_hi(j));
    const double bar_sd = std::sqrt(grid.mu() / (4.0 * T));

    std::normal_distribution<double> normal;
    std::vector<double> sum(nt, 0.0);
    std::vector<std::vector<double>> cross(nt, std::vector<double>(nt, 0.0));
    std::vector<double> bar(bins);
    for (long long rep = 0; rep < cfg.n_reps; ++rep) {
        for (int i = 0; i < bins; ++i) bar[i] = c[i] + bar_sd * normal(rng);
        const std::vector<double> y = construct_ystar(bar, weights, T, times, rng);
        for (std::size_t a = 0; a < nt; ++a) {
            sum[a] += y[a];
            for (std::size_t b = a; b < nt; ++b) cross[a][b] += y[a] * y[b];
        }
    }

    const double N = static_cast<double>(cfg.n_reps);
    std::vector<double> mean_th(nt), var_th(nt);
    for (std::size_t a = 0; a < nt; ++a) {
        const std::vector<double> F = pulled_back_times(weights, times[a]);
        mean_th[a] = 0.0;
        for (int i = 0; i < bins; ++i) mean_th[a] += c[i] * F[i];
        var_th[a] = nu0.mass(grid.eps(), times[a]) / (4.0 * T);
    }

    std::vector<CheckResult> out;
    auto finish = [&](std::string name, double est, double th, double se) {
        CheckResult r;
        r.name = std::move(name);
        r.statistic = (est - th) / se;
        r.p_value = normal_two_sided_p(r.statistic);
        r.pass = std::abs(r.statistic) < cfg.z_max;
        r.detail = {{"estimate", json_number(est)}, {"expected", json_number(th)}, {"stderr", json_number(se)},
                    {"n_reps", cfg.n_reps}};
        out.push_back(std::move(r));
    };
    std::vector<double> mean(nt);
    for (std::size_t a = 0; a < nt; ++a) mean[a] = sum[a] / N;
    for (std::size_t a = 0; a < nt; ++a) {
        const std::string t = json_number(times[a]).dump();
        finish("ystar_mean_t=" + t, mean[a], mean_th[a], std::sqrt(var_th[a] / N));
        const double var = (cross[a][a] - N * mean[a] * mean[a]) / (N - 1.0);
        finish("ystar_var_t=" + t, var, var_th[a], var_th[a] * std::sqrt(2.0 / (N - 1.0)));
    }
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = a + 1; b < nt; ++b) {
            const double cov = (cross[a][b] - N * mean[a] * mean[b]) / (N - 1.0);
            const double th = nu0.mass(grid.eps(), std::min(times[a], times[b])) / (4.0 * T);
            const double se = std::sqrt((var_th[a] * var_th[b] + th * th) / (N - 1.0));
            finish("ystar_cov_s=" + json_number(times[a]).dump() + "_t=" + json_number(times[b]).dump(), cov,
                   th, se);
        }
    return out;
}

std::vector<CheckResult> run_battery(const BatteryConfig& cfg) {
    std::vector<CheckResult> out;
    out.push_back(check_coupling_roundtrip(cfg));

    const DensitySpec holder = DensitySpec::holder_example(1.0);
    const BaseMeasure leb = BaseMeasure::lebesgue_unit();
    const WeightFamily leb16 = build_weights_linear(build_grid(leb, 16, 0.0));
    out.push_back(check_redistribute_ks(cfg, holder, leb16, 1, "lebesgue"));

    const WeightFamily sq16 = build_weights_corrected(build_grid(BaseMeasure::one_over_x_squared(), 16, 0.5));
    out.push_back(check_redistribute_ks(cfg, DensitySpec::inv_square_example(1.0), sq16, 2, "invsq"));

    out.push_back(check_counts_chi2(cfg, holder, build_grid(leb, 8, 0.0), 40.0, 3));
    out.push_back(check_multinomial_ks(cfg, holder, leb16, 0.1, cfg.n_jumps, 4));

    const WeightFamily inv16 = build_weights_corrected(build_grid(BaseMeasure::one_over_x_unit(), 16, 1e-2));
    for (CheckResult& r : check_ystar_moments(cfg, DensitySpec::exp_decay(1.0), inv16, 4.0, {0.05, 0.3, 0.8}, 5))
        out.push_back(std::move(r));
    return out;
}

}  // namespace lecam
