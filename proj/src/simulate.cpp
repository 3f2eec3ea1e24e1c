#include "lecam/simulate.hpp"

#include "lecam/error.hpp"
#include "lecam/quadrature.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>

namespace lecam {

JumpLaw::JumpLaw(const RealFn& f, const BaseMeasure& nu0, double lo, double hi,
                 std::span<const double> kinks, int cells)
    : lo_(std::max(lo, nu0.lower())), hi_(std::min(hi, nu0.upper())) {
    require(hi_ > lo_, "JumpLaw: empty region");
    if (!std::isfinite(nu0.mass(lo_, hi_)))
        fail(ErrorKind::InvalidArgument, "JumpLaw: nu0 has infinite mass on the region; truncate at eps > 0");
    table_ = InverseCdfTable(nu0, f, lo_, hi_, kinks, cells);
}

void ExperimentSample::validate() const {
    switch (kind) {
        case SampleKind::ContinuousPath: path.validate(); break;
        case SampleKind::DiscreteIncrements:
            require(static_cast<long long>(increments.size()) == scheme.n,
                    "ExperimentSample: increments must have length n");
            break;
        case SampleKind::WhiteNoisePath:
            for (std::size_t i = 1; i < observed.size(); ++i)
                require(observed[i].first > observed[i - 1].first,
                        "ExperimentSample: observation times must increase");
            break;
    }
}

void ExperimentSample::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    switch (kind) {
        case SampleKind::ContinuousPath: path.write_csv(os); break;
        case SampleKind::DiscreteIncrements:
            os << "# " << nlohmann::json{{"n", scheme.n}, {"delta", scheme.delta}, {"T", scheme.T}}.dump()
               << "\ni,t,increment\n";
            for (std::size_t i = 0; i < increments.size(); ++i)
                os << i + 1 << ',' << scheme.t(static_cast<long long>(i) + 1) << ',' << increments[i] << '\n';
            break;
        case SampleKind::WhiteNoisePath:
            os << "# " << nlohmann::json{{"T", scheme.T}}.dump() << "\nt,y\n";
            for (const auto& [t, y] : observed) os << t << ',' << y << '\n';
            break;
    }
    os.precision(old);
}

JumpPath sample_compound_poisson(const JumpLaw& law, double T, Philox& rng) {
    require(T >= 0.0, "sample_compound_poisson: T must be >= 0");
    JumpPath p;
    p.T = T;
    if (T == 0.0) return p;
    std::poisson_distribution<long long> count(law.intensity() * T);
    const long long n = count(rng);
    std::vector<double> times(static_cast<std::size_t>(n));
    for (double& t : times) t = T * (1.0 - rng.uniform());  // in (0, T]
    std::sort(times.begin(), times.end());
    p.jumps.reserve(times.size());
    for (double t : times) {
        if (!p.jumps.empty() && t <= p.jumps.back().time) continue;  // tie: probability zero
        p.jumps.push_back({t, law.sample_size(rng)});
    }
    return p;
}

JumpPath sample_compound_poisson(const RealFn& f, const BaseMeasure& nu0, double lo, double hi,
                                 double T, Philox& rng) {
    return sample_compound_poisson(JumpLaw(f, nu0, lo, hi), T, rng);
}

ExperimentSample sample_discrete_increments(const JumpLaw& law, const ObservationScheme& scheme,
                                            Philox& rng) {
    ExperimentSample s;
    s.kind = SampleKind::DiscreteIncrements;
    s.scheme = scheme;
    s.increments.resize(static_cast<std::size_t>(scheme.n), 0.0);
    std::poisson_distribution<long long> count(law.intensity() * scheme.delta);
    for (double& x : s.increments) {
        const long long k = count(rng);
        for (long long i = 0; i < k; ++i) x += law.sample_size(rng);
    }
    return s;
}

ExperimentSample sample_bernoulli_surrogate(const JumpLaw& law, const ObservationScheme& scheme,
                                            Philox& rng) {
    ExperimentSample s;
    s.kind = SampleKind::DiscreteIncrements;
    s.scheme = scheme;
    s.increments.resize(static_cast<std::size_t>(scheme.n), 0.0);
    const double a = law.intensity() * scheme.delta;
    const double p = a * std::exp(-a);
    for (double& x : s.increments)
        if (rng.uniform() < p) x = law.sample_size(rng);
    return s;
}

ExperimentSample sample_white_noise(const RealFn& f, const BaseMeasure& nu0,
                                    const ObservationScheme& scheme,
                                    std::span<const double> eval_times, Philox& rng) {
    ExperimentSample s;
    s.kind = SampleKind::WhiteNoisePath;
    s.scheme = scheme;
    for (std::size_t i = 1; i < eval_times.size(); ++i)
        require(eval_times[i] > eval_times[i - 1], "sample_white_noise: eval times must increase");
    for (double t : eval_times)
        require(t >= nu0.lower() && t <= nu0.upper(), "sample_white_noise: eval time outside I");

    std::normal_distribution<double> normal;
    double y = 0.0;
    for (std::size_t i = 0; i < eval_times.size(); ++i) {
        if (i > 0) {
            const double a = eval_times[i - 1];
            const double b = eval_times[i];
            const double mean = integrate_or_throw([&](double t) { return std::sqrt(f(t)); }, a, b);
            const QuadResult var =
                integrate([&](double t) { return 1.0 / (4.0 * scheme.T * nu0.density(t)); }, a, b);
            if (!var.converged || !std::isfinite(var.value)) {
                std::ostringstream os;
                os << "sample_white_noise: noise variance diverges on [" << a << ", " << b << "]";
                fail(ErrorKind::Divergence, os.str());
            }
            y += mean + std::sqrt(var.value) * normal(rng);
        }
        s.observed.emplace_back(eval_times[i], y);
    }
    return s;
}

nlohmann::json HellingerEstimate::to_json() const {
    return {{"estimate", estimate}, {"stderr", se},          {"n_draws", n_draws},
            {"seed", seed},         {"zero_density", zero_density}};
}

}  // namespace lecam
