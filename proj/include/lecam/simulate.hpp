#pragma once

#include "lecam/measures.hpp"
#include "lecam/path.hpp"
#include "lecam/rng.hpp"
#include "lecam/sampling.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lecam {

/// The finite Levy measure f dnu0 restricted to (lo, hi]: its total
/// intensity and a tabulated sampler for the normalized jump law.
class JumpLaw {
public:
    JumpLaw(const RealFn& f, const BaseMeasure& nu0, double lo, double hi,
            std::span<const double> kinks = {}, int cells = 4096);

    [[nodiscard]] double intensity() const { return table_.total(); }
    [[nodiscard]] double sample_size(Philox& rng) const { return table_.sample(rng); }
    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }

private:
    InverseCdfTable table_;
    double lo_;
    double hi_;
};

enum class SampleKind { ContinuousPath, DiscreteIncrements, WhiteNoisePath };

struct ExperimentSample {
    SampleKind kind = SampleKind::ContinuousPath;
    ObservationScheme scheme;
    JumpPath path;                                    // ContinuousPath
    std::vector<double> increments;                   // DiscreteIncrements
    std::vector<std::pair<double, double>> observed;  // WhiteNoisePath: (t, y_t)

    void validate() const;
    void write_csv(std::ostream& os) const;
};

JumpPath sample_compound_poisson(const JumpLaw& law, double T, Philox& rng);
/// Convenience overload: tabulates f dnu0 on (lo, hi] first.
JumpPath sample_compound_poisson(const RealFn& f, const BaseMeasure& nu0, double lo, double hi,
                                 double T, Philox& rng);

/// n i.i.d. increments over windows of length delta.
ExperimentSample sample_discrete_increments(const JumpLaw& law, const ObservationScheme& scheme,
                                            Philox& rng);

/// n draws of eps_i Y_i with eps_i ~ Bernoulli(iota delta e^{-iota delta}) and Y_i ~ the jump law.
ExperimentSample sample_bernoulli_surrogate(const JumpLaw& law, const ObservationScheme& scheme,
                                            Philox& rng);

/// dy_t = sqrt(f(t)) dt + dW_t / (2 sqrt(T) sqrt(g(t))), observed at increasing
/// `eval_times` with y = 0 at the first one.
ExperimentSample sample_white_noise(const RealFn& f, const BaseMeasure& nu0,
                                    const ObservationScheme& scheme,
                                    std::span<const double> eval_times, Philox& rng);

struct HellingerEstimate {
    double estimate = 0.0;
    double se = 0.0;
    long long n_draws = 0;
    std::uint64_t seed = 0;
    long long zero_density = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Monte-Carlo estimate of H^2 = 1 - int sqrt(p q). Draws N from each law and
/// averages the one-sided estimates E_p[(sqrt(q/p) - 1)^2] / 2 and
/// E_q[(sqrt(p/q) - 1)^2] / 2. Each equals H^2 when p and q share their
/// support (the ratio is its own control variate since E_p[q/p] = 1), and
/// unlike 1 - mean sqrt(q/p) its relative error does not blow up as H^2 -> 0.
/// Draws where the sampling density vanishes contribute 0 and are counted.
template <class S1, class S2, class D1, class D2>
HellingerEstimate estimate_hellinger_mc(S1&& sampler1, S2&& sampler2, D1&& density1, D2&& density2,
                                        long long n_draws, Philox& rng) {
    HellingerEstimate out;
    out.n_draws = n_draws;
    out.seed = rng.seed();
    if (n_draws < 2) return out;
    double sum[2] = {0.0, 0.0};
    double sq[2] = {0.0, 0.0};
    auto term = [&out](double num, double den) {
        if (!(den > 0.0)) {
            ++out.zero_density;
            return 0.0;
        }
        const double d = std::sqrt(std::max(num, 0.0) / den) - 1.0;
        return 0.5 * d * d;
    };
    for (long long i = 0; i < n_draws; ++i) {
        const auto x = sampler1(rng);
        const double t1 = term(density2(x), density1(x));
        sum[0] += t1;
        sq[0] += t1 * t1;
        const auto y = sampler2(rng);
        const double t2 = term(density1(y), density2(y));
        sum[1] += t2;
        sq[1] += t2 * t2;
    }
    const double n = static_cast<double>(n_draws);
    double est = 0.0;
    double var = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double mean = sum[k] / n;
        est += 0.5 * mean;
        var += 0.25 * std::max(sq[k] / n - mean * mean, 0.0) / (n - 1.0);
    }
    out.estimate = est;
    out.se = std::sqrt(var);
    return out;
}

}  // namespace lecam
