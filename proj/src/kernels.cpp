#include "lecam/kernels.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace lecam {

namespace {

void require_normalized(const WeightFamily& w, const char* who) {
    const double err = w.normalization_error();
    if (err > 1e-6) {
        std::ostringstream os;
        os << who << ": weights are not normalized (max |int V_j dnu0 - 1| = " << err
           << "); use build_weights_corrected";
        fail(ErrorKind::InvalidArgument, os.str());
    }
}

// Fisher-Yates with our own index draws, so the permutation does not depend
// on the standard library's distribution implementations.
template <class T>
void shuffle(std::vector<T>& v, Philox& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(v[i - 1], v[std::min(k, i - 1)]);
    }
}

}  // namespace

long long BinCounts::zeros() const {
    require(total >= 0, "BinCounts::zeros: not a multinomial vector");
    return total - std::accumulate(counts.begin(), counts.end(), 0LL);
}

nlohmann::json BinCounts::to_json() const {
    nlohmann::json j = {{"counts", counts}};
    if (total >= 0) {
        j["n"] = total;
        j["zeros"] = zeros();
    }
    return j;
}

MKernel::MKernel(const WeightFamily& weights, int cells) : w_(weights) {
    const int m = w_.m();
    const std::vector<double> kinks = w_.kinks();
    tables_.reserve(m - 1);
    for (int j = 2; j <= m; ++j) {
        const auto [lo, hi] = w_.support(j);
        tables_.emplace_back(w_.grid().measure(), [this, j](double x) { return w_.eval(j, x); }, lo,
                             hi, kinks, cells);
    }
}

double MKernel::sample(double x, Philox& rng) const {
    const int j = w_.grid().bin_of(x);
    if (j < 2) {
        std::ostringstream os;
        os << "sample_M: x=" << x << " lies in [0, eps]";
        fail(ErrorKind::InvalidArgument, os.str());
    }
    return sample_bin(j, rng);
}

double MKernel::sample_bin(int j, Philox& rng) const {
    require(j >= 2 && j <= w_.m(), "MKernel::sample_bin: bin index out of range");
    return tables_[j - 2].sample(rng);
}

BinCounts sufficient_stat_counts(const JumpPath& path, const Grid& grid) {
    BinCounts c;
    c.counts.assign(grid.m() - 1, 0);
    for (const Jump& jp : path.jumps) {
        const int j = grid.bin_of(jp.size);
        if (j >= 2) ++c.counts[j - 2];
    }
    return c;
}

double sample_M(double x, const MKernel& kernel, Philox& rng) { return kernel.sample(x, rng); }

JumpPath redistribute_jumps(const JumpPath& path, const MKernel& kernel, Philox& rng) {
    require_normalized(kernel.weights(), "redistribute_jumps");
    const double eps = kernel.weights().grid().eps();
    JumpPath out = path;
    for (Jump& jp : out.jumps) {
        if (!(jp.size > eps)) {
            std::ostringstream os;
            os << "redistribute_jumps: jump of size " << jp.size << " in [0, eps]; restrict the path first";
            fail(ErrorKind::InvalidArgument, os.str());
        }
        jp.size = kernel.sample(jp.size, rng);
    }
    return out;
}

double poisson_to_gaussian(long long k, double jitter) {
    require(k >= 0, "poisson_to_gaussian: k must be >= 0");
    require(jitter >= -0.5 && jitter < 0.5, "poisson_to_gaussian: jitter outside [-1/2, 1/2)");
    const double s = static_cast<double>(k) + jitter;
    return 2.0 * std::copysign(std::sqrt(std::abs(s)), s);
}

double poisson_to_gaussian(long long k, Philox& rng) { return poisson_to_gaussian(k, rng.uniform() - 0.5); }

long long gaussian_to_poisson(double z) {
    const double h = 0.5 * z;
    const double s = std::copysign(h * h, z);
    const double k = std::floor(s + 0.5 + 1e-14 * std::max(1.0, std::abs(s)));
    return k < 0.0 ? 0 : static_cast<long long>(k);
}

BinCounts bin_to_multinomial(std::span<const double> samples, const Grid& grid) {
    BinCounts c;
    c.counts.assign(grid.m() - 1, 0);
    c.total = static_cast<long long>(samples.size());
    const double sup = grid.measure().upper();
    for (double x : samples) {
        if (x == 0.0) continue;
        if (x < 0.0 || x <= grid.eps() || x > sup) {
            std::ostringstream os;
            os << "bin_to_multinomial: sample " << x << " is neither 0 nor in (eps, sup I]";
            fail(ErrorKind::InvalidArgument, os.str());
        }
        ++c.counts[grid.bin_of(x) - 2];
    }
    return c;
}

std::vector<double> multinomial_to_samples(const BinCounts& counts, const MKernel& kernel,
                                           Philox& rng) {
    require_normalized(kernel.weights(), "multinomial_to_samples");
    require(static_cast<int>(counts.counts.size()) == kernel.weights().m() - 1,
            "multinomial_to_samples: counts do not match the grid");
    const long long zeros = counts.zeros();
    require(zeros >= 0, "multinomial_to_samples: bin counts exceed n");
    std::vector<double> out(static_cast<std::size_t>(zeros), 0.0);
    out.reserve(static_cast<std::size_t>(counts.total));
    for (int j = 2; j <= kernel.weights().m(); ++j)
        for (long long i = 0; i < counts.count(j); ++i) out.push_back(kernel.sample_bin(j, rng));
    shuffle(out, rng);
    return out;
}

std::vector<double> pulled_back_times(const WeightFamily& weights, double t) {
    const int m = weights.m();
    const std::vector<double> kinks = weights.kinks();
    std::vector<double> F(m - 1, 0.0);
    for (int j = 2; j <= m; ++j) {
        const auto [lo, hi] = weights.support(j);
        if (t <= lo) continue;
        if (t >= hi) {
            F[j - 2] = weights.integral(j);
            continue;
        }
        F[j - 2] = weights.grid().measure().integrate([&](double x) { return weights.eval(j, x); },
                                                       lo, t, kinks);
    }
    return F;
}

std::vector<double> construct_ystar(std::span<const double> bar_increments,
                                    const WeightFamily& weights, double T,
                                    std::span<const double> eval_times, Philox& rng) {
    const Grid& grid = weights.grid();
    const int m = grid.m();
    require(static_cast<int>(bar_increments.size()) == m - 1,
            "construct_ystar: need one increment per bin");
    require(T > 0.0, "construct_ystar: T must be positive");
    require_normalized(weights, "construct_ystar");
    for (double t : eval_times) {
        if (!(t >= grid.eps()) || !std::isfinite(t) || t > grid.measure().upper()) {
            std::ostringstream os;
            os << "construct_ystar: eval time " << t << " outside [eps, sup I]";
            fail(ErrorKind::InvalidArgument, os.str());
        }
    }

    std::vector<std::size_t> order(eval_times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eval_times[a] < eval_times[b]; });

    std::vector<double> scale(m - 1);
    for (int j = 2; j <= m; ++j) scale[j - 2] = std::sqrt(grid.measure().mass(grid.v(j - 1), grid.v(j)));
    const double noise = 1.0 / (2.0 * std::sqrt(T));

    std::normal_distribution<double> normal;
    std::vector<double> s_prev(m - 1, 0.0);
    std::vector<double> b_prev(m - 1, 0.0);
    std::vector<double> out(eval_times.size());
    for (std::size_t idx : order) {
        const std::vector<double> F = pulled_back_times(weights, eval_times[idx]);
        double y = 0.0;
        for (int i = 0; i < m - 1; ++i) {
            const double s = std::clamp(F[i], 0.0, 1.0);
            if (s > s_prev[i]) {
                if (s_prev[i] >= 1.0 || s >= 1.0) {
                    b_prev[i] = 0.0;
                } else {
                    const double rest = 1.0 - s_prev[i];
                    const double mean = b_prev[i] * (1.0 - s) / rest;
                    const double var = (s - s_prev[i]) * (1.0 - s) / rest;
                    b_prev[i] = mean + std::sqrt(std::max(var, 0.0)) * normal(rng);
                }
                s_prev[i] = s;
            }
            y += bar_increments[i] * F[i] + noise * scale[i] * b_prev[i];
        }
        out[idx] = y;
    }
    return out;
}

double ksharp_variance(const BaseMeasure& nu0, double T, double t) {
    require(T > 0.0, "ksharp_variance: T must be positive");
    if (t <= 0.0) return 0.0;
    switch (nu0.kind()) {
        case MeasureKind::LebesgueUnit: return t / (4.0 * T);
        case MeasureKind::OneOverXUnit: return t * t / (8.0 * T);
        case MeasureKind::OneOverXSquaredHalfLine: return t * t * t / (12.0 * T);
        case MeasureKind::NumericGeneric: break;
    }
    const QuadResult r =
        integrate([&](double z) { return 1.0 / (4.0 * T * nu0.density(z)); }, nu0.lower(), t);
    if (!r.converged || !std::isfinite(r.value)) {
        std::ostringstream os;
        os << "ksharp_variance: int_0^" << t << " (4 T g)^{-1} diverges";
        fail(ErrorKind::Divergence, os.str());
    }
    return r.value;
}

std::vector<double> extend_path_ksharp(const std::function<double(double)>& omega,
                                       const BaseMeasure& nu0, double eps, double T,
                                       std::span<const double> eval_times, Philox& rng) {
    require(eps >= 0.0, "extend_path_ksharp: eps must be >= 0");
    for (std::size_t i = 1; i < eval_times.size(); ++i)
        require(eval_times[i] >= eval_times[i - 1], "extend_path_ksharp: eval times must increase");
    std::vector<double> out;
    out.reserve(eval_times.size());
    if (eps == 0.0) {
        for (double t : eval_times) out.push_back(omega(t));
        return out;
    }
    ksharp_variance(nu0, T, eps);

    std::normal_distribution<double> normal;
    double t_prev = 0.0;
    double tau_prev = 0.0;
    double b = 0.0;
    for (double t : eval_times) {
        const double u = std::clamp(t, 0.0, eps);
        if (u > t_prev) {
            const double tau = ksharp_variance(nu0, T, u);
            b += (u - t_prev) + std::sqrt(std::max(tau - tau_prev, 0.0)) * normal(rng);
            t_prev = u;
            tau_prev = tau;
        }
        out.push_back(omega(std::max(t, eps)) + b);
    }
    return out;
}

double base_drift(const BaseMeasure& nu0) {
    const double g = nu0.first_moment(nu0.lower(), std::min(1.0, nu0.upper()));
    if (!std::isfinite(g))
        fail(ErrorKind::Divergence, "base_drift: int_{(0,1]} y nu0(dy) is infinite for " + nu0.name());
    return g;
}

JumpPath drift_adjust(const JumpPath& path, const BaseMeasure& nu0, DriftDirection direction) {
    JumpPath out = path;
    switch (direction) {
        case DriftDirection::ExtractJumps: out.drift_rate = 0.0; break;
        case DriftDirection::SubtractBaseDrift: out.drift_rate -= base_drift(nu0); break;
    }
    return out;
}

}  // namespace lecam
