#include "lecam/sampling.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lecam {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGlX = {-0.906179845938663992797626878299, -0.538469310105683091036314420700,
                                        0.0, 0.538469310105683091036314420700,
                                        0.906179845938663992797626878299};
constexpr std::array<double, 5> kGlW = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                                        0.568888888888888888888888888889, 0.478628670499366468041291514836,
                                        0.236926885056189087514264040720};

}  // namespace

InverseCdfTable::InverseCdfTable(const BaseMeasure& nu0, const RealFn& h, double lo, double hi,
                                 std::span<const double> kinks, int cells)
    : nu0_(nu0) {
    require(cells >= 1, "InverseCdfTable: need at least one cell");
    lo = std::max(lo, nu0.lower());
    hi = std::min(hi, nu0.upper());
    require(hi > lo, "InverseCdfTable: empty range");

    std::vector<double> edges{nu0.to_flat(lo)};
    for (double k : kinks)
        if (k > lo && k < hi) edges.push_back(nu0.to_flat(k));
    edges.push_back(nu0.to_flat(hi));
    std::sort(edges.begin(), edges.end());
    require(std::isfinite(edges.front()) && std::isfinite(edges.back()),
            "InverseCdfTable: range has unbounded nu0 mass");

    const double span = edges.back() - edges.front();
    s_.push_back(edges.front());
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p];
        const double b = edges[p + 1];
        if (b <= a) continue;
        const int n = std::max(1, static_cast<int>(std::lround(cells * (b - a) / span)));
        for (int i = 1; i <= n; ++i) s_.push_back(i == n ? b : a + (b - a) * i / n);
    }

    cum_.reserve(s_.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
        const double c = 0.5 * (s_[i] + s_[i + 1]);
        const double r = 0.5 * (s_[i + 1] - s_[i]);
        double w = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double s = c + r * kGlX[k];
            const double v = h(nu0.from_flat(s));
            require(v >= 0.0 && std::isfinite(v), "InverseCdfTable: density must be finite and >= 0");
            w += kGlW[k] * v * nu0.flat_density(s);
        }
        acc += w * r;
        cum_.push_back(acc);
    }
    total_ = acc;
    require(total_ > 0.0, "InverseCdfTable: density has zero mass on the range");
}

double InverseCdfTable::sample(Philox& rng) const {
    require(!cum_.empty(), "InverseCdfTable: empty table");
    const double target = rng.uniform() * total_;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    const std::size_t i = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
    const double left = i == 0 ? 0.0 : cum_[i - 1];
    const double w = cum_[i] - left;
    const double frac = w > 0.0 ? std::clamp((target - left) / w, 0.0, 1.0) : 0.5;
    double s = s_[i] + frac * (s_[i + 1] - s_[i]);
    if (s >= s_.back()) s = std::nextafter(s_.back(), s_.front());
    return nu0_->from_flat(s);
}

double InverseCdfTable::cdf(double x) const {
    const double s = nu0_->to_flat(x);
    if (s <= s_.front()) return 0.0;
    if (s >= s_.back()) return 1.0;
    const std::size_t i = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin() - 1;
    const double left = i == 0 ? 0.0 : cum_[i - 1];
    const double frac = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return (left + frac * (cum_[i] - left)) / total_;
}

}  // namespace lecam
