#pragma once

#include "lecam/measures.hpp"
#include "lecam/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lecam {

/// Inverse-CDF sampler for a law with density h relative to nu0 on (lo, hi].
/// The range is cut into cells of equal length in the flat coordinate of nu0
/// (so equal nu0-mass for the named kinds), aligned to the given kinks; within
/// a cell the CDF is interpolated linearly in that coordinate.
class InverseCdfTable {
public:
    InverseCdfTable() = default;
    InverseCdfTable(const BaseMeasure& nu0, const RealFn& h, double lo, double hi,
                    std::span<const double> kinks = {}, int cells = 4096);

    /// Tabulated int_lo^hi h dnu0.
    [[nodiscard]] double total() const { return total_; }
    [[nodiscard]] bool empty() const { return cum_.empty(); }
    [[nodiscard]] double sample(Philox& rng) const;
    /// Tabulated CDF at x (for diagnostics; tests use independent oracles).
    [[nodiscard]] double cdf(double x) const;

private:
    std::optional<BaseMeasure> nu0_;
    std::vector<double> s_;    // cell edges in the flat coordinate
    std::vector<double> cum_;  // cumulative weight at the right edge of each cell
    double total_ = 0.0;
};

}  // namespace lecam
