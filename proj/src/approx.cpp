#include "lecam/approx.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lecam {

WeightFamily::WeightFamily(Grid grid, WeightKind kind, std::vector<double> b)
    : grid_(std::move(grid)), kind_(kind), b_(std::move(b)) {
    const int m = grid_.m();
    nodes_ = grid_.representatives();
    b_.resize(m + 2, 0.0);
    inv_mu_ = 1.0 / grid_.mu();
    flat_end_ = grid_.measure().infinite_support() ? grid_.v(m - 1) : grid_.v(m);
    integrals_.reserve(m - 1);
    for (int j = 2; j <= m; ++j) integrals_.push_back(compute_integral(j));
}

double WeightFamily::rising(int j, double x) const {
    const double lo = nodes_[j - 3];
    const double hi = nodes_[j - 2];
    const double lin = (x - lo) / (hi - lo) * inv_mu_;
    if (b_[j] == 0.0) return lin;
    const double d1 = x - hi;
    const double d0 = x - lo;
    return lin + b_[j] * d1 * d1 * d0 * d0;
}

WeightFamily::Active WeightFamily::active(double x) const {
    Active a;
    const int m = grid_.m();
    const int L = grid_.last_x_star();
    if (x <= grid_.eps() || x > grid_.v(m)) return a;
    a.count = 1;
    if (x > flat_end_) {
        a.j[0] = m;
        a.w[0] = inv_mu_;
        return a;
    }
    if (x <= nodes_.front()) {
        a.j[0] = 2;
        a.w[0] = inv_mu_;
        return a;
    }
    if (x > nodes_.back()) {
        a.j[0] = L;
        a.w[0] = inv_mu_;
        return a;
    }
    // x in (x_{j-1}*, x_j*]
    const int j = static_cast<int>(std::lower_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin()) + 2;
    const double r = rising(j, x);
    a.count = 2;
    a.j[0] = j;
    a.w[0] = r;
    a.j[1] = j - 1;
    a.w[1] = inv_mu_ - r;
    return a;
}

double WeightFamily::eval(int j, double x) const {
    const Active a = active(x);
    for (int i = 0; i < a.count; ++i)
        if (a.j[i] == j) return a.w[i];
    return 0.0;
}

std::pair<double, double> WeightFamily::support(int j) const {
    const int m = grid_.m();
    const int L = grid_.last_x_star();
    require(j >= 2 && j <= m, "WeightFamily::support: index out of range");
    if (j > L) return {flat_end_, grid_.v(m)};
    const double lo = j == 2 ? grid_.eps() : nodes_[j - 3];
    const double hi = j == L ? flat_end_ : nodes_[j - 1];
    return {lo, hi};
}

double WeightFamily::b(int j) const {
    if (j < 0 || j >= static_cast<int>(b_.size())) return 0.0;
    return b_[j];
}

std::vector<double> WeightFamily::kinks() const {
    std::vector<double> k{grid_.eps()};
    k.insert(k.end(), nodes_.begin(), nodes_.end());
    if (std::isfinite(flat_end_)) k.push_back(flat_end_);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

double WeightFamily::compute_integral(int j) const {
    const auto [lo, hi] = support(j);
    const std::vector<double> k = kinks();
    return grid_.measure().integrate([this, j](double x) { return eval(j, x); }, lo, hi, k);
}

double WeightFamily::normalization_error() const {
    double worst = 0.0;
    for (double v : integrals_) worst = std::max(worst, std::abs(v - 1.0));
    return worst;
}

WeightFamily build_weights_linear(const Grid& grid) {
    const MeasureKind k = grid.measure().kind();
    require(k == MeasureKind::LebesgueUnit || k == MeasureKind::OneOverXUnit,
            "build_weights_linear: only defined for the Lebesgue and 1/x base measures; "
            "use build_weights_corrected");
    return WeightFamily(grid, WeightKind::TriangularTrapezoid, {});
}

WeightFamily build_weights_corrected(const Grid& grid) {
    const BaseMeasure& nu0 = grid.measure();
    const int m = grid.m();
    const int L = grid.last_x_star();
    const double mu = grid.mu();
    std::vector<double> b(m + 2, 0.0);

    // Partial sums of the linear integrals telescope, so the correction mass
    // a_j = b_j * int q_j dnu0 only needs one segment at a time.
    for (int j = 3; j <= L; ++j) {
        const double lo = grid.x_star(j - 1);
        const double hi = grid.x_star(j);
        const double head = nu0.mass(grid.v(j - 2), lo) / mu;
        const double fall =
            nu0.integrate([=](double x) { return (hi - x) / (hi - lo); }, lo, hi) / mu;
        const double a = head + fall - 1.0;
        const double q = nu0.integrate(
            [=](double x) {
                const double d1 = x - hi;
                const double d0 = x - lo;
                return d1 * d1 * d0 * d0;
            },
            lo, hi);
        if (!(q > 0.0))
            fail(ErrorKind::Quadrature, "build_weights_corrected: degenerate segment j=" + std::to_string(j));
        b[j] = a / q;
    }

    WeightFamily w(grid, WeightKind::QuarticCorrected, b);

    const double tol = 1e-9 / mu;
    for (int j = 3; j <= L; ++j) {
        const double lo = grid.x_star(j - 1);
        const double hi = grid.x_star(j);
        for (int i = 0; i <= 64; ++i) {
            const double x = lo + (hi - lo) * i / 64.0;
            const double r = w.rising(j, x);
            if (r < -tol || r > 1.0 / mu + tol) {
                std::ostringstream os;
                os << "build_weights_corrected: V_" << (r < 0 ? j : j - 1)
                   << " leaves [0, 1/mu] at x=" << x << " (b_" << j << "=" << b[j]
                   << "); increase m";
                fail(ErrorKind::BandViolation, os.str());
            }
        }
    }
    if (w.normalization_error() > 1e-6) {
        std::ostringstream os;
        os << "build_weights_corrected: normalization residual " << w.normalization_error();
        fail(ErrorKind::RootFinding, os.str());
    }
    return w;
}

HatDensity::HatDensity(WeightFamily weights, std::vector<double> theta)
    : w_(std::move(weights)), theta_(std::move(theta)) {
    require(static_cast<int>(theta_.size()) == w_.m() - 1, "HatDensity: need one theta per bin");
}

double HatDensity::operator()(double x) const {
    if (x <= w_.grid().eps()) return 1.0;
    const WeightFamily::Active a = w_.active(x);
    double s = 0.0;
    for (int i = 0; i < a.count; ++i) s += a.w[i] * theta_[a.j[i] - 2];
    return s;
}

double HatDensity::total_mass() const {
    double s = 0.0;
    for (double t : theta_) s += t;
    return s;
}

BarDensity::BarDensity(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    require(static_cast<int>(values_.size()) == grid_.m() - 1, "BarDensity: need one value per bin");
}

double BarDensity::operator()(double x) const {
    const int j = grid_.bin_of(x);
    return j == 1 ? 1.0 : values_[j - 2];
}

std::vector<double> bin_masses(const DensitySpec& f, const Grid& grid) {
    std::vector<double> theta;
    theta.reserve(grid.m() - 1);
    for (int j = 2; j <= grid.m(); ++j) {
        try {
            theta.push_back(grid.measure().integrate(f.f, grid.v(j - 1), grid.v(j)));
        } catch (const Error& e) {
            fail(e.kind(), "bin " + std::to_string(j) + ": " + e.what());
        }
    }
    return theta;
}

HatDensity project_hat(const DensitySpec& f, const WeightFamily& weights) {
    return HatDensity(weights, bin_masses(f, weights.grid()));
}

BarDensity project_bar(const DensitySpec& f, const Grid& grid) {
    std::vector<double> vals = bin_masses(f, grid);
    for (int j = 2; j <= grid.m(); ++j) vals[j - 2] /= grid.measure().mass(grid.v(j - 1), grid.v(j));
    return BarDensity(grid, std::move(vals));
}

TruncatedDensity truncate(const DensitySpec& f, double eps) {
    require(eps >= 0.0, "truncate: eps must be >= 0");
    return TruncatedDensity(f, eps);
}

void write_curves_csv(std::ostream& os, const DensitySpec& f, const HatDensity& hat,
                      const BarDensity& bar, std::span<const double> xs) {
    const auto old = os.precision(12);
    os << "x,f,f_hat,f_bar\n";
    for (double x : xs) os << x << ',' << f(x) << ',' << hat(x) << ',' << bar(x) << '\n';
    os.precision(old);
}

}  // namespace lecam
