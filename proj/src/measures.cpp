#include "lecam/measures.hpp"

#include "lecam/density.hpp"
#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lecam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

BaseMeasure BaseMeasure::lebesgue_unit() {
    BaseMeasure b;
    b.kind_ = MeasureKind::LebesgueUnit;
    b.name_ = "lebesgue";
    b.lower_ = 0.0;
    b.upper_ = 1.0;
    return b;
}

BaseMeasure BaseMeasure::one_over_x_unit() {
    BaseMeasure b;
    b.kind_ = MeasureKind::OneOverXUnit;
    b.name_ = "inv";
    b.lower_ = 0.0;
    b.upper_ = 1.0;
    return b;
}

BaseMeasure BaseMeasure::one_over_x_squared() {
    BaseMeasure b;
    b.kind_ = MeasureKind::OneOverXSquaredHalfLine;
    b.name_ = "invsq";
    b.lower_ = 0.0;
    b.upper_ = kInf;
    return b;
}

BaseMeasure BaseMeasure::numeric(RealFn g, double lower, double upper, std::string name) {
    require(static_cast<bool>(g), "numeric base measure needs a density");
    require(std::isfinite(lower) && lower >= 0.0, "numeric base measure: lower end must be >= 0");
    require(upper > lower, "numeric base measure: empty support");
    BaseMeasure b;
    b.kind_ = MeasureKind::NumericGeneric;
    b.name_ = std::move(name);
    b.lower_ = lower;
    b.upper_ = upper;
    b.g_ = std::make_shared<const RealFn>(std::move(g));
    return b;
}

bool BaseMeasure::infinite_support() const { return std::isinf(upper_); }

double BaseMeasure::density(double x) const {
    switch (kind_) {
        case MeasureKind::LebesgueUnit: return 1.0;
        case MeasureKind::OneOverXUnit: return 1.0 / x;
        case MeasureKind::OneOverXSquaredHalfLine: return 1.0 / (x * x);
        case MeasureKind::NumericGeneric: return (*g_)(x);
    }
    return 0.0;
}

double BaseMeasure::mass(double a, double b) const {
    a = std::max(a, lower_);
    b = std::min(b, upper_);
    if (b <= a) return 0.0;
    switch (kind_) {
        case MeasureKind::LebesgueUnit: return b - a;
        case MeasureKind::OneOverXUnit: return a == 0.0 ? kInf : std::log(b / a);
        case MeasureKind::OneOverXSquaredHalfLine:
            return a == 0.0 ? kInf : (std::isinf(b) ? 1.0 / a : 1.0 / a - 1.0 / b);
        case MeasureKind::NumericGeneric: {
            QuadResult r = lecam::integrate(*g_, a, b);
            if (!r.converged || !std::isfinite(r.value)) return kInf;
            return r.value;
        }
    }
    return 0.0;
}

double BaseMeasure::first_moment(double a, double b) const {
    a = std::max(a, lower_);
    b = std::min(b, upper_);
    if (b <= a) return 0.0;
    switch (kind_) {
        case MeasureKind::LebesgueUnit: return 0.5 * (b * b - a * a);
        case MeasureKind::OneOverXUnit: return b - a;
        case MeasureKind::OneOverXSquaredHalfLine:
            return std::isinf(b) || a == 0.0 ? kInf : std::log(b / a);
        case MeasureKind::NumericGeneric: {
            const RealFn& g = *g_;
            QuadResult r = lecam::integrate([&g](double x) { return x * g(x); }, a, b);
            if (!r.converged || !std::isfinite(r.value)) return kInf;
            return r.value;
        }
    }
    return 0.0;
}

double BaseMeasure::quantile(double p, double a) const {
    require(p >= 0.0, "quantile: negative mass");
    a = std::max(a, lower_);
    if (p == 0.0) return a;
    double v = kInf;
    switch (kind_) {
        case MeasureKind::LebesgueUnit: v = a + p; break;
        case MeasureKind::OneOverXUnit:
            require(a > 0.0, "quantile: 1/x has infinite mass near 0");
            v = a * std::exp(p);
            break;
        case MeasureKind::OneOverXSquaredHalfLine:
            require(a > 0.0, "quantile: 1/x^2 has infinite mass near 0");
            v = p * a >= 1.0 ? kInf : 1.0 / (1.0 / a - p);
            break;
        case MeasureKind::NumericGeneric: {
            const double rest = mass(a, upper_);
            if (p >= rest) return upper_ == kInf ? kInf : upper_;
            double hi = upper_;
            if (std::isinf(hi)) {
                hi = std::max(2.0 * a, 1.0);
                while (mass(a, hi) < p) {
                    hi *= 2.0;
                    if (!std::isfinite(hi)) fail(ErrorKind::RootFinding, "quantile: cannot bracket");
                }
            }
            return bisect([&](double x) { return mass(a, x) - p; }, a, hi,
                          1e-12 * std::max(1.0, std::abs(hi)));
        }
    }
    if (v > upper_) {
        // Absorb round-off so that the last cut lands exactly on the support end.
        if (std::isfinite(upper_) && v - upper_ <= 1e-12 * std::max(1.0, upper_)) return upper_;
        return kInf;
    }
    return v;
}

double BaseMeasure::integrate(const RealFn& h, double a, double b, std::span<const double> kinks,
                              const QuadOptions& opts) const {
    a = std::max(a, lower_);
    b = std::min(b, upper_);
    if (b <= a) return 0.0;

    std::vector<double> xs{a};
    for (double k : kinks)
        if (k > a && k < b) xs.push_back(k);
    xs.push_back(b);
    std::sort(xs.begin(), xs.end());

    std::vector<double> bp;
    RealFn integrand;
    switch (kind_) {
        case MeasureKind::LebesgueUnit:
            return integrate_pieces(h, xs, opts);
        case MeasureKind::OneOverXUnit:
            if (a == 0.0) break;
            // s = ln x flattens 1/x.
            for (double x : xs) bp.push_back(std::log(x));
            return integrate_pieces([&h](double s) { return h(std::exp(s)); }, bp, opts);
        case MeasureKind::OneOverXSquaredHalfLine:
            if (a == 0.0) break;
            // u = 1/x flattens 1/x^2 and compactifies the half-line.
            for (auto it = xs.rbegin(); it != xs.rend(); ++it)
                bp.push_back(std::isinf(*it) ? 0.0 : 1.0 / *it);
            return integrate_pieces([&h](double u) { return h(1.0 / u); }, bp, opts);
        case MeasureKind::NumericGeneric:
            break;
    }
    return integrate_pieces([&](double x) { return h(x) * density(x); }, xs, opts);
}

double BaseMeasure::to_flat(double x) const {
    switch (kind_) {
        case MeasureKind::LebesgueUnit: return x;
        case MeasureKind::OneOverXUnit: return std::log(x);
        case MeasureKind::OneOverXSquaredHalfLine: return std::isinf(x) ? 0.0 : -1.0 / x;
        case MeasureKind::NumericGeneric:
            if (!infinite_support()) return x;
            return std::isinf(x) ? 1.0 : x / (1.0 + x);
    }
    return x;
}

double BaseMeasure::from_flat(double s) const {
    switch (kind_) {
        case MeasureKind::LebesgueUnit: return s;
        case MeasureKind::OneOverXUnit: return std::exp(s);
        case MeasureKind::OneOverXSquaredHalfLine: return s >= 0.0 ? kInf : -1.0 / s;
        case MeasureKind::NumericGeneric:
            if (!infinite_support()) return s;
            return s >= 1.0 ? kInf : s / (1.0 - s);
    }
    return s;
}

double BaseMeasure::flat_density(double s) const {
    if (kind_ != MeasureKind::NumericGeneric) return 1.0;
    if (!infinite_support()) return (*g_)(s);
    const double d = 1.0 - s;
    return (*g_)(s / d) / (d * d);
}

void ParamClass::validate() const {
    require(gamma > 0.0 && gamma <= 1.0, "ParamClass: gamma must lie in (0, 1]");
    require(K > 0.0, "ParamClass: K must be positive");
    require(kappa > 0.0 && kappa <= M, "ParamClass: need 0 < kappa <= M");
}

ObservationScheme ObservationScheme::make(long long n, double delta) {
    require(n >= 1, "ObservationScheme: n must be >= 1");
    require(delta > 0.0 && std::isfinite(delta), "ObservationScheme: delta must be positive");
    return {n, delta, n * delta};
}

ObservationScheme ObservationScheme::continuous(double T) { return make(1, T); }

double ObservationScheme::t(long long i) const {
    require(i >= 0 && i <= n, "ObservationScheme::t: index out of range");
    if (i == n) return T;
    return T * i / n;
}

Grid::Grid(BaseMeasure nu0, int m, double eps, std::vector<double> v, std::vector<double> x_star,
           double mu)
    : nu0_(std::move(nu0)), m_(m), eps_(eps), v_(std::move(v)), x_star_(std::move(x_star)), mu_(mu) {
    require(m_ >= 2 && static_cast<int>(v_.size()) == m_, "Grid: need m cut points");
    require(static_cast<int>(x_star_.size()) >= m_ - 2 && static_cast<int>(x_star_.size()) <= m_ - 1,
            "Grid: wrong number of representative points");
    for (int j = 1; j < m_; ++j) require(v_[j] > v_[j - 1], "Grid: cut points must increase");
}

bool Grid::has_x_star(int j) const { return j >= 2 && j <= last_x_star(); }

double Grid::x_star(int j) const {
    require(has_x_star(j), "Grid::x_star: index out of range");
    return x_star_[j - 2];
}

int Grid::bin_of(double x) const {
    if (x <= eps_) return 1;
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    if (it == v_.end()) return m_;  // beyond sup I; callers validate support
    return static_cast<int>(it - v_.begin()) + 1;
}

nlohmann::json Grid::to_json() const {
    nlohmann::json vj = nlohmann::json::array();
    for (double x : v_) vj.push_back(json_number(x));
    nlohmann::json xj = nlohmann::json::array();
    for (double x : x_star_) xj.push_back(json_number(x));
    return {{"measure", nu0_.name()}, {"m", m_}, {"eps", json_number(eps_)},
            {"v", vj}, {"x_star", xj}, {"mu", json_number(mu_)}};
}

nlohmann::json json_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

Grid build_grid(const BaseMeasure& nu0, int m, double eps) {
    require(m >= 3, "build_grid: m must be >= 3, got " + std::to_string(m));
    require(eps >= 0.0 && std::isfinite(eps), "build_grid: eps must be finite and >= 0");
    require(eps >= nu0.lower() && eps < nu0.upper(), "build_grid: eps outside the support");

    const double n1 = m - 1;
    std::vector<double> v(m);
    std::vector<double> xs;
    double mu = 0.0;

    switch (nu0.kind()) {
        case MeasureKind::LebesgueUnit: {
            mu = (1.0 - eps) / n1;
            for (int j = 1; j <= m; ++j) v[j - 1] = eps + (1.0 - eps) * (j - 1) / n1;
            v[m - 1] = 1.0;
            for (int j = 2; j <= m; ++j) xs.push_back(0.5 * (v[j - 2] + v[j - 1]));
            break;
        }
        case MeasureKind::OneOverXUnit: {
            require(eps > 0.0, "build_grid: 1/x has infinite mass, eps must be > 0");
            mu = -std::log(eps) / n1;
            for (int j = 1; j <= m; ++j) v[j - 1] = std::pow(eps, (m - j) / n1);
            for (int j = 2; j <= m; ++j) xs.push_back((v[j - 1] - v[j - 2]) / mu);
            break;
        }
        case MeasureKind::OneOverXSquaredHalfLine: {
            require(eps > 0.0, "build_grid: 1/x^2 has infinite mass, eps must be > 0");
            mu = 1.0 / (eps * n1);
            for (int j = 1; j < m; ++j) v[j - 1] = eps * n1 / (m - j);
            v[m - 1] = kInf;
            for (int j = 2; j < m; ++j) xs.push_back(eps * n1 * std::log1p(1.0 / (m - j)));
            break;
        }
        case MeasureKind::NumericGeneric: {
            const double total = nu0.mass(eps, nu0.upper());
            if (!std::isfinite(total))
                fail(ErrorKind::InvalidArgument,
                     "build_grid: nu0((eps, sup I)) is not finite for eps=" + fmt(eps));
            mu = total / n1;
            v[0] = eps;
            for (int j = 2; j < m; ++j) {
                v[j - 1] = nu0.quantile(mu, v[j - 2]);
                if (!std::isfinite(v[j - 1]) || v[j - 1] >= nu0.upper())
                    fail(ErrorKind::RootFinding,
                         "build_grid: cut point v_" + std::to_string(j) + " not bracketable");
            }
            v[m - 1] = nu0.upper();
            const int last = nu0.infinite_support() ? m - 1 : m;
            for (int j = 2; j <= last; ++j)
                xs.push_back(nu0.first_moment(v[j - 2], v[j - 1]) / nu0.mass(v[j - 2], v[j - 1]));
            break;
        }
    }
    return Grid(nu0, m, eps, std::move(v), std::move(xs), mu);
}

H1Report check_h1(const DensitySpec& f, const ParamClass& pc, std::span<const double> points) {
    require(!points.empty(), "check_h1: empty point list");
    H1Report r;
    r.min_value = kInf;
    r.max_value = -kInf;
    for (double x : points) {
        const double y = f(x);
        r.min_value = std::min(r.min_value, y);
        r.max_value = std::max(r.max_value, y);
    }
    r.pass = r.min_value >= pc.kappa && r.max_value <= pc.M;
    return r;
}

}  // namespace lecam
