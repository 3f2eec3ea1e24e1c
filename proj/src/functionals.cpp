#include "lecam/functionals.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lecam {

namespace {

// Squared discrepancies shrink fast with m, so an absolute floor tied to
// O(1) integrals would swamp them. Pieces between kinks are smooth, which
// keeps a tight relative tolerance cheap.
QuadOptions fine_options() {
    QuadOptions o;
    o.abs_tol = std::min(default_abs_tol(), 1e-18);
    o.rel_tol = 1e-10;
    o.max_subintervals = 500;
    return o;
}

double clamp_h2(double h2) { return std::clamp(h2, 0.0, 2.0); }

std::string fmt12(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

bool DiscrepancyReport::sandwich_holds(double kappa, double M, double rel_tol) const {
    const double l2sq = l2 * l2;
    const double h2 = hellinger * hellinger;
    const double slack = rel_tol * l2sq + 1e-300;
    return l2sq / (4.0 * M) <= h2 + slack && h2 <= l2sq / (4.0 * kappa) + slack;
}

nlohmann::json DiscrepancyReport::to_json() const {
    return {{"a_m", a_m},   {"b_m", b_m},
            {"c_m", c_m},   {"l2", l2},
            {"hellinger", hellinger},
            {"region", {json_number(region_lo), json_number(region_hi)}},
            {"grid", grid_id}};
}

std::string DiscrepancyReport::csv_header() { return "grid,region_lo,region_hi,a_m,b_m,c_m,l2,hellinger"; }

std::string DiscrepancyReport::csv_row() const {
    std::ostringstream os;
    os << grid_id << ',' << fmt12(region_lo) << ',' << fmt12(region_hi) << ',' << fmt12(a_m) << ','
       << fmt12(b_m) << ',' << fmt12(c_m) << ',' << fmt12(l2) << ',' << fmt12(hellinger);
    return os.str();
}

DiscrepancyReport compute_abc(const DensitySpec& f, const WeightFamily& weights,
                              std::optional<double> horizon) {
    const Grid& grid = weights.grid();
    const BaseMeasure& nu0 = grid.measure();
    const double eps = grid.eps();
    double hi = nu0.upper();
    if (horizon) {
        require(*horizon > eps, "compute_abc: horizon must exceed eps");
        hi = std::min(hi, *horizon);
    }
    const QuadOptions opts = fine_options();

    const DensitySpec sf = f.sqrt();
    const std::vector<double> theta = bin_masses(f, grid);
    const std::vector<double> root = bin_masses(sf, grid);
    const HatDensity fhat(weights, theta);
    const HatDensity shat(weights, root);

    std::vector<double> kinks = weights.kinks();
    if (std::isfinite(hi)) kinks.push_back(hi);

    auto term = [&](const char* name, const RealFn& h, double a, double b) {
        try {
            return nu0.integrate(h, a, b, kinks, opts);
        } catch (const Error& e) {
            fail(e.kind(), std::string("compute_abc: ") + name + ": " + e.what());
        }
    };

    DiscrepancyReport r;
    r.region_lo = eps;
    r.region_hi = hi;
    std::ostringstream id;
    id << nu0.name() << "/m=" << grid.m() << "/eps=" << fmt12(eps)
       << (weights.kind() == WeightKind::QuarticCorrected ? "/corrected" : "/linear");
    r.grid_id = id.str();

    const double a2 = term("A_m", [&](double x) {
        const double d = shat(x) - sf(x);
        return d * d;
    }, eps, hi);
    const double l22 = term("L2", [&](double x) {
        const double d = f(x) - fhat(x);
        return d * d;
    }, eps, hi);
    const double h2 = term("H", [&](double x) {
        const double d = std::sqrt(f(x)) - std::sqrt(std::max(fhat(x), 0.0));
        return d * d;
    }, eps, hi);

    double b2 = 0.0;
    const double sqrt_mu = std::sqrt(grid.mu());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double d = root[i] / sqrt_mu - std::sqrt(theta[i]);
        b2 += d * d;
    }

    double c2 = 0.0;
    if (eps > nu0.lower()) {
        c2 = term("C_m", [&](double x) {
            const double d = sf(x) - 1.0;
            return d * d;
        }, nu0.lower(), eps);
    }

    r.a_m = std::sqrt(std::max(a2, 0.0));
    r.b_m = std::sqrt(b2);
    r.c_m = std::sqrt(std::max(c2, 0.0));
    r.l2 = std::sqrt(std::max(l22, 0.0));
    r.hellinger = std::sqrt(std::max(h2, 0.0));
    return r;
}

double hellinger_levy(const DensitySpec& f1, const DensitySpec& f2, const BaseMeasure& nu0,
                      double lo, double hi) {
    require(hi >= lo, "hellinger_levy: empty region");
    try {
        const double h2 = nu0.integrate(
            [&](double x) {
                const double d = std::sqrt(f1(x)) - std::sqrt(f2(x));
                return d * d;
            },
            lo, hi);
        if (!std::isfinite(h2)) fail(ErrorKind::Divergence, "hellinger_levy: integral diverges");
        return std::sqrt(std::max(h2, 0.0));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Quadrature)
            fail(ErrorKind::Divergence, std::string("hellinger_levy: integral diverges (") + e.what() + ")");
        throw;
    }
}

double hellinger_poisson(double l1, double l2) {
    require(l1 >= 0.0 && l2 >= 0.0, "hellinger_poisson: means must be >= 0");
    const double d = std::sqrt(l1) - std::sqrt(l2);
    return clamp_h2(-std::expm1(-0.5 * d * d));
}

double tv_bound_gaussian(double mu1, double s1, double mu2, double s2) {
    require(s1 > 0.0 && s2 > 0.0, "tv_bound_gaussian: standard deviations must be positive");
    const double r = 1.0 - (s1 * s1) / (s2 * s2);
    const double dm = mu1 - mu2;
    return std::sqrt(2.0 * r * r + dm * dm / (2.0 * s2 * s2));
}

double l1_bound_gaussian_drift(const RealFn& h1, const RealFn& h2, const RealFn& sigma, double T) {
    require(T >= 0.0, "l1_bound_gaussian_drift: T must be >= 0");
    const QuadResult r = integrate(
        [&](double s) {
            const double d = (h1(s) - h2(s)) / sigma(s);
            return d * d;
        },
        0.0, T);
    if (!r.converged || !std::isfinite(r.value))
        fail(ErrorKind::Divergence, "l1_bound_gaussian_drift: integral diverges");
    return std::sqrt(std::max(r.value, 0.0));
}

double process_hellinger_bound(const DensitySpec& f1, const DensitySpec& f2, const BaseMeasure& nu0,
                               double lo, double hi, double T) {
    require(T >= 0.0, "process_hellinger_bound: T must be >= 0");
    return std::sqrt(T / 2.0) * hellinger_levy(f1, f2, nu0, lo, hi);
}

double product_hellinger(std::span<const double> components) {
    double s = 0.0;
    for (double h2 : components) {
        require(h2 >= 0.0 && h2 <= 2.0, "product_hellinger: entries must lie in [0, 2]");
        s += h2;
    }
    return std::min(s, 2.0);
}

double bernoulli_poisson_tv_bound(std::span<const double> lambdas) {
    double s = 0.0;
    for (double l : lambdas) {
        require(l >= 0.0, "bernoulli_poisson_tv_bound: negative intensity");
        s += l * l;
    }
    return 2.0 * std::sqrt(s);
}

double poisson_hat_bound(const DensitySpec& f, const HatDensity& hat, double kappa, double T) {
    require(kappa > 0.0, "poisson_hat_bound: kappa must be positive");
    require(T >= 0.0, "poisson_hat_bound: T must be >= 0");
    const WeightFamily& w = hat.weights();
    const BaseMeasure& nu0 = w.grid().measure();
    const double l22 = nu0.integrate(
        [&](double x) {
            const double d = f(x) - hat(x);
            return d * d;
        },
        w.grid().eps(), nu0.upper(), w.kinks(), fine_options());
    return std::sqrt(T / kappa * std::max(l22, 0.0));
}

double loglik_ratio_finite(const JumpPath& path, const DensitySpec& f1, const DensitySpec& f2,
                           const BaseMeasure& nu0, double lo, double hi, double t) {
    require(t >= 0.0 && t <= path.T, "loglik_ratio_finite: t outside [0, T]");
    const double diff = nu0.integrate([&](double x) { return f1(x) - f2(x); }, lo, hi);
    if (!std::isfinite(diff)) fail(ErrorKind::Divergence, "loglik_ratio_finite: measures not finite");
    double u = -t * diff;
    for (const Jump& j : path.jumps) {
        if (j.time > t) break;
        if (!(j.size > lo && j.size <= hi)) {
            std::ostringstream os;
            os << "loglik_ratio_finite: jump of size " << j.size << " outside (" << lo << ", " << hi << "]";
            fail(ErrorKind::InvalidArgument, os.str());
        }
        const double p = f1(j.size);
        const double q = f2(j.size);
        require(q > 0.0, "loglik_ratio_finite: f2 vanishes at a jump");
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        u += std::log(p / q);
    }
    return u;
}

}  // namespace lecam
