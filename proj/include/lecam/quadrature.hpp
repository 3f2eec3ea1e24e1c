#pragma once

#include <functional>
#include <span>

namespace lecam {

using RealFn = std::function<double(double)>;

struct QuadOptions {
    double abs_tol = -1.0;  // < 0 means "use default_abs_tol()"
    double rel_tol = 1e-9;
    int max_subintervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Default absolute tolerance, 1e-10 unless LECAM_QUAD_TOL is set.
double default_abs_tol();

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
/// `b` may be +infinity; the tail is mapped with u = 1/x when a > 0
/// and split at 1 otherwise. Never evaluates the endpoints, so integrable
/// endpoint singularities are fine.
QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opts = {});

/// Like `integrate` but throws Error(Quadrature) when the tolerance is not met.
double integrate_or_throw(const RealFn& f, double a, double b, const QuadOptions& opts = {});

/// Sum of adaptive integrals over consecutive pieces [bp[i], bp[i+1]].
/// Use it whenever the integrand has kinks at known points.
double integrate_pieces(const RealFn& f, std::span<const double> breakpoints,
                        const QuadOptions& opts = {});

/// Bisection for a root of a monotone function on [lo, hi]. The bracket must
/// change sign; stops at width <= width_tol.
double bisect(const RealFn& f, double lo, double hi, double width_tol = 1e-12,
              int max_iter = 400);

}  // namespace lecam
