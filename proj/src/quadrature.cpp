#include "lecam/quadrature.hpp"

#include "lecam/error.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace lecam {

namespace {

// Kronrod 15-point abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const RealFn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double s = f(c - dx) + f(c + dx);
        kron += kWgk[i] * s;
        if (i % 2 == 1) gauss += kWg[i / 2] * s;
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}

QuadResult integrate_finite(const RealFn& f, double a, double b, const QuadOptions& opts) {
    const double abs_tol = opts.abs_tol < 0 ? default_abs_tol() : opts.abs_tol;
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    heap.push(first);
    double total = first.value;
    double err = first.error;
    out.evaluations = 15;
    int count = 1;
    while (err > std::max(abs_tol, opts.rel_tol * std::abs(total)) &&
           count < opts.max_subintervals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval below resolution
        heap.pop();
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = err;
    out.converged = std::isfinite(total) &&
                    err <= std::max(abs_tol, opts.rel_tol * std::abs(total));
    return out;
}

}  // namespace

double default_abs_tol() {
    if (const char* env = std::getenv("LECAM_QUAD_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0 && std::isfinite(v)) return v;
    }
    return 1e-10;
}

QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opts) {
    require(!std::isnan(a) && !std::isnan(b), "integrate: NaN endpoint");
    require(std::isfinite(a), "integrate: lower endpoint must be finite");
    if (b < a) {
        QuadResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    if (std::isfinite(b)) return integrate_finite(f, a, b, opts);

    if (a > 0.0) {
        // x = 1/u, dx = du/u^2 maps (a, inf) onto (0, 1/a).
        RealFn g = [&f](double u) { return f(1.0 / u) / (u * u); };
        return integrate_finite(g, 0.0, 1.0 / a, opts);
    }
    QuadResult head = integrate_finite(f, a, 1.0, opts);
    RealFn g = [&f](double u) { return f(1.0 / u) / (u * u); };
    QuadResult tail = integrate_finite(g, 0.0, 1.0, opts);
    return {head.value + tail.value, head.abs_error + tail.abs_error,
            head.evaluations + tail.evaluations, head.converged && tail.converged};
}

double integrate_or_throw(const RealFn& f, double a, double b, const QuadOptions& opts) {
    QuadResult r = integrate(f, a, b, opts);
    if (!r.converged) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "]: value=" << r.value
           << " est.error=" << r.abs_error;
        fail(ErrorKind::Quadrature, os.str());
    }
    return r.value;
}

double integrate_pieces(const RealFn& f, std::span<const double> bp, const QuadOptions& opts) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (bp[i + 1] > bp[i]) total += integrate_or_throw(f, bp[i], bp[i + 1], opts);
    }
    return total;
}

double bisect(const RealFn& f, double lo, double hi, double width_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        std::ostringstream os;
        os << "bisect: root not bracketed on [" << lo << ", " << hi << "] (f=" << flo << ", "
           << fhi << ")";
        fail(ErrorKind::RootFinding, os.str());
    }
    for (int it = 0; it < max_iter && hi - lo > width_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace lecam
