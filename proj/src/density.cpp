#include "lecam/density.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>

namespace lecam {

DensitySpec DensitySpec::sqrt() const {
    DensitySpec s;
    s.name = "sqrt(" + name + ")";
    RealFn inner = f;
    s.f = [inner](double x) { return std::sqrt(inner(x)); };
    s.params = params;
    s.params.kappa = std::sqrt(params.kappa);
    s.params.M = std::sqrt(params.M);
    if (tail_sup) {
        RealFn ts = *tail_sup;
        s.tail_sup = [ts](double x) { return std::sqrt(ts(x)); };
    }
    return s;
}

DensitySpec DensitySpec::constant(double c) {
    require(c > 0.0, "constant density must be positive");
    DensitySpec d;
    d.name = "const";
    d.f = [c](double) { return c; };
    d.params = {1.0, 1.0, c, c};
    d.tail_sup = [c](double) { return c; };
    return d;
}

DensitySpec DensitySpec::exp_decay(double lambda) {
    require(lambda > 0.0, "exp_decay: lambda must be positive");
    DensitySpec d;
    d.name = "exp";
    d.f = [lambda](double x) { return std::exp(-lambda * x); };
    d.params = {1.0, lambda, std::exp(-lambda), 1.0};
    d.tail_sup = [lambda](double x) { return std::exp(-lambda * std::max(x, 0.0)); };
    return d;
}

DensitySpec DensitySpec::holder_example(double gamma) {
    require(gamma > 0.0 && gamma <= 1.0, "holder_example: gamma must lie in (0, 1]");
    DensitySpec d;
    d.name = "holder";
    d.f = [gamma](double x) { return 1.0 + 0.5 * std::pow(x, 1.0 + gamma); };
    d.params = {gamma, 0.5 * (1.0 + gamma), 1.0, 1.5};
    d.tail_sup = [gamma](double x) { return 1.0 + 0.5 * std::pow(std::max(x, 1.0), 1.0 + gamma); };
    return d;
}

DensitySpec DensitySpec::inv_square_example(double lambda) {
    require(lambda > 0.0, "inv_square_example: lambda must be positive");
    DensitySpec d;
    d.name = "invsq";
    d.f = [lambda](double x) { return 2.0 - std::exp(-lambda * x * x * x); };
    d.params = {1.0, 3.0 * lambda, 1.0, 2.0};
    d.tail_sup = [](double) { return 2.0; };
    return d;
}

DensitySpec DensitySpec::from_function(std::string name, RealFn f, ParamClass params) {
    require(static_cast<bool>(f), "from_function: empty callable");
    DensitySpec d;
    d.name = std::move(name);
    d.f = std::move(f);
    d.params = params;
    return d;
}

double tail_sup(const DensitySpec& f, double H) {
    require(H > 0.0, "tail_sup: H must be positive");
    if (f.tail_sup) return (*f.tail_sup)(H);
    double best = f(H);
    const int n = 2000;
    for (int i = 1; i <= n; ++i) best = std::max(best, f(H * std::pow(1e6, double(i) / n)));
    return best;
}

}  // namespace lecam
