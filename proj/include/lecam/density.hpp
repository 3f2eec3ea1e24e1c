#pragma once

#include "lecam/measures.hpp"

#include <functional>
#include <optional>
#include <string>

namespace lecam {

/// A Levy density f = dnu/dnu0 together with its class parameters.
struct DensitySpec {
    std::string name;
    RealFn f;
    ParamClass params;
    /// x -> sup_{y >= x} f(y); when absent the sup is taken on a mesh.
    std::optional<RealFn> tail_sup;

    double operator()(double x) const { return f(x); }
    [[nodiscard]] DensitySpec sqrt() const;

    static DensitySpec constant(double c);
    static DensitySpec exp_decay(double lambda = 1.0);
    /// 1 + x^(1+gamma)/2, a member of the Holder class with exponent gamma on [0,1].
    static DensitySpec holder_example(double gamma);
    /// 2 - exp(-lambda x^3), the half-line example for nu0 = 1/x^2.
    static DensitySpec inv_square_example(double lambda = 1.0);
    static DensitySpec from_function(std::string name, RealFn f, ParamClass params = {});
};

/// sup_{x >= H} f(x), from `tail_sup` or a log-spaced mesh on [H, H * 1e6].
double tail_sup(const DensitySpec& f, double H);

}  // namespace lecam
