#pragma once

#include "lecam/quadrature.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace lecam {

enum class MeasureKind { LebesgueUnit, OneOverXUnit, OneOverXSquaredHalfLine, NumericGeneric };

/// A Levy base measure nu0 with density g on a one-sided support [lower, upper].
/// The three named kinds carry closed forms; NumericGeneric falls back on
/// quadrature and bisection.
class BaseMeasure {
public:
    static BaseMeasure lebesgue_unit();
    static BaseMeasure one_over_x_unit();
    static BaseMeasure one_over_x_squared();
    /// `upper` may be +infinity. g must be positive on the open support.
    static BaseMeasure numeric(RealFn g, double lower, double upper, std::string name = "generic");

    [[nodiscard]] MeasureKind kind() const { return kind_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double lower() const { return lower_; }
    [[nodiscard]] double upper() const { return upper_; }
    [[nodiscard]] bool infinite_support() const;

    [[nodiscard]] double density(double x) const;
    /// nu0((a, b]).
    [[nodiscard]] double mass(double a, double b) const;
    /// int_a^b x nu0(dx).
    [[nodiscard]] double first_moment(double a, double b) const;
    /// v with nu0((a, v]) = p; +infinity when p exhausts the remaining mass.
    [[nodiscard]] double quantile(double p, double a) const;

    /// int_a^b h dnu0, computed in the coordinate where nu0 is flattest
    /// (log for 1/x, reciprocal for 1/x^2). `kinks` are x-locations where h is
    /// not smooth; they are split on before integrating.
    [[nodiscard]] double integrate(const RealFn& h, double a, double b,
                                   std::span<const double> kinks = {},
                                   const QuadOptions& opts = {}) const;

    /// A coordinate s in which nu0 has density flat_density(s): ds for
    /// Lebesgue, s = ln x for 1/x, s = -1/x for 1/x^2, and x or x/(1+x)
    /// weighted by g for the generic kind. Increasing in x.
    [[nodiscard]] double to_flat(double x) const;
    [[nodiscard]] double from_flat(double s) const;
    [[nodiscard]] double flat_density(double s) const;

private:
    BaseMeasure() = default;

    MeasureKind kind_ = MeasureKind::LebesgueUnit;
    std::string name_;
    double lower_ = 0.0;
    double upper_ = 1.0;
    std::shared_ptr<const RealFn> g_;
};

struct ParamClass {
    double gamma = 1.0;
    double K = 1.0;
    double kappa = 0.5;
    double M = 2.0;

    void validate() const;
};

struct ObservationScheme {
    long long n = 1;
    double delta = 1.0;
    double T = 1.0;

    static ObservationScheme make(long long n, double delta);
    /// Continuous-observation scheme with horizon T (n = 1, delta = T).
    static ObservationScheme continuous(double T);
    [[nodiscard]] double t(long long i) const;
};

/// Equal-mass partition of (eps, sup I] into bins J_2..J_m, plus J_1 = [0, eps].
/// Indices follow the math: j runs 1..m for cut points, 2..m for bins.
class Grid {
public:
    Grid(BaseMeasure nu0, int m, double eps, std::vector<double> v, std::vector<double> x_star,
         double mu);

    [[nodiscard]] const BaseMeasure& measure() const { return nu0_; }
    [[nodiscard]] int m() const { return m_; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] double mu() const { return mu_; }

    /// Cut point v_j, j = 1..m.
    [[nodiscard]] double v(int j) const { return v_[j - 1]; }
    /// Whether x_j* exists (false only for the last bin of an unbounded support).
    [[nodiscard]] bool has_x_star(int j) const;
    /// Representative point x_j*, j = 2..m.
    [[nodiscard]] double x_star(int j) const;
    /// Index of the last bin with a representative point.
    [[nodiscard]] int last_x_star() const { return static_cast<int>(x_star_.size()) + 1; }
    [[nodiscard]] double bin_lo(int j) const { return v(j - 1); }
    [[nodiscard]] double bin_hi(int j) const { return v(j); }
    /// Right-closed bin lookup: 1 for x <= eps, else the j with x in (v_{j-1}, v_j].
    [[nodiscard]] int bin_of(double x) const;

    [[nodiscard]] const std::vector<double>& cut_points() const { return v_; }
    [[nodiscard]] const std::vector<double>& representatives() const { return x_star_; }

    [[nodiscard]] nlohmann::json to_json() const;

private:
    BaseMeasure nu0_;
    int m_;
    double eps_;
    std::vector<double> v_;
    std::vector<double> x_star_;
    double mu_;
};

Grid build_grid(const BaseMeasure& nu0, int m, double eps);

struct DensitySpec;

struct H1Report {
    double min_value = 0.0;
    double max_value = 0.0;
    bool pass = false;
};

H1Report check_h1(const DensitySpec& f, const ParamClass& pc, std::span<const double> points);

/// Encodes a double for JSON output, with +-infinity as "inf"/"-inf".
nlohmann::json json_number(double x);

}  // namespace lecam
