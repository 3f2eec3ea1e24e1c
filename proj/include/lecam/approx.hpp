#pragma once

#include "lecam/density.hpp"
#include "lecam/measures.hpp"

#include <ostream>
#include <span>
#include <vector>

namespace lecam {

enum class WeightKind { TriangularTrapezoid, QuarticCorrected };

/// The weight functions V_2..V_m on a grid. Between consecutive
/// representative points x_{j-1}*, x_j* the rising half of V_j is
///   (x - x_{j-1}*) / (x_j* - x_{j-1}*) / mu + b_j (x - x_j*)^2 (x - x_{j-1}*)^2
/// and the falling half of V_{j-1} is 1/mu minus that, so the family is a
/// partition of unity for every choice of b. The linear family has b = 0.
class WeightFamily {
public:
    struct Active {
        int count = 0;
        int j[2] = {0, 0};
        double w[2] = {0.0, 0.0};
    };

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] WeightKind kind() const { return kind_; }
    [[nodiscard]] int m() const { return grid_.m(); }

    [[nodiscard]] double eval(int j, double x) const;
    /// The (at most two) nonzero V_j at x.
    [[nodiscard]] Active active(double x) const;
    /// Closure of the set where V_j may be nonzero.
    [[nodiscard]] std::pair<double, double> support(int j) const;
    /// Correction coefficient b_j on [x_{j-1}*, x_j*]; zero outside 3..last node.
    [[nodiscard]] double b(int j) const;
    /// Points where V_j (or any f-hat built on it) is not smooth.
    [[nodiscard]] std::vector<double> kinks() const;
    /// int V_j dnu0 by quadrature, cached at construction.
    [[nodiscard]] double integral(int j) const { return integrals_[j - 2]; }
    /// max_j |int V_j dnu0 - 1|.
    [[nodiscard]] double normalization_error() const;

    friend WeightFamily build_weights_linear(const Grid& grid);
    friend WeightFamily build_weights_corrected(const Grid& grid);

private:
    WeightFamily(Grid grid, WeightKind kind, std::vector<double> b);
    [[nodiscard]] double rising(int j, double x) const;
    [[nodiscard]] double compute_integral(int j) const;

    Grid grid_;
    WeightKind kind_;
    std::vector<double> nodes_;  // x_2*..x_L*
    std::vector<double> b_;      // b_j at index j; zero-padded
    double inv_mu_;
    double flat_end_;  // right end of the last rising/flat piece of V_L
    std::vector<double> integrals_;
};

/// Triangular interior hats with flat end pieces.
WeightFamily build_weights_linear(const Grid& grid);
/// Linear shapes plus quartic corrections solving int V_j dnu0 = 1 exactly.
/// Throws Error(BandViolation) naming j if some V_j leaves [0, 1/mu].
WeightFamily build_weights_corrected(const Grid& grid);

class HatDensity {
public:
    HatDensity(WeightFamily weights, std::vector<double> theta);

    [[nodiscard]] const WeightFamily& weights() const { return w_; }
    /// theta_j = int_{J_j} f dnu0, j = 2..m.
    [[nodiscard]] double theta(int j) const { return theta_[j - 2]; }
    [[nodiscard]] const std::vector<double>& thetas() const { return theta_; }
    [[nodiscard]] double operator()(double x) const;
    /// Total mass int_{(eps, sup I)} f-hat dnu0 = sum of theta.
    [[nodiscard]] double total_mass() const;

private:
    WeightFamily w_;
    std::vector<double> theta_;
};

class BarDensity {
public:
    BarDensity(Grid grid, std::vector<double> values);

    [[nodiscard]] const Grid& grid() const { return grid_; }
    /// nu(J_j) / nu0(J_j), j = 2..m.
    [[nodiscard]] double value(int j) const { return values_[j - 2]; }
    [[nodiscard]] double operator()(double x) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

class TruncatedDensity {
public:
    TruncatedDensity(DensitySpec f, double eps) : f_(std::move(f)), eps_(eps) {}
    [[nodiscard]] double operator()(double x) const { return x <= eps_ ? 1.0 : f_(x); }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] const DensitySpec& base() const { return f_; }

private:
    DensitySpec f_;
    double eps_;
};

/// theta_j = int_{J_j} f dnu0 for j = 2..m.
std::vector<double> bin_masses(const DensitySpec& f, const Grid& grid);

HatDensity project_hat(const DensitySpec& f, const WeightFamily& weights);
BarDensity project_bar(const DensitySpec& f, const Grid& grid);
TruncatedDensity truncate(const DensitySpec& f, double eps);

/// Writes columns x, f, f_hat, f_bar at the given points.
void write_curves_csv(std::ostream& os, const DensitySpec& f, const HatDensity& hat,
                      const BarDensity& bar, std::span<const double> xs);

}  // namespace lecam
