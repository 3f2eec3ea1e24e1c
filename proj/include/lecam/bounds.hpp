#pragma once

#include "lecam/approx.hpp"
#include "lecam/density.hpp"
#include "lecam/functionals.hpp"
#include "lecam/measures.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lecam {

/// Raw right-hand-side terms of a deficiency bound, without the unknown
/// constants in front of them.
struct BoundBreakdown {
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;

    void add(std::string name, double value);
    [[nodiscard]] double term(const std::string& name) const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Continuous observation of the path up to T:
///   abc_term = sqrt(T)(A + B + C), l2_or_h_term = sqrt(T) L2,
///   poisson_gauss_term = sqrt(m / (T mu)).
/// The grid is one-sided, so only the positive-half term appears.
BoundBreakdown theorem1_terms(const DiscrepancyReport& report, const Grid& grid,
                              const ObservationScheme& scheme);

/// Discrete observation at n points with mesh delta:
///   truncation_term = nu0_tail_mass sqrt(n delta^2), multinomial_term = m ln m / sqrt(n),
///   c_term = sqrt(n sqrt(delta/2) C), abc_term = sqrt(T)(A + B), h_term = sqrt(T) H.
BoundBreakdown theorem2_terms(const DiscrepancyReport& report, const Grid& grid,
                              const ObservationScheme& scheme, double nu0_tail_mass);
/// Same, with n as a real: schedules can ask for n beyond any integer type.
BoundBreakdown theorem2_terms(const DiscrepancyReport& report, const Grid& grid, double n,
                              double delta, double nu0_tail_mass);

enum class Example { CPP, TruncGamma, InvSquare };

std::string to_string(Example e);
Example example_from_string(const std::string& s);

/// How eps_m is tied to the other parameters.
enum class EpsRule { Zero, PowerOfM, PowerOfSize };

/// A parameter schedule for one of the three worked examples. The size
/// variable s is n for discrete observations and T for continuous ones;
/// m = s^m_exponent and the predicted rate is s^rate_exponent (ln s)^log_power.
struct RateSchedule {
    Example example = Example::CPP;
    bool continuous = false;
    double beta = 0.0;  // delta_n = n^-beta; unused when continuous
    double gamma = 1.0;
    double lambda = 1.0;
    double m_exponent = 0.0;
    EpsRule eps_rule = EpsRule::Zero;
    double eps_exponent = 0.0;  // eps = m^-e or s^-e
    double eta = 0.0;           // H(m) = (eta/lambda ln m)^(1/3); 0 when there is no horizon
    double rate_exponent = 0.0;
    double log_power = 0.0;
    std::string regime;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Discrete schedule with delta_n = n^-beta. Throws InvalidArgument with the
/// admissible interval when beta (or gamma) is out of range.
RateSchedule schedule_for(Example example, double beta, double gamma = 1.0, double lambda = 1.0);
/// Continuous-observation schedule in terms of T.
RateSchedule schedule_continuous(Example example, double gamma = 1.0, double lambda = 1.0);

/// Concrete parameters of a schedule at size s.
struct ScheduleInstance {
    int m = 3;
    double eps = 0.0;
    std::optional<double> horizon;
    bool continuous = false;
    double n = 1.0;
    double delta = 1.0;
    double T = 1.0;
    double predicted = 0.0;

    /// Throws when n does not fit an integer.
    [[nodiscard]] ObservationScheme scheme() const;
};

ScheduleInstance instantiate(const RateSchedule& schedule, double size);
/// The size s at which the schedule picks m (inverse of m = s^m_exponent).
double size_for_m(const RateSchedule& schedule, int m);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int points = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// OLS slope of ln y on ln x with its standard error and a Student-t
/// confidence interval at `level`. Needs at least 4 points and y > 0; throws
/// Degenerate when the x values have no spread.
RateFit fit_rate(std::span<const double> xs, std::span<const double> ys, double level = 0.95);

/// 2 sup_{x >= H} f(x)^2 / H.
double horizon_tail_term(const DensitySpec& f, double H);
/// 4 exp(-2 lambda H^3) / H, the sharper tail bound for 2 - exp(-lambda x^3).
double inv_square_tail_term(double lambda, double H);

/// One row of a rate sweep: the example's approximation quantity at m and
/// the bound terms at the schedule's (n, delta) for that m.
struct SweepRow {
    int m = 0;
    double eps = 0.0;
    std::optional<double> horizon;
    double n = 1.0;
    double delta = 1.0;
    double T = 1.0;
    DiscrepancyReport report;
    double quantity = 0.0;
    double fit_x = 0.0;
    BoundBreakdown bound;
};

struct SweepConfig {
    Example example = Example::CPP;
    double gamma = 1.0;
    double lambda = 1.0;
    std::optional<double> beta;  // discrete schedule when set
    std::optional<double> eps;   // InvSquare only; defaults to 1
    std::vector<int> ms = {8, 16, 32, 64, 128, 256, 512};
};

/// The quantity per example:
///   CPP: L2 + A + B on Lebesgue with f = 1 + x^(1+gamma)/2, eps = 0.
///   TruncGamma: L2 + A + B on 1/x with f = exp(-lambda x), eps = m^-2.
///   InvSquare: L2^2 + A^2 + B^2 up to H = sqrt(eps m) plus the tail term
///     2 sup f^2 / H, on 1/x^2 with f = 2 - exp(-lambda x^3) and corrected weights;
///     fitted against eps m.
std::vector<SweepRow> rate_sweep(const SweepConfig& cfg);

/// Fit over the rows with m >= min_m (pre-asymptotic points dropped).
RateFit fit_sweep(std::span<const SweepRow> rows, int min_m = 32);

/// Columns m, n, delta, T, eps, H, quantity, each bound term, total.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace lecam
