#include "lecam/bounds.hpp"

#include "lecam/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace lecam {

namespace {

std::string interval_msg(const char* what, double lo, double hi, bool hi_open, double got) {
    std::ostringstream os;
    os << what << " must lie in (" << lo << ", " << hi << (hi_open ? ")" : "]") << ", got " << got;
    return os.str();
}

double sqrt_nonneg(double x) { return std::sqrt(std::max(x, 0.0)); }

BaseMeasure measure_for(Example e) {
    switch (e) {
        case Example::CPP: return BaseMeasure::lebesgue_unit();
        case Example::TruncGamma: return BaseMeasure::one_over_x_unit();
        case Example::InvSquare: return BaseMeasure::one_over_x_squared();
    }
    return BaseMeasure::lebesgue_unit();
}

DensitySpec density_for(const SweepConfig& cfg) {
    switch (cfg.example) {
        case Example::CPP: return DensitySpec::holder_example(cfg.gamma);
        case Example::TruncGamma: return DensitySpec::exp_decay(cfg.lambda);
        case Example::InvSquare: return DensitySpec::inv_square_example(cfg.lambda);
    }
    return DensitySpec::constant(1.0);
}

WeightFamily weights_for(Example e, const Grid& grid) {
    return e == Example::InvSquare ? build_weights_corrected(grid) : build_weights_linear(grid);
}

}  // namespace

void BoundBreakdown::add(std::string name, double value) {
    require(value >= 0.0 && !std::isnan(value), "BoundBreakdown: term '" + name + "' must be >= 0");
    terms.emplace_back(std::move(name), value);
    total += value;
}

double BoundBreakdown::term(const std::string& name) const {
    for (const auto& [k, v] : terms)
        if (k == name) return v;
    fail(ErrorKind::InvalidArgument, "BoundBreakdown: no term '" + name + "'");
}

nlohmann::json BoundBreakdown::to_json() const {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : terms) t[k] = json_number(v);
    return {{"terms", t}, {"total", json_number(total)}};
}

BoundBreakdown theorem1_terms(const DiscrepancyReport& report, const Grid& grid,
                              const ObservationScheme& scheme) {
    const double rt = std::sqrt(scheme.T);
    BoundBreakdown b;
    b.add("abc_term", rt * (report.a_m + report.b_m + report.c_m));
    b.add("l2_or_h_term", rt * report.l2);
    b.add("poisson_gauss_term", std::sqrt(grid.m() / (scheme.T * grid.mu())));
    return b;
}

BoundBreakdown theorem2_terms(const DiscrepancyReport& report, const Grid& grid,
                              const ObservationScheme& scheme, double nu0_tail_mass) {
    return theorem2_terms(report, grid, static_cast<double>(scheme.n), scheme.delta, nu0_tail_mass);
}

BoundBreakdown theorem2_terms(const DiscrepancyReport& report, const Grid& grid, double n,
                              double delta, double nu0_tail_mass) {
    require(nu0_tail_mass >= 0.0, "theorem2_terms: nu0 tail mass must be >= 0");
    require(n >= 1.0 && delta > 0.0, "theorem2_terms: need n >= 1 and delta > 0");
    const double m = grid.m();
    const double rt = std::sqrt(n * delta);
    BoundBreakdown b;
    b.add("truncation_term", nu0_tail_mass * std::sqrt(n * delta * delta));
    b.add("multinomial_term", m * std::log(m) / std::sqrt(n));
    b.add("c_term", sqrt_nonneg(n * std::sqrt(delta / 2.0) * report.c_m));
    b.add("abc_term", rt * (report.a_m + report.b_m));
    b.add("h_term", rt * report.hellinger);
    return b;
}

std::string to_string(Example e) {
    switch (e) {
        case Example::CPP: return "cpp";
        case Example::TruncGamma: return "truncgamma";
        case Example::InvSquare: return "invsquare";
    }
    return "?";
}

Example example_from_string(const std::string& s) {
    if (s == "cpp") return Example::CPP;
    if (s == "truncgamma") return Example::TruncGamma;
    if (s == "invsquare") return Example::InvSquare;
    fail(ErrorKind::InvalidArgument, "unknown example '" + s + "' (expected cpp, truncgamma or invsquare)");
}

nlohmann::json RateSchedule::to_json() const {
    const char* rule = eps_rule == EpsRule::Zero ? "zero" : eps_rule == EpsRule::PowerOfM ? "m^-e" : "s^-e";
    nlohmann::json j = {{"example", to_string(example)},
                        {"continuous", continuous},
                        {"size_variable", continuous ? "T" : "n"},
                        {"gamma", gamma},
                        {"lambda", lambda},
                        {"m_exponent", m_exponent},
                        {"eps_rule", rule},
                        {"eps_exponent", eps_exponent},
                        {"eta", eta},
                        {"rate_exponent", rate_exponent},
                        {"log_power", log_power},
                        {"regime", regime}};
    if (!continuous) j["beta"] = beta;
    return j;
}

RateSchedule schedule_for(Example example, double beta, double gamma, double lambda) {
    require(lambda > 0.0, "schedule_for: lambda must be positive");
    RateSchedule s;
    s.example = example;
    s.beta = beta;
    s.gamma = gamma;
    s.lambda = lambda;
    switch (example) {
        case Example::CPP: {
            require(beta > 0.5 && beta < 1.0, interval_msg("schedule_for(cpp): beta", 0.5, 1.0, true, beta));
            require(gamma > 0.0 && gamma <= 1.0, interval_msg("schedule_for(cpp): gamma", 0.0, 1.0, false, gamma));
            s.log_power = 1.0;
            if (gamma >= 0.5) {
                if (beta >= 0.75) {
                    s.m_exponent = (2.0 - beta) / 5.0;
                    s.rate_exponent = -(2.0 * beta + 1.0) / 10.0;
                    s.regime = "gamma>=1/2, beta>=3/4";
                } else {
                    s.m_exponent = 1.0 - beta;
                    s.rate_exponent = 0.5 - beta;
                    s.regime = "gamma>=1/2, beta<3/4";
                }
            } else {
                const double crit = (2.0 + 2.0 * gamma) / (3.0 + 2.0 * gamma);
                if (beta >= crit) {
                    s.m_exponent = (2.0 - beta) / (4.0 + 2.0 * gamma);
                    s.rate_exponent = -(gamma + beta) / (4.0 + 2.0 * gamma);
                    s.regime = "gamma<1/2, beta>=(2+2gamma)/(3+2gamma)";
                } else {
                    s.m_exponent = 1.0 - beta;
                    s.rate_exponent = 0.5 - beta;
                    s.regime = "gamma<1/2, beta<(2+2gamma)/(3+2gamma)";
                }
            }
            break;
        }
        case Example::TruncGamma:
            require(beta > 0.5 && beta < 1.0,
                    interval_msg("schedule_for(truncgamma): beta", 0.5, 1.0, true, beta));
            s.m_exponent = (5.0 - 4.0 * beta) / 14.0;
            s.eps_rule = EpsRule::PowerOfM;
            s.eps_exponent = 16.0;
            s.log_power = 1.0;
            if (beta <= 0.9) {
                s.rate_exponent = 0.5 - beta;
                s.regime = "beta<=9/10";
            } else {
                s.rate_exponent = -(1.0 + 2.0 * beta) / 7.0;
                s.regime = "beta>9/10";
            }
            break;
        case Example::InvSquare:
            require(beta > 0.75 && beta < 1.0,
                    interval_msg("schedule_for(invsquare): beta", 0.75, 1.0, true, beta));
            s.m_exponent = 1.0 / 3.0 + beta / 18.0;
            s.eps_rule = EpsRule::PowerOfSize;
            s.eps_exponent = beta / 3.0;
            s.eta = 2.0;
            if (beta < 12.0 / 13.0) {
                s.rate_exponent = 0.5 - 2.0 * beta / 3.0;
                s.regime = "beta<12/13";
            } else {
                s.rate_exponent = -1.0 / 6.0 + beta / 18.0;
                s.log_power = 7.0 / 6.0;
                s.regime = "beta>=12/13";
            }
            break;
    }
    return s;
}

RateSchedule schedule_continuous(Example example, double gamma, double lambda) {
    require(lambda > 0.0, "schedule_continuous: lambda must be positive");
    RateSchedule s;
    s.example = example;
    s.continuous = true;
    s.gamma = gamma;
    s.lambda = lambda;
    switch (example) {
        case Example::CPP:
            require(gamma > 0.0 && gamma <= 1.0,
                    interval_msg("schedule_continuous(cpp): gamma", 0.0, 1.0, false, gamma));
            if (gamma <= 0.5) {
                s.m_exponent = 1.0 / (2.0 + gamma);
                s.rate_exponent = -gamma / (4.0 + 2.0 * gamma);
                s.regime = "gamma<=1/2";
            } else {
                s.m_exponent = 0.4;
                s.rate_exponent = -0.1;
                s.regime = "gamma>1/2";
            }
            break;
        case Example::TruncGamma:
            s.m_exponent = 1.0 / 3.0;
            s.eps_rule = EpsRule::PowerOfM;
            s.eps_exponent = 2.0;
            s.rate_exponent = -1.0 / 6.0;
            s.log_power = 2.5;
            s.regime = "continuous";
            break;
        case Example::InvSquare:
            s.m_exponent = 9.0 / 17.0;
            s.eps_rule = EpsRule::PowerOfSize;
            s.eps_exponent = 4.0 / 17.0;
            s.eta = 3.0;
            s.rate_exponent = -3.0 / 34.0;
            s.log_power = 7.0 / 6.0;
            s.regime = "continuous";
            break;
    }
    return s;
}

ScheduleInstance instantiate(const RateSchedule& schedule, double size) {
    require(size > 1.0 && std::isfinite(size), "instantiate: size must be finite and > 1");
    ScheduleInstance out;
    out.m = std::max(3, static_cast<int>(std::lround(std::pow(size, schedule.m_exponent))));
    switch (schedule.eps_rule) {
        case EpsRule::Zero: out.eps = 0.0; break;
        case EpsRule::PowerOfM: out.eps = std::pow(static_cast<double>(out.m), -schedule.eps_exponent); break;
        case EpsRule::PowerOfSize: out.eps = std::pow(size, -schedule.eps_exponent); break;
    }
    if (schedule.eta > 0.0)
        out.horizon = std::cbrt(schedule.eta / schedule.lambda * std::log(static_cast<double>(out.m)));
    out.continuous = schedule.continuous;
    if (schedule.continuous) {
        out.delta = out.T = size;
    } else {
        out.n = std::round(size);
        out.delta = std::pow(out.n, -schedule.beta);
        out.T = out.n * out.delta;
    }
    out.predicted = std::pow(size, schedule.rate_exponent) * std::pow(std::log(size), schedule.log_power);
    return out;
}

ObservationScheme ScheduleInstance::scheme() const {
    if (continuous) return ObservationScheme::continuous(T);
    if (!(n < 9.0e18)) fail(ErrorKind::InvalidArgument, "ScheduleInstance: n overflows an integer");
    return ObservationScheme::make(static_cast<long long>(n), delta);
}

double size_for_m(const RateSchedule& schedule, int m) {
    require(m >= 3, "size_for_m: m must be >= 3");
    require(schedule.m_exponent > 0.0, "size_for_m: schedule has no m exponent");
    return std::pow(static_cast<double>(m), 1.0 / schedule.m_exponent);
}

nlohmann::json RateFit::to_json() const {
    return {{"slope", json_number(slope)}, {"intercept", json_number(intercept)},
            {"stderr", json_number(se)},   {"ci", {json_number(ci_lo), json_number(ci_hi)}},
            {"points", points}};
}

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys, double level) {
    require(xs.size() == ys.size(), "fit_rate: xs and ys differ in length");
    require(xs.size() >= 4, "fit_rate: need at least 4 points");
    require(level > 0.0 && level < 1.0, "fit_rate: level must lie in (0, 1)");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i]),
                "fit_rate: xs and ys must be positive and finite");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 1e-12 * n)) fail(ErrorKind::Degenerate, "fit_rate: x values have no spread");
    RateFit r;
    r.points = static_cast<int>(n);
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ly[i] - r.intercept - r.slope * lx[i];
        rss += e * e;
    }
    const double dof = static_cast<double>(n - 2);
    r.se = std::sqrt(rss / dof / sxx);
    const boost::math::students_t dist(dof);
    const double q = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
    r.ci_lo = r.slope - q * r.se;
    r.ci_hi = r.slope + q * r.se;
    return r;
}

double horizon_tail_term(const DensitySpec& f, double H) {
    require(H > 0.0, "horizon_tail_term: H must be positive");
    const double s = tail_sup(f, H);
    return 2.0 * s * s / H;
}

double inv_square_tail_term(double lambda, double H) {
    require(H > 0.0 && lambda > 0.0, "inv_square_tail_term: need H > 0 and lambda > 0");
    return 4.0 * std::exp(-2.0 * lambda * H * H * H) / H;
}

std::vector<SweepRow> rate_sweep(const SweepConfig& cfg) {
    require(!cfg.ms.empty(), "rate_sweep: empty m list");
    const BaseMeasure nu0 = measure_for(cfg.example);
    const DensitySpec f = density_for(cfg);
    const RateSchedule sched = cfg.beta ? schedule_for(cfg.example, *cfg.beta, cfg.gamma, cfg.lambda)
                                        : schedule_continuous(cfg.example, cfg.gamma, cfg.lambda);
    const double eps_fixed = cfg.eps.value_or(1.0);
    require(eps_fixed > 0.0, "rate_sweep: eps must be positive");

    std::vector<SweepRow> rows;
    rows.reserve(cfg.ms.size());
    for (int m : cfg.ms) {
        require(m >= 3, "rate_sweep: every m must be >= 3");
        SweepRow row;
        row.m = m;
        switch (cfg.example) {
            case Example::CPP: row.eps = 0.0; break;
            case Example::TruncGamma: row.eps = 1.0 / (static_cast<double>(m) * m); break;
            case Example::InvSquare:
                row.eps = eps_fixed;
                row.horizon = std::sqrt(eps_fixed * m);
                break;
        }
        const Grid grid = build_grid(nu0, m, row.eps);
        row.report = compute_abc(f, weights_for(cfg.example, grid), row.horizon);
        const DiscrepancyReport& r = row.report;
        if (cfg.example == Example::InvSquare) {
            row.quantity = r.l2 * r.l2 + r.a_m * r.a_m + r.b_m * r.b_m + horizon_tail_term(f, *row.horizon);
            row.fit_x = row.eps * m;
        } else {
            row.quantity = r.l2 + r.a_m + r.b_m;
            row.fit_x = m;
        }

        // Bound terms at the schedule's own (n or T, eps, H) for this m.
        ScheduleInstance inst = instantiate(sched, size_for_m(sched, m));
        inst.m = m;
        if (sched.eps_rule == EpsRule::PowerOfM) inst.eps = std::pow(static_cast<double>(m), -sched.eps_exponent);
        if (sched.eta > 0.0) inst.horizon = std::cbrt(sched.eta / sched.lambda * std::log(static_cast<double>(m)));
        row.n = inst.n;
        row.delta = inst.delta;
        row.T = inst.T;
        const bool same = inst.eps == row.eps && inst.horizon == row.horizon;
        const Grid bgrid = same ? grid : build_grid(nu0, m, inst.eps);
        const DiscrepancyReport br = same ? r : compute_abc(f, weights_for(cfg.example, bgrid), inst.horizon);
        row.bound = sched.continuous
                        ? theorem1_terms(br, bgrid, inst.scheme())
                        : theorem2_terms(br, bgrid, inst.n, inst.delta, nu0.mass(inst.eps, nu0.upper()));
        if (inst.horizon)
            row.bound.add("tail_term", std::sqrt(inst.T * inv_square_tail_term(cfg.lambda, *inst.horizon)));
        rows.push_back(std::move(row));
    }
    return rows;
}

RateFit fit_sweep(std::span<const SweepRow> rows, int min_m) {
    std::vector<double> xs, ys;
    for (const SweepRow& r : rows) {
        if (r.m < min_m) continue;
        xs.push_back(r.fit_x);
        ys.push_back(r.quantity);
    }
    return fit_rate(xs, ys);
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    const auto old_prec = os.precision(12);
    os << "m,n,delta,T,eps,H,quantity";
    if (!rows.empty())
        for (const auto& [k, v] : rows.front().bound.terms) os << ',' << k;
    os << ",total\n";
    for (const SweepRow& r : rows) {
        os << r.m << ',' << r.n << ',' << r.delta << ',' << r.T << ',' << r.eps << ',';
        if (r.horizon) os << *r.horizon;
        os << ',' << r.quantity;
        for (const auto& [k, v] : r.bound.terms) os << ',' << v;
        os << ',' << r.bound.total << '\n';
    }
    os.precision(old_prec);
}

}  // namespace lecam
