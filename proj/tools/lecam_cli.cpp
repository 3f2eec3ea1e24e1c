// lecam: grids, rate sweeps and the kernel validation battery from the command line.
//
//   lecam grid --kind invsq --eps 0.5 --m 3
//   lecam rates --example cpp --gamma 1 --m 8,16,32,64,128,256,512 --out rates.csv
//   lecam validate --seed 42
//
// Exit codes: 0 ok, 2 usage or validation error, 3 degenerate fit, 4 failed check,
// 1 anything else.

#include "lecam/approx.hpp"
#include "lecam/bounds.hpp"
#include "lecam/error.hpp"
#include "lecam/measures.hpp"
#include "lecam/validation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using nlohmann::json;

constexpr int kUsage = 2;
constexpr int kFit = 3;
constexpr int kFailedCheck = 4;

struct RunConfig {
    std::string command;
    std::string kind;
    std::string example;
    std::vector<int> ms;
    long long n = 100000;
    std::optional<double> beta;
    double gamma = 1.0;
    double lambda = 1.0;
    std::optional<double> eps;
    std::string weights = "auto";
    std::uint64_t seed = 42;
    int min_m = 32;
    std::string out;
    std::string format = "json";  // rates defaults to csv
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt12(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Every float rounded to 12 significant digits so reruns diff cleanly.
void round12(json& j) {
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (std::isfinite(x)) j = std::stod(fmt12(x));
    } else if (j.is_structured()) {
        for (auto& v : j) round12(v);
    }
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot open --out file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(json j, const std::string& path) {
    round12(j);
    Output out(path);
    out.stream() << j.dump(2) << '\n';
}

lecam::BaseMeasure measure_from(const std::string& kind) {
    if (kind == "lebesgue") return lecam::BaseMeasure::lebesgue_unit();
    if (kind == "inv") return lecam::BaseMeasure::one_over_x_unit();
    if (kind == "invsq") return lecam::BaseMeasure::one_over_x_squared();
    throw UsageError("unknown --kind '" + kind + "' (expected lebesgue, inv or invsq)");
}

lecam::WeightFamily weights_from(const std::string& choice, const lecam::Grid& grid) {
    const bool linear = choice == "linear" ||
                        (choice == "auto" && grid.measure().kind() == lecam::MeasureKind::LebesgueUnit);
    return linear ? lecam::build_weights_linear(grid) : lecam::build_weights_corrected(grid);
}

int cmd_grid(const RunConfig& cfg) {
    if (cfg.ms.empty()) throw UsageError("--m needs at least one value");
    const lecam::BaseMeasure nu0 = measure_from(cfg.kind);
    const double eps = cfg.eps.value_or(0.0);

    json all = json::array();
    std::ostringstream csv;
    csv << "m,j,v,x_star,integral,b\n";
    for (int m : cfg.ms) {
        const lecam::Grid grid = lecam::build_grid(nu0, m, eps);
        const lecam::WeightFamily w = weights_from(cfg.weights, grid);
        json g = grid.to_json();
        json integrals = json::array();
        json bs = json::array();
        for (int j = 2; j <= m; ++j) {
            integrals.push_back(w.integral(j));
            bs.push_back(w.b(j));
        }
        g["weights"] = {{"kind", w.kind() == lecam::WeightKind::TriangularTrapezoid ? "linear" : "corrected"},
                        {"integrals", integrals},
                        {"b", bs},
                        {"normalization_error", w.normalization_error()}};
        all.push_back(g);
        for (int j = 1; j <= m; ++j) {
            csv << m << ',' << j << ',' << fmt12(grid.v(j)) << ',';
            if (j >= 2 && grid.has_x_star(j)) csv << fmt12(grid.x_star(j));
            csv << ',';
            if (j >= 2) csv << fmt12(w.integral(j)) << ',' << fmt12(w.b(j));
            else csv << ',';
            csv << '\n';
        }
    }
    if (cfg.format == "csv") {
        Output out(cfg.out);
        out.stream() << csv.str();
    } else {
        emit_json(all.size() == 1 ? all[0] : all, cfg.out);
    }
    return 0;
}

int cmd_rates(const RunConfig& cfg) {
    if (cfg.ms.empty()) throw UsageError("--m needs at least one value");
    lecam::SweepConfig sc;
    try {
        sc.example = lecam::example_from_string(cfg.example);
    } catch (const lecam::Error& e) {
        throw UsageError(e.what());
    }
    sc.gamma = cfg.gamma;
    sc.lambda = cfg.lambda;
    sc.beta = cfg.beta;
    sc.eps = cfg.eps;
    sc.ms = cfg.ms;
    const lecam::RateSchedule sched = cfg.beta ? lecam::schedule_for(sc.example, *cfg.beta, cfg.gamma, cfg.lambda)
                                               : lecam::schedule_continuous(sc.example, cfg.gamma, cfg.lambda);
    const std::vector<lecam::SweepRow> rows = lecam::rate_sweep(sc);

    lecam::RateFit fit;
    try {
        fit = lecam::fit_sweep(rows, cfg.min_m);
    } catch (const lecam::Error& e) {
        std::cerr << "lecam rates: fit failed: " << e.what() << '\n';
        return kFit;
    }

    json summary = {{"example", cfg.example},
                    {"fit_against", sc.example == lecam::Example::InvSquare ? "eps*m" : "m"},
                    {"min_m", cfg.min_m},
                    {"fit", fit.to_json()},
                    {"schedule", sched.to_json()}};
    if (cfg.format == "json") {
        json table = json::array();
        for (const lecam::SweepRow& r : rows) {
            json row = {{"m", r.m}, {"n", r.n}, {"delta", r.delta}, {"T", r.T}, {"eps", r.eps},
                        {"quantity", r.quantity}, {"report", r.report.to_json()}, {"bound", r.bound.to_json()}};
            if (r.horizon) row["H"] = *r.horizon;
            table.push_back(row);
        }
        summary["rows"] = table;
        emit_json(summary, cfg.out);
        return 0;
    }
    {
        Output out(cfg.out);
        lecam::write_sweep_csv(out.stream(), rows);
    }
    round12(summary);
    if (cfg.out.empty()) {
        std::cerr << summary.dump() << '\n';
    } else {
        std::ofstream js(cfg.out + ".summary.json");
        js << summary.dump(2) << '\n';
    }
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    lecam::BatteryConfig bc;
    bc.seed = cfg.seed;
    bc.n_jumps = cfg.n;
    if (bc.n_jumps < 100) throw UsageError("--n must be at least 100");
    const std::vector<lecam::CheckResult> checks = lecam::run_battery(bc);
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;

    if (cfg.format == "csv") {
        Output out(cfg.out);
        out.stream() << "name,pass,statistic,p_value\n";
        for (const auto& c : checks)
            out.stream() << c.name << ',' << (c.pass ? "true" : "false") << ',' << fmt12(c.statistic) << ','
                         << (std::isnan(c.p_value) ? "" : fmt12(c.p_value)) << '\n';
    } else {
        json arr = json::array();
        for (const auto& c : checks) arr.push_back(c.to_json());
        emit_json({{"seed", cfg.seed}, {"n", cfg.n}, {"all_pass", all}, {"checks", arr}}, cfg.out);
    }
    return all ? 0 : kFailedCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grids, approximation rates and kernel checks for Levy density experiments"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_output = [&cfg](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Output file (default stdout)");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* grid = app.add_subcommand("grid", "Build and dump equal-mass grids and their weights");
    grid->add_option("--kind", cfg.kind, "lebesgue, inv or invsq")->required();
    grid->add_option("--m", cfg.ms, "Number of cut points (one or more)")->required()->delimiter(',');
    grid->add_option("--eps", cfg.eps, "Truncation level eps_m");
    grid->add_option("--weights", cfg.weights, "auto, linear or corrected")
        ->check(CLI::IsMember({"auto", "linear", "corrected"}));
    add_output(grid);

    CLI::App* rates = app.add_subcommand("rates", "Approximation-rate sweep with bound terms and a fitted slope");
    rates->add_option("--example", cfg.example, "cpp, truncgamma or invsquare")->required();
    rates->add_option("--m", cfg.ms, "Grid sizes")->delimiter(',')->default_str("8,16,32,64,128,256,512");
    rates->add_option("--beta", cfg.beta, "Discrete schedule with delta_n = n^-beta (continuous when absent)");
    rates->add_option("--gamma", cfg.gamma, "Holder exponent (cpp)");
    rates->add_option("--lambda", cfg.lambda, "Density parameter (truncgamma, invsquare)");
    rates->add_option("--eps", cfg.eps, "eps_m for invsquare (default 1)");
    rates->add_option("--min-m", cfg.min_m, "Smallest m used in the fit");
    rates->add_option("--seed", cfg.seed, "Accepted for symmetry; the sweep is deterministic");
    add_output(rates);

    CLI::App* validate = app.add_subcommand("validate", "Run the kernel pushforward test battery");
    validate->add_option("--seed", cfg.seed, "RNG seed");
    validate->add_option("--n", cfg.n, "Jumps / draws per sampling check");
    add_output(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (grid->parsed()) return cmd_grid(cfg);
        if (rates->parsed()) {
            if (rates->count("--m") == 0) cfg.ms = {8, 16, 32, 64, 128, 256, 512};
            if (rates->count("--format") == 0) cfg.format = "csv";
            return cmd_rates(cfg);
        }
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const UsageError& e) {
        std::cerr << "lecam: " << e.what() << '\n';
        return kUsage;
    } catch (const lecam::Error& e) {
        std::cerr << "lecam: " << e.what() << '\n';
        switch (e.kind()) {
            case lecam::ErrorKind::InvalidArgument:
            case lecam::ErrorKind::BandViolation: return kUsage;
            case lecam::ErrorKind::Degenerate: return kFit;
            default: return 1;
        }
    }
    return 1;
}
