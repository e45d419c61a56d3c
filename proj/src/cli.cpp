#include "vcons/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vcons/consistency.hpp"
#include "vcons/generator.hpp"
#include "vcons/oracle.hpp"
#include "vcons/parallel.hpp"
#include "vcons/scenario_io.hpp"
#include "vcons/steady.hpp"
#include "vcons/transient.hpp"

#ifndef VCONS_VERSION
#define VCONS_VERSION "dev"
#endif

namespace vcons
{

std::vector<int> parse_int_list(std::string_view text, int min_value)
{
    const auto to_int = [&](std::string_view part) {
        int value = 0;
        const std::string s(part);
        std::size_t used = 0;
        try {
            value = std::stoi(s, &used);
        }
        catch(const std::exception&) {
            used = 0;
        }
        if(s.empty() || used != s.size()) {
            throw ConfigError(fmt::format("'{}' is not an integer in list '{}'", s, text));
        }
        return value;
    };

    std::vector<int> values;
    std::size_t start = 0;
    while(start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string_view item = text.substr(start, comma - start);
        std::vector<int> bounds;
        std::size_t s = 0;
        while(s <= item.size()) {
            const std::size_t colon = std::min(item.find(':', s), item.size());
            bounds.push_back(to_int(item.substr(s, colon - s)));
            s = colon + 1;
        }
        if(bounds.size() == 1) {
            values.push_back(bounds[0]);
        }
        else if(bounds.size() <= 3) {
            const int step = bounds.size() == 3 ? bounds[2] : 1;
            if(step < 1 || bounds[1] < bounds[0]) {
                throw ConfigError(fmt::format("range '{}' needs lo <= hi and step >= 1", item));
            }
            for(int v = bounds[0]; v <= bounds[1]; v += step) {
                values.push_back(v);
            }
        }
        else {
            throw ConfigError(fmt::format("range '{}' must be lo:hi[:step]", item));
        }
        start = comma + 1;
    }
    for(int v : values) {
        if(v < min_value) {
            throw ConfigError(fmt::format("value {} in '{}' is below the minimum {}", v, text, min_value));
        }
    }
    return values;
}

std::string RunManifest::header() const
{
    std::string h;
    h += fmt::format("# tool: vcons {}\n", tool_version);
    h += fmt::format("# command: {}\n", command);
    h += fmt::format("# scenario: {}\n", scenario_path);
    for(const auto& o : overrides) {
        h += fmt::format("# override: {}\n", o);
    }
    h += fmt::format("# output: {}\n", output_path.empty() ? "-" : output_path);
    h += fmt::format("# wall_clock_s: {:.3f}\n", wall_clock_s);
    return h;
}

namespace
{

struct CommonArgs
{
    std::string scenario_path;
    std::vector<std::string> overrides;
    std::string out_path;
    unsigned jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_output = true)
{
    cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--set", args.overrides, "Override a scenario field, key=value (repeatable)");
    if(with_output) {
        cmd->add_option("--out", args.out_path, "Output CSV path (stdout when omitted)");
    }
    cmd->add_option("--jobs", args.jobs, "Worker threads (default $VCONS_JOBS or hardware concurrency)");
}

Scenario load(const CommonArgs& args)
{
    nlohmann::json raw = read_scenario_file(args.scenario_path);
    for(const auto& o : args.overrides) {
        apply_override(raw, o);
    }
    return scenario_from_config(raw);
}

unsigned jobs_of(const CommonArgs& args)
{
    return args.jobs > 0 ? args.jobs : default_jobs();
}

std::string format_time(double t)
{
    return std::isinf(t) ? std::string("inf") : fmt::format("{:.10g}", t);
}

class Timer
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - m_start).count();
    }

private:
    std::chrono::steady_clock::time_point m_start = std::chrono::steady_clock::now();
};

void emit(const CommonArgs& args, const std::string& command, const Timer& timer, const std::string& body,
          std::ostream& out)
{
    RunManifest manifest{command, args.scenario_path, args.overrides, args.out_path, VCONS_VERSION, timer.seconds()};
    const std::string text = manifest.header() + body;
    if(args.out_path.empty() || args.out_path == "-") {
        out << text;
        return;
    }
    std::ofstream file(args.out_path, std::ios::binary);
    if(!file) {
        throw ConfigError("cannot write output file '" + args.out_path + "'");
    }
    file << text;
}

std::string table_csv(const ConsistencyTable& table)
{
    std::string body = "scenario,n,t_target,time_s,p_cons\n";
    for(const auto& r : table.rows) {
        body += fmt::format("{},{},{},{},{:.12g}\n", r.scenario, r.n, r.t_target, format_time(r.time_s), r.p_cons);
    }
    return body;
}

std::vector<int> n_values(const std::string& text, const Scenario& s)
{
    return text.empty() ? std::vector<int>{s.params.max_vehicles()} : parse_int_list(text, 1);
}

struct CheckLog
{
    std::ostream& out;
    int failures = 0;

    void report(bool ok, const std::string& what)
    {
        out << (ok ? "PASS  " : "FAIL  ") << what << '\n';
        failures += ok ? 0 : 1;
    }
};

int run_validate(const Scenario& s, const std::string& dump_path, std::size_t runs, std::uint64_t seed, unsigned jobs,
                 std::ostream& out)
{
    CheckLog log{out};
    const ScenarioParams& p = s.params;
    const int n = p.max_vehicles();
    out << fmt::format("scenario {}: N={} mu={:.6g}/s lambda={:.6g}/s n_ave={:.6g} p1={:.6g}\n", p.name(), n,
                       p.departure_rate(), p.arrival_rate(), p.n_ave(), p.p1());
    if(const std::string warning = validate_options(s.options, n); !warning.empty()) {
        out << "WARN  " << warning << '\n';
    }

    const StateSpace space(n);
    const RateMatrix a = build_rate_matrix(p, s.options, space);
    if(!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if(!dump) {
            throw ConfigError("cannot write generator dump '" + dump_path + "'");
        }
        a.dump(dump);
    }
    const DistributionVector x0 = initial_distribution(p, s.options, space);
    Eigen::Index start = 0;
    x0.probabilities.maxCoeff(&start);
    const State start_state = space[static_cast<std::size_t>(start)];

    const GeneratorDiagnostics diag = validate_generator(a, space, start_state);
    log.report(diag.row_sums_ok(),
               fmt::format("generator row sums: max residual {:.3e} (||A||inf {:.3e})", diag.max_row_residual,
                           diag.norm_inf));
    log.report(diag.negative_off_diagonals == 0,
               fmt::format("generator off-diagonals non-negative ({} negative)", diag.negative_off_diagonals));
    out << fmt::format("INFO  {} of {} states unreachable from ({},{}); {} closed class(es)\n", diag.unreachable.size(),
                       space.size(), start_state.holders, start_state.occupants, diag.recurrent_class_count);

    const double tol = 1e-10;
    const auto grid = time_grid(30.0, 1.0);
    const TransientSolution sol = transient_distribution(a, x0, grid, tol);
    double worst = 0;
    for(const auto& x : sol.distributions) {
        worst = std::max(worst, std::abs(x.total() - 1.0));
    }
    log.report(worst < tol + 1e-12, fmt::format("transient normalization over 0..30 s: max |sum-1| {:.3e}", worst));

    const SteadyState pi = steady_state(a, static_cast<std::size_t>(start));
    log.report(pi.residual < 1e-10 * a.norm_inf(), fmt::format("stationary residual ||pi A||inf {:.3e}", pi.residual));
    if(!pi.unique) {
        out << "WARN  stationary law is not unique; solved on the class reached from the start state\n";
    }

    const double horizon = std::max(600.0, 30.0 / p.departure_rate());
    const double gap = final_value_check(a, x0, horizon);
    log.report(gap < 1e-6, fmt::format("final value: ||X({:.0f} s) - pi||inf {:.3e}", horizon, gap));

    const auto occupancy = truncated_poisson(n);
    std::vector<double> marginal(static_cast<std::size_t>(n) + 1, 0.0);
    for(std::size_t k = 0; k < space.size(); ++k) {
        marginal[static_cast<std::size_t>(space[k].occupants)] += pi.distribution.probabilities[static_cast<Eigen::Index>(k)];
    }
    double marginal_gap = 0;
    for(int j = 0; j <= n; ++j) {
        marginal_gap = std::max(marginal_gap, std::abs(marginal[j] - occupancy[j]));
    }
    log.report(marginal_gap < 1e-10, fmt::format("occupancy marginal vs truncated Poisson: {:.3e}", marginal_gap));

    const std::vector<int> targets = n >= 3 ? std::vector<int>{1, 3} : std::vector<int>{1};
    const ComparisonReport cmp = estimate_vs_analytic(p, s.options, targets, grid, runs, seed, jobs);
    log.report(cmp.flags == 0,
               fmt::format("simulation vs analytic ({} runs, seed {}): max |diff| {:.3e}, {} beyond 3 sigma, {} "
                           "flagged beyond 4 sigma",
                           runs, seed, cmp.max_abs_diff, cmp.beyond_3_sigma, cmp.flags));

    out << (log.failures == 0 ? "all checks passed\n" : fmt::format("{} check(s) failed\n", log.failures));
    return log.failures == 0 ? kExitOk : kExitCheckFailed;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Consistency analysis of vehicular storage systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", VCONS_VERSION);

    CommonArgs steady_args, transient_args, simulate_args, validate_args;
    std::string steady_n, steady_targets = "1";
    std::string transient_n, transient_targets = "1";
    double horizon = 30.0, step = 0.1, tol = 1e-10;
    std::string simulate_n, simulate_targets = "1";
    double sim_horizon = 30.0, sim_step = 0.1;
    std::size_t runs = 100000;
    std::uint64_t seed = 1;
    std::size_t validate_runs = 20000;
    std::uint64_t validate_seed = 1;
    std::string dump_path;

    auto* steady = app.add_subcommand("steady", "Stationary consistency over an (N, t) grid");
    add_common(steady, steady_args);
    steady->add_option("--n", steady_n, "Vehicle counts, lo:hi[:step] or comma list (default: scenario n_vehicles)");
    steady->add_option("--targets", steady_targets, "Targets t, lo:hi[:step] or comma list");

    auto* transient = app.add_subcommand("transient", "Consistency vs time since the record appeared");
    add_common(transient, transient_args);
    transient->add_option("--n", transient_n, "Vehicle counts (default: scenario n_vehicles)");
    transient->add_option("--targets", transient_targets, "Targets t");
    transient->add_option("--horizon", horizon, "Last time in seconds")->capture_default_str();
    transient->add_option("--step", step, "Grid step in seconds")->capture_default_str();
    transient->add_option("--tol", tol, "Poisson truncation tolerance")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate against the transient solver");
    add_common(simulate, simulate_args);
    simulate->add_option("--n", simulate_n, "Vehicle count (default: scenario n_vehicles)");
    simulate->add_option("--targets,--target", simulate_targets, "Targets t");
    simulate->add_option("--horizon", sim_horizon, "Last time in seconds")->capture_default_str();
    simulate->add_option("--step", sim_step, "Grid step in seconds")->capture_default_str();
    simulate->add_option("--runs", runs, "Independent trajectories")->capture_default_str();
    simulate->add_option("--seed", seed, "Base seed")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Run the model self-checks on a scenario");
    add_common(validate, validate_args, false);
    validate->add_option("--runs", validate_runs, "Trajectories for the simulation check")->capture_default_str();
    validate->add_option("--seed", validate_seed, "Seed for the simulation check")->capture_default_str();
    validate->add_option("--dump-generator", dump_path, "Write the generator as 'row col rate' triples");

    try {
        app.parse(argc, argv);
    }
    catch(const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    }
    catch(const CLI::CallForVersion&) {
        out << VCONS_VERSION << '\n';
        return kExitOk;
    }
    catch(const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        Timer timer;
        if(steady->parsed()) {
            const Scenario s = load(steady_args);
            const auto ns = n_values(steady_n, s);
            const auto ts = parse_int_list(steady_targets, 1);
            const auto table = sweep_steady(s.params, s.options, ns, ts, jobs_of(steady_args));
            emit(steady_args, "steady", timer, table_csv(table), out);
        }
        else if(transient->parsed()) {
            const Scenario s = load(transient_args);
            const auto ns = n_values(transient_n, s);
            const auto ts = parse_int_list(transient_targets, 1);
            const auto grid = time_grid(horizon, step);
            const auto table = sweep_transient(s.params, s.options, ns, ts, grid, tol, jobs_of(transient_args));
            emit(transient_args, "transient", timer, table_csv(table), out);
        }
        else if(simulate->parsed()) {
            Scenario s = load(simulate_args);
            const auto ns = n_values(simulate_n, s);
            const auto ts = parse_int_list(simulate_targets, 1);
            const auto grid = time_grid(sim_horizon, sim_step);
            std::string body = "scenario,n,t_target,time_s,p_hat,half_width_95,p_analytic,z\n";
            for(int n : ns) {
                const ScenarioParams params = s.params.with_max_vehicles(n);
                validate_options(s.options, n);
                for(int t : ts) {
                    if(t > n) {
                        throw ConfigError(fmt::format("target {} exceeds N={}", t, n));
                    }
                }
                const auto report = estimate_vs_analytic(params, s.options, ts, grid, runs, seed, jobs_of(simulate_args));
                for(const auto& curve : report.curves) {
                    for(const auto& pt : curve.points) {
                        body += fmt::format("{},{},{},{},{:.12g},{:.12g},{:.12g},{:.6g}\n", params.name(), n,
                                            curve.t_target, format_time(pt.time_s), pt.p_hat, pt.half_width_95,
                                            pt.p_analytic, pt.z);
                    }
                }
                err << fmt::format("N={}: max |p_hat - p_analytic| = {:.3e}, {} point(s) beyond 3 sigma, {} flagged\n",
                                   n, report.max_abs_diff, report.beyond_3_sigma, report.flags);
            }
            emit(simulate_args, "simulate", timer, body, out);
        }
        else {
            const Scenario s = load(validate_args);
            return run_validate(s, dump_path, validate_runs, validate_seed, jobs_of(validate_args), out);
        }
    }
    catch(const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch(const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch(const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}

} // namespace vcons
