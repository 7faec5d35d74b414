#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "wrpipe/dnwr.hpp"
#include "wrpipe/errors.hpp"
#include "wrpipe/nnwr.hpp"
#include "wrpipe/schedule.hpp"

namespace wrpipe::cli {

namespace {

struct RunConfig {
    std::string method = "nnwr";
    std::string mode = "classical";
    double length = 1.0;
    double horizon = 0.1;
    std::size_t nx = 200;
    std::size_t nt = 128;
    std::size_t subdomains = 2;
    std::size_t blocks = 1;
    int iterates = 8;
    std::optional<int> pipeline_iterates;
    std::optional<double> theta;
    double tol = 1e-8;
    std::optional<std::size_t> pivot;  // 1-based
    std::string guess = "ic";
    std::string stencil = "consistent";
    std::uint64_t seed = 0;
    unsigned delay_us = 0;
    std::string report_path;
    std::string residual_path;
    std::string trace_path;
    std::string timeline_path;

    std::vector<int> j_list;
    bool simulate = false;
    bool measure = false;
    int repeat = 1;
    std::string out_path;
};

DecomposedProblem make_problem(const RunConfig& c, std::size_t blocks) {
    HeatProblem hp = HeatProblem::reference();
    hp.length = c.length;
    hp.horizon = c.horizon;
    PivotPolicy pivot = PivotPolicy::middle();
    if (c.pivot) {
        if (*c.pivot < 1 || *c.pivot > c.subdomains) {
            throw ConfigError("m must satisfy 1 <= m <= N");
        }
        pivot = PivotPolicy::at(*c.pivot - 1);
    }
    return DecomposedProblem::make(hp, c.nx, c.nt, c.subdomains, blocks, InterfacePlacement::NearestNode, pivot);
}

GuessSpec guess_of(const RunConfig& c) {
    if (c.guess == "ic") return {InitialGuess::InitialConditionTrace, std::nullopt};
    if (c.guess == "zero") return {InitialGuess::Zero, std::nullopt};
    throw ConfigError("initial-guess must be ic or zero");
}

FluxStencil stencil_of(const RunConfig& c) {
    if (c.stencil == "consistent") return FluxStencil::Consistent;
    if (c.stencil == "one-sided") return FluxStencil::OneSided;
    throw ConfigError("stencil must be consistent or one-sided");
}

ChannelOptions channel_of(const RunConfig& c) {
    ChannelOptions o;
    o.seed = c.seed;
    o.max_delay_us = c.delay_us;
    o.record_trace = !c.trace_path.empty();
    return o;
}

nnwr::Config nnwr_config(const RunConfig& c, int iterates) {
    nnwr::Config n;
    n.theta = c.theta.value_or(0.25);
    n.iterates = iterates;
    n.tol = c.tol;
    n.guess = guess_of(c);
    n.stencil = stencil_of(c);
    n.transport = channel_of(c);
    n.validate();
    return n;
}

dnwr::Config dnwr_config(const RunConfig& c, int iterates, dnwr::Mode mode) {
    dnwr::Config d;
    d.theta = c.theta.value_or(0.5);
    d.iterates = iterates;
    d.mode = mode;
    d.tol = c.tol;
    d.guess = guess_of(c);
    d.stencil = stencil_of(c);
    d.transport = channel_of(c);
    d.validate();
    return d;
}

dnwr::Mode dnwr_mode(const std::string& mode) {
    if (mode == "naive" || mode == "classical") return dnwr::Mode::Naive;
    if (mode == "packed") return dnwr::Mode::ClassicalPacked;
    if (mode == "pipeline") return dnwr::Mode::Pipeline;
    throw ConfigError("dnwr mode must be naive, classical, packed or pipeline");
}

void check_method(const RunConfig& c) {
    if (c.method != "nnwr" && c.method != "dnwr") {
        throw ConfigError("method must be nnwr or dnwr");
    }
    if (c.method == "nnwr" && c.mode != "classical" && c.mode != "pipeline") {
        throw ConfigError("nnwr mode must be classical or pipeline");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot write " + path);
    }
    return f;
}

void write_outputs(const RunConfig& c, const RunReport& r) {
    if (!c.report_path.empty()) {
        auto f = open_out(c.report_path);
        f << to_json(r).dump(2) << '\n';
    }
    if (!c.residual_path.empty()) {
        auto f = open_out(c.residual_path);
        write_residual_csv(f, r);
    }
    if (!c.trace_path.empty()) {
        auto f = open_out(c.trace_path);
        write_trace_csv(f, r.message_trace);
    }
    if (!c.timeline_path.empty()) {
        auto f = open_out(c.timeline_path);
        write_timeline_csv(f, r);
    }
}

void print_summary(std::ostream& out, const RunReport& r) {
    out << "method=" << r.method << " mode=" << r.mode << " iterations=" << r.iterations
        << " converged=" << (r.converged ? "yes" : "no");
    if (r.converged_iterate) {
        out << " converged_iterate=" << *r.converged_iterate;
    }
    out << " data_messages=" << r.messages.data_messages << " data_words=" << r.messages.data_words
        << " flag_messages=" << r.messages.flag_messages << " workers=" << r.workers;
    if (!r.residuals.empty()) {
        out << " last_residual=" << std::scientific << std::setprecision(3) << r.residuals.back()
            << std::defaultfloat;
    }
    out << '\n';
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
    check_method(c);
    RunReport r;
    bool flagged_unconverged = false;
    if (c.method == "nnwr") {
        const auto cfg = nnwr_config(c, c.iterates);
        if (c.mode == "classical") {
            r = nnwr::run_classical(make_problem(c, 1), cfg);
            flagged_unconverged = c.tol > 0.0 && !r.converged;
        } else {
            r = nnwr::run_pipeline(make_problem(c, c.blocks), cfg);
        }
    } else {
        const auto mode = dnwr_mode(c.mode);
        r = dnwr::run(make_problem(c, mode == dnwr::Mode::Pipeline ? c.blocks : 1), dnwr_config(c, c.iterates, mode));
    }
    write_outputs(c, r);
    print_summary(out, r);
    if (flagged_unconverged) {
        out << "unconverged after K=" << c.iterates << " iterates\n";
        return kExitUnconverged;
    }
    return kExitOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    check_method(c);
    if (c.pipeline_iterates && *c.pipeline_iterates != c.iterates) {
        throw ConfigError("K must match between modes (classical K=" + std::to_string(c.iterates) +
                          ", pipeline K=" + std::to_string(*c.pipeline_iterates) + ")");
    }
    constexpr double kTolerance = 1e-13;
    struct Pair {
        std::string name;
        RunReport report;
    };
    std::vector<Pair> runs;
    if (c.method == "nnwr") {
        auto cfg = nnwr_config(c, c.iterates);
        cfg.tol = 0.0;
        runs.push_back({"classical", nnwr::run_classical(make_problem(c, 1), cfg)});
        runs.push_back({"pipeline", nnwr::run_pipeline(make_problem(c, c.blocks), cfg)});
    } else {
        const auto p = make_problem(c, c.blocks);
        if (static_cast<int>(c.blocks) < dnwr::min_pipeline_blocks(static_cast<int>(c.subdomains), c.iterates)) {
            throw ConfigError("pipeline DNWR requires J > ceil(N/2) + 2K - 1 = " +
                              std::to_string(dnwr::min_pipeline_blocks(static_cast<int>(c.subdomains), c.iterates) - 1));
        }
        runs.push_back({"naive", dnwr::run(p, dnwr_config(c, c.iterates, dnwr::Mode::Naive))});
        if (!c.pivot || *c.pivot == middle_pivot(c.subdomains) + 1) {
            runs.push_back({"packed", dnwr::run(p, dnwr_config(c, c.iterates, dnwr::Mode::ClassicalPacked))});
        }
        runs.push_back({"pipeline", dnwr::run(p, dnwr_config(c, c.iterates, dnwr::Mode::Pipeline))});
    }
    bool pass = true;
    const auto& ref = runs.front().report.final_traces;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const auto& t = runs[i].report.final_traces;
        const double diff = ref.max_abs_diff(t);
        const bool bitwise = ref.bitwise_equal(t);
        const bool ok = diff <= kTolerance;
        pass = pass && ok;
        out << c.method << ' ' << runs.front().name << " vs " << runs[i].name << ": max_abs_diff=" << std::scientific
            << std::setprecision(3) << diff << std::defaultfloat << " bitwise=" << (bitwise ? "yes" : "no") << ' '
            << (ok ? "PASS" : "FAIL") << '\n';
    }
    if (!c.report_path.empty()) {
        auto f = open_out(c.report_path);
        nlohmann::json j;
        for (const auto& r : runs) {
            j[r.name] = to_json(r.report);
        }
        f << j.dump(2) << '\n';
    }
    return pass ? kExitOk : kExitMismatch;
}

// Per-task CPU costs from a pipeline run, replayed through the simulator on
// the canonical assignment.
schedule::Fraction replay_efficiency(const RunReport& r, schedule::Method method, int n, int k, int j, int pivot) {
    const auto dag = schedule::build_dag(method, n, k, j, pivot);
    std::vector<std::int64_t> costs(dag.size(), -1);
    for (const auto& e : r.timeline) {
        if (auto i = dag.find({e.sub, e.iterate, e.stage, e.block})) {
            costs[*i] = std::max<std::int64_t>(1, e.cpu_ns);
        }
    }
    if (std::any_of(costs.begin(), costs.end(), [](std::int64_t v) { return v < 0; })) {
        throw ScheduleError("timeline is missing block-tasks");
    }
    schedule::SimOptions opt;
    opt.costs = std::move(costs);
    return schedule::simulate(dag, schedule::canonical_pipeline(dag), opt).efficiency;
}

int cmd_efficiency(const RunConfig& c, std::ostream& out) {
    if (c.method != "nnwr" && c.method != "dnwr") {
        throw ConfigError("method must be nnwr or dnwr");
    }
    if (c.j_list.empty()) {
        throw ConfigError("J list is empty");
    }
    if (c.simulate == c.measure) {
        throw ConfigError("choose exactly one of --simulate or --measure");
    }
    const auto method = c.method == "nnwr" ? schedule::Method::Nnwr : schedule::Method::Dnwr;
    const int n = static_cast<int>(c.subdomains);
    const int pivot = c.pivot ? static_cast<int>(*c.pivot) - 1 : static_cast<int>(middle_pivot(c.subdomains));

    std::ofstream file;
    if (!c.out_path.empty()) {
        file = open_out(c.out_path);
    }
    std::ostream& csv = c.out_path.empty() ? out : file;

    if (c.simulate) {
        auto rows = schedule::theoretical_vs_simulated(method, n, c.iterates, c.j_list, pivot);
        schedule::write_efficiency_csv(csv, rows);
        const bool all = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.matches(); });
        return all ? kExitOk : kExitMismatch;
    }

    // Measured: walltime relative to the classical run on N workers.
    const std::size_t hw = std::thread::hardware_concurrency();
    auto best_of = [&](auto&& fn) {
        RunReport best;
        for (int rep = 0; rep < std::max(1, c.repeat); ++rep) {
            RunReport r = fn();
            if (rep == 0 || r.wall_seconds < best.wall_seconds) {
                best = std::move(r);
            }
        }
        return best;
    };
    RunReport classical;
    if (method == schedule::Method::Nnwr) {
        auto cfg = nnwr_config(c, c.iterates);
        cfg.tol = 0.0;
        classical = best_of([&] { return nnwr::run_classical(make_problem(c, 1), cfg); });
    } else {
        const auto cfg = dnwr_config(c, c.iterates, dnwr::Mode::Naive);
        classical = best_of([&] { return dnwr::run(make_problem(c, 1), cfg); });
    }
    csv << "J,actual_efficiency,theoretical_efficiency,replay_efficiency,simulated_efficiency,workers,"
           "hardware_threads,oversubscribed\n";
    for (int j : c.j_list) {
        RunReport pipe;
        std::size_t workers = 0;
        schedule::Fraction theoretical;
        if (method == schedule::Method::Nnwr) {
            auto cfg = nnwr_config(c, c.iterates);
            cfg.tol = 0.0;
            pipe = best_of([&] { return nnwr::run_pipeline(make_problem(c, static_cast<std::size_t>(j)), cfg); });
            workers = static_cast<std::size_t>(2 * c.iterates <= j ? 2 * n * c.iterates : n * j);
            theoretical = schedule::nnwr_peak_efficiency(c.iterates, j);
        } else {
            const auto cfg = dnwr_config(c, c.iterates, dnwr::Mode::Pipeline);
            pipe = best_of([&] { return dnwr::run(make_problem(c, static_cast<std::size_t>(j)), cfg); });
            workers = pipe.workers;
            theoretical = schedule::dnwr_peak_efficiency(n, c.iterates, j);
        }
        const double actual = classical.wall_seconds * static_cast<double>(n) /
                              (pipe.wall_seconds * static_cast<double>(workers));
        const auto replay = replay_efficiency(pipe, method, n, c.iterates, j, pivot);
        const auto sim = schedule::theoretical_vs_simulated(method, n, c.iterates, {j}, pivot).front().simulated;
        csv << j << ',' << std::fixed << std::setprecision(6) << actual << ',' << theoretical.value() << ','
            << replay.value() << ',' << sim.value() << std::defaultfloat << ',' << workers << ',' << hw << ','
            << (hw < workers ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Waveform relaxation solvers with classical and pipeline orderings", "wrpipe"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    RunConfig c;
    app.add_option("--method", c.method, "nnwr or dnwr")->capture_default_str();
    app.add_option("--mode", c.mode, "nnwr: classical|pipeline; dnwr: naive|packed|pipeline")->capture_default_str();
    app.add_option("--L", c.length, "Domain length")->capture_default_str();
    app.add_option("--T", c.horizon, "Time horizon")->capture_default_str();
    app.add_option("--Nx", c.nx, "Interior grid nodes")->capture_default_str();
    app.add_option("--Nt", c.nt, "Time steps")->capture_default_str();
    app.add_option("--N", c.subdomains, "Subdomains")->capture_default_str();
    app.add_option("--J", c.blocks, "Time blocks (pipeline modes)")->capture_default_str();
    app.add_option("--K", c.iterates, "Waveform iterates")->capture_default_str();
    app.add_option("--pipeline-K", c.pipeline_iterates, "Pipeline K for validate (must equal --K)");
    app.add_option("--theta", c.theta, "Relaxation weight (default 1/4 NNWR, 1/2 DNWR)");
    app.add_option("--tol", c.tol, "Stopping tolerance; 0 forces K iterates")->capture_default_str();
    app.add_option("--m", c.pivot, "DNWR pivot subdomain, 1-based (default ceil(N/2))");
    app.add_option("--initial-guess", c.guess, "ic or zero")->capture_default_str();
    app.add_option("--stencil", c.stencil, "Flux recovery: consistent or one-sided")->capture_default_str();
    app.add_option("--seed", c.seed, "Seed for randomized transport delays")->capture_default_str();
    app.add_option("--delay-us", c.delay_us, "Maximum randomized send delay in microseconds")->capture_default_str();
    app.add_option("--report", c.report_path, "Report JSON path");
    app.add_option("--residuals", c.residual_path, "Residual CSV path");
    app.add_option("--trace", c.trace_path, "Message trace CSV path");
    app.add_option("--timeline", c.timeline_path, "Task timeline CSV path");
    app.add_option("--J-list", c.j_list, "Block counts for efficiency-table")->delimiter(',');
    app.add_flag("--simulate", c.simulate, "Efficiency from the schedule simulator");
    app.add_flag("--measure", c.measure, "Efficiency from threaded runs");
    app.add_option("--repeat", c.repeat, "Runs per measurement (fastest kept)")->capture_default_str();
    app.add_option("--out", c.out_path, "Efficiency CSV path (default stdout)");

    auto* solve = app.add_subcommand("solve", "Run one solver")->fallthrough();
    auto* validate = app.add_subcommand("validate", "Compare classical and pipeline traces")->fallthrough();
    auto* table = app.add_subcommand("efficiency-table", "Efficiency versus J")->fallthrough();

    std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(c, out);
        if (validate->parsed()) return cmd_validate(c, out);
        if (table->parsed()) return cmd_efficiency(c, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitMismatch;
    }
    return kExitConfig;
}

}  // namespace wrpipe::cli
