#include "lcadc/cli.hpp"

#include "lcadc/analysis.hpp"
#include "lcadc/config.hpp"
#include "lcadc/errors.hpp"
#include "lcadc/parallel.hpp"
#include "lcadc/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef LCADC_VERSION_STRING
#define LCADC_VERSION_STRING "v0.0.0"
#endif

namespace lcadc {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
    bool fail_on_overload = false;
};

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    bool fail_on_overload = false;
    std::ostream& out;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json metadata(const Context& ctx, std::string_view command) {
    return Json{{"tool", "lcadc"},
                {"version", version_string()},
                {"command", command},
                {"seed", ctx.cfg.run.seed},
                {"config", to_json(ctx.cfg)}};
}

const Sine& require_sine(const RunConfig& cfg, std::string_view command) {
    const auto* s = std::get_if<Sine>(&cfg.signal);
    if (s == nullptr) throw ConfigError(std::string(command) + " needs signal.type = sine", "signal.type");
    return *s;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    const bool log = parts.size() == 4 && parts[3] == "log";
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && !log)) {
        throw ConfigError("grid '" + spec + "' is not start:stop:count[:log]", "--grid");
    }
    try {
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double count = parse_number(parts[2]);
        if (count < 1.0 || count != static_cast<double>(static_cast<std::size_t>(count))) {
            throw std::invalid_argument("grid count must be a positive integer");
        }
        if (stop < start) throw std::invalid_argument("grid stop must not be below start");
        return make_grid(start, stop, static_cast<std::size_t>(count), log);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("grid '" + spec + "': " + ex.what(), "--grid");
    }
}

std::vector<double> parse_list(const std::string& spec, const char* option) {
    std::vector<double> values;
    std::stringstream in(spec);
    std::string item;
    try {
        while (std::getline(in, item, ',')) values.push_back(parse_number(item));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string(option) + ": " + ex.what(), option);
    }
    if (values.empty()) throw ConfigError(std::string(option) + " is empty", option);
    return values;
}

int cmd_simulate(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Trace trace = simulate(cfg.adc, cfg.signal, run_span(cfg));
    const PowerReport report = measure(trace, cfg.power);
    write_file(ctx.out_dir / "trace.json", dump(to_json(trace)));
    write_file(ctx.out_dir / "power.json", dump(to_json(report)));

    ctx.out << "events: " << report.n_cross << "\n"
            << "off_fraction: " << format_number(report.off_fraction) << "\n"
            << "p_avg: " << format_number(report.p_avg) << " W\n"
            << "reduction: " << format_number(report.reduction) << "\n";
    if (!trace.saturation.empty()) ctx.out << "saturation intervals: " << trace.saturation.size() << "\n";
    if (trace.overload) {
        ctx.out << "overload: input outran the update loop, first at t=" << format_number(*trace.first_overload)
                << " s (up to " << trace.max_pending_levels << " pending levels)\n";
        if (ctx.fail_on_overload) return kExitOverload;
    }
    return kExitOk;
}

int cmd_sweep(Context& ctx, const std::string& kind_name, const std::string& grid_spec) {
    const auto kind = parse_sweep_kind(kind_name);
    if (!kind) throw ConfigError("unknown sweep kind '" + kind_name + "' (clock, frequency, amplitude)", "kind");
    const RunConfig& cfg = ctx.cfg;
    SweepSetup setup;
    setup.kind = *kind;
    setup.adc = cfg.adc;
    setup.signal = require_sine(cfg, "sweep");
    setup.power = cfg.power;
    setup.periods = cfg.run.periods;
    setup.t_end = cfg.run.t_end.value_or(0.0);
    setup.seed = cfg.run.seed;
    setup.threads = cfg.run.threads;
    const std::vector<double> grid = parse_grid(grid_spec);
    const std::vector<SweepRow> rows = sweep(setup, grid);

    const std::string stem = "sweep_" + kind_name;
    Json meta = metadata(ctx, "sweep");
    meta["kind"] = kind_name;
    meta["grid"] = grid_spec;
    if (cfg.run.format == OutputFormat::Csv) {
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        write_file(ctx.out_dir / (stem + ".csv"), csv.str());
        write_file(ctx.out_dir / (stem + ".meta.json"), dump(meta));
    } else {
        Json table = Json::array();
        for (const auto& r : rows) {
            table.push_back({{"x", r.x},
                             {"off_fraction_sim", r.off_fraction_sim},
                             {"off_fraction_analytic", r.off_fraction_analytic ? Json(*r.off_fraction_analytic) : Json()},
                             {"p_avg_sim", r.p_avg_sim},
                             {"p_avg_analytic", r.p_avg_analytic ? Json(*r.p_avg_analytic) : Json()},
                             {"overload", r.overload}});
        }
        write_file(ctx.out_dir / (stem + ".json"), dump(Json{{"meta", meta}, {"rows", table}}));
    }
    const auto overloaded = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.overload; });
    ctx.out << "rows: " << rows.size() << "\noverload rows: " << overloaded << "\n";
    return overloaded > 0 && ctx.fail_on_overload ? kExitOverload : kExitOk;
}

int cmd_boundary(Context& ctx, const std::string& clocks_spec, const std::string& grid_spec) {
    const RunConfig& cfg = ctx.cfg;
    const std::vector<double> clocks =
        clocks_spec.empty() ? std::vector<double>{cfg.adc.clock_freq} : parse_list(clocks_spec, "--clocks");
    const std::vector<double> grid = parse_grid(grid_spec);
    const double a_limit = cfg.adc.full_scale_amplitude();

    std::vector<BoundaryCurve> curves;
    Json knees = Json::array();
    for (double clock : clocks) {
        curves.push_back(boundary_curve(clock, cfg.adc.delta, a_limit, grid));
        knees.push_back({{"clock_freq", clock}, {"knee_frequency", knee_frequency(clock, cfg.adc.delta, a_limit)}});
    }
    Json meta = metadata(ctx, "boundary");
    meta["a_limit"] = a_limit;
    meta["knees"] = knees;
    if (cfg.run.format == OutputFormat::Csv) {
        std::ostringstream csv;
        write_boundary_csv(csv, curves);
        write_file(ctx.out_dir / "boundary.csv", csv.str());
        write_file(ctx.out_dir / "boundary.meta.json", dump(meta));
    } else {
        Json jc = Json::array();
        for (const auto& c : curves) {
            Json pts = Json::array();
            for (const auto& p : c.points) pts.push_back({{"f", p.f}, {"a_max", p.a_max}});
            jc.push_back({{"clock_freq", c.clock_freq}, {"a_limit", c.a_limit}, {"points", pts}});
        }
        write_file(ctx.out_dir / "boundary.json", dump(Json{{"meta", meta}, {"curves", jc}}));
    }
    for (const auto& k : knees) {
        ctx.out << "clock " << format_number(k["clock_freq"].get<double>()) << " Hz: knee at "
                << format_number(k["knee_frequency"].get<double>()) << " Hz\n";
    }
    return kExitOk;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_table1(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Sine& sine = require_sine(cfg, "table1");
    const double span = run_span(cfg);
    const std::size_t trials = cfg.run.trials;

    std::vector<PowerReport> reports(trials);
    std::vector<char> overloads(trials, 0);
    parallel_for(trials, cfg.run.threads, [&](std::size_t i) {
        AdcConfig adc = cfg.adc;
        adc.clock_phase = trial_phase(cfg.run.seed, i, adc.clock_period());
        const Trace trace = simulate(adc, cfg.signal, span);
        reports[i] = measure(trace, cfg.power);
        overloads[i] = trace.overload ? 1 : 0;
    });

    double off_sum = 0.0;
    double p_sum = 0.0;
    double off_min = std::numeric_limits<double>::infinity();
    double off_max = -off_min;
    for (const auto& r : reports) {
        off_sum += r.off_fraction;
        p_sum += r.p_avg;
        off_min = std::min(off_min, r.off_fraction);
        off_max = std::max(off_max, r.off_fraction);
    }
    const double off_mean = off_sum / static_cast<double>(trials);
    const double p_avg = p_sum / static_cast<double>(trials);
    const double reduction = 1.0 - p_avg / cfg.power.p_on;
    const double t_clk = cfg.adc.clock_period();
    const double bandwidth = max_frequency(cfg.adc.full_scale_amplitude(), cfg.adc.delta, t_clk);
    const double opt_clock = optimal_clock(sine.amplitude, sine.frequency, cfg.adc.delta);
    const bool overload = std::any_of(overloads.begin(), overloads.end(), [](char c) { return c != 0; });

    Json rows = Json{{"p_on", cfg.power.p_on},
                     {"p_off", cfg.power.p_off},
                     {"p_avg", p_avg},
                     {"reduction", reduction},
                     {"bandwidth_full_scale", bandwidth}};
    Json detail = Json{{"clock_freq", cfg.adc.clock_freq},
                       {"optimal_clock", opt_clock},
                       {"signal_amplitude", sine.amplitude},
                       {"signal_frequency", sine.frequency},
                       {"trials", trials},
                       {"span", span},
                       {"off_fraction_mean", off_mean},
                       {"off_fraction_min", off_min},
                       {"off_fraction_max", off_max},
                       {"off_fraction_analytic_at_boundary", off_fraction_analytic(1.0, 1.0, 4.0 * std::numbers::pi * t_clk, t_clk)},
                       {"overload", overload}};

    std::ostringstream md;
    md << "| Parameter | Value |\n|---|---|\n"
       << "| P_ADC^ON | " << fixed(cfg.power.p_on * 1e6, 2) << " uW |\n"
       << "| P_ADC^OFF | " << fixed(cfg.power.p_off * 1e6, 2) << " uW |\n"
       << "| P_ADC^average at " << fixed(cfg.adc.clock_freq * 1e-3, 2) << " kHz clock | " << fixed(p_avg * 1e6, 3)
       << " uW |\n"
       << "| Average power reduction (sine wave) | " << fixed(reduction * 100.0, 1) << " % |\n"
       << "| Bandwidth (full scale input, " << fixed(cfg.adc.clock_freq * 1e-3, 2) << " kHz clock) | "
       << fixed(bandwidth * 1e-3, 4) << " kHz |\n"
       << "| Off fraction mean [min, max] over " << trials << " clock phases | " << fixed(off_mean, 4) << " ["
       << fixed(off_min, 4) << ", " << fixed(off_max, 4) << "] |\n";

    Json meta = metadata(ctx, "table1");
    if (cfg.run.format == OutputFormat::Json) {
        write_file(ctx.out_dir / "table1.json", dump(Json{{"meta", meta}, {"table", rows}, {"detail", detail}}));
    } else {
        std::ostringstream csv;
        csv << "parameter,value\n";
        for (const auto& [key, value] : rows.items()) csv << key << ',' << format_number(value.get<double>()) << '\n';
        write_file(ctx.out_dir / "table1.csv", csv.str());
        meta["detail"] = detail;
        write_file(ctx.out_dir / "table1.meta.json", dump(meta));
    }
    write_file(ctx.out_dir / "table1.md", md.str());
    ctx.out << md.str();
    if (overload) ctx.out << "overload: at least one run outran the update loop\n";
    return overload && ctx.fail_on_overload ? kExitOverload : kExitOk;
}

int cmd_montecarlo(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const OffTimeStats stats =
        monte_carlo_off_time(cfg.adc, cfg.signal, run_span(cfg), cfg.run.trials, cfg.run.seed, cfg.run.threads);
    Json meta = metadata(ctx, "montecarlo");
    meta["stats"] = to_json(stats);
    if (cfg.run.format == OutputFormat::Csv) {
        std::ostringstream csv;
        write_histogram_csv(csv, stats);
        write_file(ctx.out_dir / "montecarlo.csv", csv.str());
        write_file(ctx.out_dir / "montecarlo.meta.json", dump(meta));
    } else {
        write_file(ctx.out_dir / "montecarlo.json", dump(meta));
    }
    ctx.out << "events: " << stats.count << "\n";
    if (stats.count > 0) {
        ctx.out << "mean off time: " << format_number(stats.mean) << " s (" << fixed(stats.mean / stats.t_clk, 5)
                << " T_clk)\n";
    }
    return kExitOk;
}

Context make_context(const GlobalOptions& opts, std::ostream& out) {
    RunConfig cfg = load_run_config(opts.config);
    if (opts.seed) cfg.run.seed = *opts.seed;
    if (opts.out) cfg.run.out = *opts.out;
    if (opts.threads) cfg.run.threads = std::max(1u, *opts.threads);
    if (opts.format) {
        if (*opts.format == "csv") {
            cfg.run.format = OutputFormat::Csv;
        } else if (*opts.format == "json") {
            cfg.run.format = OutputFormat::Json;
        } else {
            throw ConfigError("--format must be csv or json", "--format");
        }
    }
    fs::path dir = cfg.run.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message(), "run.out");
    return Context{std::move(cfg), std::move(dir), opts.fail_on_overload, out};
}

}  // namespace

const char* version_string() noexcept { return LCADC_VERSION_STRING; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-driven simulator for a clock-gated level-crossing ADC", "lcadc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version_string()));

    GlobalOptions opts;
    app.add_option("--config,-c", opts.config, "Run configuration file")->required();
    app.add_option("--seed", opts.seed, "Override run.seed");
    app.add_option("--out,-o", opts.out, "Output directory (overrides run.out)");
    app.add_option("--format", opts.format, "csv or json (overrides run.format)");
    app.add_option("--threads", opts.threads, "Worker threads for sweeps and Monte Carlo");
    app.add_flag("--fail-on-overload", opts.fail_on_overload, "Exit with status 3 when the input outruns the loop");

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one run; writes trace.json and power.json");
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep clock, frequency or amplitude; writes sweep_<kind>.csv");
    std::string sweep_kind;
    std::string sweep_grid;
    sweep_cmd->add_option("kind", sweep_kind, "clock | frequency | amplitude")->required();
    sweep_cmd->add_option("--grid", sweep_grid, "start:stop:count[:log]")->required();
    auto* boundary_cmd = app.add_subcommand("boundary", "Amplitude/frequency tracking boundary per clock");
    std::string clocks;
    std::string boundary_grid = "1:1M:121:log";
    boundary_cmd->add_option("--clocks", clocks, "Comma-separated clock frequencies (default: adc.clock_freq)");
    boundary_cmd->add_option("--grid", boundary_grid, "Frequency grid start:stop:count[:log]")->capture_default_str();
    auto* table1_cmd = app.add_subcommand("table1", "Power summary table at the configured operating point");
    auto* montecarlo_cmd = app.add_subcommand("montecarlo", "Off-time distribution over random clock phases");
    for (auto* sub : {simulate_cmd, sweep_cmd, boundary_cmd, table1_cmd, montecarlo_cmd}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(version_string()) + "\n"
                                                                  : app.help());
            return kExitOk;
        }
        err << "lcadc: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        Context ctx = make_context(opts, out);
        if (simulate_cmd->parsed()) return cmd_simulate(ctx);
        if (sweep_cmd->parsed()) return cmd_sweep(ctx, sweep_kind, sweep_grid);
        if (boundary_cmd->parsed()) return cmd_boundary(ctx, clocks, boundary_grid);
        if (table1_cmd->parsed()) return cmd_table1(ctx);
        if (montecarlo_cmd->parsed()) return cmd_montecarlo(ctx);
        err << "lcadc: no command given\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumericFailure;
    }
}

}  // namespace lcadc
