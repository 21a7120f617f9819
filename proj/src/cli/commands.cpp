#include "qe/cli/commands.hpp"

#include "qe/cli/pipeline.hpp"
#include "qe/errors.hpp"
#include "qe/evolution.hpp"
#include "qe/szego.hpp"
#include "qe/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qe::cli {

namespace {

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << contents;
    if (!f) throw ConfigError("write failed for '" + path + "'");
}

void emit(const std::optional<std::string>& out, const std::string& csv, const nlohmann::json& meta,
          std::ostream& stdout_stream) {
    if (out) {
        write_file(*out, csv);
        write_file(*out + ".meta.json", meta.dump(2) + "\n");
    } else {
        stdout_stream << csv;
    }
}

void report_warnings(const BoundSeries& s, std::ostream& log) {
    for (const auto& w : s.warnings) log << "warning: " << w << '\n';
}

std::string gap_spec(double c) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "gap:c=%.17g", c);
    return buf;
}

}  // namespace

int cmd_evolve(const ScenarioConfig& cfg, const std::optional<std::string>& out,
               const std::optional<std::string>& dump_state, std::ostream& stdout_stream, std::ostream& log) {
    const BoundSeries series = run_series(cfg);
    report_warnings(series, log);
    std::ostringstream csv;
    write_csv(csv, series);
    emit(out, csv.str(), metadata_json(series), stdout_stream);
    if (dump_state) {
        const auto st = evolve(EvolutionSetup{cfg.lambda(), cfg.beta(), cfg.N}, cfg.t1);
        write_file(*dump_state, st.to_json() + "\n");
    }
    return kSuccess;
}

int cmd_figure1(const Figure1Options& opt, std::ostream& log) {
    if (opt.steps < 11) throw ConfigError("figure1 needs at least 11 time steps");
    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path dir(opt.out_dir);
    const double cs[] = {0.5, 1.0, 1.5};
    const char* tags[] = {"0.5", "1.0", "1.5"};
    const std::pair<double, double> window{5.0, 50.0};

    nlohmann::json fits = nlohmann::json::object();
    std::vector<double> final_values;
    for (std::size_t i = 0; i < 3; ++i) {
        ScenarioConfig cfg;
        cfg.lambda_spec = gap_spec(cs[i]);
        cfg.beta_spec = "poly:1";
        cfg.N = 64;
        cfg.t0 = 0.0;
        cfg.t1 = 50.0;
        cfg.steps = opt.steps;
        cfg.outputs = {Column::szego, Column::bkbound};
        cfg.jobs = opt.jobs;
        const BoundSeries series = run_series(cfg);
        report_warnings(series, log);
        std::ostringstream csv;
        write_csv(csv, series);
        write_file((dir / (std::string("figure1_c") + tags[i] + ".csv")).string(), csv.str());

        std::vector<double> t, s;
        for (const auto& r : series.rows) {
            t.push_back(r.t);
            s.push_back(*r.szego_sum);
        }
        final_values.push_back(s.back());
        const GrowthFit lin = fit_linear(t, s, window);

        // Short-time window scaled to the fastest mode.
        const auto lam = cfg.lambda();
        const double t_short = std::min(0.1, 0.2 / std::sqrt(std::max(extrema(lam).max, 1e-300)));
        ScenarioConfig short_cfg = cfg;
        short_cfg.t1 = t_short;
        short_cfg.steps = 11;
        short_cfg.outputs = {Column::szego};
        const BoundSeries early = run_series(short_cfg);
        std::vector<double> te, se;
        for (const auto& r : early.rows) {
            te.push_back(r.t);
            se.push_back(*r.szego_sum);
        }
        const ShortTimeFit quad = fit_quadratic_short_time(te, se, t_short);

        nlohmann::json f;
        f["slope"] = lin.slope;
        f["intercept"] = lin.intercept;
        f["r_squared"] = lin.r_squared;
        f["window"] = {window.first, window.second};
        f["kappa1"] = quad.kappa1;
        f["kappa2"] = quad.kappa2;
        f["short_time_window"] = {0.0, t_short};
        f["short_time_exponent"] = std::isfinite(quad.exponent) ? nlohmann::json(quad.exponent) : nlohmann::json();
        fits[std::string("c=") + tags[i]] = f;
    }
    const bool ordered = final_values[0] > final_values[1] && final_values[1] > final_values[2];
    fits["ordering_ok"] = ordered;
    write_file((dir / "figure1_fits.json").string(), fits.dump(2) + "\n");
    if (!ordered) {
        log << "error: Szegő sum at t = 50 not ordered c=0.5 > c=1.0 > c=1.5\n";
        return kVerificationFailure;
    }
    return kSuccess;
}

int cmd_sweep(const std::string& param, const std::vector<double>& values, const ScenarioConfig& base,
              const std::optional<std::string>& out, std::ostream& stdout_stream, std::ostream& log) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (param != "c" && param != "N" && param != "n" && param != "t1") {
        throw ConfigError("sweep parameter must be one of c, N, n, t1");
    }
    auto as_count = [&](double v) {
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(param + " values must be positive integers");
        return static_cast<std::size_t>(v);
    };
    std::vector<ScenarioConfig> cfgs;
    for (double v : values) {
        ScenarioConfig c = base;
        if (param == "c") {
            c.lambda_spec = gap_spec(v);
        } else if (param == "N") {
            c.N = as_count(v);
        } else if (param == "n") {
            c.n = as_count(v);
        } else {
            c.t1 = v;
        }
        c.validate();
        cfgs.push_back(std::move(c));
    }
    // Values run concurrently; each series is then single-threaded.
    std::vector<std::pair<double, BoundSeries>> runs(cfgs.size());
    parallel_for(cfgs.size(), base.jobs, [&](std::size_t i) {
        cfgs[i].jobs = 1;
        runs[i] = {values[i], run_series(cfgs[i])};
    });
    for (const auto& r : runs) report_warnings(r.second, log);
    std::ostringstream csv;
    write_sweep_csv(csv, runs);
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["param"] = param;
    meta["values"] = values;
    meta["base_config"] = base.to_json();
    double runtime = 0.0;
    for (const auto& r : runs) runtime += r.second.runtime_seconds;
    meta["runtime_seconds"] = runtime;
    emit(out, csv.str(), meta, stdout_stream);
    return kSuccess;
}

namespace {

struct ScenarioFlags {
    std::string lambda, beta, kmax, out, config, dump_state, outputs;
    std::size_t N = 0, n = 0, steps = 0;
    double t0 = 0.0, t1 = 0.0;
    unsigned jobs = 1;
    std::vector<CLI::Option*> opts;
    CLI::Option *o_lambda, *o_beta, *o_N, *o_n, *o_t0, *o_t1, *o_steps, *o_kmax, *o_jobs, *o_config, *o_outputs;
    CLI::Option *o_out = nullptr, *o_dump = nullptr;

    void attach(CLI::App* app) {
        o_lambda = app->add_option("--lambda", lambda, "coupling symbol: 'gap:c=<c>' or 'poly:a0,a1,...'");
        o_beta = app->add_option("--beta", beta, "initial-state symbol, same syntax");
        o_N = app->add_option("-N", N, "chain length");
        o_n = app->add_option("-n", n, "sites traced out (default N/2)");
        o_t0 = app->add_option("--t0", t0, "first time");
        o_t1 = app->add_option("--t1", t1, "last time");
        o_steps = app->add_option("--steps", steps, "number of time points");
        o_kmax = app->add_option("--kmax", kmax, "Fourier cutoff or 'auto'");
        o_jobs = app->add_option("--jobs", jobs, "worker threads");
        o_config = app->add_option("--config", config, "JSON scenario file; flags override it");
        o_outputs = app->add_option("--outputs", outputs, "comma list of exact,purity,detbound,szego,bkbound");
        o_out = app->add_option("--out", out, "CSV output path (stdout if omitted)");
    }

    ScenarioConfig build() const {
        ScenarioConfig cfg;
        if (o_config->count()) cfg = load_config_file(config);
        if (o_lambda->count()) cfg.lambda_spec = lambda;
        if (o_beta->count()) cfg.beta_spec = beta;
        if (o_N->count()) cfg.N = N;
        if (o_n->count()) cfg.n = n;
        if (o_t0->count()) cfg.t0 = t0;
        if (o_t1->count()) cfg.t1 = t1;
        if (o_steps->count()) cfg.steps = steps;
        if (o_jobs->count()) cfg.jobs = jobs;
        if (o_kmax->count()) {
            if (kmax == "auto") {
                cfg.k_max.reset();
            } else {
                std::size_t pos = 0;
                unsigned long v = 0;
                try {
                    v = std::stoul(kmax, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != kmax.size() || kmax.empty() || kmax[0] == '-') {
                    throw ConfigError("kmax must be a positive integer or 'auto'");
                }
                cfg.k_max = v;
            }
        }
        if (o_outputs->count()) {
            cfg.outputs.clear();
            std::stringstream ss(outputs);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.outputs.insert(parse_column(item));
        }
        cfg.validate();
        return cfg;
    }

    std::optional<std::string> out_path() const { return o_out->count() ? std::optional(out) : std::nullopt; }
};

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Entanglement bounds after a Gaussian quench of a harmonic chain", "quench-entropy"};
    app.set_version_flag("--version", std::string("quench-entropy ") + kVersion);
    app.require_subcommand(1);

    auto* evolve_cmd = app.add_subcommand("evolve", "time series of entropy and bounds for one scenario");
    ScenarioFlags ev;
    ev.attach(evolve_cmd);
    std::string dump_state;
    auto* o_dump = evolve_cmd->add_option("--dump-state", dump_state, "write the state at t1 as JSON");

    auto* fig_cmd = app.add_subcommand("figure1", "Szegő sum growth for the gap family c = 0.5, 1, 1.5");
    Figure1Options fig;
    fig_cmd->add_option("--out", fig.out_dir, "output directory");
    fig_cmd->add_option("--jobs", fig.jobs, "worker threads");
    fig_cmd->add_option("--steps", fig.steps, "time points on [0, 50]");

    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites");
    std::string level = "quick";
    std::uint64_t seed = 20240601;
    std::string report_path;
    verify_cmd->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify_cmd->add_option("--seed", seed, "RNG seed");
    auto* o_report = verify_cmd->add_option("--out", report_path, "JSON report path (stdout if omitted)");

    auto* sweep_cmd = app.add_subcommand("sweep", "evolve over a list of parameter values");
    ScenarioFlags sw;
    sw.attach(sweep_cmd);
    std::string param;
    std::vector<std::string> value_text;
    sweep_cmd->add_option("--param", param, "c, N, n or t1")->required();
    sweep_cmd->add_option("--values", value_text, "comma-separated parameter values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (evolve_cmd->parsed()) {
            const auto cfg = ev.build();
            return cmd_evolve(cfg, ev.out_path(), o_dump->count() ? std::optional(dump_state) : std::nullopt, std::cout,
                              std::cerr);
        }
        if (fig_cmd->parsed()) return cmd_figure1(fig, std::cerr);
        if (verify_cmd->parsed()) {
            const auto lvl = level == "full" ? VerifyLevel::full : VerifyLevel::quick;
            if (o_report->count()) {
                std::ostringstream rep;
                const int rc = cmd_verify(lvl, seed, rep, std::cerr);
                write_file(report_path, rep.str());
                return rc;
            }
            return cmd_verify(lvl, seed, std::cout, std::cerr);
        }
        if (sweep_cmd->parsed()) {
            const auto base = sw.build();
            std::vector<double> values;
            for (const auto& v : value_text) {
                if (v.empty()) continue;
                std::size_t pos = 0;
                double x = 0.0;
                try {
                    x = std::stod(v, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != v.size()) throw ConfigError("sweep value '" + v + "' is not a number");
                values.push_back(x);
            }
            return cmd_sweep(param, values, base, sw.out_path(), std::cout, std::cerr);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical inconsistency: " << e.what() << '\n';
        return kNumericalInconsistency;
    }
    return kUsageError;
}

}  // namespace qe::cli
