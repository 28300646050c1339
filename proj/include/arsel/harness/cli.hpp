#pragma once

/** @file
 * Command-line front end: `arsel <command> [config] [options]`.
 *
 * Exit codes: 0 success, 1 invalid input (one JSON line on stderr naming the
 * field), 2 usage error, 3 internal failure.
 */

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "arsel/errors.hpp"
#include "arsel/harness/config.hpp"
#include "arsel/harness/experiments.hpp"

namespace arsel::harness {

struct CliOverrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> threads;
    std::optional<std::uint64_t> n;
    std::string out;
    std::string input;
    std::string figure;
};

inline void print_error(std::ostream& err, const std::string& kind, const std::string& field, const std::string& msg) {
    nlohmann::json j{{"error", kind}, {"field", field}, {"message", msg}};
    err << j.dump() << '\n';
}

inline ExperimentConfig build_config(ExperimentKind kind, const CliOverrides& o) {
    KeyValues kv = o.config.empty() ? KeyValues{} : KeyValues::load(o.config);
    if (kv.has("experiment") && kv.text("experiment", "") != to_string(kind))
        throw ValidationError("experiment", "config is for '" + kv.text("experiment", "") + "', command is '" +
                                                std::string(to_string(kind)) + "'");
    if (o.seed) kv.set("seed", std::to_string(*o.seed));
    if (o.reps) kv.set("replications", std::to_string(*o.reps));
    if (o.threads) kv.set("threads", std::to_string(*o.threads));
    if (o.n) kv.set("n", std::to_string(*o.n));
    if (!o.out.empty()) kv.set("output_dir", o.out);
    if (!o.input.empty()) kv.set("input", o.input);
    auto config = resolve(kind, kv);
    config.echo["threads"] = std::to_string(config.threads);
    return config;
}

inline void print_report(std::ostream& os, const ExperimentReport& report) {
    nlohmann::json j;
    j["experiment"] = std::string(to_string(report.config.experiment));
    j["output_dir"] = report.config.output_dir;
    j["outputs"] = report.outputs;
    j["wall_seconds"] = report.wall_seconds;
    os << j.dump() << '\n';
    for (const auto& c : report.cells) {
        os << "  " << c.group << " size=" << c.size << " mean=" << c.mean;
        if (c.count > 1) os << " stderr=" << c.std_error << " count=" << c.count;
        for (const auto& [k, v] : c.metrics) os << ' ' << k << '=' << v;
        os << '\n';
    }
    for (const auto& note : report.notes) os << "  note: " << note << '\n';
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Order selection for AR(infinity) approximations of dependent linear processes", "arsel"};
    app.set_version_flag("--version", ARSEL_VERSION);
    app.require_subcommand(1);

    CliOverrides o;
    std::optional<ExperimentKind> kind;
    auto common = [&](CLI::App* sub, bool takes_input) {
        sub->add_option("config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--reps", o.reps, "replications");
        sub->add_option("--threads", o.threads, "worker threads");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--n", o.n, "sample size");
        if (takes_input) sub->add_option("--input", o.input, "path CSV with header t,x")->check(CLI::ExistingFile);
    };
    auto simple = [&](const char* name, const char* help, ExperimentKind k, bool takes_input = false) {
        auto* sub = app.add_subcommand(name, help);
        common(sub, takes_input);
        sub->callback([&kind, k] { kind = k; });
    };
    simple("simulate", "generate one path and the population tables", ExperimentKind::Simulate);
    simple("fit", "fit AR(k) for every order", ExperimentKind::Fit, true);
    simple("select", "score and select the order", ExperimentKind::Select, true);
    simple("efficiency", "Q_n(k_hat) / L_n(k*) over replications", ExperimentKind::Efficiency);
    simple("depmeasure", "Monte-Carlo physical dependence profile", ExperimentKind::DepProfile);
    simple("clt", "plug-in against Monte-Carlo covariance of the coefficients", ExperimentKind::Clt);
    auto* figure = app.add_subcommand("figure", "average selected order against sample size");
    figure->add_option("which", o.figure, "mdep or garch")->required()->check(CLI::IsMember({"mdep", "garch"}));
    common(figure, false);
    figure->callback([&] { kind = o.figure == "mdep" ? ExperimentKind::FigureMdep : ExperimentKind::FigureGarch; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        const auto config = build_config(*kind, o);
        const auto report = run_experiment(config);
        print_report(out, report);
        return 0;
    } catch (const ValidationError& e) {
        print_error(err, "validation", e.field(), e.what());
        return 1;
    } catch (const LengthError& e) {
        print_error(err, "length", "n", e.what());
        return 1;
    } catch (const SingularMatrixError& e) {
        print_error(err, "singular", "R_hat", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(err, "internal", "", e.what());
        return 3;
    }
}

}  // namespace arsel::harness
