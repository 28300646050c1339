#pragma once

/** @file
 * Experiment drivers behind the CLI. Each driver writes fixed-header CSV
 * files plus a JSON manifest into the configured output directory and
 * returns the per-cell aggregates.
 *
 * Replications are spread over a worker pool; every replication draws from
 * its own substream and writes into its own slot, so outputs are identical
 * for any thread count.
 */

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "arsel/criteria.hpp"
#include "arsel/depmeasure.hpp"
#include "arsel/estimator.hpp"
#include "arsel/harness/config.hpp"
#include "arsel/harness/plot.hpp"
#include "arsel/io.hpp"
#include "arsel/oracle.hpp"
#include "arsel/parallel.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"

#ifndef ARSEL_VERSION
#define ARSEL_VERSION "0.0.0"
#endif

namespace arsel::harness {

struct Cell {
    std::string group;        ///< e.g. "m=5", "p=2.5", "aic_log"
    double group_value = 0.0;
    std::size_t size = 0;     ///< t or n
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
    std::map<std::string, double> metrics;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<Cell> cells;
    std::vector<std::string> outputs;
    std::vector<std::string> notes;
    double wall_seconds = 0.0;
};

namespace detail {

struct Moments {
    double mean = 0.0;
    double std_error = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return m;
}

/// FNV-1a over the bytes of the path values.
inline std::uint64_t path_hash(const std::vector<double>& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string output_file(ExperimentReport& report, const std::string& name) {
    std::filesystem::create_directories(report.config.output_dir);
    const auto file = (std::filesystem::path(report.config.output_dir) / name).string();
    report.outputs.push_back(name);
    return file;
}

inline std::ofstream open_output(ExperimentReport& report, const std::string& name) {
    std::ofstream out(output_file(report, name));
    if (!out) throw std::runtime_error("cannot write " + name + " in " + report.config.output_dir);
    return out;
}

inline void write_manifest(const ExperimentReport& report, double wall_seconds) {
    nlohmann::json j;
    j["tool"] = "arsel";
    j["version"] = ARSEL_VERSION;
    j["experiment"] = std::string(to_string(report.config.experiment));
    j["seed"] = report.config.seed;
    j["threads"] = report.config.threads;
    j["config"] = report.config.echo;
    j["outputs"] = report.outputs;
    j["notes"] = report.notes;
    j["wall_seconds"] = wall_seconds;
    const auto file = std::filesystem::path(report.config.output_dir) /
                      (std::string(to_string(report.config.experiment)) + "_manifest.json");
    std::ofstream(file) << j.dump(2) << '\n';
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void finish(ExperimentReport& report, const Stopwatch& clock) {
    report.wall_seconds = clock.seconds();
    write_manifest(report, report.wall_seconds);
}

/// Largest order searched on a prefix of length t in figure mode.
inline std::size_t figure_order_cap(std::size_t t) { return std::max<std::size_t>(1, std::min(t - 1, t / 2)); }

struct FigureGroup {
    std::string column;
    std::string label;
    double value;
    ProcessSpec spec;
};

inline ExperimentReport run_figure(const ExperimentConfig& config, std::vector<FigureGroup> groups,
                                   const std::string& stem) {
    Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto& grid = config.t_grid;
    const std::size_t t_max = grid.back();
    const std::size_t reps = config.replications;
    const Criterion criterion = config.criteria.front();

    // orders[g][r][ti]
    std::vector<std::vector<std::vector<std::size_t>>> orders(
        groups.size(), std::vector<std::vector<std::size_t>>(reps, std::vector<std::size_t>(grid.size())));
    std::vector<std::vector<std::uint64_t>> hashes(groups.size(), std::vector<std::uint64_t>(reps));

    parallel_for(groups.size() * reps, config.threads, [&](std::size_t item) {
        const std::size_t g = item / reps;
        const std::size_t r = item % reps;
        const auto path = gen_path(groups[g].spec, t_max, child_seed(config.seed, g), r);
        const auto hash = path_hash(path.values);
        for (std::size_t ti = 0; ti < grid.size(); ++ti) {
            const std::size_t t = grid[ti];
            const std::span<const double> prefix(path.values.data(), t);
            const auto v = toeplitz_residual_variances(prefix, figure_order_cap(t));
            std::vector<double> scores(v.size());
            for (std::size_t k = 1; k <= v.size(); ++k) scores[k - 1] = score(criterion, v[k - 1], k, t, t);
            orders[g][r][ti] = select_from_scores(criterion, std::move(scores)).k_hat;
        }
        if (path_hash(path.values) != hash) throw std::logic_error("path changed while scanning prefixes");
        hashes[g][r] = hash;
    });

    auto csv = open_output(report, stem + ".csv");
    csv << groups.front().column << ",t,mean_order,stderr,count,sqrt_t\n";
    std::vector<Series> series;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Series s;
        for (std::size_t ti = 0; ti < grid.size(); ++ti) {
            std::vector<double> ks(reps);
            for (std::size_t r = 0; r < reps; ++r) ks[r] = static_cast<double>(orders[g][r][ti]);
            const auto m = moments(ks);
            if (ks.size() != reps) throw std::logic_error("replication count mismatch");
            const double root_t = std::sqrt(static_cast<double>(grid[ti]));
            csv << groups[g].label << ',' << grid[ti] << ',' << io::num(m.mean) << ',' << io::num(m.std_error) << ','
                << reps << ',' << io::num(root_t) << '\n';
            report.cells.push_back({groups[g].column + "=" + groups[g].label, groups[g].value, grid[ti], m.mean,
                                    m.std_error, reps, {}});
            s.x.push_back(static_cast<double>(grid[ti]));
            s.y.push_back(m.mean);
        }
        series.push_back(std::move(s));
    }
    csv.close();

    auto runs = open_output(report, stem + "_runs.csv");
    runs << groups.front().column << ",run_id,path_hash";
    for (auto t : grid) runs << ",k_t" << t;
    runs << '\n';
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t r = 0; r < reps; ++r) {
            runs << groups[g].label << ',' << r << ',' << hashes[g][r];
            for (auto k : orders[g][r]) runs << ',' << k;
            runs << '\n';
        }
    runs.close();

    Series root;
    for (std::size_t t = grid.front(); t <= t_max; t += std::max<std::size_t>(1, (t_max - grid.front()) / 100)) {
        root.x.push_back(static_cast<double>(t));
        root.y.push_back(std::sqrt(static_cast<double>(t)));
    }
    line_plot(output_file(report, stem + ".png"), series, &root);

    report.notes.push_back("criterion " + std::string(to_string(criterion)) +
                           ", ToeplitzFull Yule-Walker, orders searched over 1..min(t-1, floor(t/2))");
    report.notes.push_back("each replication generates one path of length " + std::to_string(t_max) +
                           " and selects on its prefixes");
    finish(report, clock);
    return report;
}

}  // namespace detail

/// Average selected order over prefixes of m-dependent driven j^{-4} processes.
inline ExperimentReport run_figure_mdep(const ExperimentConfig& config) {
    std::vector<detail::FigureGroup> groups;
    for (int m : config.m_values) {
        auto pc = config.process;
        pc.innovation = "mdep";
        pc.m = m;
        groups.push_back({"m", std::to_string(m), static_cast<double>(m), pc.spec("mdep m=" + std::to_string(m))});
    }
    return detail::run_figure(config, std::move(groups), "fig_mdep");
}

/// Average selected order for GARCH driven b_j = j^{-p} processes over a p grid.
inline ExperimentReport run_figure_garch(const ExperimentConfig& config) {
    std::vector<detail::FigureGroup> groups;
    for (double p : config.p_values) {
        auto pc = config.process;
        pc.innovation = "garch";
        pc.ma = "power";
        pc.ma_power = p;
        groups.push_back({"p", io::num(p), p, pc.spec("garch p=" + io::num(p))});
    }
    return detail::run_figure(config, std::move(groups), "fig_garch");
}

/// Q_n(k_hat) / L_n(k*) per replication for every n and criterion.
inline ExperimentReport run_efficiency(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto spec = config.process.spec("efficiency");
    const auto model = PopulationModel::from_spec(spec);
    const std::size_t reps = config.replications;
    const auto& crit = config.criteria;

    struct Design {
        FitWindow window;
        std::size_t k_max;
    };
    std::vector<Design> designs;
    for (auto n : config.n_grid) {
        if (config.mode == FitMode::PaperWindow) {
            const std::size_t K = config.window ? config.window : default_window(n);
            designs.push_back({FitWindow::paper(n, K), config.k_max ? std::min(config.k_max, K) : K});
        } else {
            designs.push_back({FitWindow::toeplitz(n), config.k_max ? config.k_max : detail::figure_order_cap(n)});
        }
    }

    // records[d][r][c]
    std::vector<std::vector<std::vector<EfficiencyRecord>>> records(
        designs.size(), std::vector<std::vector<EfficiencyRecord>>(reps));
    parallel_for(designs.size() * reps, config.threads, [&](std::size_t item) {
        const std::size_t d = item / reps;
        const std::size_t r = item % reps;
        const auto& design = designs[d];
        const auto path = gen_path(spec, design.window.n, child_seed(config.seed, design.window.n), r);
        const auto fit = fit_all_orders(path.values, design.window, design.k_max);
        for (auto c : crit) records[d][r].push_back(efficiency_ratio(fit, c, design.k_max, model, r));
    });

    auto csv = detail::open_output(report, "efficiency.csv");
    std::vector<EfficiencyRecord> flat;
    for (const auto& per_design : records)
        for (const auto& per_rep : per_design)
            for (const auto& rec : per_rep) flat.push_back(rec);
    io::write_efficiency(csv, flat);
    csv.close();

    auto summary = detail::open_output(report, "efficiency_summary.csv");
    summary << "n,criterion,mean_ratio,stderr,mean_abs_dev,frac_below_0.7,k_star,k_star_on_boundary,count\n";
    auto pert = detail::open_output(report, "efficiency_perturbation.csv");
    pert << "n,criterion,max_rho_over_N,max_rho_diff_over_NL\n";
    for (std::size_t d = 0; d < designs.size(); ++d) {
        const auto& design = designs[d];
        const auto ks = k_star(model, design.window.N, design.k_max);
        if (ks.on_boundary)
            report.notes.push_back("n=" + std::to_string(design.window.n) + ": k* sits on the boundary k_max=" +
                                   std::to_string(design.k_max));
        std::vector<double> L(design.k_max);
        for (std::size_t k = 1; k <= design.k_max; ++k) L[k - 1] = l_n(model, k, design.window.N);
        for (std::size_t c = 0; c < crit.size(); ++c) {
            std::vector<double> ratios(reps);
            double abs_dev = 0.0;
            std::size_t below = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                ratios[r] = records[d][r][c].ratio;
                abs_dev += std::abs(ratios[r] - 1.0);
                below += ratios[r] < 0.7;
            }
            const auto m = detail::moments(ratios);
            Cell cell{std::string(to_string(crit[c])), 0.0, design.window.n, m.mean, m.std_error, reps, {}};
            cell.metrics["mean_abs_dev"] = abs_dev / static_cast<double>(reps);
            cell.metrics["frac_below_0.7"] = static_cast<double>(below) / static_cast<double>(reps);
            cell.metrics["k_star"] = static_cast<double>(ks.k);
            summary << design.window.n << ',' << to_string(crit[c]) << ',' << io::num(m.mean) << ','
                    << io::num(m.std_error) << ',' << io::num(cell.metrics["mean_abs_dev"]) << ','
                    << io::num(cell.metrics["frac_below_0.7"]) << ',' << ks.k << ',' << (ks.on_boundary ? 1 : 0)
                    << ',' << reps << '\n';

            std::vector<double> rho(design.k_max);
            for (std::size_t k = 1; k <= design.k_max; ++k)
                rho[k - 1] = perturbation(crit[c], design.window.n, design.window.N, k);
            const auto diag = perturbation_diagnostics(rho, design.window.N, L, ks.k);
            pert << design.window.n << ',' << to_string(crit[c]) << ',' << io::num(diag.max_rel) << ','
                 << io::num(diag.max_diff_rel) << '\n';
            cell.metrics["max_rho_over_N"] = diag.max_rel;
            cell.metrics["max_rho_diff_over_NL"] = diag.max_diff_rel;
            report.cells.push_back(std::move(cell));
        }
    }
    report.notes.push_back(std::string("fit mode ") + (config.mode == FitMode::PaperWindow ? "paper window" : "toeplitz") +
                           "; selection range and k* range are both 1..k_max");
    detail::finish(report, clock);
    return report;
}

/// Plug-in Sigma(k) against the Monte-Carlo covariance of sqrt(n)(phi_hat(k) - phi(k)).
inline ExperimentReport run_clt(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto spec = config.process.spec("clt");
    const auto model = PopulationModel::from_spec(spec);
    const std::size_t k = config.clt_k;
    const std::size_t reps = config.replications;
    if (reps < 2) throw ValidationError("replications", "clt needs at least 2 replications");

    std::vector<SamplePath> paths(reps);
    parallel_for(reps, config.threads, [&](std::size_t r) { paths[r] = gen_path(spec, config.n, config.seed, r); });
    const Eigen::MatrixXd plugin = clt_sigma(model, k, paths);
    const Eigen::MatrixXd z = clt_scaled_errors(model, k, paths, config.window);
    const Eigen::MatrixXd mc = sample_covariance(z);
    const double frob = (plugin - mc).norm() / mc.norm();

    auto csv = detail::open_output(report, "clt.csv");
    csv << "i,j,sigma_plugin,sigma_mc\n";
    for (Eigen::Index i = 0; i < plugin.rows(); ++i)
        for (Eigen::Index j = 0; j < plugin.cols(); ++j)
            csv << (i + 1) << ',' << (j + 1) << ',' << io::num(plugin(i, j)) << ',' << io::num(mc(i, j)) << '\n';
    csv.close();

    auto summary = detail::open_output(report, "clt_summary.csv");
    summary << "coordinate,mean_z,stderr_z,coverage_95,jarque_bera,frobenius_rel\n";
    for (Eigen::Index i = 0; i < z.cols(); ++i) {
        std::vector<double> col(z.col(i).data(), z.col(i).data() + z.rows());
        const auto m = detail::moments(col);
        const double half = 1.959963984540054 * std::sqrt(plugin(i, i));
        std::size_t covered = 0;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : col) {
            covered += std::abs(v) <= half;
            const double c = v - m.mean;
            m2 += c * c;
            m3 += c * c * c;
            m4 += c * c * c * c;
        }
        const double nr = static_cast<double>(col.size());
        m2 /= nr;
        m3 /= nr;
        m4 /= nr;
        const double skew = m3 / std::pow(m2, 1.5);
        const double kurt = m4 / (m2 * m2);
        const double jb = nr / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
        const double coverage = static_cast<double>(covered) / nr;
        summary << (i + 1) << ',' << io::num(m.mean) << ',' << io::num(m.std_error) << ',' << io::num(coverage) << ','
                << io::num(jb) << ',' << io::num(frob) << '\n';
        Cell cell{"coordinate", static_cast<double>(i + 1), config.n, m.mean, m.std_error, reps, {}};
        cell.metrics["coverage_95"] = coverage;
        cell.metrics["jarque_bera"] = jb;
        cell.metrics["frobenius_rel"] = frob;
        cell.metrics["sigma_plugin"] = plugin(i, i);
        cell.metrics["sigma_mc"] = mc(i, i);
        report.cells.push_back(std::move(cell));
    }
    report.notes.push_back("Bartlett bandwidth " + std::to_string(clt_bandwidth(config.n)) +
                           "; plug-in long-run covariance averaged over replications");
    detail::finish(report, clock);
    return report;
}

/// delta_q(l) over a lag grid, weighted partial sums and decay fits.
inline ExperimentReport run_depprofile(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto spec = config.process.spec("depmeasure");
    const auto profile = dependence_profile(spec, config.lags, config.q, config.replications, config.seed, config.threads);

    auto csv = detail::open_output(report, "depmeasure_delta.csv");
    io::write_delta(csv, profile);
    csv.close();
    for (std::size_t i = 0; i < profile.lags.size(); ++i)
        report.cells.push_back({"lag", static_cast<double>(profile.lags[i]), profile.lags[i], profile.delta_hat[i],
                                profile.std_error[i], profile.replications, {}});

    auto partial = detail::open_output(report, "depmeasure_partial.csv");
    partial << "alpha,L,partial_D\n";
    for (double alpha : config.alpha_grid)
        for (auto L : config.L_grid) {
            double value = 0.0;
            try {
                value = partial_D(profile, alpha, L);
            } catch (const ValidationError&) {
                report.notes.push_back("partial_D skipped for L=" + std::to_string(L) + ": lag grid does not cover 1..L");
                continue;
            }
            partial << io::num(alpha) << ',' << L << ',' << io::num(value) << '\n';
        }
    partial.close();

    std::vector<double> ls, log_ls, logd;
    for (std::size_t i = 0; i < profile.lags.size(); ++i)
        if (profile.lags[i] >= 1 && profile.delta_hat[i] > 0.0) {
            ls.push_back(static_cast<double>(profile.lags[i]));
            log_ls.push_back(std::log(static_cast<double>(profile.lags[i])));
            logd.push_back(std::log(profile.delta_hat[i]));
        }
    auto decay = detail::open_output(report, "depmeasure_decay.csv");
    decay << "fit,slope,intercept,r_squared\n";
    if (ls.size() >= 2) {
        const auto geo = fit_line(ls, logd);
        const auto pow = fit_line(log_ls, logd);
        decay << "log_delta_vs_l," << io::num(geo.slope) << ',' << io::num(geo.intercept) << ','
              << io::num(geo.r_squared) << '\n';
        decay << "log_delta_vs_log_l," << io::num(pow.slope) << ',' << io::num(pow.intercept) << ','
              << io::num(pow.r_squared) << '\n';
    }
    decay.close();
    report.notes.push_back("||X_0||_q estimate " + io::num(profile.norm_x0));
    detail::finish(report, clock);
    return report;
}


namespace detail {

inline SamplePath load_or_simulate(const ExperimentConfig& config) {
    if (!config.input.empty()) return io::read_path_file(config.input);
    return gen_path(config.process.spec("simulate"), config.n, config.seed, 0);
}

inline std::pair<FitWindow, std::size_t> fit_design(const ExperimentConfig& config, std::size_t n) {
    if (config.mode == FitMode::PaperWindow) {
        const std::size_t K = config.window ? config.window : default_window(n);
        const auto w = FitWindow::paper(n, K);
        return {w, config.k_max ? config.k_max : K};
    }
    return {FitWindow::toeplitz(n), config.k_max ? config.k_max : figure_order_cap(n)};
}

}  // namespace detail

/// One path plus, for linear processes, the population autocovariances and AR coefficients.
inline ExperimentReport run_simulate(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto spec = config.process.spec("simulate");
    const auto path = gen_path(spec, config.n, config.seed, 0);
    auto out = detail::open_output(report, "path.csv");
    io::write_path(out, path);
    out.close();
    if (spec.functional == Functional::Identity) {
        const auto model = PopulationModel::from_spec(spec);
        auto g = detail::open_output(report, "population_gamma.csv");
        io::write_gamma(g, model);
        auto a = detail::open_output(report, "population_ar.csv");
        io::write_ar(a, model);
    }
    report.notes.push_back("path hash " + std::to_string(detail::path_hash(path.values)));
    detail::finish(report, clock);
    return report;
}

/// Fitted coefficients and residual variances for every order.
inline ExperimentReport run_fit(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto path = detail::load_or_simulate(config);
    const auto [window, k_max] = detail::fit_design(config, path.values.size());
    const auto fit = fit_all_orders(path.values, window, k_max);
    auto out = detail::open_output(report, "fit.csv");
    io::write_fit(out, fit);
    report.notes.push_back(config.input.empty() ? "path simulated from the configured process"
                                                : "path read from " + config.input);
    detail::finish(report, clock);
    return report;
}

/// Criterion scores for every order and the selected order per criterion.
inline ExperimentReport run_select(const ExperimentConfig& config) {
    detail::Stopwatch clock;
    ExperimentReport report{config, {}, {}, {}, 0.0};
    const auto path = detail::load_or_simulate(config);
    const auto [window, k_max] = detail::fit_design(config, path.values.size());
    const auto fit = fit_all_orders(path.values, window, k_max);
    std::vector<SelectionResult> selections;
    for (auto c : config.criteria) {
        selections.push_back(select(c, fit, k_max));
        report.cells.push_back({std::string(to_string(c)), 0.0, window.n,
                                static_cast<double>(selections.back().k_hat), 0.0, 1, {}});
    }
    auto scores = detail::open_output(report, "scores.csv");
    io::write_scores(scores, selections);
    scores.close();
    auto summary = detail::open_output(report, "selection.csv");
    io::write_selection_summary(summary, selections);
    detail::finish(report, clock);
    return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    switch (config.experiment) {
        case ExperimentKind::Simulate: return run_simulate(config);
        case ExperimentKind::Fit: return run_fit(config);
        case ExperimentKind::Select: return run_select(config);
        case ExperimentKind::FigureMdep: return run_figure_mdep(config);
        case ExperimentKind::FigureGarch: return run_figure_garch(config);
        case ExperimentKind::Efficiency: return run_efficiency(config);
        case ExperimentKind::Clt: return run_clt(config);
        case ExperimentKind::DepProfile: return run_depprofile(config);
    }
    throw std::logic_error("unknown experiment");
}

}  // namespace arsel::harness
