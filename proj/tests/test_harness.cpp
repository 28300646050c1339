#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "arsel/harness/cli.hpp"

using namespace arsel;
using namespace arsel::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("arsel_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KeyValues kv_of(const std::string& text) {
    std::istringstream in(text);
    return KeyValues::parse(in);
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "arsel");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return rc;
}

}  // namespace

TEST(Config, ParsesCommentsAndRanges) {
    const auto kv = kv_of("# comment\n\n t_grid = 41:341:100 \nseed=5\np_values = 1.5, 2.5\n");
    EXPECT_EQ(kv.integers("t_grid", ""), (std::vector<std::uint64_t>{41, 141, 241, 341}));
    EXPECT_EQ(kv.integers("x", "41:350:100"), (std::vector<std::uint64_t>{41, 141, 241, 341, 350}));
    EXPECT_EQ(kv.integer("seed", 0), 5u);
    EXPECT_EQ(kv.reals("p_values", ""), (std::vector<double>{1.5, 2.5}));
    EXPECT_THROW(kv_of("no equals sign"), ValidationError);
}

TEST(Config, ValuesValidated) {
    try {
        (void)kv_of("seed = abc").integer("seed", 0);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "seed");
    }
    EXPECT_THROW(kv_of("q = 2x").real("q", 0), ValidationError);
    EXPECT_THROW(kv_of("t = 5:1:1").integers("t", ""), ValidationError);
}

TEST(Config, DefaultsPerExperiment) {
    const auto fig = resolve(ExperimentKind::FigureMdep, KeyValues{});
    EXPECT_EQ(fig.replications, 300u);
    EXPECT_EQ(fig.mode, FitMode::ToeplitzFull);
    EXPECT_EQ(fig.t_grid.front(), 41u);
    EXPECT_EQ(fig.t_grid.back(), 1840u);
    EXPECT_EQ(fig.m_values, (std::vector<int>{1, 5, 25}));
    EXPECT_EQ(fig.criteria, (std::vector<Criterion>{Criterion::AicLog}));

    const auto eff = resolve(ExperimentKind::Efficiency, KeyValues{});
    EXPECT_EQ(eff.replications, 200u);
    EXPECT_EQ(eff.mode, FitMode::PaperWindow);
    EXPECT_EQ(eff.n_grid, (std::vector<std::size_t>{250, 500, 1000, 2000}));

    const auto clt = resolve(ExperimentKind::Clt, KeyValues{});
    EXPECT_EQ(clt.n, 4000u);
    EXPECT_EQ(clt.replications, 1000u);
    EXPECT_EQ(clt.process.innovation, "iid");

    const auto garch = resolve(ExperimentKind::FigureGarch, KeyValues{});
    EXPECT_EQ(garch.process.garch_omega, 0.1);
    EXPECT_EQ(garch.process.garch_alpha, 0.25);
    EXPECT_EQ(garch.process.garch_beta, 0.25);
    EXPECT_EQ(garch.process.ma_length, 400u);
}

TEST(Config, InvalidSettingsNameTheField) {
    auto field_of = [](ExperimentKind kind, const std::string& text) {
        try {
            (void)resolve(kind, kv_of(text));
        } catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of(ExperimentKind::Efficiency, "innovation = garch\ngarch_alpha = 0.6\ngarch_beta = 0.5"),
              "garch_alpha+garch_beta");
    EXPECT_EQ(field_of(ExperimentKind::FigureMdep, "t_grid = 100, 50"), "t_grid");
    EXPECT_EQ(field_of(ExperimentKind::FigureMdep, "colour = red"), "colour");
    EXPECT_EQ(field_of(ExperimentKind::FigureMdep, "replications = 0"), "replications");
    EXPECT_EQ(field_of(ExperimentKind::FigureMdep, "mode = fast"), "mode");
    EXPECT_EQ(field_of(ExperimentKind::Select, "criteria = bic"), "criteria");
    EXPECT_EQ(field_of(ExperimentKind::FigureGarch, "p_values = 1.5, 0.5"), "p_values");
    EXPECT_EQ(field_of(ExperimentKind::Simulate, "ma_coeffs = 2, 0.5"), "ma_coeffs");
}

TEST(Io, PathRoundTripIsExact) {
    const auto spec = ProcessSpec::make(Garch{}, power_law_ma(2.5, 400));
    const auto path = gen_path(spec, 300, 4, 1);
    std::stringstream ss;
    io::write_path(ss, path);
    EXPECT_EQ(ss.str().substr(0, 4), "t,x\n");
    const auto back = io::read_path(ss);
    EXPECT_EQ(back.values, path.values);
    std::istringstream bad("x,y\n1,2\n");
    EXPECT_THROW(io::read_path(bad), ValidationError);
}

TEST(Io, FitCsvPadsRaggedRows) {
    const auto x = gen_path(ProcessSpec::make(IidGaussian{}, {1.0, 0.5}), 100, 1, 0).values;
    const auto fit = fit_all_orders(x, FitWindow::toeplitz(100), 3);
    std::ostringstream os;
    io::write_fit(os, fit);
    std::istringstream in(os.str());
    std::string header, row1;
    std::getline(in, header);
    std::getline(in, row1);
    EXPECT_EQ(header, "k,sigma_hat_sq,phi_1,phi_2,phi_3");
    EXPECT_EQ(io::split(row1).size(), 5u);
    EXPECT_EQ(io::split(row1)[4], "");
}

TEST(Io, PopulationTables) {
    const auto m = PopulationModel::from_ma(std::vector<double>{1.0, 0.5}, 1.0,
                                            {.j_max = 3, .h_max = 4, .max_order = 0});
    std::ostringstream g, a;
    io::write_gamma(g, m);
    io::write_ar(a, m);
    EXPECT_EQ(g.str(), "h,gamma\n0,1.25\n1,0.5\n2,0\n3,0\n4,0\n");
    EXPECT_EQ(a.str(), "j,a_j\n1,-0.5\n2,0.25\n3,-0.125\n");
}

TEST(Figure, WritesCellsAndReusesPrefixes) {
    const auto dir = scratch("figure");
    auto cfg = resolve(ExperimentKind::FigureMdep,
                       kv_of("replications = 6\nt_grid = 41, 141, 241\nm_values = 1, 5\noutput_dir = " + dir.string()));
    const auto report = run_figure_mdep(cfg);
    ASSERT_EQ(report.cells.size(), 6u);
    for (const auto& c : report.cells) EXPECT_EQ(c.count, 6u);

    const auto t = io::read_table((dir / "fig_mdep.csv").string());
    EXPECT_EQ(t.header, (std::vector<std::string>{"m", "t", "mean_order", "stderr", "count", "sqrt_t"}));
    ASSERT_EQ(t.rows.size(), 6u);

    const auto runs = io::read_table((dir / "fig_mdep_runs.csv").string());
    EXPECT_EQ(runs.header, (std::vector<std::string>{"m", "run_id", "path_hash", "k_t41", "k_t141", "k_t241"}));
    ASSERT_EQ(runs.rows.size(), 12u);
    // the stored hash is the hash of the full-length path of that replication
    const auto spec = cfg.process.spec();
    auto pc = cfg.process;
    pc.m = 1;
    const auto path = gen_path(pc.spec(), 241, child_seed(cfg.seed, 0), 0);
    EXPECT_EQ(runs.rows[0][runs.column("path_hash")], std::to_string(harness::detail::path_hash(path.values)));
    // selected orders respect the prefix cap
    for (const auto& row : runs.rows) EXPECT_LE(std::stoul(row[runs.column("k_t41")]), 20u);

    EXPECT_EQ(slurp(dir / "fig_mdep.png").substr(1, 3), "PNG");
    const auto manifest = nlohmann::json::parse(slurp(dir / "figure_mdep_manifest.json"));
    EXPECT_EQ(manifest["seed"], cfg.seed);
    EXPECT_EQ(manifest["config"]["t_grid"], "41,141,241");
}

TEST(Figure, ByteIdenticalAcrossThreadCounts) {
    const auto a = scratch("det1"), b = scratch("det3");
    const std::string base = "replications = 7\nt_grid = 41, 241, 441\np_values = 1.5, 4\n";
    run_figure_garch(resolve(ExperimentKind::FigureGarch, kv_of(base + "threads = 1\noutput_dir = " + a.string())));
    run_figure_garch(resolve(ExperimentKind::FigureGarch, kv_of(base + "threads = 3\noutput_dir = " + b.string())));
    EXPECT_EQ(slurp(a / "fig_garch.csv"), slurp(b / "fig_garch.csv"));
    EXPECT_EQ(slurp(a / "fig_garch_runs.csv"), slurp(b / "fig_garch_runs.csv"));
}

TEST(Efficiency, SummaryAndRecords) {
    const auto dir = scratch("efficiency");
    const auto cfg = resolve(ExperimentKind::Efficiency,
                             kv_of("replications = 4\nn_grid = 250, 500\ncriteria = aic_log, fpe\nthreads = 2\n"
                                   "output_dir = " + dir.string()));
    const auto report = run_efficiency(cfg);
    EXPECT_EQ(report.cells.size(), 4u);
    const auto rec = io::read_table((dir / "efficiency.csv").string());
    EXPECT_EQ(rec.header,
              (std::vector<std::string>{"run_id", "n", "criterion", "k_hat", "k_star", "Q", "L_star", "ratio"}));
    EXPECT_EQ(rec.rows.size(), 16u);
    const auto sum = io::read_table((dir / "efficiency_summary.csv").string());
    EXPECT_EQ(sum.rows.size(), 4u);
    const auto pert = io::read_table((dir / "efficiency_perturbation.csv").string());
    EXPECT_EQ(pert.rows.size(), 4u);
}

TEST(Clt, SmallRun) {
    const auto dir = scratch("clt");
    const auto cfg = resolve(ExperimentKind::Clt, kv_of("replications = 30\nn = 800\nclt_k = 2\noutput_dir = " +
                                                        dir.string()));
    const auto report = run_clt(cfg);
    ASSERT_EQ(report.cells.size(), 2u);
    EXPECT_EQ(io::read_table((dir / "clt.csv").string()).rows.size(), 4u);
    const auto s = io::read_table((dir / "clt_summary.csv").string());
    EXPECT_EQ(s.header, (std::vector<std::string>{"coordinate", "mean_z", "stderr_z", "coverage_95", "jarque_bera",
                                                  "frobenius_rel"}));
}

TEST(DepProfile, SmallRun) {
    const auto dir = scratch("dep");
    const auto cfg = resolve(ExperimentKind::DepProfile, kv_of("replications = 200\nlags = 0:10:1\nL_grid = 5, 10, 20\n"
                                                               "output_dir = " + dir.string()));
    const auto report = run_depprofile(cfg);
    EXPECT_EQ(report.cells.size(), 11u);
    EXPECT_EQ(io::read_table((dir / "depmeasure_delta.csv").string()).header,
              (std::vector<std::string>{"l", "delta_hat", "stderr"}));
    // L = 20 is beyond the lag grid: skipped with a note, not silently filled
    EXPECT_EQ(io::read_table((dir / "depmeasure_partial.csv").string()).rows.size(), 4u);
    EXPECT_EQ(io::read_table((dir / "depmeasure_decay.csv").string()).rows.size(), 2u);
}

TEST(Cli, FigureContract) {
    const auto dir = scratch("cli_fig");
    std::string out, err;
    EXPECT_EQ(cli({"figure", "mdep", "--reps", "50", "--out", dir.string()}, &out, &err), 0) << err;
    EXPECT_TRUE(fs::exists(dir / "fig_mdep.csv"));
    EXPECT_TRUE(fs::exists(dir / "fig_mdep.png"));
}

TEST(Cli, SimulateFitSelectPipeline) {
    const auto dir = scratch("cli_pipe");
    const auto cfg = dir / "sim.cfg";
    std::ofstream(cfg) << "innovation = mdep\nm = 5\nma = power\nma_power = 4\nn = 600\n";
    std::string err;
    ASSERT_EQ(cli({"simulate", cfg.string(), "--out", dir.string(), "--seed", "9"}, nullptr, &err), 0) << err;
    EXPECT_TRUE(fs::exists(dir / "population_gamma.csv"));
    EXPECT_TRUE(fs::exists(dir / "population_ar.csv"));
    const auto input = (dir / "path.csv").string();
    ASSERT_EQ(cli({"fit", "--input", input, "--out", dir.string()}, nullptr, &err), 0) << err;
    ASSERT_EQ(cli({"select", "--input", input, "--out", dir.string()}, nullptr, &err), 0) << err;
    const auto sel = io::read_table((dir / "selection.csv").string());
    EXPECT_EQ(sel.header, (std::vector<std::string>{"criterion", "k_hat", "ties"}));
    EXPECT_EQ(sel.rows.size(), 5u);
    const auto scores = io::read_table((dir / "scores.csv").string());
    EXPECT_EQ(scores.header.front(), "k");
    EXPECT_EQ(scores.rows.size(), 300u);
    const auto fit = io::read_table((dir / "fit.csv").string());
    EXPECT_EQ(fit.rows.size(), 300u);
}

TEST(Cli, ValidationErrorIsOneJsonLine) {
    const auto dir = scratch("cli_bad");
    const auto cfg = dir / "bad.cfg";
    std::ofstream(cfg) << "innovation = garch\ngarch_alpha = 0.5\ngarch_beta = 0.5\n";
    std::string out, err;
    EXPECT_EQ(cli({"efficiency", cfg.string(), "--out", dir.string()}, &out, &err), 1);
    ASSERT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
    const auto j = nlohmann::json::parse(err);
    EXPECT_EQ(j["error"], "validation");
    EXPECT_EQ(j["field"], "garch_alpha+garch_beta");
}

TEST(Cli, ConfigForAnotherExperimentRejected) {
    const auto dir = scratch("cli_mismatch");
    const auto cfg = dir / "fig.cfg";
    std::ofstream(cfg) << "experiment = clt\n";
    std::string err;
    EXPECT_EQ(cli({"figure", "mdep", cfg.string()}, nullptr, &err), 1);
    EXPECT_EQ(nlohmann::json::parse(err)["field"], "experiment");
}

TEST(Cli, UsageErrorsExitTwo) {
    std::string err;
    EXPECT_EQ(cli({"bogus"}, nullptr, &err), 2);
    EXPECT_NE(err.find("Usage"), std::string::npos);
    EXPECT_EQ(cli({}, nullptr, &err), 2);
    EXPECT_EQ(cli({"figure", "sideways"}, nullptr, &err), 2);
    EXPECT_EQ(cli({"efficiency", "--reps", "many"}, nullptr, &err), 2);
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = ARSEL_CLI_PATH;
    const int rc = std::system((bin + " bogus >/dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(rc));
    EXPECT_EQ(WEXITSTATUS(rc), 2);
    const int ok = std::system((bin + " --version >/dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(ok), 0);
}
