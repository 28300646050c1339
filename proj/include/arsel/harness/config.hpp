#pragma once

/** @file
 * Experiment configuration: a flat `key = value` text file.
 *
 * Blank lines and lines starting with `#` are ignored. Lists are comma
 * separated; integer ranges may be written `start:stop:step`, which expands to
 * start, start + step, ... and always ends with stop. Unknown keys are an
 * error. See configs/ for one annotated file per experiment.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arsel/criteria.hpp"
#include "arsel/errors.hpp"
#include "arsel/estimator.hpp"
#include "arsel/io.hpp"
#include "arsel/procgen.hpp"

namespace arsel::harness {

enum class ExperimentKind { Simulate, Fit, Select, FigureMdep, FigureGarch, Efficiency, Clt, DepProfile };

inline std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Fit: return "fit";
        case ExperimentKind::Select: return "select";
        case ExperimentKind::FigureMdep: return "figure_mdep";
        case ExperimentKind::FigureGarch: return "figure_garch";
        case ExperimentKind::Efficiency: return "efficiency";
        case ExperimentKind::Clt: return "clt";
        case ExperimentKind::DepProfile: return "depmeasure";
    }
    return "?";
}

/// Raw key/value pairs in file order of first appearance.
class KeyValues {
public:
    static KeyValues parse(std::istream& in) {
        KeyValues kv;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto text = trim(line);
            if (text.empty() || text.front() == '#') continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ValidationError("config", "line " + std::to_string(lineno) + ": expected key = value");
            kv.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        }
        return kv;
    }

    static KeyValues load(const std::string& file) {
        std::ifstream in(file);
        if (!in) throw ValidationError("config", "cannot open " + file);
        return parse(in);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    std::string text(const std::string& key, const std::string& dflt) const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double real(const std::string& key, double dflt) const {
        if (!has(key)) return dflt;
        return to_real(key, values_.at(key));
    }

    std::uint64_t integer(const std::string& key, std::uint64_t dflt) const {
        if (!has(key)) return dflt;
        return to_integer(key, values_.at(key));
    }

    std::vector<std::uint64_t> integers(const std::string& key, const std::string& dflt) const {
        std::vector<std::uint64_t> out;
        for (const auto& item : split(text(key, dflt))) {
            const auto parts = split(item, ':');
            if (parts.size() == 1) {
                out.push_back(to_integer(key, parts[0]));
            } else if (parts.size() == 3) {
                const auto lo = to_integer(key, parts[0]);
                const auto hi = to_integer(key, parts[1]);
                const auto step = to_integer(key, parts[2]);
                if (step == 0 || hi < lo) throw ValidationError(key, "range needs start <= stop and step > 0");
                for (auto v = lo; v < hi; v += step) out.push_back(v);
                out.push_back(hi);
            } else {
                throw ValidationError(key, "bad range '" + item + "'");
            }
        }
        return out;
    }

    std::vector<double> reals(const std::string& key, const std::string& dflt) const {
        std::vector<double> out;
        for (const auto& item : split(text(key, dflt))) out.push_back(to_real(key, item));
        return out;
    }

    std::vector<std::string> words(const std::string& key, const std::string& dflt) const { return split(text(key, dflt)); }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s, char sep = ',') {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep)) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

private:
    static double to_real(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ValidationError(key, "'" + v + "' is not a number");
        }
    }

    static std::uint64_t to_integer(const std::string& key, const std::string& v) {
        std::uint64_t out = 0;
        const auto* end = v.data() + v.size();
        const auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc{} || ptr != end) throw ValidationError(key, "'" + v + "' is not a non-negative integer");
        return out;
    }

    std::map<std::string, std::string> values_;
};

/// Process family described by the `innovation`, `ma`, ... keys.
struct ProcessConfig {
    std::string innovation = "mdep";  ///< iid | mdep | garch
    double innovation_sd = 1.0;
    int m = 5;
    double garch_omega = 0.1;
    double garch_alpha = 0.25;
    double garch_beta = 0.25;
    std::string ma = "power";  ///< power | geometric | list | white
    double ma_power = 4.0;
    std::size_t ma_length = 400;
    double ar_phi = 0.6;
    std::vector<double> ma_coeffs{1.0};
    std::int64_t burn_in = -1;  ///< -1 selects the default
    std::string functional = "identity";

    InnovationModel innovation_model() const {
        InnovationModel model;
        if (innovation == "iid") model = IidGaussian{innovation_sd};
        else if (innovation == "mdep") model = MDependent{m};
        else if (innovation == "garch") model = Garch{garch_omega, garch_alpha, garch_beta};
        else throw ValidationError("innovation", "expected iid, mdep or garch, got '" + innovation + "'");
        validate(model);
        return model;
    }

    std::vector<double> coefficients() const {
        if (ma == "power") return power_law_ma(ma_power, ma_length);
        if (ma == "geometric") return geometric_ma(ar_phi, ma_length);
        if (ma == "white") return {1.0};
        if (ma == "list") return ma_coeffs;
        throw ValidationError("ma", "expected power, geometric, list or white, got '" + ma + "'");
    }

    ProcessSpec spec(const std::string& label = {}) const {
        std::optional<std::size_t> burn;
        if (burn_in >= 0) burn = static_cast<std::size_t>(burn_in);
        auto s = ProcessSpec::make(innovation_model(), coefficients(), label, burn);
        if (functional == "abs") s.functional = Functional::Abs;
        else if (functional != "identity") throw ValidationError("functional", "expected identity or abs");
        return s;
    }
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::FigureMdep;
    std::size_t replications = 300;
    std::uint64_t seed = 20240917;
    std::size_t threads = 1;
    std::string output_dir = "out";
    FitMode mode = FitMode::ToeplitzFull;
    ProcessConfig process;

    std::vector<std::size_t> t_grid;   ///< figures
    std::vector<std::size_t> n_grid;   ///< efficiency
    std::vector<int> m_values;         ///< figure mdep
    std::vector<double> p_values;      ///< figure garch
    std::vector<Criterion> criteria;

    std::size_t n = 1000;        ///< simulate / fit / select / clt
    std::size_t k_max = 0;       ///< 0: K_n in PaperWindow, min(n - 1, n / 2) in ToeplitzFull
    std::size_t window = 0;      ///< K_n; 0: floor(n^0.45)
    std::size_t clt_k = 1;
    std::vector<std::size_t> lags;
    double q = 2.0;
    std::vector<double> alpha_grid;
    std::vector<std::size_t> L_grid;
    std::string input;           ///< fit / select: optional path CSV

    /// Echo of every resolved setting, for manifests.
    std::map<std::string, std::string> echo;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment", "replications", "seed", "threads", "output_dir", "mode", "innovation", "innovation_sd", "m",
        "garch_omega", "garch_alpha", "garch_beta", "ma", "ma_power", "ma_length", "ar_phi", "ma_coeffs", "burn_in",
        "functional", "t_grid", "n_grid", "m_values", "p_values", "criteria", "n", "k_max", "window", "clt_k",
        "lags", "q", "alpha_grid", "L_grid", "input"};
    return keys;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

inline void require_increasing(const std::string& key, const std::vector<std::size_t>& v) {
    if (v.empty()) throw ValidationError(key, "must not be empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) throw ValidationError(key, "grid must be strictly increasing");
}

}  // namespace detail

/// Defaults per experiment, overridden by the file's keys.
inline ExperimentConfig resolve(ExperimentKind kind, const KeyValues& kv) {
    for (const auto& [key, _] : kv.values())
        if (!detail::known_keys().count(key)) throw ValidationError(key, "unknown configuration key");

    ExperimentConfig c;
    c.experiment = kind;
    auto& p = c.process;

    // experiment-specific defaults
    std::string reps = "300", t_grid = "41:1840:100", n_grid = "250,500,1000,2000", criteria = "aic_log";
    std::string mode = "paper", lags = "0:20:1", alpha_grid = "0,2.5", L_grid = "5,10,20";
    std::size_t n = 1000;
    switch (kind) {
        case ExperimentKind::FigureMdep:
            mode = "toeplitz";
            p.innovation = "mdep";
            break;
        case ExperimentKind::FigureGarch:
            mode = "toeplitz";
            p.innovation = "garch";
            break;
        case ExperimentKind::Efficiency:
            reps = "200";
            break;
        case ExperimentKind::Clt:
            reps = "1000";
            n = 4000;
            p.innovation = "iid";
            p.ma = "geometric";
            p.ma_length = 100;
            break;
        case ExperimentKind::DepProfile:
            reps = "10000";
            p.innovation = "iid";
            break;
        case ExperimentKind::Simulate:
        case ExperimentKind::Fit:
        case ExperimentKind::Select:
            reps = "1";
            mode = "toeplitz";
            criteria = "shibata,shibata_star,aic_exp,aic_log,fpe";
            break;
    }

    c.replications = kv.integer("replications", std::stoull(reps));
    if (c.replications < 1) throw ValidationError("replications", "must be >= 1");
    c.seed = kv.integer("seed", c.seed);
    c.threads = std::max<std::size_t>(1, kv.integer("threads", 1));
    c.output_dir = kv.text("output_dir", c.output_dir);

    const auto mode_text = kv.text("mode", mode);
    if (mode_text == "paper") c.mode = FitMode::PaperWindow;
    else if (mode_text == "toeplitz") c.mode = FitMode::ToeplitzFull;
    else throw ValidationError("mode", "expected paper or toeplitz");

    p.innovation = kv.text("innovation", p.innovation);
    p.innovation_sd = kv.real("innovation_sd", p.innovation_sd);
    p.m = static_cast<int>(kv.integer("m", static_cast<std::uint64_t>(p.m)));
    p.garch_omega = kv.real("garch_omega", p.garch_omega);
    p.garch_alpha = kv.real("garch_alpha", p.garch_alpha);
    p.garch_beta = kv.real("garch_beta", p.garch_beta);
    p.ma = kv.text("ma", kv.has("ma_coeffs") ? "list" : p.ma);
    p.ma_power = kv.real("ma_power", p.ma_power);
    p.ma_length = kv.integer("ma_length", p.ma_length);
    p.ar_phi = kv.real("ar_phi", p.ar_phi);
    if (kv.has("ma_coeffs")) p.ma_coeffs = kv.reals("ma_coeffs", "");
    if (kv.has("burn_in")) p.burn_in = static_cast<std::int64_t>(kv.integer("burn_in", 0));
    p.functional = kv.text("functional", p.functional);
    // validate the process now so errors name the offending key
    (void)p.spec();

    for (auto v : kv.integers("t_grid", t_grid)) c.t_grid.push_back(v);
    for (auto v : kv.integers("n_grid", n_grid)) c.n_grid.push_back(v);
    for (auto v : kv.integers("m_values", "1,5,25")) c.m_values.push_back(static_cast<int>(v));
    c.p_values = kv.reals("p_values", "1.5,2.5,4");
    for (const auto& w : kv.words("criteria", criteria)) c.criteria.push_back(parse_criterion(w));
    if (c.criteria.empty()) throw ValidationError("criteria", "must not be empty");

    c.n = kv.integer("n", n);
    c.k_max = kv.integer("k_max", 0);
    c.window = kv.integer("window", 0);
    c.clt_k = kv.integer("clt_k", 1);
    for (auto v : kv.integers("lags", lags)) c.lags.push_back(v);
    c.q = kv.real("q", 2.0);
    c.alpha_grid = kv.reals("alpha_grid", alpha_grid);
    for (auto v : kv.integers("L_grid", L_grid)) c.L_grid.push_back(v);
    c.input = kv.text("input", "");

    if (kind == ExperimentKind::FigureMdep || kind == ExperimentKind::FigureGarch) {
        detail::require_increasing("t_grid", c.t_grid);
        if (c.t_grid.front() < 3) throw ValidationError("t_grid", "values must be >= 3");
    }
    if (kind == ExperimentKind::Efficiency) detail::require_increasing("n_grid", c.n_grid);
    if (kind == ExperimentKind::DepProfile) detail::require_increasing("lags", c.lags);
    if (kind == ExperimentKind::FigureMdep)
        for (int m : c.m_values)
            if (m < 1) throw ValidationError("m_values", "m must be >= 1");
    if (kind == ExperimentKind::FigureGarch)
        for (double pv : c.p_values)
            if (!(pv > 1.0)) throw ValidationError("p_values", "decay exponents must exceed 1");
    if (c.n < 3) throw ValidationError("n", "must be >= 3");

    c.echo = {{"experiment", std::string(to_string(kind))},
              {"replications", std::to_string(c.replications)},
              {"seed", std::to_string(c.seed)},
              {"mode", c.mode == FitMode::PaperWindow ? "paper" : "toeplitz"},
              {"innovation", p.innovation},
              {"m", std::to_string(p.m)},
              {"garch_omega", io::num(p.garch_omega)},
              {"garch_alpha", io::num(p.garch_alpha)},
              {"garch_beta", io::num(p.garch_beta)},
              {"ma", p.ma},
              {"ma_power", io::num(p.ma_power)},
              {"ma_length", std::to_string(p.ma_length)},
              {"ar_phi", io::num(p.ar_phi)},
              {"functional", p.functional},
              {"t_grid", detail::join(c.t_grid)},
              {"n_grid", detail::join(c.n_grid)},
              {"m_values", detail::join(c.m_values)},
              {"p_values", detail::join(c.p_values)},
              {"n", std::to_string(c.n)},
              {"k_max", std::to_string(c.k_max)},
              {"window", std::to_string(c.window)},
              {"clt_k", std::to_string(c.clt_k)},
              {"lags", detail::join(c.lags)},
              {"q", io::num(c.q)},
              {"alpha_grid", detail::join(c.alpha_grid)},
              {"L_grid", detail::join(c.L_grid)}};
    std::vector<std::string> names;
    for (auto cr : c.criteria) names.emplace_back(arsel::to_string(cr));
    c.echo["criteria"] = detail::join(names);
    return c;
}

}  // namespace arsel::harness
