#pragma once

/** @file
 * CSV readers and writers for paths, population tables, fits, selections,
 * efficiency records and dependence profiles. Numbers are written with 17
 * significant digits so files round-trip exactly.
 */

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "arsel/criteria.hpp"
#include "arsel/depmeasure.hpp"
#include "arsel/errors.hpp"
#include "arsel/estimator.hpp"
#include "arsel/oracle.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"

namespace arsel::io {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_path(std::ostream& os, const SamplePath& path) {
    os << "t,x\n";
    for (std::size_t t = 0; t < path.values.size(); ++t) os << (t + 1) << ',' << num(path.values[t]) << '\n';
}

/// Reads a `t,x` file; the t column is ignored beyond the header check.
inline SamplePath read_path(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,x", 0) != 0)
        throw ValidationError("input", "path CSV must start with header 't,x'");
    SamplePath path;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("input", "row " + std::to_string(row) + " has no comma");
        try {
            path.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ValidationError("input", "row " + std::to_string(row) + " is not numeric");
        }
    }
    if (path.values.empty()) throw ValidationError("input", "path CSV has no rows");
    return path;
}

inline SamplePath read_path_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("input", "cannot open " + file);
    return read_path(in);
}

inline void write_gamma(std::ostream& os, const PopulationModel& model) {
    os << "h,gamma\n";
    for (std::size_t h = 0; h < model.gamma().size(); ++h) os << h << ',' << num(model.gamma()[h]) << '\n';
}

inline void write_ar(std::ostream& os, const PopulationModel& model) {
    os << "j,a_j\n";
    for (std::size_t j = 0; j < model.ar_coeffs().size(); ++j) os << (j + 1) << ',' << num(model.ar_coeffs()[j]) << '\n';
}

/// `k,sigma_hat_sq,phi_1,...,phi_K`; rows shorter than K are padded with empty fields.
inline void write_fit(std::ostream& os, const FitResult& fit) {
    const std::size_t K = fit.k_max();
    os << "k,sigma_hat_sq";
    for (std::size_t i = 1; i <= K; ++i) os << ",phi_" << i;
    os << '\n';
    for (std::size_t k = 1; k <= K; ++k) {
        os << k << ',' << num(fit.sigma_sq(k));
        const auto& phi = fit.phi(k);
        for (std::size_t i = 0; i < K; ++i) {
            os << ',';
            if (i < phi.size()) os << num(phi[i]);
        }
        os << '\n';
    }
}

/// One score column per criterion over k = 1..K.
inline void write_scores(std::ostream& os, const std::vector<SelectionResult>& selections) {
    os << "k";
    for (const auto& s : selections) os << ",score_" << to_string(s.criterion);
    os << '\n';
    const std::size_t K = selections.empty() ? 0 : selections.front().scores.size();
    for (std::size_t k = 1; k <= K; ++k) {
        os << k;
        for (const auto& s : selections) os << ',' << num(s.scores[k - 1]);
        os << '\n';
    }
}

inline void write_selection_summary(std::ostream& os, const std::vector<SelectionResult>& selections) {
    os << "criterion,k_hat,ties\n";
    for (const auto& s : selections) {
        os << to_string(s.criterion) << ',' << s.k_hat << ',';
        for (std::size_t i = 0; i < s.ties.size(); ++i) os << (i ? ";" : "") << s.ties[i];
        os << '\n';
    }
}

inline void write_efficiency(std::ostream& os, const std::vector<EfficiencyRecord>& records) {
    os << "run_id,n,criterion,k_hat,k_star,Q,L_star,ratio\n";
    for (const auto& r : records)
        os << r.run_id << ',' << r.n << ',' << to_string(r.criterion) << ',' << r.k_hat << ',' << r.k_star << ','
           << num(r.Q) << ',' << num(r.L_star) << ',' << num(r.ratio) << '\n';
}

inline void write_delta(std::ostream& os, const DependenceProfile& p) {
    os << "l,delta_hat,stderr\n";
    for (std::size_t i = 0; i < p.lags.size(); ++i)
        os << p.lags[i] << ',' << num(p.delta_hat[i]) << ',' << num(p.std_error[i]) << '\n';
}

/// Minimal reader for the numeric CSV files written here: header + rows of fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ValidationError("csv", "missing column '" + name + "'");
    }
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline Table read_table(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("csv", "cannot open " + file);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("csv", file + " is empty");
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

}  // namespace arsel::io
