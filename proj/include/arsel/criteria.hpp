#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arsel/errors.hpp"
#include "arsel/estimator.hpp"

namespace arsel {

enum class Criterion { Shibata, ShibataStar, AicExp, AicLog, Fpe };

inline constexpr std::array<Criterion, 5> kAllCriteria{Criterion::Shibata, Criterion::ShibataStar, Criterion::AicExp,
                                                      Criterion::AicLog, Criterion::Fpe};

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::Shibata: return "shibata";
        case Criterion::ShibataStar: return "shibata_star";
        case Criterion::AicExp: return "aic_exp";
        case Criterion::AicLog: return "aic_log";
        case Criterion::Fpe: return "fpe";
    }
    return "?";
}

inline Criterion parse_criterion(std::string_view s) {
    for (auto c : kAllCriteria)
        if (to_string(c) == s) return c;
    if (s == "aic") return Criterion::AicLog;
    throw ValidationError("criteria", "unknown criterion '" + std::string(s) + "'");
}

/// Score of order k from its residual variance, sample size n and window length N.
inline double score(Criterion c, double sigma_sq, std::size_t k, std::size_t n, std::size_t N) {
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    switch (c) {
        case Criterion::Shibata: return (static_cast<double>(N) + 2.0 * kk) * sigma_sq;
        case Criterion::ShibataStar: return (nn + 2.0 * kk) * sigma_sq;
        case Criterion::AicExp: return nn * std::exp(2.0 * kk / nn) * sigma_sq;
        case Criterion::AicLog:
            if (!(sigma_sq > 0.0))
                throw ValidationError("sigma_hat_sq", "log-AIC undefined for a zero residual variance at k = " +
                                                          std::to_string(k));
            return nn * std::log(sigma_sq) + 2.0 * kk;
        case Criterion::Fpe:
            if (k >= n) throw ValidationError("k", "FPE needs k < n");
            return nn * (nn + kk) / (nn - kk) * sigma_sq;
    }
    return 0.0;
}

inline double score(Criterion c, const FitResult& fit, std::size_t k) {
    return score(c, fit.sigma_sq(k), k, fit.window.n, fit.window.N);
}

struct SelectionResult {
    Criterion criterion = Criterion::AicLog;
    std::vector<double> scores;  ///< scores[k-1]
    std::size_t k_hat = 0;
    std::vector<std::size_t> ties;  ///< every k within 1e-12 relative of the minimum
};

/// Smallest argmin over k = 1..scores.size().
inline SelectionResult select_from_scores(Criterion c, std::vector<double> scores) {
    if (scores.empty()) throw ValidationError("k_max", "empty score range");
    SelectionResult sel;
    sel.criterion = c;
    sel.scores = std::move(scores);
    std::size_t best = 0;
    for (std::size_t i = 1; i < sel.scores.size(); ++i)
        if (sel.scores[i] < sel.scores[best]) best = i;
    const double tol = 1e-12 * std::abs(sel.scores[best]);
    for (std::size_t i = 0; i < sel.scores.size(); ++i)
        if (std::abs(sel.scores[i] - sel.scores[best]) <= tol) sel.ties.push_back(i + 1);
    sel.k_hat = sel.ties.front();
    return sel;
}

inline SelectionResult select(Criterion c, const FitResult& fit, std::size_t k_max) {
    if (k_max == 0) throw ValidationError("k_max", "empty score range");
    if (k_max > fit.k_max()) throw ValidationError("k_max", "exceeds fitted orders (" + std::to_string(fit.k_max()) + ")");
    std::vector<double> s(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) s[k - 1] = score(c, fit, k);
    return select_from_scores(c, std::move(s));
}

/// rho_n(k) writing the criterion as (N + rho_n(k) + 2k) sigma_hat_k^2.
/// AicLog is a monotone transform of AicExp and shares its perturbation.
inline double perturbation(Criterion c, std::size_t n, std::size_t N, std::size_t k) {
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    const double base = static_cast<double>(N) + 2.0 * kk;
    switch (c) {
        case Criterion::Shibata: return 0.0;
        case Criterion::ShibataStar: return nn - static_cast<double>(N);
        case Criterion::AicExp:
        case Criterion::AicLog: return nn * std::exp(2.0 * kk / nn) - base;
        case Criterion::Fpe: return nn * (nn + kk) / (nn - kk) - base;
    }
    return 0.0;
}

struct PerturbationDiagnostics {
    double max_rel = 0.0;       ///< max_k |rho(k)| / N
    double max_diff_rel = 0.0;  ///< max_k |rho(k) - rho(k*)| / (N L_n(k))
};

/// rho and L_n are indexed by k - 1.
inline PerturbationDiagnostics perturbation_diagnostics(std::span<const double> rho, std::size_t N,
                                                        std::span<const double> L, std::size_t k_star) {
    if (rho.size() != L.size()) throw ValidationError("rho", "length differs from L_n");
    if (k_star < 1 || k_star > rho.size()) throw ValidationError("k_star", "outside 1..K");
    const double nn = static_cast<double>(N);
    PerturbationDiagnostics d;
    const double ref = rho[k_star - 1];
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(L[i] > 0.0)) throw ValidationError("L_n", "must be positive");
        d.max_rel = std::max(d.max_rel, std::abs(rho[i]) / nn);
        d.max_diff_rel = std::max(d.max_diff_rel, std::abs(rho[i] - ref) / (nn * L[i]));
    }
    return d;
}

}  // namespace arsel
