#pragma once

/** @file
 * Population-side evaluation of a fitted order: the independent-realization
 * risk Q_n(k) = ||a_hat(k) - a||_R^2, the benchmark
 * L_n(k) = k sigma^2 / N + ||a - a(k)||_R^2, its minimizer k*, efficiency
 * ratios and the sandwich covariance of the Yule-Walker estimator.
 */

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "arsel/criteria.hpp"
#include "arsel/errors.hpp"
#include "arsel/estimator.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"

namespace arsel {

struct RiskValue {
    double value = 0.0;
    double truncation_bound = 0.0;  ///< effect of cutting a at j_max
};

/// ||a_hat - a||_R^2 with a_hat = (a_hat_1..a_hat_k) in autoregressive sign,
/// a truncated at model.j_max().
inline RiskValue q_n(std::span<const double> a_hat, const PopulationModel& model) {
    const auto& a = model.ar_coeffs();
    const std::size_t len = std::max(a_hat.size(), a.size());
    if (len > model.h_max() + 1)
        throw LengthError("q_n: gamma range (H_max + 1)", len, model.h_max() + 1);
    std::vector<double> d(len, 0.0);
    for (std::size_t i = 0; i < a_hat.size(); ++i) d[i] = a_hat[i];
    for (std::size_t i = 0; i < a.size(); ++i) d[i] -= a[i];
    double l1 = 0.0;
    for (double v : d) l1 += std::abs(v);
    return {r_norm_sq(d, model), model.truncation_bound(l1)};
}

/// ||a - a(k)||_R^2 = sigma_k^2 - sigma^2.
inline double bias_sq(const PopulationModel& model, std::size_t k) {
    return std::max(0.0, model.sigma_k_sq(k) - model.sigma_sq());
}

inline double l_n(const PopulationModel& model, std::size_t k, std::size_t N) {
    if (k < 1 || N < 1) throw ValidationError("k", "needs k >= 1 and N >= 1");
    return static_cast<double>(k) * model.sigma_sq() / static_cast<double>(N) + bias_sq(model, k);
}

struct KStar {
    std::size_t k = 1;
    double L = 0.0;
    bool on_boundary = false;  ///< argmin sits at k_max; the candidate range may be too small
};

inline KStar k_star(const PopulationModel& model, std::size_t N, std::size_t k_max) {
    if (k_max < 1) throw ValidationError("k_max", "must be >= 1");
    KStar best{1, l_n(model, 1, N), false};
    for (std::size_t k = 2; k <= k_max; ++k) {
        const double L = l_n(model, k, N);
        if (L < best.L) best = {k, L, false};
    }
    best.on_boundary = best.k == k_max && k_max > 1;
    return best;
}

struct EfficiencyRecord {
    std::uint64_t run_id = 0;
    std::size_t n = 0;
    std::size_t k_max = 0;
    Criterion criterion = Criterion::AicLog;
    std::size_t k_hat = 0;
    double Q = 0.0;
    double L_star = 0.0;
    std::size_t k_star = 0;
    double ratio = 0.0;
    bool k_star_on_boundary = false;
};

/// Efficiency record for one already fitted path; search range and k* range are both 1..k_max.
inline EfficiencyRecord efficiency_ratio(const FitResult& fit, Criterion criterion, std::size_t k_max,
                                         const PopulationModel& model, std::uint64_t run_id = 0) {
    const auto sel = select(criterion, fit, k_max);
    std::vector<double> a_hat(fit.phi(sel.k_hat));
    for (auto& v : a_hat) v = -v;
    const auto ks = k_star(model, fit.window.N, k_max);
    EfficiencyRecord rec;
    rec.run_id = run_id;
    rec.n = fit.window.n;
    rec.k_max = k_max;
    rec.criterion = criterion;
    rec.k_hat = sel.k_hat;
    rec.Q = q_n(a_hat, model).value;
    rec.L_star = ks.L;
    rec.k_star = ks.k;
    rec.ratio = rec.Q / rec.L_star;
    rec.k_star_on_boundary = ks.on_boundary;
    return rec;
}

/// fit -> select -> Q_n / L_n(k*). PaperWindow searches 1..K_n; ToeplitzFull searches 1..n/2.
inline EfficiencyRecord efficiency_ratio(const SamplePath& path, Criterion criterion, const FitWindow& window,
                                         const PopulationModel& model) {
    const std::size_t k_max = window.mode == FitMode::PaperWindow ? window.K_n : std::max<std::size_t>(1, window.n / 2);
    const auto fit = fit_all_orders(path.values, window, k_max);
    return efficiency_ratio(fit, criterion, k_max, model, path.run_id);
}

/// Bartlett lag-window bandwidth floor(n^{1/3}).
inline std::size_t clt_bandwidth(std::size_t n) {
    return static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-12));
}

/// Plug-in estimate of Sigma(k) = sum_h R(k)^{-1} E(e_0 e_h X_0(k) X_h(k)^T) R(k)^{-1}.
/// Innovations are rebuilt from the true AR(infinity) coefficients, the long-run
/// covariance of U_t = (x_{t-1}, ..., x_{t-k}) e_t is estimated with Bartlett
/// weights per path and averaged over paths.
inline Eigen::MatrixXd clt_sigma(const PopulationModel& model, std::size_t k, std::span<const SamplePath> paths) {
    if (paths.empty()) throw ValidationError("paths", "need at least one path");
    if (k < 1 || k > model.h_max()) throw ValidationError("k", "order out of range");
    const auto& a = model.ar_coeffs();
    // lag beyond which the remaining AR tail is negligible
    std::size_t lags = a.size();
    double tail = model.ar_tail_l1();
    while (lags > 0 && tail + std::abs(a[lags - 1]) < 1e-12) tail += std::abs(a[--lags]);

    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(kk, kk);
    for (const auto& path : paths) {
        const auto& x = path.values;
        const std::size_t n = x.size();
        const std::size_t bw = clt_bandwidth(n);
        if (bw >= n) throw ValidationError("bandwidth", "must be < n");
        const std::size_t start = std::max(lags, k);
        if (start + bw + 2 > n) throw LengthError("clt_sigma: path", start + bw + 2, n);
        const std::size_t T = n - start;
        Eigen::MatrixXd U(kk, static_cast<Eigen::Index>(T));
        for (std::size_t t = start; t < n; ++t) {
            double e = x[t];
            for (std::size_t j = 1; j <= lags; ++j) e += a[j - 1] * x[t - j];
            for (std::size_t i = 0; i < k; ++i)
                U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t - start)) = x[t - 1 - i] * e;
        }
        const double invT = 1.0 / static_cast<double>(T);
        Eigen::MatrixXd lr = U * U.transpose() * invT;
        for (std::size_t h = 1; h <= bw; ++h) {
            const auto len = static_cast<Eigen::Index>(T - h);
            Eigen::MatrixXd G = U.rightCols(len) * U.leftCols(len).transpose() * invT;
            const double w = 1.0 - static_cast<double>(h) / static_cast<double>(bw + 1);
            lr += w * (G + G.transpose());
        }
        omega += lr;
    }
    omega /= static_cast<double>(paths.size());
    const Eigen::MatrixXd Rinv = toeplitz_matrix(model.gamma(), k).inverse();
    Eigen::MatrixXd sigma = Rinv * omega * Rinv;
    return 0.5 * (sigma + sigma.transpose());
}

/// Rows z_r = sqrt(n) (phi_hat_r(k) - phi(k)) over paths, PaperWindow fits with window K_n(n).
inline Eigen::MatrixXd clt_scaled_errors(const PopulationModel& model, std::size_t k, std::span<const SamplePath> paths,
                                         std::size_t K_n = 0) {
    const auto pop = model.solve(k);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(paths.size()), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < paths.size(); ++r) {
        const auto& x = paths[r].values;
        const std::size_t window = K_n ? K_n : std::max(k, default_window(x.size()));
        const auto fit = fit_paper_window(x, window, k);
        const double root_n = std::sqrt(static_cast<double>(x.size()));
        for (std::size_t i = 0; i < k; ++i)
            z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                root_n * (fit.phi(static_cast<Eigen::Index>(i)) + pop.a[i]);
    }
    return z;
}

/// Centered sample covariance of the rows of z.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& z) {
    if (z.rows() < 2) throw ValidationError("paths", "need at least two replications");
    const Eigen::RowVectorXd mean = z.colwise().mean();
    const Eigen::MatrixXd c = z.rowwise() - mean;
    return c.transpose() * c / static_cast<double>(z.rows() - 1);
}

}  // namespace arsel
