#pragma once

/** @file
 * Yule-Walker estimation from a sample path.
 *
 * PaperWindow: every order k <= K_n regresses x_t on (x_{t-1}, ..., x_{t-k})
 * over the same targets t = K_n + 1..n (N = n - K_n summands). R_hat(k) is the
 * leading k x k block of R_hat(K_n) and is not Toeplitz.
 *
 * ToeplitzFull: classical Yule-Walker on the biased autocovariances
 * (divisor n), one Levinson-Durbin sweep for all orders.
 *
 * Stored coefficients are regression coefficients phi_hat(k); the
 * autoregressive form is a_hat(k) = -phi_hat(k).
 */

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "arsel/errors.hpp"
#include "arsel/levinson.hpp"
#include "arsel/popmodel.hpp"

namespace arsel {

enum class FitMode { PaperWindow, ToeplitzFull };

struct FitWindow {
    std::size_t n = 0;
    std::size_t K_n = 0;  ///< 0 in ToeplitzFull mode, so N = n there
    std::size_t N = 0;
    FitMode mode = FitMode::PaperWindow;

    static FitWindow paper(std::size_t n, std::size_t K_n) {
        if (K_n < 1 || K_n >= n) throw ValidationError("K_n", "needs 1 <= K_n < n");
        if (n - K_n < 2) throw ValidationError("K_n", "needs N = n - K_n >= 2");
        return {n, K_n, n - K_n, FitMode::PaperWindow};
    }

    static FitWindow toeplitz(std::size_t n) {
        if (n < 2) throw ValidationError("n", "needs n >= 2");
        return {n, 0, n, FitMode::ToeplitzFull};
    }
};

/// floor(n^0.45): K_n^{2.2} / n stays bounded.
inline std::size_t default_window(std::size_t n) {
    auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.45) + 1e-12));
    return std::max<std::size_t>(1, k);
}

/// (1/n) sum_{t=h+1}^{n} x_t x_{t-h}.
inline double autocov_hat(std::span<const double> x, std::size_t h) {
    if (h >= x.size()) throw ValidationError("h", "lag must be < n = " + std::to_string(x.size()));
    double acc = 0.0;
    for (std::size_t t = h; t < x.size(); ++t) acc += x[t] * x[t - h];
    return acc / static_cast<double>(x.size());
}

inline std::vector<double> autocov_hat_all(std::span<const double> x, std::size_t max_lag) {
    if (max_lag >= x.size()) throw ValidationError("max_lag", "must be < n = " + std::to_string(x.size()));
    std::vector<double> g(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h) g[h] = autocov_hat(x, h);
    return g;
}

/// R_hat(k_max) and r_hat(k_max) over the PaperWindow targets t = K_n+1..n.
/// Row/column i corresponds to lag i + 1.
struct WindowMoments {
    Eigen::MatrixXd R;
    Eigen::VectorXd r;
    std::size_t K_n = 0;
    std::size_t N = 0;
};

inline WindowMoments window_moments(std::span<const double> x, std::size_t K_n, std::size_t k_max) {
    const std::size_t n = x.size();
    const auto w = FitWindow::paper(n, K_n);
    if (k_max > K_n) throw ValidationError("k", "order must be <= K_n = " + std::to_string(K_n));
    const auto k = static_cast<Eigen::Index>(k_max);
    WindowMoments m{Eigen::MatrixXd::Zero(k, k), Eigen::VectorXd::Zero(k), K_n, w.N};
    // 0-based target index s = K_n..n-1; lag-i regressor is x[s - i].
    for (std::size_t s = K_n; s < n; ++s) {
        const double target = x[s];
        for (Eigen::Index i = 0; i < k; ++i) {
            const double xi = x[s - 1 - static_cast<std::size_t>(i)];
            m.r(i) += xi * target;
            for (Eigen::Index j = 0; j <= i; ++j) m.R(i, j) += xi * x[s - 1 - static_cast<std::size_t>(j)];
        }
    }
    m.R = m.R.selfadjointView<Eigen::Lower>();
    const double inv_n = 1.0 / static_cast<double>(w.N);
    m.R *= inv_n;
    m.r *= inv_n;
    return m;
}

namespace detail {

/// Solve R phi = r by symmetric factorization; pivots below 1e-12 * trace / k are an error.
inline Eigen::VectorXd solve_window_system(const Eigen::MatrixXd& R, const Eigen::VectorXd& r) {
    const auto k = R.rows();
    const double floor = 1e-12 * R.trace() / static_cast<double>(k);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(R);
    const double pivot = ldlt.vectorD().minCoeff();
    if (ldlt.info() != Eigen::Success || !(pivot > floor) || !(floor > 0.0))
        throw SingularMatrixError("fit_paper_window: R_hat(" + std::to_string(k) + ") is singular or indefinite",
                                  pivot);
    return ldlt.solve(r);
}

}  // namespace detail

struct OrderFit {
    Eigen::VectorXd phi;
    Eigen::MatrixXd R_hat;
};

inline OrderFit fit_paper_window(std::span<const double> x, std::size_t K_n, std::size_t k) {
    if (k < 1) throw ValidationError("k", "order must be >= 1");
    auto m = window_moments(x, K_n, k);
    auto phi = detail::solve_window_system(m.R, m.r);
    return {std::move(phi), std::move(m.R)};
}

/// (1/N) sum_{t=K_n+1}^{n} (x_t - sum_i phi_i x_{t-i})^2.
inline double sigma_hat_sq(std::span<const double> x, std::span<const double> phi, const FitWindow& window) {
    if (x.size() != window.n) throw ValidationError("x", "path length differs from window n");
    if (phi.size() > window.K_n)
        throw ValidationError("k", "order must be <= K_n = " + std::to_string(window.K_n));
    double acc = 0.0;
    for (std::size_t s = window.K_n; s < window.n; ++s) {
        double resid = x[s];
        for (std::size_t i = 0; i < phi.size(); ++i) resid -= phi[i] * x[s - 1 - i];
        acc += resid * resid;
    }
    return acc / static_cast<double>(window.N);
}

/// Windowed second moment of the population pseudo-innovations x_t + sum a_i(k) x_{t-i}.
inline double s_k_sq(std::span<const double> x, const OrderSolution& pop, const FitWindow& window) {
    std::vector<double> phi(pop.a.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = -pop.a[i];
    return sigma_hat_sq(x, phi, window);
}

struct FitResult {
    FitWindow window;
    std::vector<std::vector<double>> phi_hat;  ///< phi_hat[k-1], k = 1..K_max
    std::vector<double> sigma_hat_sq;          ///< sigma_hat_sq[k-1]
    std::vector<double> gamma_hat;             ///< ToeplitzFull only

    std::size_t k_max() const noexcept { return sigma_hat_sq.size(); }
    double sigma_sq(std::size_t k) const { return sigma_hat_sq.at(k - 1); }
    const std::vector<double>& phi(std::size_t k) const { return phi_hat.at(k - 1); }
};

inline FitResult fit_all_orders(std::span<const double> x, const FitWindow& window, std::size_t k_max) {
    if (x.size() != window.n) throw ValidationError("x", "path length differs from window n");
    if (k_max < 1) throw ValidationError("k_max", "must be >= 1");
    FitResult fit;
    fit.window = window;
    if (window.mode == FitMode::ToeplitzFull) {
        if (k_max > window.n - 1) throw ValidationError("k_max", "must be <= n - 1");
        fit.gamma_hat = autocov_hat_all(x, k_max);
        auto lr = levinson_durbin(fit.gamma_hat, k_max);
        fit.phi_hat = std::move(lr.phi);
        fit.sigma_hat_sq.assign(lr.variance.begin() + 1, lr.variance.end());
        return fit;
    }
    if (k_max > window.K_n) throw ValidationError("k_max", "must be <= K_n = " + std::to_string(window.K_n));
    const auto m = window_moments(x, window.K_n, k_max);
    fit.phi_hat.reserve(k_max);
    fit.sigma_hat_sq.reserve(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        Eigen::VectorXd phi = detail::solve_window_system(m.R.topLeftCorner(kk, kk), m.r.head(kk));
        fit.phi_hat.emplace_back(phi.data(), phi.data() + kk);
        fit.sigma_hat_sq.push_back(sigma_hat_sq(x, fit.phi_hat.back(), window));
    }
    return fit;
}

/// Residual variances of the ToeplitzFull fit, orders 1..k_max, without storing coefficients.
inline std::vector<double> toeplitz_residual_variances(std::span<const double> x, std::size_t k_max) {
    if (k_max < 1 || k_max > x.size() - 1) throw ValidationError("k_max", "needs 1 <= k_max <= n - 1");
    auto v = levinson_variances(autocov_hat_all(x, k_max), k_max);
    v.erase(v.begin());
    return v;
}

}  // namespace arsel
