#pragma once

/** @file
 * Exact second-order quantities of a linear process X_t = sum_j b_j e_{t-j}
 * with uncorrelated innovations: autocovariances, AR(infinity) coefficients,
 * per-order Yule-Walker solutions and the triangular factorization of R(k)^{-1}.
 *
 * Sign convention throughout: X_t + sum_j a_j X_{t-j} = e_t, a(k) = -R(k)^{-1} r(k).
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "arsel/errors.hpp"
#include "arsel/levinson.hpp"
#include "arsel/procgen.hpp"

namespace arsel {

/// gamma(h) = sigma_e^2 sum_j b_j b_{j+h}, h = 0..h_max.
inline std::vector<double> acv_from_ma(std::span<const double> b, double sigma_e_sq, std::size_t h_max) {
    std::vector<double> gamma(h_max + 1, 0.0);
    for (std::size_t h = 0; h <= h_max && h < b.size(); ++h) {
        double acc = 0.0;
        for (std::size_t j = 0; j + h < b.size(); ++j) acc += b[j] * b[j + h];
        gamma[h] = sigma_e_sq * acc;
    }
    return gamma;
}

/// Coefficients c_1..c_{j_out} of 1 / (1 + sum_{i>=1} s_i z^i) as a power series.
inline std::vector<double> invert_series(std::span<const double> s, std::size_t j_out) {
    if (s.empty() || s.front() != 1.0) throw ValidationError("series", "leading coefficient must be 1");
    std::vector<double> c(j_out + 1, 0.0);
    c[0] = 1.0;
    for (std::size_t j = 1; j <= j_out; ++j) {
        double acc = 0.0;
        const std::size_t imax = std::min(j, s.size() - 1);
        for (std::size_t i = 1; i <= imax; ++i) acc += s[i] * c[j - i];
        c[j] = -acc;
    }
    c.erase(c.begin());
    return c;
}

/// a_1..a_{j_out} with A(z) B(z) = 1, A(z) = 1 + sum a_j z^j.
inline std::vector<double> ar_from_ma(std::span<const double> b, std::size_t j_out) {
    return invert_series(b, j_out);
}

/// b_1..b_{j_out} from a_1..a_J (a_0 = 1 implied).
inline std::vector<double> ma_from_ar(std::span<const double> a, std::size_t j_out) {
    std::vector<double> full(a.size() + 1, 1.0);
    std::copy(a.begin(), a.end(), full.begin() + 1);
    return invert_series(full, j_out);
}

struct OrderSolution {
    std::size_t k = 0;
    std::vector<double> a;  ///< a_1(k)..a_k(k)
    double sigma_k_sq = 0.0;
};

struct PopulationOptions {
    std::size_t j_max = 400;     ///< truncation of the AR(infinity) vector a
    std::size_t h_max = 0;       ///< autocovariance range; 0 selects 2 * j_max
    std::size_t max_order = 0;   ///< orders solved and checked at construction; 0 selects min(h_max - 1, 512)
};

class PopulationModel {
public:
    /// Build from gamma(0..H), a_1..a_J and sigma^2. `tail_l1` is an estimate of
    /// sum_{j>J} |a_j| used for truncation bounds.
    PopulationModel(std::vector<double> gamma, std::vector<double> ar_coeffs, double sigma_sq,
                    std::size_t max_order, double tail_l1 = 0.0)
        : gamma_(std::move(gamma)), ar_(std::move(ar_coeffs)), sigma_sq_(sigma_sq), tail_l1_(tail_l1) {
        if (gamma_.empty() || !(gamma_[0] > 0.0)) throw ValidationError("gamma", "gamma(0) must be positive");
        if (!(sigma_sq_ > 0.0)) throw ValidationError("sigma_sq", "must be positive");
        for (double g : gamma_)
            if (std::abs(g) > gamma_[0] * (1.0 + 1e-12)) throw ValidationError("gamma", "|gamma(h)| exceeds gamma(0)");
        max_order = std::min(max_order, gamma_.size() - 1);
        // positive definiteness of R(k), k <= max_order, via |kappa_k| < 1
        table_ = levinson_durbin(gamma_, max_order);
    }

    static PopulationModel from_ma(std::span<const double> b, double innovation_variance,
                                   PopulationOptions opts = {}) {
        if (b.empty() || b.front() != 1.0) throw ValidationError("ma_coeffs", "b_0 must equal 1");
        const std::size_t h_max = opts.h_max ? opts.h_max : 2 * opts.j_max;
        const std::size_t max_order = opts.max_order ? opts.max_order : std::min<std::size_t>(h_max - 1, 512);
        auto a_long = ar_from_ma(b, 2 * opts.j_max);
        double tail = 0.0;
        for (std::size_t j = opts.j_max; j < a_long.size(); ++j) tail += std::abs(a_long[j]);
        a_long.resize(opts.j_max);
        return PopulationModel(acv_from_ma(b, innovation_variance, h_max), std::move(a_long),
                               innovation_variance, max_order, tail);
    }

    static PopulationModel from_spec(const ProcessSpec& spec, PopulationOptions opts = {}) {
        if (spec.functional != Functional::Identity)
            throw ValidationError("functional", "population model needs a linear (identity) process");
        return from_ma(spec.ma_coeffs, innovation_variance(spec.innovation), opts);
    }

    const std::vector<double>& gamma() const noexcept { return gamma_; }
    const std::vector<double>& ar_coeffs() const noexcept { return ar_; }
    double sigma_sq() const noexcept { return sigma_sq_; }
    std::size_t h_max() const noexcept { return gamma_.size() - 1; }
    std::size_t j_max() const noexcept { return ar_.size(); }
    std::size_t max_order() const noexcept { return table_.max_order(); }
    /// Approximate sum_{j > j_max} |a_j|.
    double ar_tail_l1() const noexcept { return tail_l1_; }

    /// sigma_k^2; sigma_0^2 = gamma(0).
    double sigma_k_sq(std::size_t k) const {
        if (k <= max_order()) return table_.variance[k];
        return solve(k).sigma_k_sq;
    }

    OrderSolution solve(std::size_t k) const {
        if (k == 0 || k > h_max()) throw ValidationError("k", "order must lie in 1.." + std::to_string(h_max()));
        OrderSolution sol;
        sol.k = k;
        if (k <= max_order()) {
            sol.a.resize(k);
            for (std::size_t i = 0; i < k; ++i) sol.a[i] = -table_.phi[k - 1][i];
            sol.sigma_k_sq = table_.variance[k];
            return sol;
        }
        auto lr = levinson_durbin(gamma_, k);
        sol.a.resize(k);
        for (std::size_t i = 0; i < k; ++i) sol.a[i] = -lr.phi[k - 1][i];
        sol.sigma_k_sq = lr.variance[k];
        return sol;
    }

    /// Bound on |x^T R y - x_trunc^T R y_trunc|-type errors from cutting a at j_max,
    /// for a difference vector of l1-norm `d_l1`: gamma(0) t (2 d + t), t = tail.
    double truncation_bound(double d_l1) const noexcept {
        return gamma_[0] * tail_l1_ * (2.0 * d_l1 + tail_l1_);
    }

private:
    std::vector<double> gamma_;
    std::vector<double> ar_;
    double sigma_sq_;
    double tail_l1_;
    LevinsonResult table_;
};

/// a(k) = -R(k)^{-1} r(k) and sigma_k^2 by Levinson-Durbin on the exact gamma.
inline OrderSolution yule_walker_pop(const PopulationModel& model, std::size_t k) {
    if (k == 0 || k + 1 > model.h_max())
        throw ValidationError("k", "needs 1 <= k <= H_max - 1 = " + std::to_string(model.h_max() - 1));
    return model.solve(k);
}

/// ||x||_R^2 = sum_{i,j} x_i x_j gamma(i - j).
inline double r_norm_sq(std::span<const double> x, const PopulationModel& model) {
    if (!x.empty() && x.size() - 1 > model.h_max())
        throw LengthError("r_norm_sq: gamma range (H_max + 1)", x.size(), model.h_max() + 1);
    return toeplitz_quadratic_form(x, model.gamma());
}

/// R(k)^{-1} = L^T D L with L unit upper triangular, row i holding the
/// coefficients a(k-1-i), and D = diag(sigma_{k-1}^{-2}, ..., sigma_0^{-2}).
struct LdlFactors {
    Eigen::MatrixXd L;
    Eigen::VectorXd D;

    Eigen::MatrixXd inverse() const { return L.transpose() * D.asDiagonal() * L; }
};

inline LdlFactors ldl_factorization(const PopulationModel& model, std::size_t k) {
    if (k == 0 || k + 1 > model.h_max())
        throw ValidationError("k", "needs 1 <= k <= H_max - 1 = " + std::to_string(model.h_max() - 1));
    LdlFactors f{Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)),
                 Eigen::VectorXd(static_cast<Eigen::Index>(k))};
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t order = k - 1 - i;
        f.D(static_cast<Eigen::Index>(i)) = 1.0 / model.sigma_k_sq(order);
        if (order == 0) continue;
        const auto sol = model.solve(order);
        for (std::size_t j = 1; j <= order; ++j)
            f.L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + j)) = sol.a[j - 1];
    }
    return f;
}

/// Dense R(k) from gamma.
inline Eigen::MatrixXd toeplitz_matrix(std::span<const double> acv, std::size_t k) {
    if (acv.size() < k) throw LengthError("toeplitz_matrix", k, acv.size());
    Eigen::MatrixXd R(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acv[i > j ? i - j : j - i];
    return R;
}

}  // namespace arsel
