#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "arsel/errors.hpp"

namespace arsel {

/// All-orders solution of the Toeplitz Yule-Walker equations.
///
/// Coefficients are stored in regression orientation: the order-k predictor
/// of x_t is sum_i phi[k-1][i-1] x_{t-i}. The autoregressive coefficients in
/// the convention X_t + sum a_i X_{t-i} = e_t are a = -phi.
struct LevinsonResult {
    std::vector<std::vector<double>> phi;  ///< phi[k-1] has k entries
    std::vector<double> variance;          ///< prediction error variance, orders 0..K
    std::vector<double> reflection;        ///< partial autocorrelations, orders 1..K

    std::size_t max_order() const noexcept { return reflection.size(); }
};

namespace detail {

template <class Visit>
void levinson_sweep(std::span<const double> acv, std::size_t max_order, Visit&& visit) {
    if (acv.size() < max_order + 1) throw LengthError("levinson_durbin: autocovariances", max_order + 1, acv.size());
    if (!(acv[0] > 0.0)) throw SingularMatrixError("levinson_durbin: gamma(0) must be positive", acv[0]);

    std::vector<double> cur;
    std::vector<double> prev;
    cur.reserve(max_order);
    prev.reserve(max_order);
    double v = acv[0];
    for (std::size_t k = 1; k <= max_order; ++k) {
        double num = acv[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j - 1] * acv[k - j];
        const double kappa = num / v;
        if (!(std::abs(kappa) < 1.0))
            throw SingularMatrixError("levinson_durbin: Toeplitz matrix not positive definite at order " +
                                          std::to_string(k),
                                      v * (1.0 - kappa * kappa));
        cur.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) cur[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
        cur[k - 1] = kappa;
        v *= (1.0 - kappa * kappa);
        visit(k, std::span<const double>(cur), v, kappa);
        std::swap(cur, prev);
    }
}

}  // namespace detail

/// Levinson-Durbin recursion on gamma(0..K). Throws SingularMatrixError when a
/// reflection coefficient reaches modulus 1 (R(k) not positive definite).
inline LevinsonResult levinson_durbin(std::span<const double> acv, std::size_t max_order) {
    LevinsonResult out;
    out.variance.reserve(max_order + 1);
    out.variance.push_back(acv.empty() ? 0.0 : acv[0]);
    out.phi.reserve(max_order);
    out.reflection.reserve(max_order);
    detail::levinson_sweep(acv, max_order, [&](std::size_t, std::span<const double> phi, double v, double kappa) {
        out.phi.emplace_back(phi.begin(), phi.end());
        out.variance.push_back(v);
        out.reflection.push_back(kappa);
    });
    return out;
}

/// Prediction error variances v_0..v_K only, O(K) memory.
inline std::vector<double> levinson_variances(std::span<const double> acv, std::size_t max_order) {
    std::vector<double> v;
    v.reserve(max_order + 1);
    v.push_back(acv.empty() ? 0.0 : acv[0]);
    detail::levinson_sweep(acv, max_order,
                           [&](std::size_t, std::span<const double>, double var, double) { v.push_back(var); });
    return v;
}

/// sum_{i,j} x_i x_j gamma(|i-j|).
inline double toeplitz_quadratic_form(std::span<const double> x, std::span<const double> acv) {
    if (x.empty()) return 0.0;
    if (acv.size() < x.size()) throw LengthError("toeplitz_quadratic_form: autocovariances", x.size(), acv.size());
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        diag += x[i] * x[i];
        double row = 0.0;
        for (std::size_t j = i + 1; j < x.size(); ++j) row += x[j] * acv[j - i];
        off += x[i] * row;
    }
    return acv[0] * diag + 2.0 * off;
}

}  // namespace arsel
