#pragma once

/** @file
 * Monte-Carlo physical-dependence coefficients
 *   delta_q(l) = || X_t - X_t^{(t-l)} ||_q
 * from coupled paths, their weighted partial sums and Baxter-type ratios of
 * the AR coefficient error to the AR tail.
 */

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "arsel/errors.hpp"
#include "arsel/parallel.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"
#include "arsel/rng.hpp"

namespace arsel {

struct DeltaEstimate {
    std::size_t lag = 0;
    double delta = 0.0;
    double std_error = 0.0;  ///< delta-method standard error of delta
    double norm_x = 0.0;  ///< ||X_0||_q from the uncoupled member of each pair
};

namespace detail {

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace detail

/// (mean |X_anchor - X'_anchor|^q)^{1/q} over `reps` coupled pairs. The time
/// point is irrelevant for the shift processes generated here.
inline DeltaEstimate estimate_delta(const ProcessSpec& spec, std::size_t lag, double q, std::size_t reps,
                                    std::uint64_t seed, std::size_t threads = 1) {
    if (reps < 100) throw ValidationError("reps", "need at least 100 replications");
    if (!(q >= 1.0)) throw ValidationError("q", "must be >= 1");
    const std::uint64_t lag_seed = child_seed(seed, lag);
    std::vector<double> diff_q(reps);
    std::vector<double> level_q(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const auto [x, y] = gen_coupled_pair(spec, lag, 1, lag_seed, r);
        diff_q[r] = std::pow(std::abs(x.values.back() - y.values.back()), q);
        level_q[r] = std::pow(std::abs(x.values.back()), q);
    });

    DeltaEstimate est;
    est.lag = lag;
    est.norm_x = std::pow(detail::mean_of(level_q), 1.0 / q);
    const double m = detail::mean_of(diff_q);
    if (m == 0.0) return est;
    double ss = 0.0;
    for (double d : diff_q) ss += (d - m) * (d - m);
    const double se_mean = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
    est.delta = std::pow(m, 1.0 / q);
    est.std_error = se_mean * std::pow(m, 1.0 / q - 1.0) / q;
    return est;
}

struct DependenceProfile {
    double q = 2.0;
    std::vector<std::size_t> lags;
    std::vector<double> delta_hat;
    std::vector<double> std_error;
    std::size_t replications = 0;
    double norm_x0 = 0.0;  ///< ||X_0||_q

    double delta_at(std::size_t lag) const {
        for (std::size_t i = 0; i < lags.size(); ++i)
            if (lags[i] == lag) return delta_hat[i];
        throw ValidationError("lags", "profile does not cover lag " + std::to_string(lag));
    }
};

inline DependenceProfile dependence_profile(const ProcessSpec& spec, std::span<const std::size_t> lags, double q,
                                            std::size_t reps, std::uint64_t seed, std::size_t threads = 1) {
    DependenceProfile p;
    p.q = q;
    p.replications = reps;
    p.lags.assign(lags.begin(), lags.end());
    double level = 0.0;
    for (std::size_t lag : lags) {
        const auto est = estimate_delta(spec, lag, q, reps, seed, threads);
        p.delta_hat.push_back(est.delta);
        p.std_error.push_back(est.std_error);
        level += std::pow(est.norm_x, q);
    }
    if (!lags.empty()) p.norm_x0 = std::pow(level / static_cast<double>(lags.size()), 1.0 / q);
    return p;
}

/// ||X_0||_q + sum_{l=1}^{L} l^alpha delta(l); the profile must cover 1..L.
inline double partial_D(const DependenceProfile& profile, double alpha, std::size_t L) {
    double total = profile.norm_x0;
    for (std::size_t l = 1; l <= L; ++l) total += std::pow(static_cast<double>(l), alpha) * profile.delta_at(l);
    return total;
}

/// Partial sums at L, 2L, 4L. `increment_ratio` compares the second doubling
/// increment to the first: below 1 the weighted series is flattening, above 1
/// it is still growing.
struct PartialSumCheck {
    double alpha = 0.0;
    std::vector<std::size_t> L;
    std::vector<double> D;
    double increment_ratio = 0.0;
    bool flattening = false;
};

inline PartialSumCheck partial_sum_check(const DependenceProfile& profile, double alpha, std::size_t L) {
    PartialSumCheck c;
    c.alpha = alpha;
    c.L = {L, 2 * L, 4 * L};
    for (auto l : c.L) c.D.push_back(partial_D(profile, alpha, l));
    const double first = c.D[1] - c.D[0];
    const double second = c.D[2] - c.D[1];
    c.increment_ratio = first > 0.0 ? second / first : 0.0;
    c.flattening = c.increment_ratio < 1.0;
    return c;
}

/// ||a - a(k)||_{l1} including the AR tail beyond k.
inline double ar_l1_error(const PopulationModel& model, std::size_t k) {
    const auto& a = model.ar_coeffs();
    const auto sol = model.solve(k);
    double err = model.ar_tail_l1();
    for (std::size_t m = 0; m < a.size(); ++m) err += std::abs(a[m] - (m < k ? sol.a[m] : 0.0));
    return err;
}

/// For each k: sum_{m<=k} |a_m - a_m(k)| / sum_{m>k} |a_m|.
/// `tail_exponent` p adds the power-law remainder |a_J| J / (p - 1) beyond the stored coefficients.
inline std::vector<double> baxter_check(const PopulationModel& model, std::span<const std::size_t> k_range,
                                        double tail_exponent = 0.0) {
    const auto& a = model.ar_coeffs();
    double beyond = model.ar_tail_l1();
    if (tail_exponent > 1.0 && !a.empty())
        beyond = std::max(beyond, std::abs(a.back()) * static_cast<double>(a.size()) / (tail_exponent - 1.0));
    std::vector<double> ratios;
    ratios.reserve(k_range.size());
    for (std::size_t k : k_range) {
        if (k < 1 || k >= a.size()) throw ValidationError("k", "must lie in 1..j_max - 1");
        double tail = beyond;
        for (std::size_t m = k; m < a.size(); ++m) tail += std::abs(a[m]);
        if (!(tail > 0.0))
            throw ValidationError("ar_coeffs", "zero AR tail beyond k = " + std::to_string(k) +
                                                   ": Baxter ratio undefined for a finite-order truth");
        const auto sol = model.solve(k);
        double head = 0.0;
        for (std::size_t m = 0; m < k; ++m) head += std::abs(a[m] - sol.a[m]);
        ratios.push_back(head / tail);
    }
    return ratios;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError("points", "need >= 2 paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

}  // namespace arsel
