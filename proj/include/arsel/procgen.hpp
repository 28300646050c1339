#pragma once

/** @file
 * Seeded generation of linear processes driven by i.i.d., m-dependent or
 * GARCH(1,1) innovations, plus coupled paths for physical-dependence work.
 *
 * A process is X_t = f(sum_{j=0}^{J} b_j e_{t-j}) with b_0 = 1, where e_t is
 * built from a sequence of i.i.d. standard Gaussian shocks eps_t and f is the
 * identity or the absolute value.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arsel/errors.hpp"
#include "arsel/rng.hpp"

namespace arsel {

struct IidGaussian {
    double sd = 1.0;
};

/// e_t = eps_t * (prod_{j=1}^{m-1} |eps_{t-j}|)^{1/(m-1)}; m = 1 is plain i.i.d.
struct MDependent {
    int m = 1;
};

/// e_t = eps_t * L_t,  L_t^2 = omega + beta * L_{t-1}^2 + alpha * e_{t-1}^2.
struct Garch {
    double omega = 0.1;
    double alpha = 0.25;
    double beta = 0.25;
};

using InnovationModel = std::variant<IidGaussian, MDependent, Garch>;

/// Geometric memory cutoff used for GARCH burn-in.
inline constexpr std::size_t kGarchMemory = 200;

inline void validate(const InnovationModel& model) {
    if (const auto* iid = std::get_if<IidGaussian>(&model)) {
        if (!(iid->sd > 0.0) || !std::isfinite(iid->sd))
            throw ValidationError("innovation_sd", "must be positive and finite");
    } else if (const auto* md = std::get_if<MDependent>(&model)) {
        if (md->m < 1) throw ValidationError("m", "must be >= 1");
    } else {
        const auto& g = std::get<Garch>(model);
        if (!(g.omega > 0.0)) throw ValidationError("garch_omega", "must be positive");
        if (!(g.alpha >= 0.0)) throw ValidationError("garch_alpha", "must be non-negative");
        if (!(g.beta >= 0.0)) throw ValidationError("garch_beta", "must be non-negative");
        if (!(g.alpha + g.beta < 1.0))
            throw ValidationError("garch_alpha+garch_beta",
                                  "alpha + beta must be < 1 for a stationary GARCH");
    }
}

/// Number of past shocks (beyond the current one) an innovation depends on,
/// with the GARCH value being the configured cutoff.
inline std::size_t innovation_memory(const InnovationModel& model) {
    if (const auto* md = std::get_if<MDependent>(&model)) return static_cast<std::size_t>(md->m - 1);
    if (std::holds_alternative<Garch>(model)) return kGarchMemory;
    return 0;
}

/// Shocks drawn before e_1 so that e_1 already has its full m-dependent window.
inline std::size_t shock_prefix(const InnovationModel& model) {
    if (const auto* md = std::get_if<MDependent>(&model)) return static_cast<std::size_t>(md->m - 1);
    return 0;
}

/// E|Z|^r for Z standard Gaussian.
inline double gaussian_abs_moment(double r) {
    return std::pow(2.0, r / 2.0) * std::tgamma((r + 1.0) / 2.0) / std::sqrt(M_PI);
}

/// Stationary variance of e_t.
inline double innovation_variance(const InnovationModel& model) {
    if (const auto* iid = std::get_if<IidGaussian>(&model)) return iid->sd * iid->sd;
    if (const auto* md = std::get_if<MDependent>(&model)) {
        if (md->m == 1) return 1.0;
        const double r = 2.0 / (md->m - 1);
        return std::pow(gaussian_abs_moment(r), md->m - 1);
    }
    const auto& g = std::get<Garch>(model);
    return g.omega / (1.0 - g.alpha - g.beta);
}

/// Turn a block of primitive shocks into innovations. The first
/// `shock_prefix(model)` shocks only feed the window of the first outputs.
inline std::vector<double> innovations_from_shocks(const InnovationModel& model,
                                                   std::span<const double> shocks) {
    const std::size_t prefix = shock_prefix(model);
    if (shocks.size() <= prefix) throw LengthError("innovations_from_shocks", prefix + 1, shocks.size());
    const std::size_t count = shocks.size() - prefix;
    std::vector<double> e(count);

    if (const auto* iid = std::get_if<IidGaussian>(&model)) {
        for (std::size_t t = 0; t < count; ++t) e[t] = iid->sd * shocks[t];
    } else if (const auto* md = std::get_if<MDependent>(&model)) {
        if (md->m == 1) {
            std::copy(shocks.begin(), shocks.end(), e.begin());
        } else {
            const double inv = 1.0 / static_cast<double>(md->m - 1);
            for (std::size_t t = 0; t < count; ++t) {
                const std::size_t s = t + prefix;
                double prod = 1.0;
                for (std::size_t j = 1; j <= prefix; ++j) prod *= std::abs(shocks[s - j]);
                e[t] = shocks[s] * std::pow(prod, inv);
            }
        }
    } else {
        const auto& g = std::get<Garch>(model);
        // start at the stationary variance
        double level_sq = g.omega / (1.0 - g.alpha - g.beta);
        for (std::size_t t = 0; t < count; ++t) {
            if (t > 0) level_sq = g.omega + g.beta * level_sq + g.alpha * e[t - 1] * e[t - 1];
            e[t] = shocks[t] * std::sqrt(level_sq);
        }
    }
    return e;
}

/// e_1..e_count as a pure function of (seed, run_id).
inline std::vector<double> gen_innovations(const InnovationModel& model, std::size_t count,
                                           std::uint64_t seed, std::uint64_t run_id) {
    if (count == 0) throw ValidationError("count", "must be >= 1");
    validate(model);
    const auto shocks =
        standard_normals(count + shock_prefix(model), seed, run_id, Stream::Shocks);
    return innovations_from_shocks(model, shocks);
}

enum class Functional { Identity, Abs };

struct ProcessSpec {
    InnovationModel innovation = IidGaussian{};
    std::vector<double> ma_coeffs{1.0};
    std::size_t burn_in = 0;
    std::string label;
    /// Applied pointwise after filtering. Abs is used for |e_t|-type functionals.
    Functional functional = Functional::Identity;

    std::size_t ma_order() const noexcept { return ma_coeffs.empty() ? 0 : ma_coeffs.size() - 1; }

    std::size_t min_burn_in() const { return ma_order() + innovation_memory(innovation); }

    void validate() const {
        arsel::validate(innovation);
        if (ma_coeffs.empty() || ma_coeffs.front() != 1.0)
            throw ValidationError("ma_coeffs", "b_0 must equal 1");
        for (double b : ma_coeffs)
            if (!std::isfinite(b)) throw ValidationError("ma_coeffs", "coefficients must be finite");
        if (burn_in < min_burn_in())
            throw ValidationError("burn_in", "must be >= " + std::to_string(min_burn_in()) +
                                                 " (J + innovation memory)");
    }

    /// Spec with the default burn-in: J + 200 for GARCH, J + m for m-dependent, J for i.i.d.
    static ProcessSpec make(InnovationModel innovation, std::vector<double> ma_coeffs,
                            std::string label = {}, std::optional<std::size_t> burn_in = {}) {
        ProcessSpec spec;
        spec.innovation = innovation;
        spec.ma_coeffs = std::move(ma_coeffs);
        spec.label = std::move(label);
        std::size_t dflt = spec.ma_order();
        if (const auto* md = std::get_if<MDependent>(&innovation)) dflt += md->m;
        if (std::holds_alternative<Garch>(innovation)) dflt += kGarchMemory;
        spec.burn_in = burn_in.value_or(dflt);
        spec.validate();
        return spec;
    }
};

/// b_0 = 1, b_j = j^{-p} for j = 1..J.
inline std::vector<double> power_law_ma(double p, std::size_t J) {
    std::vector<double> b(J + 1, 1.0);
    for (std::size_t j = 1; j <= J; ++j) b[j] = std::pow(static_cast<double>(j), -p);
    return b;
}

/// b_j = phi^j, the MA(infinity) form of an AR(1), truncated at J.
inline std::vector<double> geometric_ma(double phi, std::size_t J) {
    std::vector<double> b(J + 1, 1.0);
    for (std::size_t j = 1; j <= J; ++j) b[j] = b[j - 1] * phi;
    return b;
}

struct SamplePath {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t run_id = 0;
    std::string spec_label;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

/// Convolution x_t = sum_{j <= min(J, t)} b_j e_{t-j} with zero pre-history,
/// evaluated only for t in [first, first + count).
inline std::vector<double> ma_filter(std::span<const double> b, std::span<const double> e,
                                     std::size_t first, std::size_t count) {
    if (first + count > e.size()) throw LengthError("ma_filter", first + count, e.size());
    std::vector<double> x(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t t = first + i;
        const std::size_t jmax = std::min(b.size() - 1, t);
        double acc = 0.0;
        for (std::size_t j = 0; j <= jmax; ++j) acc += b[j] * e[t - j];
        x[i] = acc;
    }
    return x;
}

inline std::vector<double> ma_filter(std::span<const double> b, std::span<const double> e) {
    return ma_filter(b, e, 0, e.size());
}

/// Filter the innovations, drop the burn-in, keep n values.
inline SamplePath apply_ma_filter(const ProcessSpec& spec, std::span<const double> innovations,
                                  std::size_t n) {
    const std::size_t required = n + spec.burn_in;
    if (innovations.size() < required)
        throw LengthError("apply_ma_filter: innovations", required, innovations.size());
    SamplePath path;
    path.values = ma_filter(spec.ma_coeffs, innovations, spec.burn_in, n);
    if (spec.functional == Functional::Abs)
        for (auto& v : path.values) v = std::abs(v);
    path.spec_label = spec.label;
    return path;
}

/// x_1..x_n for replication `run_id`.
inline SamplePath gen_path(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                           std::uint64_t run_id) {
    if (n == 0) throw ValidationError("n", "must be >= 1");
    spec.validate();
    auto e = gen_innovations(spec.innovation, n + spec.burn_in, seed, run_id);
    auto path = apply_ma_filter(spec, e, n);
    path.seed = seed;
    path.run_id = run_id;
    return path;
}

/// (X, X') driven by the same shocks except the one `lag` steps before the
/// last kept point, which X' replaces by an independent copy.
inline std::pair<SamplePath, SamplePath> gen_coupled_pair(const ProcessSpec& spec, std::size_t lag,
                                                          std::size_t n_keep, std::uint64_t seed,
                                                          std::uint64_t run_id) {
    if (n_keep == 0) throw ValidationError("n_keep", "must be >= 1");
    spec.validate();
    const std::size_t prefix = shock_prefix(spec.innovation);
    const std::size_t total = n_keep + spec.burn_in;
    const std::size_t anchor_shock = prefix + total - 1;
    if (lag > anchor_shock)
        throw ValidationError("lag", "exceeds generated history of " + std::to_string(anchor_shock) +
                                         " shocks before the anchor");

    auto shocks = standard_normals(total + prefix, seed, run_id, Stream::Shocks);
    auto coupled = shocks;
    auto copy_engine = make_engine(seed, run_id, Stream::CouplingCopy);
    coupled[anchor_shock - lag] = std::normal_distribution<double>(0.0, 1.0)(copy_engine);

    auto x = apply_ma_filter(spec, innovations_from_shocks(spec.innovation, shocks), n_keep);
    auto y = apply_ma_filter(spec, innovations_from_shocks(spec.innovation, coupled), n_keep);
    x.seed = y.seed = seed;
    x.run_id = y.run_id = run_id;
    return {std::move(x), std::move(y)};
}

}  // namespace arsel
