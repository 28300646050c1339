#include <gtest/gtest.h>

#include <cmath>

#include "arsel/estimator.hpp"
#include "arsel/levinson.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"
#include "oracles.hpp"

using namespace arsel;

namespace {

std::vector<double> ma1_path(std::size_t n, std::uint64_t run) {
    const auto spec = ProcessSpec::make(IidGaussian{}, {1.0, 0.5});
    return gen_path(spec, n, 314, run).values;
}

double sup_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(AutocovHat, ConstantPath) {
    const std::vector<double> x(10, 3.0);
    for (std::size_t h = 0; h < 10; ++h) EXPECT_NEAR(autocov_hat(x, h), 9.0 * (10.0 - h) / 10.0, 1e-12);
}

TEST(AutocovHat, Alternating) {
    const std::vector<double> x{1, -1, 1, -1};
    EXPECT_DOUBLE_EQ(autocov_hat(x, 1), -0.75);
}

TEST(AutocovHat, MatchesBruteForce) {
    const auto x = oracle::gaussian(1000, 3);
    for (std::size_t h : {0u, 1u, 7u, 999u}) EXPECT_NEAR(autocov_hat(x, h), oracle::autocov_brute(x, h), 1e-12);
    EXPECT_THROW(autocov_hat(x, 1000), ValidationError);
}

TEST(Window, Invariants) {
    const auto w = FitWindow::paper(100, 10);
    EXPECT_EQ(w.N, 90u);
    EXPECT_THROW(FitWindow::paper(100, 0), ValidationError);
    EXPECT_THROW(FitWindow::paper(100, 100), ValidationError);
    EXPECT_THROW(FitWindow::paper(3, 2), ValidationError);
    EXPECT_EQ(FitWindow::toeplitz(50).N, 50u);
    EXPECT_EQ(default_window(1000), 22u);
    EXPECT_EQ(default_window(2000), 30u);
    EXPECT_EQ(default_window(250), 11u);
}

TEST(PaperWindow, WhiteNoiseCoefficientsVanish) {
    const auto spec = ProcessSpec::make(IidGaussian{}, {1.0});
    const auto x = gen_path(spec, 100000, 5, 0).values;
    const auto fit = fit_paper_window(x, 10, 3);
    EXPECT_LT(sup_norm(fit.phi), 0.02);
}

TEST(PaperWindow, AutoregressionConsistent) {
    const auto x = oracle::ar1_path(0.6, 100000, 8);
    const auto fit = fit_paper_window(x, 10, 1);
    EXPECT_NEAR(fit.phi(0), 0.6, 0.01);
}

TEST(PaperWindow, ScalarCaseIsRatio) {
    const auto x = ma1_path(500, 0);
    const std::size_t K = 7;
    double num = 0.0, den = 0.0;
    for (std::size_t t = K; t < x.size(); ++t) num += x[t] * x[t - 1], den += x[t - 1] * x[t - 1];
    EXPECT_NEAR(fit_paper_window(x, K, 1).phi(0), num / den, 1e-12);
}

TEST(PaperWindow, MatchesDenseRegression) {
    const auto x = ma1_path(400, 1);
    for (std::size_t k = 1; k <= 12; ++k) {
        const auto fit = fit_paper_window(x, 12, k);
        const auto ref = oracle::window_fit(x, 12, k);
        EXPECT_LE((fit.R_hat - ref.R).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((fit.phi - ref.phi).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(PaperWindow, LeadingBlockSharedAcrossOrders) {
    const auto x = ma1_path(300, 2);
    const auto big = fit_paper_window(x, 9, 9);
    const auto small = fit_paper_window(x, 9, 4);
    EXPECT_EQ((big.R_hat.topLeftCorner(4, 4) - small.R_hat).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PaperWindow, DegeneratePathRaisesSingular) {
    std::vector<double> x(200);
    x[0] = 1.0;
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.6 * x[t - 1];
    EXPECT_THROW(fit_paper_window(x, 5, 2), SingularMatrixError);
    const std::vector<double> zero(100, 0.0);
    try {
        (void)fit_paper_window(zero, 5, 1);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot(), 0.0);
    }
}

TEST(SigmaHat, ZeroCoefficientsGiveSecondMoment) {
    const auto x = ma1_path(200, 3);
    const auto w = FitWindow::paper(200, 6);
    double s = 0.0;
    for (std::size_t t = 6; t < 200; ++t) s += x[t] * x[t];
    EXPECT_NEAR(sigma_hat_sq(x, std::vector<double>(3, 0.0), w), s / 194.0, 1e-12);
}

TEST(SigmaHat, NoiselessAutoregressionFitsPerfectly) {
    std::vector<double> x(100);
    x[0] = 1.0;
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.6 * x[t - 1];
    EXPECT_LE(sigma_hat_sq(x, std::vector<double>{0.6}, FitWindow::paper(100, 3)), 1e-20);
}

TEST(SigmaHat, MatchesOracleResidual) {
    const auto x = ma1_path(350, 4);
    const auto w = FitWindow::paper(350, 8);
    const auto fit = fit_all_orders(x, w, 8);
    for (std::size_t k = 1; k <= 8; ++k)
        EXPECT_NEAR(fit.sigma_sq(k), oracle::window_residual(x, 8, fit.phi(k)), 1e-12);
}

TEST(ResidualIdentity, ExactInPaperWindow) {
    const auto model = PopulationModel::from_ma(std::vector<double>{1.0, 0.5}, 1.0);
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto x = ma1_path(500, 100 + r);
        const auto w = FitWindow::paper(500, 10);
        for (std::size_t k = 1; k <= 10; ++k) {
            const auto fit = fit_paper_window(x, 10, k);
            const auto pop = model.solve(k);
            std::vector<double> phi(fit.phi.data(), fit.phi.data() + k);
            const double s = s_k_sq(x, pop, w);
            const double lhs = s - sigma_hat_sq(x, phi, w);
            Eigen::VectorXd d = fit.phi;
            for (std::size_t i = 0; i < k; ++i) d(i) += pop.a[i];
            const double rhs = d.dot(fit.R_hat * d);
            // relative to the operands: lhs is a difference of two O(1) variances
            EXPECT_NEAR(lhs, rhs, 1e-10 * s) << "k=" << k;
        }
    }
}

TEST(SkSq, WhiteNoiseIsSecondMoment) {
    const auto model = PopulationModel::from_ma(std::vector<double>{1.0}, 1.0);
    const auto x = oracle::gaussian(300, 9);
    const auto w = FitWindow::paper(300, 5);
    EXPECT_NEAR(s_k_sq(x, model.solve(3), w), sigma_hat_sq(x, std::vector<double>(3, 0.0), w), 1e-14);
}

TEST(SkSq, UnbiasedForPopulationVariance) {
    const auto model = PopulationModel::from_ma(std::vector<double>{1.0, 0.5}, 1.0);
    const std::size_t n = 2000;
    const auto w = FitWindow::paper(n, default_window(n));
    for (std::size_t k : {1u, 3u}) {
        double mean = 0.0;
        for (std::uint64_t r = 0; r < 500; ++r) mean += s_k_sq(ma1_path(n, r), model.solve(k), w);
        mean /= 500.0;
        EXPECT_NEAR(mean, model.sigma_k_sq(k), 0.02 * model.sigma_k_sq(k)) << "k=" << k;
    }
}

TEST(ToeplitzFull, LevinsonMatchesDenseSolve) {
    for (std::uint64_t r = 0; r < 5; ++r) {
        const auto x = ma1_path(600, 200 + r);
        const auto fit = fit_all_orders(x, FitWindow::toeplitz(600), 50);
        const auto g = autocov_hat_all(x, 50);
        double worst = 0.0;
        for (std::size_t k = 1; k <= 50; ++k) {
            const auto a = oracle::yule_walker_dense(g, k);
            for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(fit.phi(k)[i] + a[i]));
        }
        EXPECT_LE(worst, 1e-8);
    }
}

TEST(ToeplitzFull, ResidualVariancesNonIncreasing) {
    const auto x = ma1_path(400, 7);
    const auto fit = fit_all_orders(x, FitWindow::toeplitz(400), 200);
    for (std::size_t k = 2; k <= 200; ++k) EXPECT_LE(fit.sigma_sq(k), fit.sigma_sq(k - 1));
    for (double v : fit.sigma_hat_sq) EXPECT_GE(v, 0.0);
    const auto lean = toeplitz_residual_variances(x, 200);
    for (std::size_t k = 1; k <= 200; ++k) EXPECT_EQ(lean[k - 1], fit.sigma_sq(k));
}

TEST(ToeplitzFull, OrderOneIsRatio) {
    const auto x = ma1_path(300, 8);
    const auto fit = fit_all_orders(x, FitWindow::toeplitz(300), 1);
    EXPECT_NEAR(fit.phi(1)[0], oracle::autocov_brute(x, 1) / oracle::autocov_brute(x, 0), 1e-12);
}

TEST(FitAllOrders, RangeChecks) {
    const auto x = ma1_path(100, 9);
    EXPECT_THROW(fit_all_orders(x, FitWindow::paper(100, 5), 6), ValidationError);
    EXPECT_THROW(fit_all_orders(x, FitWindow::toeplitz(100), 100), ValidationError);
    EXPECT_THROW(fit_all_orders(x, FitWindow::toeplitz(99), 3), ValidationError);
    EXPECT_NO_THROW(fit_all_orders(x, FitWindow::toeplitz(100), 99));
}

TEST(ScaleEquivariance, CoefficientsInvariantVariancesScale) {
    const auto model = PopulationModel::from_ma(std::vector<double>{1.0, 0.5}, 1.0);
    const auto x = ma1_path(500, 10);
    for (double c : {0.1, 10.0}) {
        std::vector<double> y(x);
        for (auto& v : y) v *= c;
        for (auto mode : {FitMode::PaperWindow, FitMode::ToeplitzFull}) {
            const auto w = mode == FitMode::PaperWindow ? FitWindow::paper(500, 10) : FitWindow::toeplitz(500);
            const auto fx = fit_all_orders(x, w, 10);
            const auto fy = fit_all_orders(y, w, 10);
            for (std::size_t k = 1; k <= 10; ++k) {
                EXPECT_NEAR(fy.sigma_sq(k), c * c * fx.sigma_sq(k), 1e-12 * c * c * fx.sigma_sq(k));
                for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(fy.phi(k)[i], fx.phi(k)[i], 1e-12);
            }
        }
        const auto w = FitWindow::paper(500, 10);
        EXPECT_NEAR(s_k_sq(y, model.solve(4), w), c * c * s_k_sq(x, model.solve(4), w), 1e-12 * c * c);
        EXPECT_NEAR(autocov_hat(y, 2), c * c * autocov_hat(x, 2), 1e-12 * c * c);
    }
}

TEST(Consistency, ErrorShrinksWithSampleSize) {
    const auto model = PopulationModel::from_ma(std::vector<double>{1.0, 0.5}, 1.0);
    const auto pop = model.solve(5);
    auto avg_err = [&](std::size_t n) {
        double s = 0.0;
        for (std::uint64_t r = 0; r < 50; ++r) {
            const auto fit = fit_paper_window(ma1_path(n, 1000 + r), default_window(n), 5);
            double e = 0.0;
            for (std::size_t i = 0; i < 5; ++i) e = std::max(e, std::abs(fit.phi(i) + pop.a[i]));
            s += e;
        }
        return s / 50.0;
    };
    const double small = avg_err(1000);
    const double large = avg_err(100000);
    EXPECT_LT(large, 3.0 * small);
    EXPECT_LT(large, small);
}
