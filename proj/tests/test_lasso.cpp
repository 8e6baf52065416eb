#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "simrec/errors.hpp"
#include "simrec/lasso.hpp"
#include "simrec/screening.hpp"

using namespace simrec;

TEST_CASE("orthonormal design reduces to soft thresholding") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 30 + static_cast<int>(rng.next_u64() % 40);
        const int p = 5 + static_cast<int>(rng.next_u64() % 10);
        const Eigen::MatrixXd x = oracles::orthonormal_design(n, p, rng);
        const Eigen::VectorXd y = oracles::gaussian_vector(n, rng);
        const double lambda = 0.05 + 0.5 * rng.uniform();
        const LassoFit fitted = fit(x, y, lambda);
        REQUIRE(fitted.converged);
        const Eigen::VectorXd closed_form = soft_threshold_fit(x, y, lambda);
        CHECK((fitted.beta - closed_form).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("penalty above lambda_max gives the zero fit") {
    Rng rng(12);
    const Eigen::MatrixXd x = oracles::gaussian_matrix(40, 8, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(40, rng);
    const double top = lambda_max(x, y);
    for (double lambda : {top, 1.5 * top, 10.0 * top}) {
        const LassoFit fitted = fit(x, y, lambda);
        CHECK(fitted.converged);
        CHECK(fitted.beta.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("two-covariate orthogonal toy instance") {
    // X columns orthogonal with norm sqrt(n), Y = X e1, lambda = 1/4:
    // KKT gives beta = (0.75, 0)
    Eigen::MatrixXd x(4, 2);
    x << 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0;
    const Eigen::VectorXd y = x.col(0);
    const LassoFit fitted = fit(x, y, 0.25);
    REQUIRE(fitted.converged);
    CHECK(fitted.beta[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(std::abs(fitted.beta[1]) < 1e-10);
}

TEST_CASE("objective never increases across sweeps") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 20 + static_cast<int>(rng.next_u64() % 60);
        const int p = 5 + static_cast<int>(rng.next_u64() % 45);
        const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
        const Eigen::VectorXd y = oracles::gaussian_vector(n, rng);
        FitOptions options;
        options.record_objective = true;
        const LassoFit fitted = fit(x, y, 0.02 + 0.2 * rng.uniform(), options);
        REQUIRE(fitted.objective_trace.size() >= 1);
        for (std::size_t k = 1; k < fitted.objective_trace.size(); ++k) {
            const double slack = 1e-10 * (1.0 + std::abs(fitted.objective_trace[k - 1]));
            CHECK(fitted.objective_trace[k] <= fitted.objective_trace[k - 1] + slack);
        }
    }
}

TEST_CASE("kkt conditions hold at convergence") {
    Rng rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 15 + static_cast<int>(rng.next_u64() % 60);
        const int p = 2 + static_cast<int>(rng.next_u64() % 48);
        const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
        Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < std::min(p, 3); ++j) truth[j] = rng.normal();
        const Eigen::VectorXd y = x * truth + 0.5 * oracles::gaussian_vector(n, rng);
        const double lambda = 0.01 + 0.3 * rng.uniform();
        const LassoFit fitted = fit(x, y, lambda);
        REQUIRE(fitted.converged);
        CHECK(fitted.kkt_residual <= 1e-8);
        CHECK(kkt_residual(x, y, fitted.beta, lambda) <= 1e-8);

        // the reported residual is the certified quantity
        const double n_d = static_cast<double>(n);
        const Eigen::VectorXd gradient = x.transpose() * (y - x * fitted.beta) / n_d;
        for (int j = 0; j < p; ++j) {
            if (fitted.beta[j] != 0.0) {
                CHECK(std::abs(gradient[j] - lambda * (fitted.beta[j] > 0 ? 1.0 : -1.0)) <= 1e-8);
            } else {
                CHECK(std::abs(gradient[j]) <= lambda + 1e-8);
            }
        }
    }
}

TEST_CASE("tiny instances match the exhaustive sign-pattern oracle") {
    Rng rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 5);
        const int p = 2 + static_cast<int>(rng.next_u64() % 7);
        const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
        const Eigen::VectorXd y = oracles::gaussian_vector(n, rng);
        const double lambda = 0.05 + 0.4 * rng.uniform();
        const LassoFit fitted = fit(x, y, lambda);
        REQUIRE(fitted.converged);
        const Eigen::VectorXd oracle_beta = oracles::exhaustive_lasso(x, y, lambda);
        CHECK(std::abs(lasso_objective(x, y, fitted.beta, lambda) -
                       oracles::objective(x, y, oracle_beta, lambda)) < 1e-7);
    }
}

TEST_CASE("column permutation permutes the solution") {
    Rng rng(16);
    const int n = 30, p = 9;
    const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(n, rng);
    const LassoFit base = fit(x, y, 0.1);

    std::vector<int> perm(p);
    for (int j = 0; j < p; ++j) perm[j] = (j * 4 + 2) % p;  // a fixed permutation
    Eigen::MatrixXd shuffled(n, p);
    for (int j = 0; j < p; ++j) shuffled.col(j) = x.col(perm[j]);
    const LassoFit permuted = fit(shuffled, y, 0.1);
    for (int j = 0; j < p; ++j) {
        CHECK(permuted.beta[j] == doctest::Approx(base.beta[perm[j]]).epsilon(1e-9));
    }
}

TEST_CASE("path grid construction") {
    Rng rng(17);
    const Eigen::MatrixXd x = oracles::gaussian_matrix(25, 6, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(25, rng);
    const double top = lambda_max(x, y);

    const LassoPath two = path(x, y, 2, 0.1);
    REQUIRE(two.grid.size() == 2);
    CHECK(two.grid[0] == doctest::Approx(top).epsilon(1e-12));
    CHECK(two.grid[1] == doctest::Approx(0.1 * top).epsilon(1e-12));

    const LassoPath longer = path(x, y, 30, 1e-3);
    CHECK(longer.fits.front().beta.cwiseAbs().maxCoeff() == 0.0);  // first point is zero
    CHECK(std::is_sorted(longer.grid.rbegin(), longer.grid.rend()));
    for (std::size_t i = 1; i < longer.grid.size(); ++i) {
        CHECK(longer.grid[i] < longer.grid[i - 1]);
    }
    for (const auto& fitted : longer.fits) {
        CHECK(fitted.converged);
        CHECK(kkt_residual(x, y, fitted.beta, fitted.lambda) <= 1e-8);
    }
}

TEST_CASE("path support matching") {
    Rng rng(18);
    const Eigen::MatrixXd x = oracles::gaussian_matrix(25, 6, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(25, rng);
    const LassoPath solution_path = path(x, y, 20, 1e-2);

    SUBCASE("empty truth matches the zero fit at lambda_max") {
        const auto match = path_contains_true_support(solution_path, SignedSupport());
        REQUIRE(match.has_value());
        CHECK(*match == doctest::Approx(solution_path.grid[0]));
    }
    SUBCASE("nonempty truth cannot match an all-zero path") {
        LassoPath zero_path;
        zero_path.grid = {1.0, 0.5};
        LassoFit zero_fit;
        zero_fit.beta = Eigen::VectorXd::Zero(6);
        zero_path.fits = {zero_fit, zero_fit};
        SignedSupport truth;
        truth.insert(0, 1);
        CHECK(!path_contains_true_support(zero_path, truth).has_value());
    }
    SUBCASE("noiseless linear model is recovered for small lambda") {
        const int n = 120, p = 10;
        Rng rng2(19);
        const Eigen::MatrixXd design = oracles::gaussian_matrix(n, p, rng2);
        Eigen::VectorXd truth_vector = Eigen::VectorXd::Zero(p);
        truth_vector[1] = 1.0;
        truth_vector[4] = -0.7;
        const Eigen::VectorXd response = design * truth_vector;
        const LassoPath noiseless = path(design, response, 60, 1e-4);
        const auto match =
            path_contains_true_support(noiseless, SignedSupport::of(truth_vector));
        CHECK(match.has_value());
    }
}

TEST_CASE("cross validation basics") {
    Rng rng(20);
    const Eigen::MatrixXd x = oracles::gaussian_matrix(40, 5, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(40, rng);

    SUBCASE("single-element grid returns that element") {
        CHECK(cross_validate(x, y, {0.3}, 4, 7) == 0.3);
    }
    SUBCASE("fold split is deterministic in the seed") {
        const std::vector<double> grid = {0.5, 0.25, 0.1, 0.05};
        CHECK(cross_validate(x, y, grid, 5, 42) == cross_validate(x, y, grid, 5, 42));
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(cross_validate(x, y, {0.1}, 1, 0), std::invalid_argument);
        Eigen::MatrixXd tiny = x.topRows(3);
        Eigen::VectorXd tiny_y = y.head(3);
        CHECK_THROWS_AS(cross_validate(tiny, tiny_y, {0.1}, 4, 0), TooFewSamples);
    }
}

TEST_CASE("cross validation prefers the zero fit on pure noise") {
    // beta0 = 0 with a sqrt(log p / n)-magnitude grid: the chosen lambda
    // should usually shrink everything away
    Rng rng(21);
    int zero_picks = 0;
    const int replicates = 100;
    const int n = 200, p = 100;
    const double unit = std::sqrt(std::log(static_cast<double>(p)) / n);
    const std::vector<double> grid = {2.0 * unit, 0.8 * unit, 0.32 * unit};
    for (int rep = 0; rep < replicates; ++rep) {
        const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
        const Eigen::VectorXd y = oracles::gaussian_vector(n, rng);
        const double best = cross_validate(x, y, grid, 2, derive_seed(500, {(std::uint64_t)rep}));
        const LassoFit fitted = fit(x, y, best);
        if (fitted.beta.cwiseAbs().maxCoeff() == 0.0) ++zero_picks;
    }
    CHECK(zero_picks >= 80);
}

TEST_CASE("cross validation keeps strong signals") {
    Rng rng(22);
    int covered = 0;
    const int replicates = 100;
    for (int rep = 0; rep < replicates; ++rep) {
        const int n = 500, p = 20;
        const Eigen::MatrixXd x = oracles::gaussian_matrix(n, p, rng);
        Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
        truth[0] = 1.0;
        truth[7] = -1.0;
        truth[13] = 0.8;
        const Eigen::VectorXd y = x * truth + oracles::gaussian_vector(n, rng);
        const double top = lambda_max(x, y);
        std::vector<double> grid(12);
        for (int g = 0; g < 12; ++g) grid[g] = top * std::pow(0.01, g / 11.0);
        const double best = cross_validate(x, y, grid, 5, derive_seed(501, {(std::uint64_t)rep}));
        const LassoFit fitted = fit(x, y, best);
        bool contains = true;
        for (int j : {0, 7, 13}) {
            if (fitted.beta[j] == 0.0) contains = false;
        }
        if (contains) ++covered;
    }
    CHECK(covered >= 90);
}

TEST_CASE("invalid arguments are rejected") {
    Rng rng(23);
    const Eigen::MatrixXd x = oracles::gaussian_matrix(10, 3, rng);
    const Eigen::VectorXd y = oracles::gaussian_vector(10, rng);
    CHECK_THROWS_AS(fit(x, y, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit(x, y, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(path(x, y, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(path(x, y, 10, 1.5), std::invalid_argument);
    Eigen::VectorXd short_y = y.head(5);
    CHECK_THROWS_AS(fit(x, short_y, 0.1), DimensionMismatch);
}
