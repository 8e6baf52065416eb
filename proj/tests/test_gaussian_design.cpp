#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simrec/errors.hpp"
#include "simrec/gaussian_design.hpp"

using namespace simrec;

TEST_CASE("identity covariance is the identity matrix") {
    const auto spec = CovarianceSpec::identity(3);
    CHECK(spec.kind() == CovarianceKind::Identity);
    CHECK((spec.matrix() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("toeplitz entries are rho^|k-j|") {
    const auto spec = CovarianceSpec::toeplitz(3, 0.5);
    Eigen::MatrixXd expected(3, 3);
    expected << 1.0, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 1.0;
    CHECK((spec.matrix() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("indefinite explicit matrix is rejected") {
    // eigenvalues of [[1,2],[2,1]] are 1 +- 2, so -1 < 0
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(CovarianceSpec::explicit_matrix(bad), NonPositiveDefinite);
}

TEST_CASE("correlation bound is enforced") {
    CHECK_THROWS_AS(CovarianceSpec::toeplitz(4, 1.0), BadCorrelation);
    CHECK_THROWS_AS(CovarianceSpec::toeplitz(4, -1.2), BadCorrelation);
    CHECK_THROWS_AS(build_covariance(CovarianceKind::Toeplitz, 4, 1.5), BadCorrelation);
}

TEST_CASE("cholesky factor reconstructs the covariance") {
    for (double rho : {-0.7, -0.25, 0.0, 0.3, 0.9}) {
        const auto spec = CovarianceSpec::toeplitz(17, rho);
        const Eigen::MatrixXd rebuilt =
            spec.cholesky_lower() * spec.cholesky_lower().transpose();
        CHECK((rebuilt - spec.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
    Rng rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const int p = 4 + trial;
        const Eigen::MatrixXd a = oracles::gaussian_matrix(2 * p, p, rng);
        const Eigen::MatrixXd sigma =
            a.transpose() * a / (2.0 * p) + Eigen::MatrixXd::Identity(p, p) * 0.5;
        const auto spec = CovarianceSpec::explicit_matrix(sigma);
        const Eigen::MatrixXd rebuilt =
            spec.cholesky_lower() * spec.cholesky_lower().transpose();
        CHECK((rebuilt - spec.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("sampling is deterministic given the seed") {
    const auto spec = CovarianceSpec::identity(2);
    const auto first = sample_design(spec, 4, 7);
    const auto second = sample_design(spec, 4, 7);
    CHECK(first.data == second.data);
    const auto other = sample_design(spec, 4, 8);
    CHECK(first.data != other.data);
}

TEST_CASE("explicit covariance equal to the toeplitz one gives identical draws") {
    const auto toe = CovarianceSpec::toeplitz(6, 0.4);
    const auto exp = CovarianceSpec::explicit_matrix(toe.matrix());
    CHECK(sample_design(toe, 50, 123).data == sample_design(exp, 50, 123).data);
}

TEST_CASE("sample covariance converges to the model") {
    const int n = 100000;
    const auto spec = CovarianceSpec::toeplitz(5, 0.5);
    const auto design = sample_design(spec, n, 1);
    const Eigen::MatrixXd sample_cov = oracles::empirical_covariance(design.data);
    CHECK((sample_cov - spec.matrix()).cwiseAbs().maxCoeff() < 0.03);

    // column means vanish
    CHECK(design.data.colwise().mean().cwiseAbs().maxCoeff() < 0.02);

    // max-norm rate bound
    const double rate = 5.0 * std::sqrt(std::log(5.0) / n);
    CHECK((sample_cov - spec.matrix()).cwiseAbs().maxCoeff() < rate);
}

TEST_CASE("single-covariate design is standard normal") {
    const auto spec = CovarianceSpec::identity(1);
    const auto design = sample_design(spec, 3, 0);
    CHECK(design.rows() == 3);
    CHECK(design.cols() == 1);
    const auto big = sample_design(spec, 2000, 0);
    const double variance = oracles::empirical_covariance(big.data)(0, 0);
    CHECK(variance > 0.1);
    CHECK(variance < 5.0);
}

TEST_CASE("bad shapes are rejected") {
    CHECK_THROWS_AS(CovarianceSpec::identity(0), std::invalid_argument);
    const auto spec = CovarianceSpec::identity(2);
    CHECK_THROWS_AS(sample_design(spec, 0, 1), std::invalid_argument);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.3, 1.0;
    CHECK_THROWS_AS(CovarianceSpec::explicit_matrix(asym), std::invalid_argument);
}
