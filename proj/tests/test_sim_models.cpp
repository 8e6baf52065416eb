#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simrec/errors.hpp"
#include "simrec/rng.hpp"
#include "simrec/sim_models.hpp"

using namespace simrec;

TEST_CASE("equal-magnitude beta under identity covariance") {
    const auto spec = CovarianceSpec::identity(4);
    const auto beta = make_beta(spec, {0, 1}, {-1, 1});
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(beta.values[0] == doctest::Approx(-a).epsilon(1e-12));
    CHECK(beta.values[1] == doctest::Approx(a).epsilon(1e-12));
    CHECK(beta.values[2] == 0.0);
    CHECK(beta.values[3] == 0.0);
    CHECK(beta.sparsity() == 2);
}

TEST_CASE("equal-magnitude beta under toeplitz covariance") {
    // quadratic form a^2 (1 + 1 + 2 * 0.5) = 3 a^2, so a = 1/sqrt(3)
    const auto spec = CovarianceSpec::toeplitz(3, 0.5);
    const auto beta = make_beta(spec, {0, 1}, {1, 1});
    CHECK(beta.values[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(beta.values[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("empty support is rejected") {
    const auto spec = CovarianceSpec::identity(5);
    CHECK_THROWS_AS(make_beta(spec, {}, {}), EmptySupport);
}

TEST_CASE("normalization holds for random patterns") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int p = 3 + static_cast<int>(rng.next_u64() % 10);
        const double rho = -0.8 + 1.6 * rng.uniform();
        const auto spec = CovarianceSpec::toeplitz(p, rho);
        Eigen::VectorXd pattern = Eigen::VectorXd::Zero(p);
        // at least one nonzero coordinate
        pattern[static_cast<int>(rng.next_u64() % p)] = rng.normal() + 2.0;
        for (int j = 0; j < p; ++j) {
            if (rng.uniform() < 0.4) pattern[j] = rng.normal();
        }
        const auto beta = make_beta_pattern(spec, pattern);
        CHECK(std::abs(beta.values.dot(spec.matrix() * beta.values) - 1.0) < 1e-10);
    }
}

TEST_CASE("equal-magnitude construction has flat profile") {
    const auto spec = CovarianceSpec::toeplitz(9, 0.5);
    const auto beta = make_beta(spec, {0, 3, 5}, {-1, 1, 1});
    CHECK(beta.min_magnitude() ==
          doctest::Approx(beta.values.cwiseAbs().maxCoeff()).epsilon(1e-14));
}

TEST_CASE("linear response reproduces the raw noise stream") {
    const auto spec = CovarianceSpec::identity(3);
    const auto beta = make_beta(spec, {0}, {1});
    const std::uint64_t seed = 2024;
    const auto data = generate(spec, beta, {Link::Linear, 1.0}, 64, seed);

    // the generator adds N(0,1) noise from the stream derived with tag 2
    const Eigen::VectorXd index = data.design.data * beta.values;
    Rng noise(derive_seed(seed, {2}));
    for (int i = 0; i < data.n(); ++i) {
        CHECK(data.response[i] == index[i] + noise.normal());
    }
}

TEST_CASE("dimension mismatch is rejected") {
    const auto spec3 = CovarianceSpec::identity(3);
    const auto spec4 = CovarianceSpec::identity(4);
    const auto beta = make_beta(spec4, {0}, {1});
    CHECK_THROWS_AS(generate(spec3, beta, {Link::Linear, 1.0}, 8, 1), DimensionMismatch);
}

TEST_CASE("sample c0 matches the quadrature oracle") {
    const auto spec = CovarianceSpec::identity(2);
    const auto beta = make_beta(spec, {0}, {1});
    const int n = 1000000;

    SUBCASE("cube: E[Z^4] = 3") {
        const auto data = generate(spec, beta, {Link::Cube, 1.0}, n, 5);
        CHECK(std::abs(estimate_c0(data) - 3.0) < 0.02);
    }
    SUBCASE("sin plus linear: 1 + e^{-1/2}") {
        const auto data = generate(spec, beta, {Link::SinPlusLinear, 1.0}, n, 6);
        const double stein = 1.0 + std::exp(-0.5);
        const double quad =
            oracles::gaussian_expectation([](double z) { return z * (z + std::sin(z)); });
        CHECK(std::abs(stein - quad) < 1e-9);  // the two oracle routes agree
        CHECK(std::abs(estimate_c0(data) - stein) < 0.02);
    }
    SUBCASE("sinh: e^{1/2}") {
        const auto data = generate(spec, beta, {Link::Sinh, 1.0}, n, 7);
        CHECK(std::abs(estimate_c0(data) - std::exp(0.5)) < 0.02);
    }
    SUBCASE("two atan: 2 E[1/(1+Z^2)]") {
        const auto data = generate(spec, beta, {Link::TwoAtan, 1.0}, n, 8);
        const double quad =
            oracles::gaussian_expectation([](double z) { return 2.0 / (1.0 + z * z); });
        CHECK(quad == doctest::Approx(1.3113590848).epsilon(1e-8));
        CHECK(std::abs(estimate_c0(data) - quad) < 0.02);
    }
    SUBCASE("linear: 1") {
        const auto data = generate(spec, beta, {Link::Linear, 1.0}, n, 9);
        CHECK(std::abs(estimate_c0(data) - 1.0) < 0.02);
    }
}

TEST_CASE("population least squares direction aligns with beta0") {
    // Sigma^-1 n^-1 X'Y is proportional to beta0 for every link
    const int n = 100000;
    const int p = 12;
    for (Link link : {Link::SinPlusLinear, Link::TwoAtan, Link::Cube, Link::Sinh, Link::Linear}) {
        for (double rho : {0.0, 0.5}) {
            const auto spec = rho == 0.0 ? CovarianceSpec::identity(p)
                                         : CovarianceSpec::toeplitz(p, rho);
            const auto beta = make_beta(spec, {0, 4, 9}, {-1, 1, 1});
            const auto data =
                generate(spec, beta, {link, 1.0}, n, 100 + static_cast<int>(link) + (rho > 0));
            const Eigen::VectorXd moment =
                data.design.data.transpose() * data.response / static_cast<double>(n);
            const Eigen::VectorXd direction = spec.matrix().ldlt().solve(moment);
            const double cosine = direction.dot(beta.values) /
                                  (direction.norm() * beta.values.norm());
            CHECK(std::acos(std::min(1.0, std::abs(cosine))) < 0.05);
            CHECK(cosine > 0.0);  // all links have positive c0
        }
    }
}

TEST_CASE("logistic model emits bernoulli outcomes") {
    const auto spec = CovarianceSpec::identity(4);
    const auto beta = make_beta(spec, {0, 1}, {-1, 1});
    const auto data = generate(spec, beta, {Link::Logistic, 1.0}, 20000, 77);
    for (int i = 0; i < data.n(); ++i) {
        const bool binary = data.response[i] == 0.0 || data.response[i] == 1.0;
        REQUIRE(binary);
    }
    // E g(Z) = 1/2 by symmetry of g around 0
    CHECK(std::abs(data.response.mean() - 0.5) < 0.02);
    CHECK(estimate_c0(data) > 0.05);  // c0 = E[g'(Z)] ~ 0.2066
}
