#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simrec/gaussian_design.hpp"
#include "simrec/signed_support.hpp"

namespace simrec {

/// Response link families. The first four are the simulation-study
/// models; Linear is the baseline and Logistic produces Bernoulli
/// outcomes with success probability e^u / (1 + e^u).
enum class Link { SinPlusLinear, TwoAtan, Cube, Sinh, Linear, Logistic };

Link link_from_name(std::string_view name);
std::string link_name(Link link);

/// Mean response at index value u (for Logistic: the success probability).
double apply_link(Link link, double u);

/// Sign of the population least-squares proportionality constant
/// c0 = E(Y X'beta0). Every built-in link has a strictly increasing
/// conditional mean, so this is +1 throughout; kept as a function so
/// recovery targets are stated against sign(c0) * beta0 explicitly.
int population_c0_sign(Link link);

struct SimModelSpec {
    Link link = Link::Linear;
    /// Additive noise standard deviation; 1.0 matches the simulation-study
    /// models, 0.0 gives a noiseless response. Ignored for Logistic.
    double noise_scale = 1.0;
};

/// Sparse coefficient vector normalized so that beta' Sigma beta = 1
/// against the covariance it was built for.
struct CoefficientVector {
    Eigen::VectorXd values;
    SignedSupport support;

    int dim() const { return static_cast<int>(values.size()); }
    int sparsity() const { return static_cast<int>(support.size()); }
    double min_magnitude() const;
};

/// Equal-magnitude construction: nonzeros share one magnitude a chosen so
/// the quadratic form against spec is exactly 1; signs as given.
CoefficientVector make_beta(const CovarianceSpec& spec, const std::vector<int>& support_indices,
                            const std::vector<int>& signs);

/// General construction: an arbitrary nonzero pattern rescaled to satisfy
/// the quadratic-form normalization (unequal magnitudes allowed).
CoefficientVector make_beta_pattern(const CovarianceSpec& spec, const Eigen::VectorXd& pattern);

struct Dataset {
    DesignMatrix design;
    Eigen::VectorXd response;
    CoefficientVector truth;
    SimModelSpec model;
    CovarianceSpec covariance;

    int n() const { return design.rows(); }
    int p() const { return design.cols(); }
};

/// Simulates Y_i = link(X_i' beta) + noise_scale * eps_i with eps ~ N(0,1)
/// independent of X (Logistic: Y_i ~ Bernoulli(p_i)). The design and the
/// noise use independent streams derived from the seed.
Dataset generate(const CovarianceSpec& spec, const CoefficientVector& beta, const SimModelSpec& model,
                 int n, std::uint64_t seed);

/// Sample version of c0 = E(Y X'beta0): mean of Y_i * (X_i' beta0).
double estimate_c0(const Dataset& data);

}  // namespace simrec
