#include "simrec/sim_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "simrec/errors.hpp"
#include "simrec/rng.hpp"

namespace simrec {

Link link_from_name(std::string_view name) {
    if (name == "sin_linear") return Link::SinPlusLinear;
    if (name == "atan2x") return Link::TwoAtan;
    if (name == "cube") return Link::Cube;
    if (name == "sinh") return Link::Sinh;
    if (name == "linear") return Link::Linear;
    if (name == "logistic") return Link::Logistic;
    throw std::invalid_argument("unknown link name: " + std::string(name));
}

std::string link_name(Link link) {
    switch (link) {
        case Link::SinPlusLinear: return "sin_linear";
        case Link::TwoAtan: return "atan2x";
        case Link::Cube: return "cube";
        case Link::Sinh: return "sinh";
        case Link::Linear: return "linear";
        case Link::Logistic: return "logistic";
    }
    throw std::invalid_argument("unknown link");
}

double apply_link(Link link, double u) {
    switch (link) {
        case Link::SinPlusLinear: return u + std::sin(u);
        case Link::TwoAtan: return 2.0 * std::atan(u);
        case Link::Cube: return u * u * u;
        case Link::Sinh: return std::sinh(u);
        case Link::Linear: return u;
        case Link::Logistic: return 1.0 / (1.0 + std::exp(-u));
    }
    throw std::invalid_argument("unknown link");
}

int population_c0_sign(Link link) {
    // Every built-in conditional mean is strictly increasing, so the
    // association inequality makes c0 strictly positive.
    (void)link;
    return 1;
}

double CoefficientVector::min_magnitude() const {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& e : support.entries()) {
        smallest = std::min(smallest, std::abs(values[e.index]));
    }
    return support.empty() ? 0.0 : smallest;
}

CoefficientVector make_beta_pattern(const CovarianceSpec& spec, const Eigen::VectorXd& pattern) {
    if (pattern.size() != spec.dim()) {
        throw DimensionMismatch("pattern dimension does not match covariance");
    }
    if ((pattern.array() != 0.0).count() == 0) {
        throw EmptySupport("coefficient pattern has no nonzero entries");
    }
    const double quad_form = pattern.dot(spec.matrix() * pattern);
    if (!(quad_form > 0.0)) {
        throw NonPositiveDefinite("pattern quadratic form is not positive");
    }
    CoefficientVector beta;
    beta.values = pattern / std::sqrt(quad_form);
    beta.support = SignedSupport::of(beta.values);
    return beta;
}

CoefficientVector make_beta(const CovarianceSpec& spec, const std::vector<int>& support_indices,
                            const std::vector<int>& signs) {
    if (support_indices.empty()) {
        throw EmptySupport("make_beta requires a nonempty support");
    }
    if (support_indices.size() != signs.size()) {
        throw DimensionMismatch("support and sign lists differ in length");
    }
    Eigen::VectorXd pattern = Eigen::VectorXd::Zero(spec.dim());
    for (std::size_t k = 0; k < support_indices.size(); ++k) {
        const int j = support_indices[k];
        if (j < 0 || j >= spec.dim()) {
            throw std::invalid_argument("support index out of range");
        }
        if (pattern[j] != 0.0) {
            throw std::invalid_argument("duplicate support index");
        }
        if (signs[k] != 1 && signs[k] != -1) {
            throw std::invalid_argument("signs must be +1 or -1");
        }
        pattern[j] = static_cast<double>(signs[k]);
    }
    return make_beta_pattern(spec, pattern);
}

Dataset generate(const CovarianceSpec& spec, const CoefficientVector& beta, const SimModelSpec& model,
                 int n, std::uint64_t seed) {
    if (beta.dim() != spec.dim()) {
        throw DimensionMismatch("coefficient vector does not match covariance dimension");
    }
    if (n < 1) {
        throw std::invalid_argument("sample size must be >= 1");
    }
    Dataset data{DesignMatrix{}, Eigen::VectorXd(), beta, model, spec};
    data.design = sample_design(spec, n, derive_seed(seed, {1}));
    const Eigen::VectorXd index = data.design.data * beta.values;

    Rng noise(derive_seed(seed, {2}));
    data.response.resize(n);
    if (model.link == Link::Logistic) {
        for (int i = 0; i < n; ++i) {
            data.response[i] = noise.uniform() < apply_link(Link::Logistic, index[i]) ? 1.0 : 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            data.response[i] = apply_link(model.link, index[i]) + model.noise_scale * noise.normal();
        }
    }
    return data;
}

double estimate_c0(const Dataset& data) {
    const Eigen::VectorXd index = data.design.data * data.truth.values;
    return data.response.dot(index) / static_cast<double>(data.n());
}

}  // namespace simrec
