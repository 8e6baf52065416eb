#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "simrec/sim_models.hpp"

namespace simrec {

enum class TransformKind { Identity, EmpiricalCdf, UserTable };

/// Outcome transformation g applied elementwise to the response before
/// fitting, to induce a nonzero c0 or gain sub-Gaussianity. UserTable is
/// a monotone value map given as sorted (y, g(y)) breakpoints with linear
/// interpolation between them and clamping outside.
struct TransformSpec {
    TransformKind kind = TransformKind::Identity;
    std::vector<std::pair<double, double>> table;

    static TransformSpec identity() { return {TransformKind::Identity, {}}; }
    static TransformSpec empirical_cdf() { return {TransformKind::EmpiricalCdf, {}}; }
    static TransformSpec user_table(std::vector<std::pair<double, double>> entries);
};

/// Empirical CDF values rank/n with average ranks on ties; output lies in
/// (0, 1] for distinct data and is invariant under strictly increasing
/// transformations of the response.
Eigen::VectorXd empirical_cdf(const Eigen::VectorXd& response);

Eigen::VectorXd apply_transform(const Eigen::VectorXd& response, const TransformSpec& spec);

/// Empirical CDF shifted by 1/2.
Eigen::VectorXd centered_cdf_transform(const Eigen::VectorXd& response);

/// Quantile-binned estimate of Var{ E(X'beta0 | Y) }: bins the response
/// into (near) equal-count groups and returns the size-weighted variance
/// of the within-bin means of the index X'beta0. A value bounded away
/// from zero indicates a correlation-inducing transform exists.
double variance_of_conditional_mean(const Dataset& data, int bins);

}  // namespace simrec
