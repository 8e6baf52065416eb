#include "simrec/pdw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simrec/errors.hpp"

namespace simrec {

namespace {

constexpr double kPivotFloor = 1e-12;

Eigen::MatrixXd support_columns(const Eigen::MatrixXd& x, const std::vector<int>& support) {
    Eigen::MatrixXd cols(x.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k] < 0 || support[k] >= x.cols()) {
            throw std::invalid_argument("support index out of range");
        }
        cols.col(static_cast<Eigen::Index>(k)) = x.col(support[k]);
    }
    return cols;
}

void check_support(const std::vector<int>& support) {
    if (support.empty()) {
        throw std::invalid_argument("support set must be nonempty");
    }
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("support indices must be distinct");
    }
}

// Cholesky of the normalized Gram X_S' X_S / n with the (scaled) pivot
// floor; throws SingularGram when the support columns are degenerate.
Eigen::LLT<Eigen::MatrixXd> gram_factor(const Eigen::MatrixXd& xs) {
    const double n = static_cast<double>(xs.rows());
    Eigen::MatrixXd gram = xs.transpose() * xs / n;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success ||
        llt.matrixLLT().diagonal().minCoeff() < std::sqrt(kPivotFloor)) {
        throw SingularGram("support Gram matrix is numerically singular");
    }
    return llt;
}

}  // namespace

RestrictedFit restricted_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const std::vector<int>& support, double lambda,
                               const FitOptions& options) {
    check_support(support);
    if (static_cast<Eigen::Index>(support.size()) >= x.rows() + 1) {
        throw SingularGram("support larger than the sample size");
    }
    const Eigen::MatrixXd xs = support_columns(x, support);
    gram_factor(xs);  // uniqueness requires an invertible Gram

    const LassoFit inner = fit(xs, y, lambda, options);
    RestrictedFit result;
    result.beta = inner.beta;
    result.converged = inner.converged;

    // Subgradient: signs on active coordinates, the stationarity-forced
    // value g_j / lambda elsewhere.
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd gradient = xs.transpose() * (y - xs * inner.beta) / n;
    result.subgradient.resize(inner.beta.size());
    const double slack = options.tol / lambda;
    for (int k = 0; k < inner.beta.size(); ++k) {
        if (inner.beta[k] != 0.0) {
            result.subgradient[k] = inner.beta[k] > 0.0 ? 1.0 : -1.0;
        } else {
            const double forced = gradient[k] / lambda;
            if (std::abs(forced) > 1.0 + slack) {
                throw InfeasibleSubgradient("KKT-forced subgradient lies outside [-1, 1]");
            }
            result.subgradient[k] = forced;
        }
    }
    return result;
}

Eigen::VectorXd dual_variables(const Eigen::MatrixXd& x, const std::vector<int>& support,
                               const Eigen::VectorXd& subgradient, const Eigen::VectorXd& residual_w,
                               double lambda) {
    check_support(support);
    if (subgradient.size() != static_cast<Eigen::Index>(support.size())) {
        throw DimensionMismatch("subgradient length does not match support size");
    }
    if (residual_w.size() != x.rows()) {
        throw DimensionMismatch("residual vector length does not match design rows");
    }
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd xs = support_columns(x, support);
    const auto llt = gram_factor(xs);

    // X_S (X_S' X_S)^-1 z_S  =  X_S (Gram/n scaling folded in)
    const Eigen::VectorXd direction = xs * llt.solve(subgradient) / n;
    const Eigen::VectorXd scaled_w = residual_w / (lambda * n);
    // P_perp(w) = w - X_S (X_S' X_S)^-1 X_S' w
    const Eigen::VectorXd projected = scaled_w - xs * llt.solve(xs.transpose() * scaled_w) / n;
    const Eigen::VectorXd carrier = direction + projected;

    std::vector<char> in_support(static_cast<std::size_t>(x.cols()), 0);
    for (int j : support) in_support[static_cast<std::size_t>(j)] = 1;

    Eigen::VectorXd z(x.cols() - static_cast<Eigen::Index>(support.size()));
    Eigen::Index out = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!in_support[static_cast<std::size_t>(j)]) {
            z[out++] = x.col(j).dot(carrier);
        }
    }
    return z;
}

Eigen::VectorXd sign_perturbations(const Eigen::MatrixXd& x, const std::vector<int>& support,
                                   const Eigen::VectorXd& residual_w, double lambda,
                                   const Eigen::VectorXd& target_signs) {
    check_support(support);
    if (target_signs.size() != static_cast<Eigen::Index>(support.size())) {
        throw DimensionMismatch("sign vector length does not match support size");
    }
    if (residual_w.size() != x.rows()) {
        throw DimensionMismatch("residual vector length does not match design rows");
    }
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd xs = support_columns(x, support);
    const auto llt = gram_factor(xs);
    const Eigen::VectorXd rhs = xs.transpose() * residual_w / n - lambda * target_signs;
    return llt.solve(rhs);
}

PdwReport pdw_check(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const std::vector<int>& support, double lambda,
                    const Eigen::VectorXd& c0_beta0, const FitOptions& options) {
    if (c0_beta0.size() != x.cols()) {
        throw DimensionMismatch("scaled truth length does not match design columns");
    }
    const Eigen::VectorXd w = y - x * c0_beta0;

    PdwReport report;
    const RestrictedFit restricted = restricted_lasso(x, y, support, lambda, options);
    report.restricted_beta = restricted.beta;
    report.subgradient = restricted.subgradient;
    report.z_values = dual_variables(x, support, restricted.subgradient, w, lambda);
    report.max_abs_z = report.z_values.size() > 0 ? report.z_values.cwiseAbs().maxCoeff() : 0.0;
    report.strict_dual_feasible = report.max_abs_z < 1.0;

    Eigen::VectorXd truth_signs(static_cast<Eigen::Index>(support.size()));
    Eigen::VectorXd scaled_truth(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        scaled_truth[static_cast<Eigen::Index>(k)] = c0_beta0[support[k]];
        truth_signs[static_cast<Eigen::Index>(k)] =
            c0_beta0[support[k]] > 0.0 ? 1.0 : (c0_beta0[support[k]] < 0.0 ? -1.0 : 0.0);
    }
    report.delta_values = sign_perturbations(x, support, w, lambda, truth_signs);

    report.sign_consistent = true;
    for (Eigen::Index k = 0; k < report.delta_values.size(); ++k) {
        const double perturbed = scaled_truth[k] + report.delta_values[k];
        const double target = truth_signs[k];
        const double achieved = perturbed > 0.0 ? 1.0 : (perturbed < 0.0 ? -1.0 : 0.0);
        if (achieved != target) {
            report.sign_consistent = false;
        }
    }
    return report;
}

PdwReport pdw_check(const Dataset& data, const std::vector<int>& support, double lambda,
                    std::optional<double> c0, const FitOptions& options) {
    const double scale = c0.has_value() ? *c0 : estimate_c0(data);
    return pdw_check(data.design.data, data.response, support, lambda,
                     (scale * data.truth.values).eval(), options);
}

}  // namespace simrec
