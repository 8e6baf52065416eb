#include "simrec/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "simrec/errors.hpp"

namespace simrec {

double effective_sample_size(int n, int p, int s) {
    if (s < 1 || n < 1 || p <= s) {
        throw std::invalid_argument("effective sample size needs n >= 1 and p > s >= 1");
    }
    if (p - s < 2) {
        throw BadShape("effective sample size undefined: p - s must be >= 2");
    }
    return static_cast<double>(n) / (static_cast<double>(s) * std::log(static_cast<double>(p - s)));
}

int sample_size_for(double n_eff, int p, int s) {
    if (!(n_eff > 0.0)) {
        throw std::invalid_argument("target effective sample size must be positive");
    }
    if (p - s < 2) {
        throw BadShape("sample size undefined: p - s must be >= 2");
    }
    return static_cast<int>(
        std::ceil(n_eff * static_cast<double>(s) * std::log(static_cast<double>(p - s))));
}

namespace {

constexpr double kEigenFloor = 1e-12;

// max absolute row sum
double inf_inf_norm(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

struct SupportBlocks {
    Eigen::MatrixXd on;     // Sigma_{S,S}
    Eigen::MatrixXd cross;  // Sigma_{S^c,S}
    std::vector<int> off_indices;
};

SupportBlocks split_blocks(const Eigen::MatrixXd& sigma, const std::vector<int>& support) {
    const int p = static_cast<int>(sigma.rows());
    std::vector<char> in_support(static_cast<std::size_t>(p), 0);
    for (int j : support) {
        if (j < 0 || j >= p) {
            throw std::invalid_argument("support index out of range");
        }
        if (in_support[static_cast<std::size_t>(j)]) {
            throw std::invalid_argument("support indices must be distinct");
        }
        in_support[static_cast<std::size_t>(j)] = 1;
    }
    SupportBlocks blocks;
    for (int j = 0; j < p; ++j) {
        if (!in_support[static_cast<std::size_t>(j)]) blocks.off_indices.push_back(j);
    }
    const int s = static_cast<int>(support.size());
    const int m = static_cast<int>(blocks.off_indices.size());
    blocks.on.resize(s, s);
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            blocks.on(a, b) = sigma(support[a], support[b]);
        }
    }
    blocks.cross.resize(m, s);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < s; ++b) {
            blocks.cross(a, b) = sigma(blocks.off_indices[a], support[b]);
        }
    }
    return blocks;
}

}  // namespace

ConditionReport check_conditions(const CovarianceSpec& spec, const std::vector<int>& support,
                                 std::optional<int> n) {
    const int p = spec.dim();
    const int s = static_cast<int>(support.size());
    if (s == 0 || s >= p) {
        throw std::invalid_argument("support must be a nonempty proper subset");
    }
    const SupportBlocks blocks = split_blocks(spec.matrix(), support);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(blocks.on);
    if (eig.info() != Eigen::Success) {
        throw SingularBlock("eigendecomposition of the support block failed");
    }
    const Eigen::VectorXd eigenvalues = eig.eigenvalues();
    if (eigenvalues.minCoeff() < kEigenFloor) {
        throw SingularBlock("support block of the covariance is numerically singular");
    }

    ConditionReport report;
    report.lambda_min = eigenvalues.minCoeff();
    report.lambda_max = eigenvalues.maxCoeff();

    const Eigen::MatrixXd on_inverse =
        eig.eigenvectors() * eigenvalues.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    report.irrep_norm = inf_inf_norm(blocks.cross * on_inverse);
    report.kappa = 1.0 - report.irrep_norm;

    // Diagonal of the conditional covariance Sigma_{S^c|S}.
    double d_max = 0.0;
    for (std::size_t a = 0; a < blocks.off_indices.size(); ++a) {
        const Eigen::VectorXd row = blocks.cross.row(static_cast<Eigen::Index>(a));
        const double conditional =
            spec.matrix()(blocks.off_indices[a], blocks.off_indices[a]) - row.dot(on_inverse * row);
        d_max = std::max(d_max, std::abs(conditional));
    }
    report.d_max_cond = d_max;

    const Eigen::MatrixXd sqrt_on = eig.eigenvectors() *
                                    eigenvalues.cwiseSqrt().asDiagonal() *
                                    eig.eigenvectors().transpose();
    const Eigen::MatrixXd inv_sqrt_on = eig.eigenvectors() *
                                        eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                                        eig.eigenvectors().transpose();
    report.inv_sqrt_inf_norm = inf_inf_norm(inv_sqrt_on);
    report.rho_inf = report.inv_sqrt_inf_norm * inf_inf_norm(sqrt_on);

    report.n_eff = n.has_value() ? effective_sample_size(*n, p, s)
                                 : std::numeric_limits<double>::quiet_NaN();
    return report;
}

Eigen::MatrixXd schur_complement(const CovarianceSpec& spec, const std::vector<int>& support) {
    const int p = spec.dim();
    const int s = static_cast<int>(support.size());
    if (s == 0 || s >= p) {
        throw std::invalid_argument("support must be a nonempty proper subset");
    }
    const SupportBlocks blocks = split_blocks(spec.matrix(), support);
    Eigen::LLT<Eigen::MatrixXd> llt(blocks.on);
    if (llt.info() != Eigen::Success) {
        throw SingularBlock("support block of the covariance is numerically singular");
    }
    const int m = static_cast<int>(blocks.off_indices.size());
    Eigen::MatrixXd off(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            off(a, b) = spec.matrix()(blocks.off_indices[a], blocks.off_indices[b]);
        }
    }
    return off - blocks.cross * llt.solve(blocks.cross.transpose());
}

double theoretical_lambda(double xi2, double c_t, double d_max_cond, double kappa, int n, int p,
                          int s) {
    if (!(kappa > 0.0)) {
        throw BadKappa("theoretical lambda requires kappa > 0");
    }
    if (!(c_t > 1.0)) {
        throw std::invalid_argument("the constant c_t must exceed 1");
    }
    if (p - s < 2 || n < 1) {
        throw BadShape("theoretical lambda needs p - s >= 2 and n >= 1");
    }
    return std::sqrt((xi2 + 1.0) * 4.0 * c_t * d_max_cond / (kappa * kappa) *
                     std::log(static_cast<double>(p - s)) / static_cast<double>(n));
}

double containment_n_eff_threshold(double d_max_cond, double lambda_min, double xi2, double lambda,
                                 double kappa, int s) {
    if (!(kappa > 0.0)) {
        throw BadKappa("threshold requires kappa > 0");
    }
    if (!(lambda_min > 0.0) || !(lambda > 0.0) || s < 1) {
        throw std::invalid_argument("threshold requires positive lambda_min, lambda and s >= 1");
    }
    return 4.0 * d_max_cond *
           (4.0 / lambda_min + (xi2 + 1.0) / (lambda * lambda * static_cast<double>(s))) /
           (kappa * kappa);
}

double min_signal_threshold(const ConditionReport& report, double lambda, double beta_inf_norm,
                            int n, int p, int s, double upsilon0, double upsilon1,
                            double upsilon2) {
    const double n_eff = effective_sample_size(n, p, s);
    const double log_term = std::log(static_cast<double>(p - s));
    const double first = report.inv_sqrt_inf_norm * report.inv_sqrt_inf_norm * lambda * upsilon0;
    const double bracket =
        upsilon1 * report.rho_inf *
            std::sqrt(static_cast<double>(s) / (static_cast<double>(n) * log_term)) * beta_inf_norm +
        upsilon2 * report.inv_sqrt_inf_norm / std::sqrt(static_cast<double>(s));
    return first + bracket / std::sqrt(n_eff);
}

double estimate_xi2(const Dataset& data, double c0) {
    const Eigen::VectorXd index = data.design.data * data.truth.values;
    return (data.response - c0 * index).squaredNorm() / static_cast<double>(data.n());
}

}  // namespace simrec
