#include "simrec/gaussian_design.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "simrec/errors.hpp"
#include "simrec/rng.hpp"

namespace simrec {

namespace {

constexpr double kPivotFloor = 1e-12;

// Lower Cholesky with an explicit pivot floor guarding positive
// definiteness numerically.
Eigen::MatrixXd cholesky_lower_or_throw(const Eigen::MatrixXd& sigma) {
    const auto p = sigma.rows();
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double pivot = sigma(j, j) - lower.row(j).head(j).squaredNorm();
        if (!(pivot >= kPivotFloor)) {
            throw NonPositiveDefinite("covariance is not positive definite (pivot " +
                                      std::to_string(pivot) + " at column " + std::to_string(j) + ")");
        }
        lower(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < p; ++i) {
            lower(i, j) = (sigma(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / lower(j, j);
        }
    }
    return lower;
}

}  // namespace

CovarianceSpec::CovarianceSpec(CovarianceKind kind, Eigen::MatrixXd sigma, double rho)
    : kind_(kind), matrix_(std::move(sigma)), chol_(cholesky_lower_or_throw(matrix_)), rho_(rho) {}

CovarianceSpec CovarianceSpec::identity(int p) {
    if (p < 1) {
        throw std::invalid_argument("covariance dimension must be >= 1");
    }
    return CovarianceSpec(CovarianceKind::Identity, Eigen::MatrixXd::Identity(p, p), 0.0);
}

CovarianceSpec CovarianceSpec::toeplitz(int p, double rho) {
    if (p < 1) {
        throw std::invalid_argument("covariance dimension must be >= 1");
    }
    if (!(std::abs(rho) < 1.0)) {
        throw BadCorrelation("Toeplitz correlation must satisfy |rho| < 1, got " + std::to_string(rho));
    }
    Eigen::MatrixXd sigma(p, p);
    for (int k = 0; k < p; ++k) {
        for (int j = 0; j < p; ++j) {
            sigma(k, j) = std::pow(rho, std::abs(k - j));
        }
    }
    return CovarianceSpec(CovarianceKind::Toeplitz, std::move(sigma), rho);
}

CovarianceSpec CovarianceSpec::explicit_matrix(Eigen::MatrixXd sigma) {
    if (sigma.rows() < 1 || sigma.rows() != sigma.cols()) {
        throw std::invalid_argument("explicit covariance must be square and nonempty");
    }
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("explicit covariance must be symmetric");
    }
    return CovarianceSpec(CovarianceKind::Explicit, std::move(sigma), 0.0);
}

CovarianceSpec build_covariance(CovarianceKind kind, int p, std::optional<double> rho) {
    switch (kind) {
        case CovarianceKind::Identity:
            return CovarianceSpec::identity(p);
        case CovarianceKind::Toeplitz:
            if (!rho.has_value()) {
                throw std::invalid_argument("Toeplitz covariance needs a correlation parameter");
            }
            return CovarianceSpec::toeplitz(p, *rho);
        case CovarianceKind::Explicit:
            throw std::invalid_argument("explicit covariance requires the matrix; use CovarianceSpec::explicit_matrix");
    }
    throw std::invalid_argument("unknown covariance kind");
}

DesignMatrix sample_design(const CovarianceSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample size must be >= 1");
    }
    const int p = spec.dim();
    Rng rng(seed);
    Eigen::MatrixXd z(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            z(i, j) = rng.normal();
        }
    }
    DesignMatrix design;
    design.data.noalias() = z * spec.cholesky_lower().transpose();
    return design;
}

}  // namespace simrec
