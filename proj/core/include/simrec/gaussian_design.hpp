#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace simrec {

enum class CovarianceKind { Identity, Toeplitz, Explicit };

/// Population covariance model for the Gaussian design. Immutable after
/// construction; the lower Cholesky factor is computed at build time
/// (construction fails on non-positive-definite input) and cached, so a
/// spec can be shared read-only across replicate threads.
class CovarianceSpec {
  public:
    static CovarianceSpec identity(int p);
    static CovarianceSpec toeplitz(int p, double rho);
    static CovarianceSpec explicit_matrix(Eigen::MatrixXd sigma);

    CovarianceKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::MatrixXd& cholesky_lower() const { return chol_; }
    /// Correlation parameter; meaningful for the Toeplitz kind only.
    double rho() const { return rho_; }

  private:
    CovarianceSpec(CovarianceKind kind, Eigen::MatrixXd sigma, double rho);

    CovarianceKind kind_;
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd chol_;
    double rho_;
};

/// Dispatching factory for the non-explicit kinds, used by config parsing.
CovarianceSpec build_covariance(CovarianceKind kind, int p, std::optional<double> rho = std::nullopt);

struct DesignMatrix {
    Eigen::MatrixXd data;  // n x p, row i is the i-th observation

    int rows() const { return static_cast<int>(data.rows()); }
    int cols() const { return static_cast<int>(data.cols()); }
};

/// Draws n i.i.d. rows from N(0, Sigma) as Z * L^T with Z standard normal
/// and L the cached lower Cholesky factor. Deterministic given the seed.
DesignMatrix sample_design(const CovarianceSpec& spec, int n, std::uint64_t seed);

}  // namespace simrec
