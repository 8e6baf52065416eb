#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "simrec/sim_models.hpp"
#include "simrec/signed_support.hpp"

namespace simrec {

struct FitOptions {
    double tol = 1e-8;          // maximum KKT violation accepted as converged
    int max_sweeps = 100000;    // cap on coordinate sweeps
    bool record_objective = false;
};

struct LassoFit {
    double lambda = 0.0;
    Eigen::VectorXd beta;
    double kkt_residual = 0.0;  // max-norm stationarity violation at beta
    int iterations = 0;         // coordinate sweeps performed
    bool converged = false;
    /// Objective value after each sweep; filled only when requested.
    std::vector<double> objective_trace;
};

struct LassoPath {
    std::vector<double> grid;    // strictly descending lambda values
    std::vector<LassoFit> fits;  // one per grid point, warm-started
};

/// Largest penalty with a nonzero solution: ||n^-1 X'y||_inf.
double lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// (1/2n)||y - X b||^2 + lambda ||b||_1.
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                       double lambda);

/// Max-norm violation of the stationarity conditions at beta: for active
/// coordinates |n^-1 X_j'(y - X b) - lambda sign(b_j)|, for inactive ones
/// (|n^-1 X_j'(y - X b)| - lambda)_+.
double kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    double lambda);

/// Cyclic coordinate descent with an active-set strategy; convergence is
/// certified by a full KKT pass against a freshly recomputed residual.
/// A fit that hits max_sweeps is returned with converged = false.
LassoFit fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
             const FitOptions& options = {});
LassoFit fit(const Dataset& data, double lambda, const FitOptions& options = {});

/// Same solver started from a given coefficient vector.
LassoFit fit_warm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                  const Eigen::VectorXd& beta_init, const FitOptions& options = {});

/// Log-spaced grid from lambda_max down to lambda_max * lambda_min_ratio,
/// each fit warm-started from the previous one.
LassoPath path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int grid_size,
               double lambda_min_ratio, const FitOptions& options = {});
LassoPath path(const Dataset& data, int grid_size, double lambda_min_ratio,
               const FitOptions& options = {});

/// Largest lambda whose fit has signed support exactly equal to truth,
/// or nullopt when no grid point matches.
std::optional<double> path_contains_true_support(const LassoPath& solution_path,
                                                 const SignedSupport& truth);

/// K-fold cross-validation over the given grid; returns the lambda
/// minimizing mean held-out squared error, preferring the larger lambda
/// on ties. The fold split is a deterministic function of the seed.
double cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<double>& grid, int folds, std::uint64_t seed,
                      const FitOptions& options = {});
double cross_validate(const Dataset& data, const std::vector<double>& grid, int folds,
                      std::uint64_t seed, const FitOptions& options = {});

}  // namespace simrec
