#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "simrec/lasso.hpp"
#include "simrec/sim_models.hpp"

namespace simrec {

/// Primal-dual witness report. z_values are the dual variables over the
/// complement of the candidate support (ascending index order);
/// delta_values are the sign-consistency perturbations over the support.
struct PdwReport {
    Eigen::VectorXd restricted_beta;
    Eigen::VectorXd subgradient;
    Eigen::VectorXd z_values;
    Eigen::VectorXd delta_values;
    double max_abs_z = 0.0;  // strictness margin; feasible iff < 1
    bool strict_dual_feasible = false;
    bool sign_consistent = false;
};

struct RestrictedFit {
    Eigen::VectorXd beta;         // coefficients over the support, support order
    Eigen::VectorXd subgradient;  // sign(beta_j) when active, KKT-forced value otherwise
    bool converged = false;
};

/// LASSO restricted to the columns in support (which must leave the Gram
/// matrix invertible). The subgradient entry for an exactly-zero
/// coordinate is the value forced by stationarity; values outside
/// [-1, 1] beyond the solver tolerance raise InfeasibleSubgradient.
RestrictedFit restricted_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const std::vector<int>& support, double lambda,
                               const FitOptions& options = {});

/// Dual variables Z_j = X_j' [ X_S (X_S' X_S)^-1 z_S + P_perp(w / (lambda n)) ]
/// for j outside the support, where P_perp projects onto the orthogonal
/// complement of the support columns.
Eigen::VectorXd dual_variables(const Eigen::MatrixXd& x, const std::vector<int>& support,
                               const Eigen::VectorXd& subgradient, const Eigen::VectorXd& residual_w,
                               double lambda);

/// Perturbations Delta_j = e_j' (n^-1 X_S' X_S)^-1 [ n^-1 X_S' w - lambda target_signs ].
Eigen::VectorXd sign_perturbations(const Eigen::MatrixXd& x, const std::vector<int>& support,
                                   const Eigen::VectorXd& residual_w, double lambda,
                                   const Eigen::VectorXd& target_signs);

/// Full construction against the dataset's ground truth. c0 defaults to
/// the sample estimate from estimate_c0; w = y - c0 * X * beta0.
PdwReport pdw_check(const Dataset& data, const std::vector<int>& support, double lambda,
                    std::optional<double> c0 = std::nullopt, const FitOptions& options = {});

/// Same construction with the scaled truth c0 * beta0 supplied directly
/// (for data where no simulation truth object exists).
PdwReport pdw_check(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const std::vector<int>& support, double lambda,
                    const Eigen::VectorXd& c0_beta0, const FitOptions& options = {});

}  // namespace simrec
