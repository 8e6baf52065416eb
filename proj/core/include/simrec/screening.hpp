#pragma once

#include <Eigen/Dense>

#include "simrec/sim_models.hpp"
#include "simrec/signed_support.hpp"

namespace simrec {

struct ScreeningResult {
    Eigen::VectorXd v;       // V_j = n^-1 sum_i Y_i X_ij
    double threshold = 0.0;  // nu * sqrt(log(p) / n)
    SignedSupport selected;  // { (sign(V_j), j) : |V_j| > threshold }
};

/// Covariance screening: selects coordinates whose empirical covariance
/// with the response strictly exceeds nu * sqrt(log(p)/n). Ties at the
/// threshold are excluded.
ScreeningResult covariance_screen(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double nu);
ScreeningResult covariance_screen(const Dataset& data, double nu);

/// Default tuning value: signal magnitude + 2*sqrt(2)*sigma, where sigma
/// is the square root of the response second moment.
double default_nu(double beta_min_magnitude, double sigma);

/// Closed-form identity-design LASSO: elementwise soft-thresholding of V.
Eigen::VectorXd soft_threshold_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);
Eigen::VectorXd soft_threshold_fit(const Dataset& data, double lambda);

/// Scalar soft-threshold sign(v) * (|v| - lambda)_+.
double soft_threshold(double value, double lambda);

}  // namespace simrec
