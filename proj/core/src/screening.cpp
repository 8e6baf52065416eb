#include "simrec/screening.hpp"

#include <cmath>

#include "simrec/errors.hpp"

namespace simrec {

double soft_threshold(double value, double lambda) {
    if (value > lambda) return value - lambda;
    if (value < -lambda) return value + lambda;
    return 0.0;
}

ScreeningResult covariance_screen(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double nu) {
    if (!(nu > 0.0)) {
        throw BadThreshold("screening threshold nu must be positive");
    }
    const auto n = x.rows();
    const auto p = x.cols();
    if (n < 2 || p < 2) {
        throw std::invalid_argument("screening needs n >= 2 and p >= 2");
    }
    if (y.size() != n) {
        throw DimensionMismatch("response length does not match design rows");
    }
    ScreeningResult result;
    result.v = x.transpose() * y / static_cast<double>(n);
    result.threshold = nu * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
    for (int j = 0; j < p; ++j) {
        // strict inequality: ties at the threshold are excluded
        if (std::abs(result.v[j]) > result.threshold) {
            result.selected.insert(j, result.v[j] > 0.0 ? 1 : -1);
        }
    }
    return result;
}

ScreeningResult covariance_screen(const Dataset& data, double nu) {
    return covariance_screen(data.design.data, data.response, nu);
}

double default_nu(double beta_min_magnitude, double sigma) {
    return beta_min_magnitude + 2.0 * std::sqrt(2.0) * sigma;
}

Eigen::VectorXd soft_threshold_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    if (lambda < 0.0) {
        throw std::invalid_argument("soft-threshold level must be nonnegative");
    }
    if (y.size() != x.rows()) {
        throw DimensionMismatch("response length does not match design rows");
    }
    const Eigen::VectorXd v = x.transpose() * y / static_cast<double>(x.rows());
    Eigen::VectorXd beta(v.size());
    for (int j = 0; j < v.size(); ++j) {
        beta[j] = soft_threshold(v[j], lambda);
    }
    return beta;
}

Eigen::VectorXd soft_threshold_fit(const Dataset& data, double lambda) {
    return soft_threshold_fit(data.design.data, data.response, lambda);
}

}  // namespace simrec
