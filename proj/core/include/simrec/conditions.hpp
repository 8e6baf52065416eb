#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "simrec/gaussian_design.hpp"
#include "simrec/sim_models.hpp"

namespace simrec {

/// Deterministic quantities controlling signed support recovery for a
/// covariance and candidate support: irrepresentability norm and its gap
/// kappa, extreme eigenvalues of the support block, the maximal diagonal
/// of the conditional covariance, infinity-norm condition numbers of the
/// support block square root, and the effective sample size when n is
/// supplied.
struct ConditionReport {
    double irrep_norm = 0.0;
    double kappa = 0.0;  // 1 - irrep_norm; the condition holds iff > 0
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double d_max_cond = 0.0;
    double rho_inf = 0.0;
    double inv_sqrt_inf_norm = 0.0;
    double n_eff = 0.0;  // NaN when no sample size was supplied
};

/// n / (s * log(p - s)); requires p - s >= 2 so the log is positive.
double effective_sample_size(int n, int p, int s);

/// Sample size achieving a target effective sample size: ceil(n_eff * s * log(p - s)).
int sample_size_for(double n_eff, int p, int s);

ConditionReport check_conditions(const CovarianceSpec& spec, const std::vector<int>& support,
                                 std::optional<int> n = std::nullopt);

/// Conditional covariance of the off-support block given the support
/// block (Schur complement). Used by diagnostics and tests; the report
/// itself only needs its diagonal.
Eigen::MatrixXd schur_complement(const CovarianceSpec& spec, const std::vector<int>& support);

/// Theoretically motivated penalty level
/// sqrt((xi2 + 1) * 4 * c_t * d_max_cond / kappa^2 * log(p - s) / n).
double theoretical_lambda(double xi2, double c_t, double d_max_cond, double kappa, int n, int p,
                          int s);

/// Effective-sample-size threshold for support containment:
/// 4 * d_max_cond * (4 / lambda_min + (xi2 + 1) / (lambda^2 s)) / kappa^2.
double containment_n_eff_threshold(double d_max_cond, double lambda_min, double xi2, double lambda,
                                 double kappa, int s);

/// Minimal-signal requirement evaluated with caller-supplied constants
/// (the theory guarantees existence only, so the defaults of 1 make the
/// value "up to constants").
double min_signal_threshold(const ConditionReport& report, double lambda, double beta_inf_norm,
                            int n, int p, int s, double upsilon0 = 1.0, double upsilon1 = 1.0,
                            double upsilon2 = 1.0);

/// Sample residual second moment n^-1 sum (Y_i - c0 X_i'beta0)^2.
double estimate_xi2(const Dataset& data, double c0);

}  // namespace simrec
