#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "simrec/gaussian_design.hpp"
#include "simrec/sim_models.hpp"
#include "simrec/signed_support.hpp"

namespace simrec {

enum class RecoveryMethod { ScreeningAuto, ScreeningNu, LassoPathContains, LassoAtLambdaT, LassoCv };

struct MethodSpec {
    RecoveryMethod kind = RecoveryMethod::LassoPathContains;
    double nu = 0.0;                   // ScreeningNu
    int grid_size = 100;               // LassoPathContains / LassoCv
    double lambda_min_ratio = 1e-3;    // LassoPathContains / LassoCv
    double c_t = 2.0;                  // LassoAtLambdaT
    int cv_folds = 5;                  // LassoCv
};

struct SparsityRule {
    bool sqrt_p = true;  // s = round(sqrt(p)); otherwise the fixed value below
    int fixed_s = 1;

    int s_for(int p) const;
};

enum class ResponseTransform { None, Cdf, CdfCentered };

struct ExperimentConfig {
    std::vector<int> p_values;
    SparsityRule s_rule;
    CovarianceKind covariance_kind = CovarianceKind::Identity;
    double covariance_rho = 0.0;
    SimModelSpec model;
    std::vector<double> n_eff_grid;  // positive, ascending
    int replicates = 200;
    MethodSpec method;
    ResponseTransform transform = ResponseTransform::None;
    std::uint64_t master_seed = 0;
};

/// Parses the JSON config document (see README for the schema).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct PhasePoint {
    double n_eff_target = 0.0;
    int n = 0;  // ceil(n_eff * s * log(p - s))
    double success_fraction = 0.0;
    int replicates = 0;
};

struct PhaseCurve {
    int p = 0;
    int s = 0;
    std::vector<PhasePoint> points;
};

/// Exact signed-support equality.
bool success_metric(const SignedSupport& estimated, const SignedSupport& truth);

/// Runs the Monte-Carlo phase-transition experiment. Replicates are
/// independent work items distributed over a pool of `threads` workers;
/// the per-replicate seed is a hash of (master_seed, p, grid index,
/// replicate index), so results are identical for any thread count.
/// Per-replicate failures (e.g. non-convergence) count as non-successes
/// and are logged to `progress` when given.
std::vector<PhaseCurve> run_experiment(const ExperimentConfig& config, int threads = 1,
                                       std::ostream* progress = nullptr);

/// CSV with header p,s,n_eff,n,replicates,success_fraction, rows ordered
/// by ascending p then n_eff; numbers use shortest round-trip formatting
/// so output is byte-identical across runs.
void emit_csv(const std::vector<PhaseCurve>& curves, std::ostream& out);
void emit_csv(const std::vector<PhaseCurve>& curves, const std::filesystem::path& path);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

/// The simulation-study coefficient layout: support on the first s
/// coordinates, first sign negative, the rest positive.
CoefficientVector default_beta(const CovarianceSpec& spec, int s);

}  // namespace simrec
