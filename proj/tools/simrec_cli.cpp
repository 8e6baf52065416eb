// Command-line interface: covariance screening, lasso paths,
// cross-validation, PDW diagnostics, condition calculators, and the
// Monte-Carlo phase-transition harness. All file outputs are
// byte-deterministic for a fixed seed.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "simrec/conditions.hpp"
#include "simrec/errors.hpp"
#include "simrec/experiment.hpp"
#include "simrec/gaussian_design.hpp"
#include "simrec/lasso.hpp"
#include "simrec/pdw.hpp"
#include "simrec/screening.hpp"
#include "simrec/sim_models.hpp"
#include "simrec/transforms.hpp"

namespace {

using nlohmann::json;

struct DataOptions {
    std::string data_path;
    int p = 0;
    int n = 0;
    std::string link = "linear";
    double rho = 0.0;
    bool toeplitz = false;
    int s = 0;
    std::vector<int> support;
    std::vector<int> signs;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

void add_data_options(CLI::App* cmd, DataOptions& opts, const std::string& truth_prefix = "") {
    cmd->add_option("--data", opts.data_path, "CSV file: response in column 1, design after");
    cmd->add_option("--p", opts.p, "simulated dimension");
    cmd->add_option("--n", opts.n, "simulated sample size");
    cmd->add_option("--link", opts.link,
                    "link: sin_linear|atan2x|cube|sinh|linear|logistic");
    auto* rho = cmd->add_option("--rho", opts.rho, "Toeplitz correlation (identity if absent)");
    rho->each([&opts](const std::string&) { opts.toeplitz = true; });
    cmd->add_option("--s", opts.s, "sparsity (support = first s coordinates, first sign -)");
    cmd->add_option("--" + truth_prefix + "support", opts.support, "truth support indices")
        ->delimiter(',');
    cmd->add_option("--" + truth_prefix + "signs", opts.signs,
                    "signs (+1/-1) aligned with the truth support")
        ->delimiter(',');
    cmd->add_option("--noise-scale", opts.noise_scale, "additive noise level (default 1)");
    cmd->add_option("--seed", opts.seed, "simulation seed");
}

struct LoadedData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::optional<simrec::Dataset> dataset;  // present in simulation mode
};

LoadedData load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open data file: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream fields(line);
        std::string field;
        bool numeric = true;
        while (std::getline(fields, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header line
            }
            throw std::runtime_error("non-numeric field in " + path);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("ragged rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().size() < 2) {
        throw std::runtime_error("data file needs at least one row and two columns");
    }
    LoadedData data;
    const int n = static_cast<int>(rows.size());
    const int p = static_cast<int>(rows.front().size()) - 1;
    data.x.resize(n, p);
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        data.y[i] = rows[i][0];
        for (int j = 0; j < p; ++j) data.x(i, j) = rows[i][j + 1];
    }
    return data;
}

LoadedData materialize(const DataOptions& opts) {
    if (!opts.data_path.empty()) {
        return load_csv(opts.data_path);
    }
    if (opts.p < 1 || opts.n < 1) {
        throw CLI::ValidationError("either --data or both --p and --n are required");
    }
    const auto spec = opts.toeplitz ? simrec::CovarianceSpec::toeplitz(opts.p, opts.rho)
                                    : simrec::CovarianceSpec::identity(opts.p);
    std::vector<int> support = opts.support;
    std::vector<int> signs = opts.signs;
    if (support.empty()) {
        const int s = opts.s > 0 ? opts.s : 1;
        for (int k = 0; k < s; ++k) support.push_back(k);
    }
    if (signs.empty()) {
        signs.assign(support.size(), 1);
        signs[0] = -1;
    }
    const auto beta = simrec::make_beta(spec, support, signs);
    const simrec::SimModelSpec model{simrec::link_from_name(opts.link), opts.noise_scale};
    LoadedData data;
    data.dataset = simrec::generate(spec, beta, model, opts.n, opts.seed);
    data.x = data.dataset->design.data;
    data.y = data.dataset->response;
    return data;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << text;
}

json support_to_json(const simrec::SignedSupport& support) {
    json entries = json::array();
    for (const auto& e : support.entries()) {
        entries.push_back({{"index", e.index}, {"sign", e.sign}});
    }
    return entries;
}

Eigen::VectorXd maybe_transform(const Eigen::VectorXd& y, const std::string& name) {
    if (name == "none") return y;
    if (name == "cdf") return simrec::empirical_cdf(y);
    if (name == "cdf-centered") return simrec::centered_cdf_transform(y);
    throw CLI::ValidationError("unknown transform: " + name);
}

// Mean-centers design columns and the response in place. Off by default:
// the model carries no intercept because E(X) = 0.
void center_in_place(Eigen::MatrixXd& x, Eigen::VectorXd& y) {
    x.rowwise() -= x.colwise().mean().eval();
    y.array() -= y.mean();
}

std::string format_hash(std::uint64_t value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Support recovery for high-dimensional single-index models"};
    app.require_subcommand(1);

    // ---- screen ----
    DataOptions screen_data;
    double screen_nu = 0.0;
    bool screen_auto = false;
    double screen_beta_min = 0.0;
    std::string screen_out;
    auto* screen_cmd = app.add_subcommand("screen", "covariance screening (JSON output)");
    add_data_options(screen_cmd, screen_data);
    screen_cmd->add_option("--nu", screen_nu, "screening threshold multiplier");
    screen_cmd->add_flag("--auto-nu", screen_auto,
                         "derive nu from the signal magnitude and response moment");
    screen_cmd->add_option("--beta-min", screen_beta_min,
                           "signal magnitude for --auto-nu with --data");
    screen_cmd->add_option("--out", screen_out, "output path (stdout if absent)");

    // ---- lasso-path ----
    DataOptions path_data;
    int path_grid = 100;
    double path_ratio = 1e-3;
    std::string path_transform = "none";
    bool path_center = false;
    std::string path_out;
    auto* path_cmd = app.add_subcommand("lasso-path", "lasso solution path (CSV output)");
    add_data_options(path_cmd, path_data);
    path_cmd->add_option("--grid", path_grid, "grid size (default 100)");
    path_cmd->add_option("--lmin-ratio", path_ratio, "lambda_min / lambda_max (default 1e-3)");
    path_cmd->add_option("--transform", path_transform, "none|cdf|cdf-centered");
    path_cmd->add_flag("--center", path_center, "mean-center columns and response first");
    path_cmd->add_option("--out", path_out, "output path (stdout if absent)");

    // ---- cv ----
    DataOptions cv_data;
    int cv_k = 5;
    int cv_grid = 20;
    double cv_ratio = 0.01;
    std::uint64_t cv_seed = 0;
    std::string cv_transform = "none";
    bool cv_center = false;
    std::string cv_out;
    auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation for lambda (JSON output)");
    add_data_options(cv_cmd, cv_data);
    cv_cmd->add_option("--k", cv_k, "fold count (default 5)");
    cv_cmd->add_option("--grid", cv_grid, "grid size (default 20)");
    cv_cmd->add_option("--lmin-ratio", cv_ratio, "lambda_min / lambda_max (default 0.01)");
    cv_cmd->add_option("--cv-seed", cv_seed, "fold-split seed");
    cv_cmd->add_option("--transform", cv_transform, "none|cdf|cdf-centered");
    cv_cmd->add_flag("--center", cv_center, "mean-center columns and response first");
    cv_cmd->add_option("--out", cv_out, "output path (stdout if absent)");

    // ---- pdw-check ----
    DataOptions pdw_data;
    std::vector<int> pdw_support;
    double pdw_lambda = 0.0;
    double pdw_c0 = 0.0;
    bool pdw_c0_given = false;
    std::vector<double> pdw_beta0;
    std::string pdw_out;
    auto* pdw_cmd = app.add_subcommand("pdw-check", "primal-dual witness diagnostic (JSON output)");
    add_data_options(pdw_cmd, pdw_data, "truth-");
    pdw_cmd->add_option("--support", pdw_support, "candidate support indices")
        ->delimiter(',')
        ->required();
    pdw_cmd->add_option("--lambda", pdw_lambda, "penalty level")->required();
    auto* c0_opt = pdw_cmd->add_option("--c0", pdw_c0, "proportionality constant (estimated if absent)");
    c0_opt->each([&pdw_c0_given](const std::string&) { pdw_c0_given = true; });
    pdw_cmd->add_option("--beta0-values", pdw_beta0,
                        "true coefficients on the support (required with --data)")
        ->delimiter(',');
    pdw_cmd->add_option("--out", pdw_out, "output path (stdout if absent)");

    // ---- conditions ----
    int cond_p = 0;
    double cond_rho = 0.0;
    bool cond_toeplitz = false;
    std::vector<int> cond_support;
    int cond_n = 0;
    std::string cond_out;
    auto* cond_cmd = app.add_subcommand("conditions", "theoretical condition report (JSON output)");
    cond_cmd->add_option("--p", cond_p, "dimension")->required();
    auto* cond_rho_opt = cond_cmd->add_option("--rho", cond_rho, "Toeplitz correlation");
    cond_rho_opt->each([&cond_toeplitz](const std::string&) { cond_toeplitz = true; });
    cond_cmd->add_option("--support", cond_support, "support indices")->delimiter(',')->required();
    cond_cmd->add_option("--n", cond_n, "sample size (fills the effective sample size)");
    cond_cmd->add_option("--out", cond_out, "output path (stdout if absent)");

    // ---- phase-transition ----
    std::string phase_config;
    std::string phase_out;
    int phase_threads = static_cast<int>(std::thread::hardware_concurrency());
    std::string phase_transform;
    auto* phase_cmd =
        app.add_subcommand("phase-transition", "Monte-Carlo phase-transition experiment (CSV)");
    phase_cmd->add_option("--config", phase_config, "experiment JSON config")->required();
    phase_cmd->add_option("--out", phase_out, "output CSV path")->required();
    phase_cmd->add_option("--threads", phase_threads, "worker count (default: hardware)");
    phase_cmd->add_option("--transform", phase_transform,
                          "override the config transform: none|cdf|cdf-centered");

    CLI11_PARSE(app, argc, argv);

    try {
        if (screen_cmd->parsed()) {
            const LoadedData data = materialize(screen_data);
            double nu = screen_nu;
            if (screen_auto) {
                const double sigma =
                    std::sqrt(data.y.squaredNorm() / static_cast<double>(data.y.size()));
                double beta_min = screen_beta_min;
                if (beta_min <= 0.0) {
                    if (!data.dataset.has_value()) {
                        throw CLI::ValidationError(
                            "--auto-nu with --data needs --beta-min");
                    }
                    beta_min = data.dataset->truth.min_magnitude();
                }
                nu = simrec::default_nu(beta_min, sigma);
            }
            const auto result = simrec::covariance_screen(data.x, data.y, nu);
            json doc;
            doc["nu"] = nu;
            doc["threshold"] = result.threshold;
            doc["v"] = std::vector<double>(result.v.data(), result.v.data() + result.v.size());
            doc["selected"] = support_to_json(result.selected);
            write_output(screen_out, doc.dump(2) + "\n");
        } else if (path_cmd->parsed()) {
            LoadedData data = materialize(path_data);
            Eigen::VectorXd y = maybe_transform(data.y, path_transform);
            if (path_center) center_in_place(data.x, y);
            const auto solution = simrec::path(data.x, y, path_grid, path_ratio);
            std::ostringstream csv;
            csv << "lambda,nnz,kkt_residual,support_hash\n";
            for (std::size_t i = 0; i < solution.fits.size(); ++i) {
                const auto& fitted = solution.fits[i];
                const auto support = simrec::SignedSupport::of(fitted.beta);
                csv << simrec::format_double(solution.grid[i]) << ',' << support.size() << ','
                    << simrec::format_double(fitted.kkt_residual) << ','
                    << format_hash(simrec::support_hash(support)) << '\n';
            }
            write_output(path_out, csv.str());
        } else if (cv_cmd->parsed()) {
            LoadedData data = materialize(cv_data);
            Eigen::VectorXd y = maybe_transform(data.y, cv_transform);
            if (cv_center) center_in_place(data.x, y);
            const double top = simrec::lambda_max(data.x, y);
            if (!(top > 0.0)) {
                throw std::runtime_error("response is orthogonal to every covariate");
            }
            std::vector<double> grid(static_cast<std::size_t>(cv_grid));
            for (int g = 0; g < cv_grid; ++g) {
                grid[static_cast<std::size_t>(g)] =
                    top * std::pow(cv_ratio, static_cast<double>(g) / (cv_grid - 1));
            }
            const double best = simrec::cross_validate(data.x, y, grid, cv_k, cv_seed);
            const auto fitted = simrec::fit(data.x, y, best);
            json doc;
            doc["k"] = cv_k;
            doc["grid"] = grid;
            doc["best_lambda"] = best;
            doc["nnz"] = simrec::SignedSupport::of(fitted.beta).size();
            write_output(cv_out, doc.dump(2) + "\n");
        } else if (pdw_cmd->parsed()) {
            // simulated truth defaults to the candidate support itself
            if (pdw_data.data_path.empty() && pdw_data.support.empty() && pdw_data.s == 0) {
                pdw_data.support = pdw_support;
            }
            const LoadedData data = materialize(pdw_data);
            simrec::PdwReport report;
            if (data.dataset.has_value()) {
                report = simrec::pdw_check(*data.dataset, pdw_support, pdw_lambda,
                                           pdw_c0_given ? std::optional<double>(pdw_c0)
                                                        : std::nullopt);
            } else {
                if (!pdw_c0_given || pdw_beta0.size() != pdw_support.size()) {
                    throw CLI::ValidationError(
                        "--data mode needs --c0 and --beta0-values aligned with --pdw-support");
                }
                Eigen::VectorXd scaled = Eigen::VectorXd::Zero(data.x.cols());
                for (std::size_t k = 0; k < pdw_support.size(); ++k) {
                    scaled[pdw_support[k]] = pdw_c0 * pdw_beta0[k];
                }
                report = simrec::pdw_check(data.x, data.y, pdw_support, pdw_lambda, scaled);
            }
            json doc;
            auto vec = [](const Eigen::VectorXd& v) {
                return std::vector<double>(v.data(), v.data() + v.size());
            };
            doc["restricted_beta"] = vec(report.restricted_beta);
            doc["subgradient"] = vec(report.subgradient);
            doc["z_values"] = vec(report.z_values);
            doc["delta_values"] = vec(report.delta_values);
            doc["max_abs_z"] = report.max_abs_z;
            doc["strict_dual_feasible"] = report.strict_dual_feasible;
            doc["sign_consistent"] = report.sign_consistent;
            write_output(pdw_out, doc.dump(2) + "\n");
        } else if (cond_cmd->parsed()) {
            const auto spec = cond_toeplitz ? simrec::CovarianceSpec::toeplitz(cond_p, cond_rho)
                                            : simrec::CovarianceSpec::identity(cond_p);
            const auto report = simrec::check_conditions(
                spec, cond_support, cond_n > 0 ? std::optional<int>(cond_n) : std::nullopt);
            json doc;
            doc["irrep_norm"] = report.irrep_norm;
            doc["kappa"] = report.kappa;
            doc["lambda_min"] = report.lambda_min;
            doc["lambda_max"] = report.lambda_max;
            doc["d_max_cond"] = report.d_max_cond;
            doc["rho_inf"] = report.rho_inf;
            doc["inv_sqrt_inf_norm"] = report.inv_sqrt_inf_norm;
            if (cond_n > 0) {
                doc["n_eff"] = report.n_eff;
            } else {
                doc["n_eff"] = nullptr;
            }
            write_output(cond_out, doc.dump(2) + "\n");
        } else if (phase_cmd->parsed()) {
            simrec::ExperimentConfig config = simrec::load_config(phase_config);
            if (!phase_transform.empty()) {
                if (phase_transform == "none") {
                    config.transform = simrec::ResponseTransform::None;
                } else if (phase_transform == "cdf") {
                    config.transform = simrec::ResponseTransform::Cdf;
                } else if (phase_transform == "cdf-centered") {
                    config.transform = simrec::ResponseTransform::CdfCentered;
                } else {
                    throw CLI::ValidationError("unknown transform: " + phase_transform);
                }
            }
            if (phase_threads < 1) phase_threads = 1;
            const auto curves = simrec::run_experiment(config, phase_threads, &std::cerr);
            simrec::emit_csv(curves, std::filesystem::path(phase_out));
            std::cerr << "[phase-transition] wrote " << phase_out << '\n';
        }
    } catch (const std::exception& failure) {
        std::cerr << "error: " << failure.what() << '\n';
        return 1;
    }
    return 0;
}
