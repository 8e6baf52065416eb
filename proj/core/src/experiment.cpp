#include "simrec/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "simrec/conditions.hpp"
#include "simrec/errors.hpp"
#include "simrec/lasso.hpp"
#include "simrec/rng.hpp"
#include "simrec/screening.hpp"
#include "simrec/transforms.hpp"

namespace simrec {

int SparsityRule::s_for(int p) const {
    if (sqrt_p) {
        return static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
    }
    return fixed_s;
}

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw std::runtime_error("double formatting failed");
    }
    return std::string(buffer, ptr);
}

bool success_metric(const SignedSupport& estimated, const SignedSupport& truth) {
    return estimated == truth;
}

CoefficientVector default_beta(const CovarianceSpec& spec, int s) {
    if (s < 1 || s > spec.dim()) {
        throw std::invalid_argument("sparsity out of range");
    }
    std::vector<int> indices(static_cast<std::size_t>(s));
    std::vector<int> signs(static_cast<std::size_t>(s), 1);
    for (int k = 0; k < s; ++k) indices[static_cast<std::size_t>(k)] = k;
    signs[0] = -1;
    return make_beta(spec, indices, signs);
}

namespace {

using nlohmann::json;

CovarianceKind parse_cov_kind(const std::string& name) {
    if (name == "identity") return CovarianceKind::Identity;
    if (name == "toeplitz") return CovarianceKind::Toeplitz;
    throw std::invalid_argument("unknown covariance kind in config: " + name);
}

void parse_covariance(const json& node, ExperimentConfig& config) {
    if (node.is_string()) {
        config.covariance_kind = parse_cov_kind(node.get<std::string>());
    } else if (node.is_array()) {
        // compact form: ["identity"] or ["toeplitz", rho]
        config.covariance_kind = parse_cov_kind(node.at(0).get<std::string>());
        if (config.covariance_kind == CovarianceKind::Toeplitz) {
            config.covariance_rho = node.at(1).get<double>();
        }
    } else {
        config.covariance_kind = parse_cov_kind(node.at("kind").get<std::string>());
        if (config.covariance_kind == CovarianceKind::Toeplitz) {
            config.covariance_rho = node.at("rho").get<double>();
        }
    }
}

void parse_method(const json& node, MethodSpec& method) {
    std::string kind;
    if (node.is_string()) {
        kind = node.get<std::string>();
    } else {
        kind = node.at("kind").get<std::string>();
    }
    if (kind == "screening_auto") {
        method.kind = RecoveryMethod::ScreeningAuto;
    } else if (kind == "screening_nu") {
        method.kind = RecoveryMethod::ScreeningNu;
        method.nu = node.at("nu").get<double>();
    } else if (kind == "lasso_path_contains") {
        method.kind = RecoveryMethod::LassoPathContains;
    } else if (kind == "lasso_lambda_t") {
        method.kind = RecoveryMethod::LassoAtLambdaT;
    } else if (kind == "lasso_cv") {
        method.kind = RecoveryMethod::LassoCv;
    } else {
        throw std::invalid_argument("unknown method kind in config: " + kind);
    }
    if (node.is_object()) {
        if (node.contains("grid_size")) method.grid_size = node.at("grid_size").get<int>();
        if (node.contains("lambda_min_ratio")) {
            method.lambda_min_ratio = node.at("lambda_min_ratio").get<double>();
        }
        if (node.contains("c_t")) method.c_t = node.at("c_t").get<double>();
        if (node.contains("folds")) method.cv_folds = node.at("folds").get<int>();
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    const json doc = json::parse(json_text);
    ExperimentConfig config;

    config.p_values = doc.at("p_values").get<std::vector<int>>();
    if (config.p_values.empty()) {
        throw std::invalid_argument("config needs at least one p value");
    }

    const json& s_rule = doc.at("s_rule");
    if (s_rule.is_string()) {
        if (s_rule.get<std::string>() != "sqrt_p") {
            throw std::invalid_argument("string s_rule must be \"sqrt_p\"");
        }
        config.s_rule.sqrt_p = true;
    } else {
        const std::string kind = s_rule.at("kind").get<std::string>();
        if (kind == "sqrt_p") {
            config.s_rule.sqrt_p = true;
        } else if (kind == "fixed") {
            config.s_rule.sqrt_p = false;
            config.s_rule.fixed_s = s_rule.at("s").get<int>();
        } else {
            throw std::invalid_argument("unknown s_rule kind: " + kind);
        }
    }

    parse_covariance(doc.at("covariance"), config);

    const json& model = doc.at("model");
    if (model.is_string()) {
        config.model.link = link_from_name(model.get<std::string>());
    } else {
        config.model.link = link_from_name(model.at("link").get<std::string>());
        if (model.contains("noise_scale")) {
            config.model.noise_scale = model.at("noise_scale").get<double>();
        }
    }

    config.n_eff_grid = doc.at("n_eff_grid").get<std::vector<double>>();
    if (config.n_eff_grid.empty()) {
        throw std::invalid_argument("config needs a nonempty n_eff grid");
    }
    for (std::size_t i = 0; i < config.n_eff_grid.size(); ++i) {
        if (!(config.n_eff_grid[i] > 0.0)) {
            throw std::invalid_argument("n_eff grid values must be positive");
        }
        if (i > 0 && config.n_eff_grid[i] <= config.n_eff_grid[i - 1]) {
            throw std::invalid_argument("n_eff grid must be ascending");
        }
    }

    if (doc.contains("replicates")) config.replicates = doc.at("replicates").get<int>();
    if (config.replicates < 1) {
        throw std::invalid_argument("replicates must be >= 1");
    }

    if (doc.contains("method")) parse_method(doc.at("method"), config.method);

    if (doc.contains("transform")) {
        const std::string name = doc.at("transform").get<std::string>();
        if (name == "none") {
            config.transform = ResponseTransform::None;
        } else if (name == "cdf") {
            config.transform = ResponseTransform::Cdf;
        } else if (name == "cdf-centered") {
            config.transform = ResponseTransform::CdfCentered;
        } else {
            throw std::invalid_argument("unknown transform name: " + name);
        }
    }

    if (doc.contains("master_seed")) config.master_seed = doc.at("master_seed").get<std::uint64_t>();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

struct ProblemContext {
    int p = 0;
    int s = 0;
    CovarianceSpec covariance = CovarianceSpec::identity(1);
    CoefficientVector beta;
    SignedSupport target;  // S_pm(sign(c0) * beta0)
};

Eigen::VectorXd working_response(const Eigen::VectorXd& raw, ResponseTransform transform) {
    switch (transform) {
        case ResponseTransform::None:
            return raw;
        case ResponseTransform::Cdf:
            return empirical_cdf(raw);
        case ResponseTransform::CdfCentered:
            return centered_cdf_transform(raw);
    }
    throw std::invalid_argument("unknown transform");
}

bool run_replicate(const ExperimentConfig& config, const ProblemContext& context, int n,
                   std::uint64_t seed) {
    const Dataset data = generate(context.covariance, context.beta, config.model, n, seed);
    const Eigen::VectorXd y = working_response(data.response, config.transform);
    const Eigen::MatrixXd& x = data.design.data;
    const double nd = static_cast<double>(n);

    switch (config.method.kind) {
        case RecoveryMethod::ScreeningAuto: {
            const double sigma = std::sqrt(y.squaredNorm() / nd);
            const double nu = default_nu(context.beta.min_magnitude(), sigma);
            return success_metric(covariance_screen(x, y, nu).selected, context.target);
        }
        case RecoveryMethod::ScreeningNu: {
            return success_metric(covariance_screen(x, y, config.method.nu).selected,
                                  context.target);
        }
        case RecoveryMethod::LassoPathContains: {
            const LassoPath solution_path =
                path(x, y, config.method.grid_size, config.method.lambda_min_ratio);
            return path_contains_true_support(solution_path, context.target).has_value();
        }
        case RecoveryMethod::LassoAtLambdaT: {
            std::vector<int> support;
            support.reserve(context.target.size());
            for (const auto& e : context.target.entries()) support.push_back(e.index);
            const ConditionReport report = check_conditions(context.covariance, support, n);
            if (!(report.kappa > 0.0)) return false;
            const double c0_hat = y.dot(x * context.beta.values) / nd;
            const double xi2_hat = (y - c0_hat * (x * context.beta.values)).squaredNorm() / nd;
            const double lambda = theoretical_lambda(xi2_hat, config.method.c_t, report.d_max_cond,
                                                     report.kappa, n, context.p, context.s);
            const LassoFit fitted = fit(x, y, lambda);
            return fitted.converged && success_metric(SignedSupport::of(fitted.beta), context.target);
        }
        case RecoveryMethod::LassoCv: {
            const double top = lambda_max(x, y);
            if (!(top > 0.0)) return context.target.empty();
            std::vector<double> grid(static_cast<std::size_t>(config.method.grid_size));
            for (int i = 0; i < config.method.grid_size; ++i) {
                grid[static_cast<std::size_t>(i)] =
                    top * std::pow(config.method.lambda_min_ratio,
                                   static_cast<double>(i) /
                                       static_cast<double>(config.method.grid_size - 1));
            }
            const double best =
                cross_validate(x, y, grid, config.method.cv_folds, derive_seed(seed, {3}));
            const LassoFit fitted = fit(x, y, best);
            return fitted.converged && success_metric(SignedSupport::of(fitted.beta), context.target);
        }
    }
    throw std::invalid_argument("unknown recovery method");
}

}  // namespace

std::vector<PhaseCurve> run_experiment(const ExperimentConfig& config, int threads,
                                       std::ostream* progress) {
    if (threads < 1) {
        throw std::invalid_argument("thread count must be >= 1");
    }
    if (config.replicates < 1) {
        throw std::invalid_argument("replicates must be >= 1");
    }
    if (config.p_values.empty() || config.n_eff_grid.empty()) {
        throw std::invalid_argument("experiment needs p values and an n_eff grid");
    }

    std::vector<ProblemContext> contexts;
    contexts.reserve(config.p_values.size());
    for (int p : config.p_values) {
        ProblemContext context;
        context.p = p;
        context.s = config.s_rule.s_for(p);
        if (context.s < 1 || p - context.s < 2) {
            throw BadShape("phase experiment needs 1 <= s and p - s >= 2");
        }
        context.covariance =
            config.covariance_kind == CovarianceKind::Toeplitz
                ? CovarianceSpec::toeplitz(p, config.covariance_rho)
                : CovarianceSpec::identity(p);
        context.beta = default_beta(context.covariance, context.s);
        context.target = population_c0_sign(config.model.link) > 0
                             ? context.beta.support
                             : context.beta.support.negated();
        contexts.push_back(std::move(context));
    }

    struct WorkItem {
        int p_idx;
        int g_idx;
        int rep;
    };
    const int grid_points = static_cast<int>(config.n_eff_grid.size());
    std::vector<WorkItem> items;
    items.reserve(contexts.size() * static_cast<std::size_t>(grid_points) *
                  static_cast<std::size_t>(config.replicates));
    std::vector<std::vector<int>> n_values(contexts.size(),
                                           std::vector<int>(static_cast<std::size_t>(grid_points)));
    for (std::size_t pi = 0; pi < contexts.size(); ++pi) {
        for (int g = 0; g < grid_points; ++g) {
            n_values[pi][static_cast<std::size_t>(g)] =
                sample_size_for(config.n_eff_grid[static_cast<std::size_t>(g)], contexts[pi].p,
                                contexts[pi].s);
            for (int r = 0; r < config.replicates; ++r) {
                items.push_back({static_cast<int>(pi), g, r});
            }
        }
    }

    // One result slot per replicate: aggregation is a sum of flags, so the
    // outcome does not depend on scheduling.
    const std::size_t points = contexts.size() * static_cast<std::size_t>(grid_points);
    std::vector<std::uint8_t> successes(items.size(), 0);
    std::unique_ptr<std::atomic<int>[]> completed(new std::atomic<int>[points]);
    for (std::size_t i = 0; i < points; ++i) completed[i] = 0;

    std::atomic<std::size_t> cursor{0};
    std::mutex log_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= items.size()) break;
            const WorkItem item = items[idx];
            const ProblemContext& context = contexts[static_cast<std::size_t>(item.p_idx)];
            const int n = n_values[static_cast<std::size_t>(item.p_idx)]
                                  [static_cast<std::size_t>(item.g_idx)];
            const std::uint64_t seed =
                derive_seed(config.master_seed,
                            {static_cast<std::uint64_t>(context.p), static_cast<std::uint64_t>(item.g_idx),
                             static_cast<std::uint64_t>(item.rep)});
            bool ok = false;
            try {
                ok = run_replicate(config, context, n, seed);
            } catch (const std::exception& failure) {
                if (progress != nullptr) {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    *progress << "[phase-transition] replicate failed (p=" << context.p
                              << ", n=" << n << ", rep=" << item.rep << "): " << failure.what()
                              << '\n';
                }
            }
            successes[idx] = ok ? 1 : 0;

            const std::size_t point_idx = static_cast<std::size_t>(item.p_idx) *
                                              static_cast<std::size_t>(grid_points) +
                                          static_cast<std::size_t>(item.g_idx);
            const int done = completed[point_idx].fetch_add(1) + 1;
            if (done == config.replicates && progress != nullptr) {
                std::lock_guard<std::mutex> lock(log_mutex);
                *progress << "[phase-transition] p=" << context.p << " s=" << context.s
                          << " n_eff=" << config.n_eff_grid[static_cast<std::size_t>(item.g_idx)]
                          << " n=" << n << " finished\n";
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    std::vector<PhaseCurve> curves;
    curves.reserve(contexts.size());
    std::size_t flat = 0;
    for (std::size_t pi = 0; pi < contexts.size(); ++pi) {
        PhaseCurve curve;
        curve.p = contexts[pi].p;
        curve.s = contexts[pi].s;
        for (int g = 0; g < grid_points; ++g) {
            int wins = 0;
            for (int r = 0; r < config.replicates; ++r) {
                wins += successes[flat++];
            }
            curve.points.push_back({config.n_eff_grid[static_cast<std::size_t>(g)],
                                    n_values[pi][static_cast<std::size_t>(g)],
                                    static_cast<double>(wins) / static_cast<double>(config.replicates),
                                    config.replicates});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

void emit_csv(const std::vector<PhaseCurve>& curves, std::ostream& out) {
    std::vector<const PhaseCurve*> ordered;
    ordered.reserve(curves.size());
    for (const auto& curve : curves) ordered.push_back(&curve);
    std::sort(ordered.begin(), ordered.end(),
              [](const PhaseCurve* a, const PhaseCurve* b) { return a->p < b->p; });

    out << "p,s,n_eff,n,replicates,success_fraction\n";
    for (const PhaseCurve* curve : ordered) {
        std::vector<const PhasePoint*> points;
        points.reserve(curve->points.size());
        for (const auto& point : curve->points) points.push_back(&point);
        std::sort(points.begin(), points.end(), [](const PhasePoint* a, const PhasePoint* b) {
            return a->n_eff_target < b->n_eff_target;
        });
        for (const PhasePoint* point : points) {
            out << curve->p << ',' << curve->s << ',' << format_double(point->n_eff_target) << ','
                << point->n << ',' << point->replicates << ','
                << format_double(point->success_fraction) << '\n';
        }
    }
}

void emit_csv(const std::vector<PhaseCurve>& curves, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path.string());
    }
    emit_csv(curves, out);
}

}  // namespace simrec
