#include "simrec/transforms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "simrec/errors.hpp"

namespace simrec {

TransformSpec TransformSpec::user_table(std::vector<std::pair<double, double>> entries) {
    if (entries.empty()) {
        throw std::invalid_argument("user table must be nonempty");
    }
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
        if (entries[i + 1].second < entries[i].second) {
            throw std::invalid_argument("user table values must be monotone nondecreasing");
        }
    }
    return {TransformKind::UserTable, std::move(entries)};
}

Eigen::VectorXd empirical_cdf(const Eigen::VectorXd& response) {
    const int n = static_cast<int>(response.size());
    if (n < 1) {
        throw std::invalid_argument("empirical cdf needs at least one sample");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&response](int a, int b) { return response[a] < response[b]; });

    // rank/n with average ranks over tied groups
    Eigen::VectorXd out(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && response[order[j + 1]] == response[order[i]]) ++j;
        const double avg_rank = static_cast<double>(i + 1 + j + 1) / 2.0;
        for (int k = i; k <= j; ++k) {
            out[order[k]] = avg_rank / static_cast<double>(n);
        }
        i = j + 1;
    }
    return out;
}

namespace {

double interpolate_table(const std::vector<std::pair<double, double>>& table, double y) {
    if (y <= table.front().first) return table.front().second;
    if (y >= table.back().first) return table.back().second;
    auto hi = std::upper_bound(table.begin(), table.end(), std::make_pair(y, 0.0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    auto lo = std::prev(hi);
    if (hi->first == lo->first) return lo->second;
    const double t = (y - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

}  // namespace

Eigen::VectorXd apply_transform(const Eigen::VectorXd& response, const TransformSpec& spec) {
    switch (spec.kind) {
        case TransformKind::Identity:
            return response;
        case TransformKind::EmpiricalCdf:
            return empirical_cdf(response);
        case TransformKind::UserTable: {
            if (spec.table.empty()) {
                throw std::invalid_argument("user table must be nonempty");
            }
            Eigen::VectorXd out(response.size());
            for (int i = 0; i < response.size(); ++i) {
                out[i] = interpolate_table(spec.table, response[i]);
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown transform kind");
}

Eigen::VectorXd centered_cdf_transform(const Eigen::VectorXd& response) {
    return empirical_cdf(response).array() - 0.5;
}

double variance_of_conditional_mean(const Dataset& data, int bins) {
    if (bins < 2) {
        throw std::invalid_argument("binned diagnostic needs at least two bins");
    }
    const int n = data.n();
    if (n < bins) {
        throw TooFewSamples("fewer samples than bins");
    }
    const Eigen::VectorXd index = data.design.data * data.truth.values;

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&data](int a, int b) { return data.response[a] < data.response[b]; });

    const double overall_mean = index.mean();
    double weighted_var = 0.0;
    for (int b = 0; b < bins; ++b) {
        const int begin = static_cast<int>(static_cast<long long>(b) * n / bins);
        const int end = static_cast<int>(static_cast<long long>(b + 1) * n / bins);
        if (end == begin) continue;
        double bin_mean = 0.0;
        for (int k = begin; k < end; ++k) {
            bin_mean += index[order[k]];
        }
        bin_mean /= static_cast<double>(end - begin);
        const double weight = static_cast<double>(end - begin) / static_cast<double>(n);
        weighted_var += weight * (bin_mean - overall_mean) * (bin_mean - overall_mean);
    }
    return weighted_var;
}

}  // namespace simrec
