#include <benchmark/benchmark.h>

#include "simrec/conditions.hpp"
#include "simrec/experiment.hpp"
#include "simrec/lasso.hpp"
#include "simrec/screening.hpp"
#include "simrec/sim_models.hpp"

using namespace simrec;

namespace {

Dataset make_dataset(int n, int p, int s, double rho) {
    const auto spec = rho > 0.0 ? CovarianceSpec::toeplitz(p, rho) : CovarianceSpec::identity(p);
    const auto beta = default_beta(spec, s);
    return generate(spec, beta, {Link::SinPlusLinear, 1.0}, n, 12345);
}

void BM_SampleDesign(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto spec = CovarianceSpec::toeplitz(p, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_design(spec, 1000, 7));
    }
    state.SetItemsProcessed(state.iterations() * 1000 * p);
}
BENCHMARK(BM_SampleDesign)->Arg(64)->Arg(256);

void BM_CovarianceScreen(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto data = make_dataset(2000, p, 8, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(covariance_screen(data, 3.0));
    }
}
BENCHMARK(BM_CovarianceScreen)->Arg(64)->Arg(256);

void BM_LassoFit(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto data = make_dataset(4 * p, p, 8, 0.5);
    const double lambda = 0.25 * lambda_max(data.design.data, data.response);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(data, lambda));
    }
}
BENCHMARK(BM_LassoFit)->Arg(64)->Arg(256);

void BM_LassoPath(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto data = make_dataset(4 * p, p, 8, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(path(data, 100, 1e-2));
    }
}
BENCHMARK(BM_LassoPath)->Arg(64)->Arg(256);

void BM_CheckConditions(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto spec = CovarianceSpec::toeplitz(p, 0.5);
    std::vector<int> support;
    for (int k = 0; k < 8; ++k) support.push_back(k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_conditions(spec, support));
    }
}
BENCHMARK(BM_CheckConditions)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
