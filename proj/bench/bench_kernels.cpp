#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fsgate/kernels.hpp"
#include "fsgate/preprocess.hpp"

using namespace fsgate;

namespace {

struct Problem {
    Matrix X;
    std::vector<double> y, w, scratch, grad;
};

Problem make_problem(std::size_t rows, std::size_t cols)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Problem p{Matrix(rows, cols), std::vector<double>(rows), std::vector<double>(cols),
              std::vector<double>(3 * rows), std::vector<double>(cols)};
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i)
            p.X(i, j) = nd(rng);
    for (auto& v : p.y)
        v = nd(rng) > 0 ? 1.0 : 0.0;
    for (auto& v : p.w)
        v = 0.1 * nd(rng);
    return p;
}

void loss_grad(benchmark::State& state, Exec exec)
{
    auto p = make_problem(static_cast<std::size_t>(state.range(0)), 26);
    double gb = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::logistic_loss_grad(p.X, p.y, p.w, 0.1, p.scratch, p.grad, gb, exec));
}

void preprocess_fit(benchmark::State& state, Exec exec)
{
    auto p = make_problem(static_cast<std::size_t>(state.range(0)), 26);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit(p.X, exec));
}

} // namespace

BENCHMARK_CAPTURE(loss_grad, serial, Exec::serial)->Arg(780)->Arg(10000);
BENCHMARK_CAPTURE(loss_grad, parallel, Exec::parallel)->Arg(780)->Arg(10000);
BENCHMARK_CAPTURE(preprocess_fit, serial, Exec::serial)->Arg(780);
BENCHMARK_CAPTURE(preprocess_fit, parallel, Exec::parallel)->Arg(780);

BENCHMARK_MAIN();
