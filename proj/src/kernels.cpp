#include "fsgate/kernels.hpp"

#include <cassert>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fsgate::kernels {

namespace {

// Per-row loss into loss_rows and residual q - y into r; z is kept.
inline void row_terms(std::span<const double> z, std::span<const double> y, std::span<double> r,
                      std::span<double> loss_rows, std::size_t begin, std::size_t end)
{
    for (std::size_t i = begin; i < end; ++i) {
        const double zi = z[i];
        loss_rows[i] = softplus(zi) - y[i] * zi;
        r[i] = sigmoid(zi) - y[i];
    }
}

inline double ordered_sum(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

} // namespace

namespace serial {

void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z)
{
    assert(w.size() == X.cols() && z.size() >= X.rows());
    const std::size_t n = X.rows();
    for (std::size_t i = 0; i < n; ++i)
        z[i] = b;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const double wj = w[j];
        if (wj == 0.0)
            continue;
        auto xj = X.col(j);
        for (std::size_t i = 0; i < n; ++i)
            z[i] += xj[i] * wj;
    }
}

double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch)
{
    const std::size_t n = X.rows();
    auto z = scratch.first(n);
    auto r = scratch.subspan(n, n);
    auto loss_rows = scratch.subspan(2 * n, n);
    linear_predictor(X, w, b, z);
    row_terms(z, y, r, loss_rows, 0, n);
    return ordered_sum(loss_rows) / static_cast<double>(n);
}

double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w, double& grad_b)
{
    const std::size_t n = X.rows();
    const double loss = logistic_loss(X, y, w, b, scratch);
    auto r = scratch.subspan(n, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < X.cols(); ++j) {
        auto xj = X.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += xj[i] * r[i];
        grad_w[j] = s * inv_n;
    }
    grad_b = ordered_sum(r) * inv_n;
    return loss;
}

} // namespace serial

namespace parallel {

void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z)
{
    assert(w.size() == X.cols() && z.size() >= X.rows());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
    const std::size_t p = X.cols();
#pragma omp parallel
    {
#ifdef _OPENMP
        const std::ptrdiff_t nt = omp_get_num_threads();
        const std::ptrdiff_t t = omp_get_thread_num();
#else
        const std::ptrdiff_t nt = 1;
        const std::ptrdiff_t t = 0;
#endif
        const std::ptrdiff_t begin = n * t / nt;
        const std::ptrdiff_t end = n * (t + 1) / nt;
        for (std::ptrdiff_t i = begin; i < end; ++i)
            z[static_cast<std::size_t>(i)] = b;
        for (std::size_t j = 0; j < p; ++j) {
            const double wj = w[j];
            if (wj == 0.0)
                continue;
            auto xj = X.col(j);
            for (std::ptrdiff_t i = begin; i < end; ++i)
                z[static_cast<std::size_t>(i)] += xj[static_cast<std::size_t>(i)] * wj;
        }
    }
}

double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch)
{
    const std::size_t n = X.rows();
    auto z = scratch.first(n);
    auto r = scratch.subspan(n, n);
    auto loss_rows = scratch.subspan(2 * n, n);
    linear_predictor(X, w, b, z);
    const auto ni = static_cast<std::ptrdiff_t>(n);
    constexpr std::ptrdiff_t kChunk = 256;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < (ni + kChunk - 1) / kChunk; ++c) {
        const auto begin = static_cast<std::size_t>(c * kChunk);
        const auto end = std::min(n, begin + static_cast<std::size_t>(kChunk));
        row_terms(z, y, r, loss_rows, begin, end);
    }
    return ordered_sum(loss_rows) / static_cast<double>(n);
}

double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w, double& grad_b)
{
    const std::size_t n = X.rows();
    const double loss = logistic_loss(X, y, w, b, scratch);
    auto r = scratch.subspan(n, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto p = static_cast<std::ptrdiff_t>(X.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < p; ++j) {
        auto xj = X.col(static_cast<std::size_t>(j));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += xj[i] * r[i];
        grad_w[static_cast<std::size_t>(j)] = s * inv_n;
    }
    grad_b = ordered_sum(r) * inv_n;
    return loss;
}

} // namespace parallel

void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z, Exec exec)
{
    if (exec == Exec::parallel)
        parallel::linear_predictor(X, w, b, z);
    else
        serial::linear_predictor(X, w, b, z);
}

double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch, Exec exec)
{
    return exec == Exec::parallel ? parallel::logistic_loss(X, y, w, b, scratch)
                                  : serial::logistic_loss(X, y, w, b, scratch);
}

double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w, double& grad_b,
                          Exec exec)
{
    return exec == Exec::parallel ? parallel::logistic_loss_grad(X, y, w, b, scratch, grad_w, grad_b)
                                  : serial::logistic_loss_grad(X, y, w, b, scratch, grad_w, grad_b);
}

} // namespace fsgate::kernels
