#pragma once

#include <cmath>
#include <span>

#include "fsgate/exec.hpp"
#include "fsgate/matrix.hpp"

// Hot loops of the logistic solver. Each kernel has a serial reference and an
// OpenMP version; the parallel one splits rows (for the linear predictor and
// per-row losses) or columns (for the gradient) and finishes every reduction
// serially in index order, so results match the reference bit for bit.
namespace fsgate::kernels {

// z[i] = b + sum_j X(i, j) * w[j], accumulated column by column.
void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z,
                      Exec exec);

// Mean logistic loss (1/N) sum softplus(z_i) - y_i z_i. `scratch` holds 3N
// values: the linear predictor z, the residuals q_i - y_i, then per-row losses.
double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch, Exec exec);

// Loss plus its gradient: grad_w = (1/N) X^T (q - y), grad_b = (1/N) sum (q - y).
double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w, double& grad_b,
                          Exec exec);

namespace serial {
void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z);
double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch);
double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w,
                          double& grad_b);
} // namespace serial

namespace parallel {
void linear_predictor(const Matrix& X, std::span<const double> w, double b, std::span<double> z);
double logistic_loss(const Matrix& X, std::span<const double> y, std::span<const double> w, double b,
                     std::span<double> scratch);
double logistic_loss_grad(const Matrix& X, std::span<const double> y, std::span<const double> w,
                          double b, std::span<double> scratch, std::span<double> grad_w,
                          double& grad_b);
} // namespace parallel

// Numerically stable log(1 + exp(z)).
inline double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace fsgate::kernels
