#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical code paths; each function recomputes its quantity from first
// principles so it can check the implementation independently.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "fsgate/matrix.hpp"

namespace oracle {

// Rates recomputed by scanning (predicted, actual) pairs.
struct PairRates {
    double accuracy, specificity, sensitivity, precision, f1, mcc;
};

inline PairRates rates_from_pairs(const std::vector<std::pair<int, int>>& pairs)
{
    double correct = 0, neg = 0, neg_correct = 0, pos = 0, pos_correct = 0, pred_pos = 0, pred_pos_correct = 0;
    for (auto [pred, actual] : pairs) {
        if (pred == actual)
            correct += 1;
        if (actual == 0) {
            neg += 1;
            if (pred == 0)
                neg_correct += 1;
        } else {
            pos += 1;
            if (pred == 1)
                pos_correct += 1;
        }
        if (pred == 1) {
            pred_pos += 1;
            if (actual == 1)
                pred_pos_correct += 1;
        }
    }
    auto ratio = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
    PairRates r{};
    r.accuracy = ratio(correct, static_cast<double>(pairs.size()));
    r.specificity = ratio(neg_correct, neg);
    r.sensitivity = ratio(pos_correct, pos);
    r.precision = ratio(pred_pos_correct, pred_pos);
    r.f1 = ratio(2 * r.precision * r.sensitivity, r.precision + r.sensitivity);
    // MCC as the Pearson correlation of the two 0/1 vectors.
    const double n = static_cast<double>(pairs.size());
    double mp = 0, ma = 0;
    for (auto [p, a] : pairs) {
        mp += p;
        ma += a;
    }
    mp /= n;
    ma /= n;
    double cov = 0, vp = 0, va = 0;
    for (auto [p, a] : pairs) {
        cov += (p - mp) * (a - ma);
        vp += (p - mp) * (p - mp);
        va += (a - ma) * (a - ma);
    }
    r.mcc = (vp == 0 || va == 0) ? 0.0 : cov / std::sqrt(vp * va);
    return r;
}

// Mean binary log-loss written out with plain log().
inline double mean_log_loss(const std::vector<double>& q, const std::vector<int>& y)
{
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += y[i] == 1 ? -std::log(q[i]) : -std::log(1.0 - q[i]);
    return s / static_cast<double>(q.size());
}

// Squared pooled-variance two-sample t statistic.
inline double pooled_t_squared(std::span<const double> x, std::span<const int> y)
{
    double s[2] = {0, 0}, n[2] = {0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        s[y[i]] += x[i];
        n[y[i]] += 1;
    }
    const double m0 = s[0] / n[0], m1 = s[1] / n[1];
    double ss0 = 0, ss1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        (y[i] ? ss1 : ss0) += (x[i] - (y[i] ? m1 : m0)) * (x[i] - (y[i] ? m1 : m0));
    const double sp2 = (ss0 + ss1) / (n[0] + n[1] - 2);
    const double t = (m1 - m0) / std::sqrt(sp2 * (1 / n[0] + 1 / n[1]));
    return t * t;
}

// Direct (non-kernel) mean logistic NLL, row by row.
inline double logistic_nll(const fsgate::Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                           double b)
{
    double s = 0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < X.cols(); ++j)
            z += w[j] * X(i, j);
        const double q = 1.0 / (1.0 + std::exp(-z));
        s += y[i] ? -std::log(q) : -std::log(1.0 - q);
    }
    return s / static_cast<double>(X.rows());
}

// Central finite-difference gradient of logistic_nll; last entry is the
// intercept.
inline std::vector<double> fd_gradient(const fsgate::Matrix& X, const std::vector<int>& y, std::vector<double> w,
                                       double b, double h)
{
    std::vector<double> g(w.size() + 1);
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double keep = w[j];
        w[j] = keep + h;
        const double fp = logistic_nll(X, y, w, b);
        w[j] = keep - h;
        const double fm = logistic_nll(X, y, w, b);
        w[j] = keep;
        g[j] = (fp - fm) / (2 * h);
    }
    g.back() = (logistic_nll(X, y, w, b + h) - logistic_nll(X, y, w, b - h)) / (2 * h);
    return g;
}

// Solve psi(x) = target for x by bisection on a monotone function.
template <class F>
double bisect_inverse(F psi, double target, double lo, double hi, int iters = 200)
{
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline fsgate::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    fsgate::Matrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i)
            m(i, j) = nd(rng);
    return m;
}

// Labels with both classes present.
inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n)
{
    std::bernoulli_distribution coin(0.5);
    std::vector<int> y(n);
    for (auto& v : y)
        v = coin(rng) ? 1 : 0;
    y[0] = 0;
    y[1] = 1;
    return y;
}

} // namespace oracle
