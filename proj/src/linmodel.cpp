#include "fsgate/linmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fsgate/error.hpp"
#include "fsgate/kernels.hpp"

namespace fsgate {

namespace {

void check_inputs(const Matrix& X, std::span<const int> y)
{
    if (X.rows() != y.size())
        throw InputError("matrix has " + std::to_string(X.rows()) + " rows but label vector has " +
                         std::to_string(y.size()));
    for (std::size_t j = 0; j < X.cols(); ++j)
        for (double v : X.col(j))
            if (!std::isfinite(v))
                throw InputError("non-finite entry in feature column " + std::to_string(j));
    for (int v : y)
        if (v != 0 && v != 1)
            throw InputError("labels must be 0 or 1");
}

void check_two_classes(std::span<const int> y)
{
    if (y.size() < 2)
        throw InputError("training needs at least 2 rows");
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    if (!has0 || !has1)
        throw InputError("training labels contain a single class");
}

std::vector<double> to_double(std::span<const int> y)
{
    return {y.begin(), y.end()};
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double l1_norm(std::span<const double> a)
{
    double s = 0.0;
    for (double v : a)
        s += std::fabs(v);
    return s;
}

// sp(z + d) - sp(z) for sp = softplus, accurate relative to the difference.
double softplus_change(double z, double d)
{
    if (std::fabs(d) > 30.0)
        return kernels::softplus(z + d) - kernels::softplus(z);
    if (z > 0.0)
        return d + std::log1p(kernels::sigmoid(-z) * std::expm1(-d));
    return std::log1p(kernels::sigmoid(z) * std::expm1(d));
}

// Smooth part of the objective: mean NLL + (ridge/2)||w||^2, with gradient.
// Near the optimum the decrease a step must show falls below the rounding
// error of the objective itself; `change` then measures it directly from the
// step instead of subtracting two nearly equal losses.
struct SmoothObjective {
    const Matrix& X;
    std::vector<double> y;
    double ridge;
    Exec exec;
    std::vector<double> scratch;
    std::vector<double> z_current;
    std::vector<double> dz;
    std::vector<double> dw;

    SmoothObjective(const Matrix& X_, std::span<const int> labels, double ridge_, Exec exec_)
        : X(X_), y(to_double(labels)), ridge(ridge_), exec(exec_), scratch(3 * X_.rows()),
          z_current(X_.rows()), dz(X_.rows()), dw(X_.cols())
    {
    }

    double value_grad(std::span<const double> w, double b, std::span<double> gw, double& gb)
    {
        double f = kernels::logistic_loss_grad(X, y, w, b, scratch, gw, gb, exec);
        if (ridge > 0.0) {
            f += 0.5 * ridge * dot(w, w);
            for (std::size_t j = 0; j < w.size(); ++j)
                gw[j] += ridge * w[j];
        }
        return f;
    }

    // The last value_grad point becomes the current iterate.
    void commit() { std::copy_n(scratch.begin(), z_current.size(), z_current.begin()); }

    // Objective change from the committed point (w, b) to (w_new, b_new).
    double change(std::span<const double> w, double b, std::span<const double> w_new, double b_new)
    {
        for (std::size_t j = 0; j < dw.size(); ++j)
            dw[j] = w_new[j] - w[j];
        kernels::linear_predictor(X, dw, b_new - b, dz, exec);
        double s = 0.0;
        for (std::size_t i = 0; i < dz.size(); ++i)
            s += softplus_change(z_current[i], dz[i]) - y[i] * dz[i];
        double d = s / static_cast<double>(dz.size());
        if (ridge > 0.0) {
            double r = 0.0;
            for (std::size_t j = 0; j < dw.size(); ++j)
                r += dw[j] * (w_new[j] + w[j]);
            d += 0.5 * ridge * r;
        }
        return d;
    }
};

// 1 / (trace bound on the Lipschitz constant of the smooth gradient).
double initial_step(const Matrix& X, double ridge)
{
    const double n = static_cast<double>(X.rows());
    double trace = 1.0; // intercept column
    for (std::size_t j = 0; j < X.cols(); ++j)
        trace += dot(X.col(j), X.col(j)) / n;
    return 1.0 / (0.25 * trace + ridge);
}

constexpr double kMinStepFraction = 1e-18;
constexpr double kStepGrowthCap = 1e6;

// Sufficient-decrease test. Returns the accepted objective value, or nullopt.
// `bound` is the largest allowed change f_new - f.
std::optional<double> accept_step(SmoothObjective& obj, double f, double f_new, double bound,
                                  std::span<const double> w, double b, std::span<const double> w_new,
                                  double b_new)
{
    if (f_new - f <= bound)
        return f_new;
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::fabs(f) + 1.0);
    if (f_new - f > bound + noise)
        return std::nullopt;
    const double d = obj.change(w, b, w_new, b_new);
    if (d <= bound && d <= 0.0)
        return f + d;
    return std::nullopt;
}

LogisticModel train_smooth(const Matrix& X, std::span<const int> labels, const SolverOptions& opts,
                           std::vector<double> w, double b)
{
    const std::size_t p = X.cols();
    SmoothObjective obj(X, labels, opts.ridge, opts.exec);
    LogisticModel m;
    m.penalty = PenaltySpec::none();

    std::vector<double> gw(p), gw_new(p), w_new(p);
    double gb = 0.0;
    double gb_new = 0.0;
    double f = obj.value_grad(w, b, gw, gb);
    obj.commit();
    const double t0 = initial_step(X, opts.ridge);
    // The local curvature is often far below the global bound behind t0;
    // backtracking keeps long steps honest.
    const double t_max = kStepGrowthCap * t0;
    double t = t0;
    if (opts.record_history)
        m.objective_history.push_back(f);

    auto grad_norm = [&] { return std::sqrt(dot(gw, gw) + gb * gb); };
    double gnorm = grad_norm();
    while (gnorm > opts.tolerance && m.iterations < opts.max_iters) {
        const double g2 = gnorm * gnorm;
        std::optional<double> f_next;
        double b_new = b;
        bool backtracked = false;
        while (t >= kMinStepFraction * t0) {
            for (std::size_t j = 0; j < p; ++j)
                w_new[j] = w[j] - t * gw[j];
            b_new = b - t * gb;
            const double f_new = obj.value_grad(w_new, b_new, gw_new, gb_new);
            f_next = accept_step(obj, f, f_new, -0.5 * t * g2, w, b, w_new, b_new);
            if (f_next)
                break;
            t *= 0.5;
            backtracked = true;
        }
        if (!f_next)
            break; // no representable descent step remains
        obj.commit();
        std::swap(w, w_new);
        std::swap(gw, gw_new);
        b = b_new;
        gb = gb_new;
        f = *f_next;
        ++m.iterations;
        if (opts.record_history)
            m.objective_history.push_back(f);
        gnorm = grad_norm();
        if (!backtracked)
            t = std::min(2.0 * t, t_max);
    }
    m.weights = std::move(w);
    m.intercept = b;
    m.final_gradient_norm = gnorm;
    m.converged = gnorm <= opts.tolerance;
    return m;
}

LogisticModel train_l1(const Matrix& X, std::span<const int> labels, double lambda,
                       const SolverOptions& opts, std::vector<double> w, double b)
{
    const std::size_t p = X.cols();
    SmoothObjective obj(X, labels, opts.ridge, opts.exec);
    LogisticModel m;
    m.penalty = PenaltySpec::l1(lambda);

    std::vector<double> gw(p), gw_new(p), w_new(p);
    double gb = 0.0;
    double gb_new = 0.0;
    double f = obj.value_grad(w, b, gw, gb);
    obj.commit();
    const double t0 = initial_step(X, opts.ridge);
    const double t_max = kStepGrowthCap * t0;
    double t = t0;
    if (opts.record_history)
        m.objective_history.push_back(f + lambda * l1_norm(w));

    double mapping_norm = std::numeric_limits<double>::infinity();
    while (m.iterations < opts.max_iters) {
        std::optional<double> f_next;
        double b_new = b;
        double step_sq = 0.0;
        bool backtracked = false;
        while (t >= kMinStepFraction * t0) {
            double linear = 0.0;
            step_sq = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                w_new[j] = soft_threshold(w[j] - t * gw[j], t * lambda);
                const double d = w_new[j] - w[j];
                linear += gw[j] * d;
                step_sq += d * d;
            }
            b_new = b - t * gb;
            const double db = b_new - b;
            linear += gb * db;
            step_sq += db * db;
            const double f_new = obj.value_grad(w_new, b_new, gw_new, gb_new);
            f_next = accept_step(obj, f, f_new, linear + step_sq / (2.0 * t), w, b, w_new, b_new);
            if (f_next)
                break;
            t *= 0.5;
            backtracked = true;
        }
        if (!f_next)
            break;
        mapping_norm = std::sqrt(step_sq) / t;
        obj.commit();
        std::swap(w, w_new);
        std::swap(gw, gw_new);
        b = b_new;
        gb = gb_new;
        f = *f_next;
        ++m.iterations;
        if (opts.record_history)
            m.objective_history.push_back(f + lambda * l1_norm(w));
        if (mapping_norm <= opts.tolerance)
            break;
        if (!backtracked)
            t = std::min(2.0 * t, t_max);
    }
    m.weights = std::move(w);
    m.intercept = b;
    m.final_gradient_norm = mapping_norm;
    m.converged = mapping_norm <= opts.tolerance;
    return m;
}

double mean_label(std::span<const int> y)
{
    double s = 0.0;
    for (int v : y)
        s += v;
    return s / static_cast<double>(y.size());
}

} // namespace

double soft_threshold(double v, double t)
{
    const double a = std::fabs(v) - t;
    if (a <= 0.0)
        return 0.0;
    return std::copysign(a, v);
}

LogisticModel train(const Matrix& X, std::span<const int> y, const PenaltySpec& penalty,
                    const SolverOptions& opts, std::optional<WarmStart> warm)
{
    check_inputs(X, y);
    check_two_classes(y);
    if (penalty.kind == PenaltyKind::none && penalty.strength != 0.0)
        throw InputError("penalty strength must be 0 when no penalty is used");
    if (penalty.strength < 0.0 || opts.ridge < 0.0)
        throw InputError("penalty strengths must be non-negative");

    std::vector<double> w(X.cols(), 0.0);
    double b = 0.0;
    if (warm) {
        if (warm->weights.size() != X.cols())
            throw InputError("warm start has wrong dimension");
        w.assign(warm->weights.begin(), warm->weights.end());
        b = warm->intercept;
    }
    // Past lambda_max the intercept-only model satisfies the optimality
    // conditions; return it exactly instead of iterating towards it.
    if (penalty.kind == PenaltyKind::l1 && penalty.strength >= lambda_max(X, y)) {
        const double ybar = mean_label(y);
        LogisticModel m;
        m.penalty = penalty;
        m.weights.assign(X.cols(), 0.0);
        m.intercept = std::log(ybar / (1.0 - ybar));
        m.converged = true;
        if (opts.record_history)
            m.objective_history.push_back(nll_loss(m.weights, m.intercept, X, y));
        return m;
    }
    if (penalty.kind == PenaltyKind::l1)
        return train_l1(X, y, penalty.strength, opts, std::move(w), b);
    return train_smooth(X, y, opts, std::move(w), b);
}

std::vector<double> predict_proba(const LogisticModel& m, const Matrix& X)
{
    if (X.cols() != m.weights.size())
        throw InputError("model has " + std::to_string(m.weights.size()) + " weights, matrix has " +
                         std::to_string(X.cols()) + " columns");
    std::vector<double> q(X.rows());
    kernels::serial::linear_predictor(X, m.weights, m.intercept, q);
    for (auto& v : q)
        v = std::clamp(kernels::sigmoid(v), kProbabilityClip, 1.0 - kProbabilityClip);
    return q;
}

double nll_loss(std::span<const double> w, double b, const Matrix& X, std::span<const int> y)
{
    check_inputs(X, y);
    if (w.size() != X.cols())
        throw InputError("weight vector does not match matrix columns");
    const auto yd = to_double(y);
    std::vector<double> scratch(3 * X.rows());
    return kernels::serial::logistic_loss(X, yd, w, b, scratch);
}

Gradient nll_gradient(std::span<const double> w, double b, const Matrix& X, std::span<const int> y)
{
    check_inputs(X, y);
    if (w.size() != X.cols())
        throw InputError("weight vector does not match matrix columns");
    const auto yd = to_double(y);
    std::vector<double> scratch(3 * X.rows());
    Gradient g;
    g.weights.resize(X.cols());
    kernels::serial::logistic_loss_grad(X, yd, w, b, scratch, g.weights, g.intercept);
    return g;
}

double lambda_max(const Matrix& X, std::span<const int> y)
{
    check_inputs(X, y);
    const double ybar = mean_label(y);
    const double n = static_cast<double>(X.rows());
    double best = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        auto xj = X.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < xj.size(); ++i)
            s += xj[i] * (static_cast<double>(y[i]) - ybar);
        best = std::max(best, std::fabs(s / n));
    }
    return best;
}

std::vector<PathPoint> regularization_path(const Matrix& X, std::span<const int> y, const PathOptions& opts)
{
    check_inputs(X, y);
    check_two_classes(y);
    if (opts.n_lambdas < 1)
        throw InputError("regularization path needs at least one lambda");
    if (!(opts.ratio > 0.0 && opts.ratio <= 1.0))
        throw InputError("lambda ratio must lie in (0, 1]");

    const double lmax = lambda_max(X, y);
    const double ybar = mean_label(y);
    std::vector<PathPoint> path;
    path.reserve(static_cast<std::size_t>(opts.n_lambdas));

    // At lambda_max the intercept-only model is optimal: q = mean(y) makes every
    // weight's subgradient condition |X_j^T (q - y)| / N <= lambda hold.
    PathPoint first;
    first.lambda = lmax;
    first.weights.assign(X.cols(), 0.0);
    first.intercept = std::log(ybar / (1.0 - ybar));
    path.push_back(first);

    for (int k = 1; k < opts.n_lambdas; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(opts.n_lambdas - 1);
        const double lambda = lmax * std::pow(opts.ratio, frac);
        const auto& prev = path.back();
        auto m = train(X, y, PenaltySpec::l1(lambda), opts.solver, WarmStart{prev.weights, prev.intercept});
        path.push_back({lambda, std::move(m.weights), m.intercept});
    }
    return path;
}

void write_model(std::ostream& out, const LogisticModel& m, std::span<const std::string> names)
{
    if (names.size() != m.weights.size())
        throw InputError("write_model: name count does not match weight count");
    char buf[64];
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", m.weights[j]);
        out << "weight." << names[j] << '=' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", m.intercept);
    out << "intercept=" << buf << '\n';
    out << "penalty=" << (m.penalty.kind == PenaltyKind::l1 ? "l1" : "none") << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", m.penalty.strength);
    out << "penalty_strength=" << buf << '\n';
    out << "converged=" << (m.converged ? "true" : "false") << '\n';
    out << "iterations=" << m.iterations << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", m.final_gradient_norm);
    out << "final_gradient_norm=" << buf << '\n';
}

} // namespace fsgate
