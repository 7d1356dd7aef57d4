#include "fsgate/preprocess.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

constexpr double kMaxExponent = 700.0;

// ((1+u)^p - 1) / p for u >= 0, p != 0, with the power taken in log space and
// clamped so that edge-of-interval lambdas stay finite.
double power_term(double log1pu, double p)
{
    const double e = p * log1pu;
    if (e > kMaxExponent)
        return (std::exp(kMaxExponent) - 1.0) / p;
    return std::expm1(e) / p;
}

struct ColumnFit {
    double lambda;
    double mean;
    double std;
};

ColumnFit fit_column(std::span<const double> column)
{
    ColumnFit f{};
    f.lambda = fit_lambda(column);
    const double n = static_cast<double>(column.size());
    double sum = 0.0;
    for (double x : column)
        sum += yeo_johnson(x, f.lambda);
    f.mean = sum / n;
    double ss = 0.0;
    for (double x : column) {
        const double d = yeo_johnson(x, f.lambda) - f.mean;
        ss += d * d;
    }
    f.std = std::sqrt(ss / n);
    if (!(f.std >= kDegenerateStd) || !std::isfinite(f.std))
        f.std = 0.0;
    return f;
}

} // namespace

double yeo_johnson(double x, double lambda)
{
    if (lambda == 1.0)
        return x;
    if (x >= 0.0) {
        const double l = std::log1p(x);
        if (lambda == 0.0)
            return l;
        return power_term(l, lambda);
    }
    const double l = std::log1p(-x);
    if (lambda == 2.0)
        return -l;
    return -power_term(l, 2.0 - lambda);
}

double yeo_johnson_log_likelihood(std::span<const double> column, double lambda)
{
    const double n = static_cast<double>(column.size());
    double sum = 0.0;
    for (double x : column)
        sum += yeo_johnson(x, lambda);
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : column) {
        const double d = yeo_johnson(x, lambda) - mean;
        ss += d * d;
    }
    const double var = ss / n;
    if (!(var > 0.0) || !std::isfinite(var))
        return -std::numeric_limits<double>::infinity();
    double jacobian = 0.0;
    for (double x : column)
        jacobian += std::copysign(std::log1p(std::fabs(x)), x);
    return -0.5 * n * std::log(var) + (lambda - 1.0) * jacobian;
}

double fit_lambda(std::span<const double> column)
{
    if (column.size() < 2)
        throw InputError("fit_lambda needs at least 2 values");
    bool constant = true;
    for (double x : column) {
        if (!std::isfinite(x))
            throw InputError("fit_lambda: non-finite value");
        if (x != column.front())
            constant = false;
    }
    if (constant)
        return 1.0;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = kLambdaLower;
    double b = kLambdaUpper;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = yeo_johnson_log_likelihood(column, c);
    double fd = yeo_johnson_log_likelihood(column, d);
    while (b - a > kLambdaTolerance) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = yeo_johnson_log_likelihood(column, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = yeo_johnson_log_likelihood(column, d);
        }
    }
    const double mid = 0.5 * (a + b);
    // The likelihood can be flat to rounding (e.g. columns of tiny magnitude);
    // compare against the end points so a plateau never beats a real maximum.
    double best = mid;
    double best_ll = yeo_johnson_log_likelihood(column, mid);
    for (double edge : {kLambdaLower, kLambdaUpper}) {
        const double ll = yeo_johnson_log_likelihood(column, edge);
        if (ll > best_ll) {
            best = edge;
            best_ll = ll;
        }
    }
    if (!std::isfinite(best_ll))
        return 1.0;
    return best;
}

TransformParams fit(const Matrix& train, Exec exec)
{
    if (train.rows() < 2)
        throw InputError("preprocess fit needs at least 2 training rows");
    const std::size_t p = train.cols();
    TransformParams params;
    params.lambdas.resize(p);
    params.means.resize(p);
    params.stds.resize(p);
    const auto fit_one = [&](std::size_t j) {
        const auto f = fit_column(train.col(j));
        params.lambdas[j] = f.lambda;
        params.means[j] = f.mean;
        params.stds[j] = f.std;
    };
    if (exec == Exec::parallel) {
        const auto n = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t j = 0; j < n; ++j)
            fit_one(static_cast<std::size_t>(j));
    } else {
        for (std::size_t j = 0; j < p; ++j)
            fit_one(j);
    }
    return params;
}

Matrix transform(const Matrix& data, const TransformParams& params, Exec exec)
{
    if (data.cols() != params.size())
        throw InputError("transform: matrix has " + std::to_string(data.cols()) +
                         " columns, params have " + std::to_string(params.size()));
    Matrix out(data.rows(), data.cols());
    const auto transform_one = [&](std::size_t j) {
        auto src = data.col(j);
        auto dst = out.col(j);
        if (params.stds[j] == 0.0)
            return; // degenerate feature: column stays zero
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = (yeo_johnson(src[i], params.lambdas[j]) - params.means[j]) / params.stds[j];
    };
    if (exec == Exec::parallel) {
        const auto n = static_cast<std::ptrdiff_t>(data.cols());
#pragma omp parallel for
        for (std::ptrdiff_t j = 0; j < n; ++j)
            transform_one(static_cast<std::size_t>(j));
    } else {
        for (std::size_t j = 0; j < data.cols(); ++j)
            transform_one(j);
    }
    return out;
}

void write_params(std::ostream& out, const TransformParams& params, std::span<const std::string> names)
{
    if (names.size() != params.size())
        throw InputError("write_params: name count does not match parameter count");
    char buf[160];
    for (std::size_t j = 0; j < params.size(); ++j) {
        std::snprintf(buf, sizeof buf, " lambda=%.17g mean=%.17g std=%.17g\n", params.lambdas[j],
                      params.means[j], params.stds[j]);
        out << names[j] << buf;
    }
}

TransformParams read_params(std::istream& in)
{
    TransformParams params;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        double values[3] = {};
        const char* keys[3] = {"lambda=", "mean=", "std="};
        for (int k = 0; k < 3; ++k) {
            std::string tok;
            ls >> tok;
            if (tok.rfind(keys[k], 0) != 0)
                throw ParseError("transform params: malformed line '" + line + "'");
            values[k] = std::strtod(tok.c_str() + std::string_view(keys[k]).size(), nullptr);
        }
        params.lambdas.push_back(values[0]);
        params.means.push_back(values[1]);
        params.stds.push_back(values[2]);
    }
    return params;
}

} // namespace fsgate
