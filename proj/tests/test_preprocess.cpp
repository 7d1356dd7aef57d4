#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fsgate/dataset.hpp"
#include "fsgate/preprocess.hpp"
#include "oracles.hpp"

using namespace fsgate;

TEST_SUITE("preprocess") {

TEST_CASE("yeo_johnson branch values")
{
    CHECK(yeo_johnson(3.0, 1.0) == 3.0);
    for (double l : {-5.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0})
        CHECK(yeo_johnson(0.0, l) == 0.0);
    CHECK(yeo_johnson(-1.0, 2.0) == doctest::Approx(-0.6931471805599453).epsilon(1e-15));
    CHECK(yeo_johnson(1.0, 0.0) == doctest::Approx(std::log(2.0)));
    // x < 0, lambda != 2: -((1 - x)^(2 - l) - 1) / (2 - l)
    CHECK(yeo_johnson(-3.0, 0.5) == doctest::Approx(-(std::pow(4.0, 1.5) - 1.0) / 1.5));
}

TEST_CASE("yeo_johnson is continuous at the log branches")
{
    for (double x : {0.1, 1.0, 7.5, 100.0}) {
        CHECK(std::fabs(yeo_johnson(x, 1e-8) - std::log1p(x)) < 1e-6);
        CHECK(std::fabs(yeo_johnson(x, -1e-8) - std::log1p(x)) < 1e-6);
        CHECK(std::fabs(yeo_johnson(-x, 2.0 + 1e-8) + std::log1p(x)) < 1e-6);
        CHECK(std::fabs(yeo_johnson(-x, 2.0 - 1e-8) + std::log1p(x)) < 1e-6);
    }
}

TEST_CASE("yeo_johnson stays finite at the search interval edges")
{
    CHECK(std::isfinite(yeo_johnson(1e300, 5.0)));
    CHECK(std::isfinite(yeo_johnson(-1e300, -5.0)));
}

TEST_CASE("fit_lambda matches an independent likelihood maximiser")
{
    // scipy.stats.yeojohnson on the same column gives -0.006191502272893213.
    std::vector<double> x;
    for (int i = 1; i <= 60; ++i)
        x.push_back(std::exp(1.5 * std::sin(i * 0.7)) - 0.8);
    CHECK(fit_lambda(x) == doctest::Approx(-0.006191502272893213).epsilon(1e-4));
}

TEST_CASE("fit_lambda: constant column gives 1")
{
    const std::vector<double> c{5, 5, 5, 5};
    CHECK(fit_lambda(c) == 1.0);
}

TEST_CASE("fit_lambda: standard normal sample stays near 1")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::vector<double> x(1000);
    for (auto& v : x)
        v = nd(rng);
    const double l = fit_lambda(x);
    CHECK(l >= 0.7);
    CHECK(l <= 1.3);
}

TEST_CASE("fit_lambda: right-skewed column prefers a log-like transform")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> x(500);
    for (auto& v : x)
        v = std::exp(nd(rng));
    const double l = fit_lambda(x);
    CHECK(l < 0.5);
    CHECK(yeo_johnson_log_likelihood(x, l) >= yeo_johnson_log_likelihood(x, 1.0));
}

TEST_CASE("fit: identical rows are degenerate")
{
    Matrix m(2, 3, 4.0);
    const auto p = fit(m);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(p.lambdas[j] == 1.0);
        CHECK(p.stds[j] == 0.0);
    }
    const auto t = transform(m, p);
    for (std::size_t j = 0; j < 3; ++j)
        for (double v : t.col(j))
            CHECK(v == 0.0);
}

TEST_CASE("transform of the training data is standardised")
{
    std::mt19937_64 rng(3);
    const auto m = oracle::random_matrix(rng, 300, 5, 2.0);
    const auto p = fit(m);
    const auto t = transform(m, p);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(p.lambdas[j] >= kLambdaLower);
        CHECK(p.lambdas[j] <= kLambdaUpper);
        double s = 0, ss = 0;
        for (double v : t.col(j))
            s += v;
        const double mean = s / 300.0;
        for (double v : t.col(j))
            ss += (v - mean) * (v - mean);
        CHECK(std::fabs(mean) < 1e-10);
        CHECK(std::sqrt(ss / 300.0) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("synthetic standard-normal matrix: transformed params close to identity")
{
    std::mt19937_64 rng(8);
    const auto m = oracle::random_matrix(rng, 2000, 3);
    const auto p = fit(m);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::fabs(p.means[j]) < 0.1);
        CHECK(std::fabs(p.stds[j] - 1.0) < 0.1);
    }
}

TEST_CASE("test row at the transformed training mean maps to zero")
{
    std::mt19937_64 rng(9);
    const auto m = oracle::random_matrix(rng, 100, 2);
    const auto p = fit(m);
    // Invert psi to find the raw value whose transform equals the mean.
    const double target = p.means[0];
    const double x = oracle::bisect_inverse([&](double v) { return yeo_johnson(v, p.lambdas[0]); }, target, -50, 50);
    Matrix row(1, 2);
    row(0, 0) = x;
    row(0, 1) = 0.0;
    const auto t = transform(row, p);
    CHECK(std::fabs(t(0, 0)) < 1e-9);
}

TEST_CASE("monotone in x over random pairs")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ux(-50, 50), ul(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        double a = ux(rng), b = ux(rng);
        if (a == b)
            continue;
        if (a > b)
            std::swap(a, b);
        const double l = ul(rng);
        CHECK(yeo_johnson(a, l) < yeo_johnson(b, l));
    }
}

TEST_CASE("numeric inverse round trip")
{
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> ux(-5, 5), ul(-2, 3);
    for (int i = 0; i < 200; ++i) {
        const double x = ux(rng), l = ul(rng);
        const double y = yeo_johnson(x, l);
        const double back = oracle::bisect_inverse([&](double v) { return yeo_johnson(v, l); }, y, -10, 10);
        CHECK(std::fabs(back - x) < 1e-9);
    }
}

TEST_CASE("transforming held-out data leaves params untouched")
{
    std::mt19937_64 rng(4);
    const auto train = oracle::random_matrix(rng, 50, 4);
    auto test = oracle::random_matrix(rng, 10, 4);
    const auto p = fit(train);
    const auto copy = p;
    (void)transform(test, p);
    test(0, 0) = 1e6;
    (void)transform(test, p);
    CHECK(p == copy);
}

TEST_CASE("parallel and serial fits agree bit for bit")
{
    std::mt19937_64 rng(6);
    const auto m = oracle::random_matrix(rng, 200, 26, 3.0);
    const auto a = fit(m, Exec::serial);
    const auto b = fit(m, Exec::parallel);
    CHECK(a == b);
    CHECK(transform(m, a, Exec::serial) == transform(m, b, Exec::parallel));
}

TEST_CASE("params text round trip")
{
    std::mt19937_64 rng(7);
    const auto m = oracle::random_matrix(rng, 40, 26);
    const auto p = fit(m);
    std::stringstream buf;
    const auto names = feature_names();
    write_params(buf, p, names);
    CHECK(buf.str().find("jitter_ppq5 lambda=") != std::string::npos);
    const auto back = read_params(buf);
    CHECK(back == p);
}

} // TEST_SUITE
