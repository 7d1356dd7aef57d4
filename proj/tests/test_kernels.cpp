#include <doctest.h>

#include <random>
#include <vector>

#include "fsgate/kernels.hpp"
#include "oracles.hpp"

using namespace fsgate;

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel kernels agree bit for bit")
{
    std::mt19937_64 rng(17);
    for (std::size_t rows : {1u, 7u, 64u, 1040u}) {
        const auto X = oracle::random_matrix(rng, rows, 26);
        const auto yi = oracle::random_labels(rng, rows < 2 ? 2 : rows);
        std::vector<double> y(rows);
        for (std::size_t i = 0; i < rows; ++i)
            y[i] = yi[i];
        std::vector<double> w(26);
        std::normal_distribution<double> nd;
        for (auto& v : w)
            v = nd(rng);

        std::vector<double> z1(rows), z2(rows);
        kernels::serial::linear_predictor(X, w, 0.3, z1);
        kernels::parallel::linear_predictor(X, w, 0.3, z2);
        CHECK(z1 == z2);

        std::vector<double> s1(3 * rows), s2(3 * rows), g1(26), g2(26);
        double b1 = 0, b2 = 0;
        const double l1 = kernels::serial::logistic_loss_grad(X, y, w, 0.3, s1, g1, b1);
        const double l2 = kernels::parallel::logistic_loss_grad(X, y, w, 0.3, s2, g2, b2);
        CHECK(l1 == l2);
        CHECK(g1 == g2);
        CHECK(b1 == b2);
        CHECK(kernels::serial::logistic_loss(X, y, w, 0.3, s1) == kernels::parallel::logistic_loss(X, y, w, 0.3, s2));
    }
}

TEST_CASE("loss matches a row-wise reference")
{
    std::mt19937_64 rng(18);
    const auto X = oracle::random_matrix(rng, 30, 4);
    const auto yi = oracle::random_labels(rng, 30);
    std::vector<double> y(yi.begin(), yi.end());
    const std::vector<double> w{0.5, -1.0, 0.25, 2.0};
    std::vector<double> s(90);
    const double got = kernels::logistic_loss(X, y, w, -0.2, s, Exec::serial);
    CHECK(got == doctest::Approx(oracle::logistic_nll(X, yi, w, -0.2)).epsilon(1e-12));
}

TEST_CASE("sigmoid and softplus")
{
    CHECK(kernels::sigmoid(1.5) == doctest::Approx(0.8175744761936437).epsilon(1e-15));
    CHECK(kernels::sigmoid(-800.0) >= 0.0);
    CHECK(kernels::softplus(800.0) == doctest::Approx(800.0));
    CHECK(kernels::softplus(0.0) == doctest::Approx(std::log(2.0)));
}

} // TEST_SUITE
