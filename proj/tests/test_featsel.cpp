#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fsgate/error.hpp"
#include "fsgate/featsel.hpp"
#include "oracles.hpp"

using namespace fsgate;

namespace {

bool is_permutation_of_iota(std::vector<std::size_t> order, std::size_t p)
{
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> want(p);
    std::iota(want.begin(), want.end(), 0);
    return order == want;
}

std::vector<CurvePoint> curve_from(const std::vector<double>& acc, const std::vector<double>& ce)
{
    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        CurvePoint c;
        c.n = i + 1;
        c.accuracy = acc[i];
        c.cross_entropy = ce[i];
        pts.push_back(c);
    }
    return pts;
}

// Scores a subset by how many of `good` it contains, with a small penalty per
// extra feature; cross-entropy mirrors accuracy.
SubsetScore planted_score(std::span<const std::size_t> subset, const std::set<std::size_t>& good)
{
    double hits = 0;
    for (auto f : subset)
        hits += good.count(f) ? 1.0 : 0.0;
    SubsetScore s;
    s.accuracy = 0.5 + 0.2 * hits - 0.01 * static_cast<double>(subset.size() - hits);
    s.cross_entropy = 1.0 - s.accuracy;
    return s;
}

} // namespace

TEST_SUITE("featsel") {

TEST_CASE("F statistic hand case")
{
    const std::vector<double> x{1, 2, 3, 2, 3, 10};
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    CHECK(std::fabs(anova_f(x, y) - 1.35) < 1e-10);
}

TEST_CASE("F statistic degenerate cases")
{
    const std::vector<int> y{0, 0, 1, 1};
    CHECK(anova_f(std::vector<double>{4, 4, 4, 4}, y) == 0.0);
    CHECK(anova_f(std::vector<double>{0, 0, 1, 1}, y) == kInfiniteF);
    CHECK_THROWS_AS(anova_f(std::vector<double>{1, 2, 3}, std::vector<int>{0, 1, 1}), InputError);
}

TEST_CASE("F equals the squared pooled t statistic")
{
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> size(4, 40);
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(size(rng));
        const auto X = oracle::random_matrix(rng, n, 1, 3.0);
        auto y = oracle::random_labels(rng, n);
        y[2] = 0;
        y[3] = 1;
        const auto col = X.col(0);
        const double f = anova_f(col, y);
        const double t2 = oracle::pooled_t_squared(col, y);
        CHECK(std::fabs(f - t2) <= 1e-10 * std::max(1.0, t2));
    }
}

TEST_CASE("anova_rank is invariant under increasing affine maps")
{
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> scale(0.1, 10), shift(-5, 5);
    for (int t = 0; t < 20; ++t) {
        const auto X = oracle::random_matrix(rng, 50, 8);
        const auto y = oracle::random_labels(rng, 50);
        auto Z = X;
        for (std::size_t j = 0; j < 8; ++j) {
            const double a = scale(rng), b = shift(rng);
            for (double& v : Z.col(j))
                v = a * v + b;
        }
        CHECK(anova_rank(X, y).order == anova_rank(Z, y).order);
    }
}

TEST_CASE("anova_rank puts the infinite F first and constants last")
{
    Matrix X(4, 3);
    const std::vector<int> y{0, 0, 1, 1};
    const double c0[] = {5, 5, 5, 5}, c1[] = {0.1, 0.7, 0.4, 0.9}, c2[] = {0, 0, 1, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        X(i, 0) = c0[i];
        X(i, 1) = c1[i];
        X(i, 2) = c2[i];
    }
    const auto r = anova_rank(X, y);
    CHECK(r.order == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("rank_from_path: entry order, then fallback magnitude, then index")
{
    std::vector<PathPoint> path(3);
    path[0].weights = {0, 0, 0, 0, 0};
    path[1].weights = {0, 0, 0.3, 0, 0};
    path[2].weights = {0, -0.1, 0.5, 0, 0};
    const auto r = rank_from_path(path, 5);
    CHECK(r.order == std::vector<std::size_t>{2, 1, 0, 3, 4});
}

TEST_CASE("lasso ranking is total under degeneracy")
{
    std::mt19937_64 rng(103);
    const auto X = oracle::random_matrix(rng, 40, 6);
    const auto y = oracle::random_labels(rng, 40);
    PathOptions only_max;
    only_max.n_lambdas = 1;
    const auto r = lasso_rank(X, y, only_max);
    CHECK(r.order == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    const auto full = lasso_rank(X, y);
    CHECK(is_permutation_of_iota(full.order, 6));
}

TEST_CASE("pick_best tie rules")
{
    const auto dec = curve_from({0.9, 0.8, 0.7}, {0.5, 0.6, 0.7});
    CHECK(pick_best(dec, Strategy::max_accuracy) == 0);
    CHECK(pick_best(dec, Strategy::min_cross_entropy) == 0);

    const auto ties = curve_from({0.5, 0.6, 0.8, 0.7, 0.6, 0.5, 0.8}, {1, 1, 1, 1, 1, 1, 1});
    CHECK(ties[pick_best(ties, Strategy::max_accuracy)].n == 3);

    // LASSO cross-entropy curve of the figure for the ranked sweep.
    const std::vector<double> fig{0.686, 0.678, 0.683, 0.665, 0.643, 0.649, 0.631, 0.629, 0.627,
                                  0.627, 0.638, 0.639, 0.648, 0.653, 0.653, 0.653, 0.658, 0.661,
                                  0.677, 0.679, 0.679, 0.684, 0.688, 0.69,  0.696, 0.696};
    const auto pts = curve_from(std::vector<double>(fig.size(), 0.5), fig);
    CHECK(pts[pick_best(pts, Strategy::min_cross_entropy)].n == 9);

    CHECK_THROWS_AS(pick_best(std::vector<CurvePoint>{}, Strategy::max_accuracy), InputError);
}

TEST_CASE("ranked_sweep follows the ranking")
{
    FeatureRanking r;
    r.order = {3, 0, 1, 2};
    r.scores = {3, 2, 1, 4};
    const std::set<std::size_t> good{3};
    const auto curve = ranked_sweep(
        r, [&](std::span<const std::size_t> s) { return planted_score(s, good); }, 4, Method::anova,
        Strategy::max_accuracy);
    REQUIRE(curve.points.size() == 4);
    CHECK(curve.points[1].subset == std::vector<std::size_t>{3, 0});
    CHECK(curve.best_n == 1);
    CHECK(curve.best_subset == std::vector<std::size_t>{3});
    CHECK_THROWS_AS(ranked_sweep(
                        r, [&](std::span<const std::size_t> s) { return planted_score(s, good); }, 5,
                        Method::anova, Strategy::max_accuracy),
                    InputError);
}

TEST_CASE("ranked_sweep reports the failing subset size")
{
    FeatureRanking r;
    r.order = {0, 1, 2};
    r.scores = {3, 2, 1};
    try {
        ranked_sweep(
            r,
            [](std::span<const std::size_t> s) -> SubsetScore {
                if (s.size() == 2)
                    throw InputError("boom");
                return {};
            },
            3, Method::anova, Strategy::max_accuracy);
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("subset size 2") != std::string::npos);
    }
}

TEST_CASE("sfs recovers planted features and stays nested")
{
    const std::set<std::size_t> good{4, 9};
    const SubsetEvaluator eval = [&](std::span<const std::size_t> s) { return planted_score(s, good); };
    for (auto strategy : {Strategy::max_accuracy, Strategy::min_cross_entropy}) {
        const auto curve = sfs_select(eval, 12, strategy, 6);
        REQUIRE(curve.points.size() == 6);
        CHECK(std::set<std::size_t>(curve.points[1].subset.begin(), curve.points[1].subset.end()) == good);
        CHECK(curve.best_n == 2);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            const auto& a = curve.points[i - 1].subset;
            const auto& b = curve.points[i].subset;
            CHECK(std::equal(a.begin(), a.end(), b.begin()));
        }
        // After the planted pair, ties among noise features go to the lowest index.
        CHECK(curve.points[2].subset.back() == 0);
    }
}

TEST_CASE("sfs with a single feature")
{
    const SubsetEvaluator eval = [](std::span<const std::size_t>) { return SubsetScore{0.6, 0.5, {}}; };
    const auto curve = sfs_select(eval, 1, Strategy::max_accuracy, 1);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.best_subset == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(sfs_select(eval, 1, Strategy::max_accuracy, 2), InputError);
}

TEST_CASE("batch and single sfs agree")
{
    const std::set<std::size_t> good{1, 5};
    const SubsetEvaluator single = [&](std::span<const std::size_t> s) { return planted_score(s, good); };
    const BatchSubsetEvaluator batch = [&](const std::vector<std::vector<std::size_t>>& subsets) {
        std::vector<SubsetScore> out;
        for (const auto& s : subsets)
            out.push_back(planted_score(s, good));
        return out;
    };
    const auto a = sfs_select(single, 8, Strategy::min_cross_entropy, 5);
    const auto b = sfs_select(batch, 8, Strategy::min_cross_entropy, 5);
    CHECK(a.best_subset == b.best_subset);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(a.points[i].subset == b.points[i].subset);
}

TEST_CASE("method and strategy names round trip")
{
    for (auto m : {Method::anova, Method::lasso, Method::sfs})
        CHECK(parse_method(to_string(m)) == m);
    for (auto s : {Strategy::max_accuracy, Strategy::min_cross_entropy})
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK_FALSE(parse_method("chi2").has_value());
}

} // TEST_SUITE
