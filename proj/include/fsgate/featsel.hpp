#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fsgate/linmodel.hpp"
#include "fsgate/matrix.hpp"
#include "fsgate/metrics.hpp"

namespace fsgate {

enum class Method { anova, lasso, sfs };
enum class Strategy { max_accuracy, min_cross_entropy };

std::string_view to_string(Method m);
std::string_view to_string(Strategy s);
std::optional<Method> parse_method(std::string_view s);
std::optional<Strategy> parse_strategy(std::string_view s);

// Stand-in for an infinite F statistic (zero within-group variance, distinct
// group means); larger than every finite F so the sort stays total.
inline constexpr double kInfiniteF = std::numeric_limits<double>::max();

// Curve values closer than this are treated as ties (fold means of the same
// counts can differ in the last bit depending on summation order).
inline constexpr double kTieTolerance = 1e-12;

struct FeatureRanking {
    std::vector<std::size_t> order;  // best first
    std::vector<double> scores;      // indexed by original feature
};

// One-way two-group F = MSB / MSW.
double anova_f(std::span<const double> x, std::span<const int> y);
FeatureRanking anova_rank(const Matrix& X, std::span<const int> y);

// Ranks by the first grid lambda at which a coefficient becomes nonzero
// (earlier = better); features that never enter follow, by |coefficient| at
// the smallest lambda; remaining ties by index.
FeatureRanking rank_from_path(std::span<const PathPoint> path, std::size_t n_features);
FeatureRanking lasso_rank(const Matrix& X, std::span<const int> y, const PathOptions& opts = {});

struct SubsetScore {
    double accuracy = 0.0;
    double cross_entropy = 0.0;
    std::vector<MetricSet> folds;
};

struct CurvePoint {
    std::size_t n = 0;
    std::vector<std::size_t> subset;
    double accuracy = 0.0;
    double cross_entropy = 0.0;
    std::vector<MetricSet> folds;
};

struct SelectionCurve {
    Method method = Method::anova;
    Strategy strategy = Strategy::max_accuracy;
    std::vector<CurvePoint> points; // n = 1..n_max
    std::size_t best_n = 0;
    std::vector<std::size_t> best_subset;
};

using SubsetEvaluator = std::function<SubsetScore(std::span<const std::size_t>)>;
// Scores several candidate subsets at once; results are positional.
using BatchSubsetEvaluator =
    std::function<std::vector<SubsetScore>(const std::vector<std::vector<std::size_t>>&)>;

// True when `a` is strictly better than `b` under the strategy.
bool better(Strategy s, double accuracy_a, double ce_a, double accuracy_b, double ce_b);

// Index into points of the strategy's optimum; ties go to the smaller n.
std::size_t pick_best(std::span<const CurvePoint> points, Strategy strategy);

// Fills best_n / best_subset from the points.
void finalize_curve(SelectionCurve& curve);

SelectionCurve ranked_sweep(const FeatureRanking& ranking, const SubsetEvaluator& eval, std::size_t n_max,
                            Method method, Strategy strategy);

// Greedy forward selection over n_features candidates, n_max steps. Each step
// adds the candidate optimising the strategy metric (ties to the lowest index).
SelectionCurve sfs_select(const BatchSubsetEvaluator& eval, std::size_t n_features, Strategy strategy,
                          std::size_t n_max);
SelectionCurve sfs_select(const SubsetEvaluator& eval, std::size_t n_features, Strategy strategy,
                          std::size_t n_max);

} // namespace fsgate
