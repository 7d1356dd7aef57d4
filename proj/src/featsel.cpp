#include "fsgate/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

template <class Fn>
auto with_context(std::size_t n, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError("subset size " + std::to_string(n) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError("subset size " + std::to_string(n) + ": " + e.what());
    }
}

} // namespace

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::anova:
        return "anova";
    case Method::lasso:
        return "lasso";
    case Method::sfs:
        return "sfs";
    }
    return "?";
}

std::string_view to_string(Strategy s)
{
    return s == Strategy::max_accuracy ? "max_accuracy" : "min_cross_entropy";
}

std::optional<Method> parse_method(std::string_view s)
{
    for (auto m : {Method::anova, Method::lasso, Method::sfs})
        if (to_string(m) == s)
            return m;
    return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view s)
{
    for (auto st : {Strategy::max_accuracy, Strategy::min_cross_entropy})
        if (to_string(st) == s)
            return st;
    return std::nullopt;
}

double anova_f(std::span<const double> x, std::span<const int> y)
{
    if (x.size() != y.size())
        throw InputError("anova_f: value and label vectors differ in length");
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int g = y[i] == 1 ? 1 : 0;
        sum[g] += x[i];
        count[g] += 1.0;
    }
    if (count[0] < 2.0 || count[1] < 2.0)
        throw InputError("anova_f: each class needs at least 2 rows");
    const double n = count[0] + count[1];
    const double grand = (sum[0] + sum[1]) / n;
    const double mean[2] = {sum[0] / count[0], sum[1] / count[1]};
    const double msb = count[0] * (mean[0] - grand) * (mean[0] - grand) +
                       count[1] * (mean[1] - grand) * (mean[1] - grand);
    double ssw = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean[y[i] == 1 ? 1 : 0];
        ssw += d * d;
    }
    const double msw = ssw / (n - 2.0);
    if (msw == 0.0)
        return msb == 0.0 ? 0.0 : kInfiniteF;
    return msb / msw;
}

FeatureRanking anova_rank(const Matrix& X, std::span<const int> y)
{
    FeatureRanking r;
    r.scores.resize(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j)
        r.scores[j] = anova_f(X.col(j), y);
    r.order.resize(X.cols());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
    return r;
}

FeatureRanking rank_from_path(std::span<const PathPoint> path, std::size_t n_features)
{
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> entry(n_features, kNever);
    FeatureRanking r;
    r.scores.assign(n_features, 0.0);
    for (std::size_t k = 0; k < path.size(); ++k)
        for (std::size_t j = 0; j < n_features; ++j)
            if (entry[j] == kNever && path[k].weights[j] != 0.0) {
                entry[j] = k;
                r.scores[j] = path[k].lambda;
            }
    std::vector<double> last_abs(n_features, 0.0);
    if (!path.empty())
        for (std::size_t j = 0; j < n_features; ++j)
            last_abs[j] = std::fabs(path.back().weights[j]);

    r.order.resize(n_features);
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        if (entry[a] != entry[b])
            return entry[a] < entry[b];
        if (entry[a] == kNever)
            return last_abs[a] > last_abs[b];
        return false;
    });
    return r;
}

FeatureRanking lasso_rank(const Matrix& X, std::span<const int> y, const PathOptions& opts)
{
    const auto path = regularization_path(X, y, opts);
    return rank_from_path(path, X.cols());
}

bool better(Strategy s, double accuracy_a, double ce_a, double accuracy_b, double ce_b)
{
    if (s == Strategy::max_accuracy)
        return accuracy_a > accuracy_b + kTieTolerance;
    return ce_a < ce_b - kTieTolerance;
}

std::size_t pick_best(std::span<const CurvePoint> points, Strategy strategy)
{
    if (points.empty())
        throw InputError("pick_best: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (better(strategy, points[i].accuracy, points[i].cross_entropy, points[best].accuracy,
                   points[best].cross_entropy))
            best = i;
    return best;
}

void finalize_curve(SelectionCurve& curve)
{
    const auto i = pick_best(curve.points, curve.strategy);
    curve.best_n = curve.points[i].n;
    curve.best_subset = curve.points[i].subset;
}

SelectionCurve ranked_sweep(const FeatureRanking& ranking, const SubsetEvaluator& eval, std::size_t n_max,
                            Method method, Strategy strategy)
{
    if (n_max == 0 || n_max > ranking.order.size())
        throw InputError("ranked_sweep: n_max must lie in [1, " + std::to_string(ranking.order.size()) + "]");
    SelectionCurve curve{method, strategy, {}, 0, {}};
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<std::size_t> subset(ranking.order.begin(),
                                        ranking.order.begin() + static_cast<std::ptrdiff_t>(n));
        auto score = with_context(n, [&] { return eval(subset); });
        curve.points.push_back({n, std::move(subset), score.accuracy, score.cross_entropy,
                                std::move(score.folds)});
    }
    finalize_curve(curve);
    return curve;
}

SelectionCurve sfs_select(const BatchSubsetEvaluator& eval, std::size_t n_features, Strategy strategy,
                          std::size_t n_max)
{
    if (n_max == 0 || n_max > n_features)
        throw InputError("sfs_select: n_max must lie in [1, " + std::to_string(n_features) + "]");
    SelectionCurve curve{Method::sfs, strategy, {}, 0, {}};
    std::vector<std::size_t> selected;
    std::vector<bool> used(n_features, false);
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<std::size_t> candidates;
        std::vector<std::vector<std::size_t>> subsets;
        for (std::size_t f = 0; f < n_features; ++f) {
            if (used[f])
                continue;
            auto s = selected;
            s.push_back(f);
            candidates.push_back(f);
            subsets.push_back(std::move(s));
        }
        auto scores = with_context(n, [&] { return eval(subsets); });
        if (scores.size() != subsets.size())
            throw InputError("sfs_select: evaluator returned the wrong number of scores");
        // Candidates are in increasing feature order, so keeping the first of
        // equal scores applies the lowest-index tie-break.
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c)
            if (better(strategy, scores[c].accuracy, scores[c].cross_entropy, scores[best].accuracy,
                       scores[best].cross_entropy))
                best = c;
        selected.push_back(candidates[best]);
        used[candidates[best]] = true;
        curve.points.push_back({n, selected, scores[best].accuracy, scores[best].cross_entropy,
                                std::move(scores[best].folds)});
    }
    finalize_curve(curve);
    return curve;
}

SelectionCurve sfs_select(const SubsetEvaluator& eval, std::size_t n_features, Strategy strategy,
                          std::size_t n_max)
{
    BatchSubsetEvaluator batch = [&](const std::vector<std::vector<std::size_t>>& subsets) {
        std::vector<SubsetScore> out;
        out.reserve(subsets.size());
        for (const auto& s : subsets)
            out.push_back(eval(s));
        return out;
    };
    return sfs_select(batch, n_features, strategy, n_max);
}

} // namespace fsgate
