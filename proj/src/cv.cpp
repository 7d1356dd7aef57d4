#include "fsgate/cv.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <random>
#include <set>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

std::vector<std::size_t> sorted_copy(std::span<const std::size_t> s)
{
    std::vector<std::size_t> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<std::size_t> all_features()
{
    std::vector<std::size_t> v(kNumFeatures);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

std::vector<std::size_t> top_n(const FeatureRanking& r, std::size_t n)
{
    return {r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(n)};
}

// Training and validation row indices for fold f.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(const Dataset& d,
                                                                         const FoldPlan& plan,
                                                                         std::size_t f)
{
    const std::set<std::string> val_ids(plan.folds[f].begin(), plan.folds[f].end());
    std::vector<std::size_t> train, val;
    const auto rows = d.rows();
    for (std::size_t i = 0; i < rows.size(); ++i)
        (val_ids.contains(rows[i].subject_id) ? val : train).push_back(i);
    return {std::move(train), std::move(val)};
}

void check_plan(const Dataset& d, const FoldPlan& plan)
{
    if (plan.folds.size() != plan.k || plan.k < 2)
        throw InputError("fold plan is malformed");
    std::set<std::string> seen;
    for (const auto& fold : plan.folds)
        for (const auto& id : fold)
            if (!seen.insert(id).second)
                throw InputError("subject '" + id + "' appears in more than one fold");
    for (const auto& s : d.subjects())
        if (!seen.contains(s.id))
            throw InputError("subject '" + s.id + "' is missing from the fold plan");
}

MetricSet fit_and_score(const Matrix& train_x, std::span<const int> train_y, const Matrix& val_x,
                        std::span<const int> val_y, std::span<const std::string> val_subjects,
                        const SolverOptions& solver, LogisticModel* model_out,
                        std::vector<SubjectPrediction>* preds_out)
{
    auto opts = solver;
    opts.exec = Exec::serial;
    auto model = train(train_x, train_y, PenaltySpec::none(), opts);
    const auto probs = predict_proba(model, val_x);
    auto preds = aggregate_subjects(probs, val_subjects, val_y);
    const auto metrics = compute_metrics(preds);
    if (model_out)
        *model_out = std::move(model);
    if (preds_out)
        *preds_out = std::move(preds);
    return metrics;
}

FeatureRanking rank(Method method, const Matrix& X, std::span<const int> y, const ModelOptions& opts)
{
    switch (method) {
    case Method::anova:
        return anova_rank(X, y);
    case Method::lasso: {
        auto path_opts = opts.path;
        path_opts.solver.exec = Exec::serial;
        return lasso_rank(X, y, path_opts);
    }
    case Method::sfs:
        break;
    }
    throw InputError("sfs does not produce a feature ranking");
}

ResultRow row_from_point(const CurvePoint& point, const SelectionCurve& curve,
                         std::vector<std::vector<std::size_t>> fold_subsets)
{
    ResultRow row;
    row.method = curve.method;
    row.strategy = curve.strategy;
    row.n_selected = point.n;
    row.subset = point.subset;
    row.fold_subsets = std::move(fold_subsets);
    row.folds = point.folds;
    row.summary = summarize_folds(row.folds);
    return row;
}

struct MethodCurves {
    std::vector<SelectionCurve> curves;
    // Per-curve, per-n, per-fold subsets actually evaluated.
    std::vector<std::vector<std::vector<std::size_t>>> fold_subsets_by_n;
};

// Runs one method over the engine's folds for every strategy. Ranked methods
// share a single sweep between strategies; `reported` is the ranking whose
// top-n names the subset at each n.
MethodCurves select_with(FoldEngine& engine, Method method, const std::vector<Strategy>& strategies,
                         const FeatureRanking* reported, const ExperimentConfig& cfg)
{
    MethodCurves out;
    if (method == Method::sfs) {
        BatchSubsetEvaluator batch = [&](const std::vector<std::vector<std::size_t>>& subsets) {
            return engine.evaluate_batch(subsets);
        };
        for (auto s : strategies) {
            auto curve = sfs_select(batch, kNumFeatures, s, cfg.n_max_sfs);
            std::vector<std::vector<std::vector<std::size_t>>> per_n;
            for (const auto& p : curve.points)
                per_n.emplace_back(engine.size(), p.subset);
            out.curves.push_back(std::move(curve));
            out.fold_subsets_by_n.insert(out.fold_subsets_by_n.end(), per_n.begin(), per_n.end());
        }
        return out;
    }

    std::vector<FeatureRanking> fold_rankings;
    for (std::size_t f = 0; f < engine.size(); ++f)
        fold_rankings.push_back(rank(method, engine.fold(f).train_x, engine.fold(f).train_y, cfg.model));

    std::vector<CurvePoint> points;
    std::vector<std::vector<std::vector<std::size_t>>> per_n;
    for (std::size_t n = 1; n <= cfg.n_max_ranked; ++n) {
        std::vector<std::vector<std::size_t>> fold_subsets;
        for (const auto& r : fold_rankings)
            fold_subsets.push_back(top_n(r, n));
        auto score = engine.evaluate_per_fold(fold_subsets);
        points.push_back({n, top_n(*reported, n), score.accuracy, score.cross_entropy, std::move(score.folds)});
        per_n.push_back(std::move(fold_subsets));
    }
    for (auto s : strategies) {
        SelectionCurve curve{method, s, points, 0, {}};
        finalize_curve(curve);
        out.curves.push_back(std::move(curve));
        out.fold_subsets_by_n.insert(out.fold_subsets_by_n.end(), per_n.begin(), per_n.end());
    }
    return out;
}

const std::vector<std::vector<std::size_t>>& fold_subsets_at(const MethodCurves& mc, std::size_t curve_idx,
                                                             std::size_t n)
{
    std::size_t offset = 0;
    for (std::size_t c = 0; c < curve_idx; ++c)
        offset += mc.curves[c].points.size();
    return mc.fold_subsets_by_n[offset + n - 1];
}

void validate_config(const Dataset& d, const ExperimentConfig& cfg)
{
    if (cfg.k < 2)
        throw ConfigError("k must be at least 2");
    if (cfg.methods.empty() || cfg.strategies.empty())
        throw ConfigError("methods and strategies must be non-empty");
    if (cfg.n_max_ranked < 1 || cfg.n_max_ranked > kNumFeatures)
        throw ConfigError("ranked sweep size must lie in [1, 26]");
    if (cfg.n_max_sfs < 1 || cfg.n_max_sfs > kNumFeatures)
        throw ConfigError("sfs sweep size must lie in [1, 26]");
    (void)d;
}

ExperimentResult run_nested(const Dataset& d, const ExperimentConfig& cfg, const FoldPlan& plan,
                            FoldEngine& outer)
{
    ExperimentResult result;
    result.config = cfg;
    result.plan = plan;
    result.rows.push_back(run_baseline(d, cfg));

    struct Pending {
        Method method;
        Strategy strategy;
        std::vector<std::size_t> best_n;
        std::vector<std::vector<std::size_t>> subsets;
        std::vector<MetricSet> metrics;
    };
    std::vector<Pending> pending;
    for (auto m : cfg.methods)
        for (auto s : cfg.strategies)
            pending.push_back({m, s, {}, {}, {}});

    for (std::size_t f = 0; f < plan.k; ++f) {
        std::set<std::string> train_ids;
        for (std::size_t g = 0; g < plan.k; ++g)
            if (g != f)
                train_ids.insert(plan.folds[g].begin(), plan.folds[g].end());
        const Dataset inner_d = d.restrict_to(train_ids);
        const auto inner_plan = stratified_group_kfold(inner_d.subjects(), cfg.inner_k, cfg.seed);
        FoldEngine inner(inner_d, inner_plan, cfg.model, cfg.exec);

        std::size_t slot = 0;
        for (auto m : cfg.methods) {
            std::optional<FeatureRanking> outer_ranking;
            if (m != Method::sfs)
                outer_ranking = rank(m, outer.fold(f).train_x, outer.fold(f).train_y, cfg.model);
            auto mc = select_with(inner, m, cfg.strategies, outer_ranking ? &*outer_ranking : nullptr, cfg);
            for (auto& curve : mc.curves) {
                auto& p = pending[slot++];
                const auto subset = curve.best_subset;
                auto score = outer.evaluate_fold(f, subset);
                p.best_n.push_back(curve.best_n);
                p.subsets.push_back(subset);
                p.metrics.push_back(score);
                result.curves.push_back({std::move(curve), f});
            }
        }
    }

    for (auto& p : pending) {
        ResultRow row;
        row.method = p.method;
        row.strategy = p.strategy;
        // Most frequent inner choice of n; ties to the smaller n.
        std::map<std::size_t, std::size_t> freq;
        for (auto n : p.best_n)
            ++freq[n];
        std::size_t mode = 0, mode_count = 0;
        for (auto [n, c] : freq)
            if (c > mode_count) {
                mode = n;
                mode_count = c;
            }
        row.n_selected = mode;
        for (std::size_t f = 0; f < p.best_n.size(); ++f)
            if (p.best_n[f] == mode) {
                row.subset = p.subsets[f];
                break;
            }
        row.fold_subsets = std::move(p.subsets);
        row.folds = std::move(p.metrics);
        row.summary = summarize_folds(row.folds);
        result.rows.push_back(std::move(row));
    }
    return result;
}

} // namespace

FoldPlan stratified_group_kfold(std::span<const Subject> subjects, std::size_t k, std::uint64_t seed)
{
    if (k < 2)
        throw InputError("k must be at least 2, got " + std::to_string(k));
    std::vector<std::string> by_class[2];
    for (const auto& s : subjects)
        by_class[s.label == 1 ? 1 : 0].push_back(s.id);
    for (int c : {1, 0})
        if (by_class[c].size() < k)
            throw InputError(std::string(c == 1 ? "PWP" : "healthy") + " class has " +
                             std::to_string(by_class[c].size()) + " subjects, fewer than k=" +
                             std::to_string(k));

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(k);
    std::mt19937_64 rng(seed);
    std::size_t next = 0;
    for (int c : {1, 0}) {
        auto ids = by_class[c];
        std::shuffle(ids.begin(), ids.end(), rng);
        for (auto& id : ids) {
            plan.folds[next].push_back(std::move(id));
            next = (next + 1) % k;
        }
    }
    return plan;
}

std::vector<FoldFit> evaluate_subset_detailed(const Dataset& d, std::span<const std::size_t> subset,
                                              const FoldPlan& plan, const ModelOptions& opts)
{
    if (subset.empty())
        throw InputError("evaluate_subset: empty feature subset");
    for (auto j : subset)
        if (j >= kNumFeatures)
            throw InputError("evaluate_subset: feature index out of range");
    check_plan(d, plan);

    std::vector<FoldFit> fits(plan.k);
    for (std::size_t f = 0; f < plan.k; ++f) {
        const auto [train_rows, val_rows] = split_rows(d, plan, f);
        const Matrix train_raw = d.feature_matrix(train_rows).select_columns(subset);
        const Matrix val_raw = d.feature_matrix(val_rows).select_columns(subset);
        auto& fit_f = fits[f];
        fit_f.params = fit(train_raw);
        const Matrix train_x = transform(train_raw, fit_f.params);
        const Matrix val_x = transform(val_raw, fit_f.params);
        const auto train_y = d.labels(train_rows);
        const auto val_y = d.labels(val_rows);
        std::vector<std::string> val_subjects;
        for (auto i : val_rows)
            val_subjects.push_back(d.rows()[i].subject_id);
        try {
            fit_f.metrics = fit_and_score(train_x, train_y, val_x, val_y, val_subjects, opts.solver,
                                          &fit_f.model, &fit_f.predictions);
        } catch (const InputError& e) {
            throw InputError("fold " + std::to_string(f) + ": " + e.what());
        }
    }
    return fits;
}

std::vector<MetricSet> evaluate_subset(const Dataset& d, std::span<const std::size_t> subset,
                                       const FoldPlan& plan, const ModelOptions& opts)
{
    std::vector<MetricSet> out;
    for (auto& f : evaluate_subset_detailed(d, subset, plan, opts))
        out.push_back(f.metrics);
    return out;
}

FoldEngine::FoldEngine(const Dataset& d, const FoldPlan& plan, const ModelOptions& opts, Exec exec)
    : opts_(opts), exec_(exec)
{
    check_plan(d, plan);
    folds_.resize(plan.k);
    for (std::size_t f = 0; f < plan.k; ++f) {
        const auto [train_rows, val_rows] = split_rows(d, plan, f);
        auto& fold = folds_[f];
        const Matrix train_raw = d.feature_matrix(train_rows);
        fold.params = fit(train_raw, exec);
        fold.train_x = transform(train_raw, fold.params, exec);
        fold.val_x = transform(d.feature_matrix(val_rows), fold.params, exec);
        fold.train_y = d.labels(train_rows);
        fold.val_y = d.labels(val_rows);
        for (auto i : val_rows)
            fold.val_subjects.push_back(d.rows()[i].subject_id);
    }
}

MetricSet FoldEngine::score_fold(std::size_t f, std::span<const std::size_t> subset) const
{
    const auto& fold = folds_[f];
    try {
        return fit_and_score(fold.train_x.select_columns(subset), fold.train_y, fold.val_x.select_columns(subset),
                             fold.val_y, fold.val_subjects, opts_.solver, nullptr, nullptr);
    } catch (const InputError& e) {
        throw InputError("fold " + std::to_string(f) + ": " + e.what());
    }
}

std::vector<MetricSet> FoldEngine::resolve(const std::vector<Key>& jobs)
{
    std::vector<Key> misses;
    {
        std::set<Key> pending;
        for (const auto& job : jobs)
            if (!cache_.contains(job) && pending.insert(job).second)
                misses.push_back(job);
    }
    std::vector<MetricSet> computed(misses.size());
    std::vector<std::exception_ptr> errors(misses.size());
    const auto n = static_cast<std::ptrdiff_t>(misses.size());
    const auto run = [&](std::ptrdiff_t i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            computed[u] = score_fold(misses[u].first, misses[u].second);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    };
    if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            run(i);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    for (std::size_t i = 0; i < misses.size(); ++i)
        cache_.emplace(std::move(misses[i]), computed[i]);
    evaluations_ += misses.size();

    std::vector<MetricSet> out;
    out.reserve(jobs.size());
    for (const auto& job : jobs)
        out.push_back(cache_.at(job));
    return out;
}

SubsetScore mean_score(std::vector<MetricSet> folds)
{
    SubsetScore s;
    for (const auto& m : folds) {
        s.accuracy += m.accuracy;
        s.cross_entropy += m.cross_entropy;
    }
    if (!folds.empty()) {
        s.accuracy /= static_cast<double>(folds.size());
        s.cross_entropy /= static_cast<double>(folds.size());
    }
    s.folds = std::move(folds);
    return s;
}

SubsetScore FoldEngine::evaluate_per_fold(const std::vector<std::vector<std::size_t>>& fold_subsets)
{
    if (fold_subsets.size() != folds_.size())
        throw InputError("evaluate_per_fold: need one subset per fold");
    std::vector<Key> jobs;
    for (std::size_t f = 0; f < folds_.size(); ++f)
        jobs.emplace_back(f, sorted_copy(fold_subsets[f]));
    return mean_score(resolve(jobs));
}

std::vector<SubsetScore> FoldEngine::evaluate_batch(const std::vector<std::vector<std::size_t>>& subsets)
{
    std::vector<Key> jobs;
    for (const auto& s : subsets) {
        if (s.empty())
            throw InputError("evaluate: empty feature subset");
        auto sorted = sorted_copy(s);
        for (std::size_t f = 0; f < folds_.size(); ++f)
            jobs.emplace_back(f, sorted);
    }
    auto metrics = resolve(jobs);
    std::vector<SubsetScore> out;
    out.reserve(subsets.size());
    const std::size_t k = folds_.size();
    for (std::size_t s = 0; s < subsets.size(); ++s)
        out.push_back(mean_score({metrics.begin() + static_cast<std::ptrdiff_t>(s * k),
                                  metrics.begin() + static_cast<std::ptrdiff_t>((s + 1) * k)}));
    return out;
}

SubsetScore FoldEngine::evaluate(std::span<const std::size_t> subset)
{
    return evaluate_batch({std::vector<std::size_t>(subset.begin(), subset.end())}).front();
}

MetricSet FoldEngine::evaluate_fold(std::size_t f, std::span<const std::size_t> subset)
{
    return resolve({Key{f, sorted_copy(subset)}}).front();
}

FeatureRanking full_data_ranking(const Dataset& d, Method method, const ModelOptions& opts)
{
    const Matrix raw = d.feature_matrix();
    const Matrix X = transform(raw, fit(raw));
    return rank(method, X, d.labels(), opts);
}

ResultRow run_baseline(const Dataset& d, const ExperimentConfig& cfg)
{
    validate_config(d, cfg);
    const auto plan = stratified_group_kfold(d.subjects(), cfg.k, cfg.seed);
    FoldEngine engine(d, plan, cfg.model, cfg.exec);
    const auto all = all_features();
    ResultRow row;
    row.n_selected = kNumFeatures;
    row.subset = all;
    row.fold_subsets.assign(plan.k, all);
    row.folds = engine.evaluate(all).folds;
    row.summary = summarize_folds(row.folds);
    return row;
}

ExperimentResult run_experiment(const Dataset& d, const ExperimentConfig& cfg)
{
    validate_config(d, cfg);
    const auto plan = stratified_group_kfold(d.subjects(), cfg.k, cfg.seed);
    FoldEngine engine(d, plan, cfg.model, cfg.exec);
    if (cfg.nested)
        return run_nested(d, cfg, plan, engine);

    ExperimentResult result;
    result.config = cfg;
    result.plan = plan;

    const auto all = all_features();
    ResultRow baseline;
    baseline.n_selected = kNumFeatures;
    baseline.subset = all;
    baseline.fold_subsets.assign(plan.k, all);
    baseline.folds = engine.evaluate(all).folds;
    baseline.summary = summarize_folds(baseline.folds);
    result.rows.push_back(std::move(baseline));

    for (auto m : cfg.methods) {
        std::optional<FeatureRanking> reported;
        if (m != Method::sfs)
            reported = full_data_ranking(d, m, cfg.model);
        auto mc = select_with(engine, m, cfg.strategies, reported ? &*reported : nullptr, cfg);
        for (std::size_t c = 0; c < mc.curves.size(); ++c) {
            const auto& curve = mc.curves[c];
            const auto& point = curve.points[curve.best_n - 1];
            result.rows.push_back(row_from_point(point, curve, fold_subsets_at(mc, c, curve.best_n)));
        }
        for (auto& curve : mc.curves)
            result.curves.push_back({std::move(curve), std::nullopt});
    }
    return result;
}

} // namespace fsgate
