#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsgate/dataset.hpp"
#include "fsgate/exec.hpp"
#include "fsgate/featsel.hpp"
#include "fsgate/linmodel.hpp"
#include "fsgate/metrics.hpp"
#include "fsgate/preprocess.hpp"

namespace fsgate {

// k disjoint validation folds of subject ids. Every recording of a subject
// lives in exactly one fold.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::vector<std::string>> folds;
    std::uint64_t seed = 0;

    friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

// Shuffles subject ids within each class with a seeded generator and deals
// them round-robin into k folds (the healthy class continues the rotation
// where PWP stopped, keeping fold sizes within one of each other).
FoldPlan stratified_group_kfold(std::span<const Subject> subjects, std::size_t k, std::uint64_t seed);

struct ModelOptions {
    SolverOptions solver;
    PathOptions path;
};

// Everything fitted for one validation fold.
struct FoldFit {
    TransformParams params;
    LogisticModel model;
    std::vector<SubjectPrediction> predictions;
    MetricSet metrics;
};

// Reference path: fit preprocessing and the unpenalised model on each training
// fold restricted to `subset`, score the held-out subjects.
std::vector<FoldFit> evaluate_subset_detailed(const Dataset& d, std::span<const std::size_t> subset,
                                              const FoldPlan& plan, const ModelOptions& opts);
std::vector<MetricSet> evaluate_subset(const Dataset& d, std::span<const std::size_t> subset,
                                       const FoldPlan& plan, const ModelOptions& opts);

// Per-fold preprocessed matrices shared by every subset evaluation. The power
// transform and standardisation are fitted column by column, so fitting all
// 26 columns once and selecting columns afterwards equals fitting the subset.
// Scores are memoised by (fold, sorted subset); evaluate_batch is safe to call
// from one thread at a time and parallelises internally.
class FoldEngine {
public:
    struct Fold {
        Matrix train_x;
        std::vector<int> train_y;
        Matrix val_x;
        std::vector<int> val_y;
        std::vector<std::string> val_subjects;
        TransformParams params;
    };

    FoldEngine(const Dataset& d, const FoldPlan& plan, const ModelOptions& opts, Exec exec);

    std::size_t size() const noexcept { return folds_.size(); }
    const Fold& fold(std::size_t f) const { return folds_[f]; }
    Exec exec() const noexcept { return exec_; }

    // One subset per fold (rankings may differ by fold); returns fold-mean score.
    SubsetScore evaluate_per_fold(const std::vector<std::vector<std::size_t>>& fold_subsets);
    // The same subset on every fold, for many subsets at once.
    std::vector<SubsetScore> evaluate_batch(const std::vector<std::vector<std::size_t>>& subsets);
    SubsetScore evaluate(std::span<const std::size_t> subset);
    MetricSet evaluate_fold(std::size_t f, std::span<const std::size_t> subset);

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    using Key = std::pair<std::size_t, std::vector<std::size_t>>;
    MetricSet score_fold(std::size_t f, std::span<const std::size_t> subset) const;
    // Resolves every (fold, subset) job, computing misses in parallel.
    std::vector<MetricSet> resolve(const std::vector<Key>& jobs);

    std::vector<Fold> folds_;
    ModelOptions opts_;
    Exec exec_;
    std::map<Key, MetricSet> cache_;
    std::size_t evaluations_ = 0;
};

SubsetScore mean_score(std::vector<MetricSet> folds);

struct ExperimentConfig {
    std::size_t k = 4;
    std::uint64_t seed = 0;
    std::vector<Method> methods{Method::anova, Method::sfs, Method::lasso};
    std::vector<Strategy> strategies{Strategy::max_accuracy, Strategy::min_cross_entropy};
    bool nested = false;
    std::size_t inner_k = 3;
    ModelOptions model;
    Exec exec = Exec::parallel;
    std::size_t n_max_ranked = kNumFeatures;
    std::size_t n_max_sfs = kNumFeatures - 1;
};

struct ResultRow {
    std::optional<Method> method;     // empty for the all-features baseline
    std::optional<Strategy> strategy;
    std::size_t n_selected = 0;
    std::vector<std::size_t> subset;  // reported subset
    std::vector<std::vector<std::size_t>> fold_subsets;
    std::vector<MetricSet> folds;
    MetricSummary summary;
};

struct CurveRecord {
    SelectionCurve curve;
    std::optional<std::size_t> outer_fold; // set in nested mode
};

struct ExperimentResult {
    ExperimentConfig config;
    FoldPlan plan;
    std::vector<ResultRow> rows;
    std::vector<CurveRecord> curves;
};

ResultRow run_baseline(const Dataset& d, const ExperimentConfig& config);
ExperimentResult run_experiment(const Dataset& d, const ExperimentConfig& config);

// Ranking on the whole dataset after fitting preprocessing on all rows.
FeatureRanking full_data_ranking(const Dataset& d, Method method, const ModelOptions& opts);

} // namespace fsgate
