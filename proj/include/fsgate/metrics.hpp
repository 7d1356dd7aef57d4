#pragma once

#include <span>
#include <string>
#include <vector>

namespace fsgate {

// Subject-level decision: mean of the subject's record probabilities,
// thresholded at 0.5 (inclusive).
struct SubjectPrediction {
    std::string subject_id;
    double mean_prob = 0.0;
    int predicted = 0;
    int actual = 0;
};

// Positive class is PWP (label 1).
struct ConfusionCounts {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;

    long total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct BasicRates {
    double accuracy = 0.0;
    double specificity = 0.0;
    double sensitivity = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

struct MetricSet {
    double accuracy = 0.0;
    double specificity = 0.0;
    double sensitivity = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;
    double cross_entropy = 0.0;

    friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

struct MetricSummary {
    MetricSet mean;
    MetricSet std; // population standard deviation across folds
};

// One prediction per distinct subject, in order of first appearance.
std::vector<SubjectPrediction> aggregate_subjects(std::span<const double> record_probs,
                                                  std::span<const std::string> record_subjects,
                                                  std::span<const int> record_labels);

ConfusionCounts confusion(std::span<const SubjectPrediction> preds);

// Any 0/0 rate is reported as 0.
BasicRates basic_rates(const ConfusionCounts& c);
double mcc(const ConfusionCounts& c);

// Mean over subjects of -[y ln q + (1 - y) ln(1 - q)], q clipped to
// [1e-15, 1 - 1e-15].
double cross_entropy(std::span<const SubjectPrediction> preds);

MetricSet compute_metrics(std::span<const SubjectPrediction> preds);
MetricSummary summarize_folds(std::span<const MetricSet> per_fold);

} // namespace fsgate
