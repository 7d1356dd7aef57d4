#include "fsgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fsgate/error.hpp"
#include "fsgate/linmodel.hpp"

namespace fsgate {

namespace {

double ratio(double num, double den)
{
    return den == 0.0 ? 0.0 : num / den;
}

// Member pointers let summarize_folds walk the seven metrics uniformly.
constexpr double MetricSet::*kFields[] = {
    &MetricSet::accuracy, &MetricSet::specificity, &MetricSet::sensitivity, &MetricSet::precision,
    &MetricSet::f1,       &MetricSet::mcc,         &MetricSet::cross_entropy,
};

} // namespace

std::vector<SubjectPrediction> aggregate_subjects(std::span<const double> record_probs,
                                                  std::span<const std::string> record_subjects,
                                                  std::span<const int> record_labels)
{
    if (record_probs.size() != record_subjects.size() || record_probs.size() != record_labels.size())
        throw InputError("aggregate_subjects: probability, subject and label vectors differ in length");

    std::vector<SubjectPrediction> preds;
    std::vector<std::size_t> counts;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < record_probs.size(); ++i) {
        auto [it, inserted] = index.try_emplace(record_subjects[i], preds.size());
        if (inserted) {
            preds.push_back({record_subjects[i], 0.0, 0, record_labels[i]});
            counts.push_back(0);
        } else if (preds[it->second].actual != record_labels[i]) {
            throw InputError("subject '" + record_subjects[i] + "' has inconsistent labels");
        }
        preds[it->second].mean_prob += record_probs[i];
        ++counts[it->second];
    }
    for (std::size_t s = 0; s < preds.size(); ++s) {
        preds[s].mean_prob /= static_cast<double>(counts[s]);
        preds[s].predicted = preds[s].mean_prob >= 0.5 ? 1 : 0;
    }
    return preds;
}

ConfusionCounts confusion(std::span<const SubjectPrediction> preds)
{
    ConfusionCounts c;
    for (const auto& p : preds) {
        if (p.actual == 1)
            (p.predicted == 1 ? c.tp : c.fn)++;
        else
            (p.predicted == 1 ? c.fp : c.tn)++;
    }
    return c;
}

BasicRates basic_rates(const ConfusionCounts& c)
{
    const double tp = static_cast<double>(c.tp);
    const double tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    BasicRates r;
    r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    r.specificity = ratio(tn, tn + fp);
    r.sensitivity = ratio(tp, tp + fn);
    r.precision = ratio(tp, tp + fp);
    r.f1 = ratio(2.0 * r.precision * r.sensitivity, r.precision + r.sensitivity);
    return r;
}

double mcc(const ConfusionCounts& c)
{
    const double tp = static_cast<double>(c.tp);
    const double tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (den == 0.0)
        return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(den);
}

double cross_entropy(std::span<const SubjectPrediction> preds)
{
    if (preds.empty())
        return 0.0;
    double sum = 0.0;
    for (const auto& p : preds) {
        const double q = std::clamp(p.mean_prob, kProbabilityClip, 1.0 - kProbabilityClip);
        sum -= p.actual == 1 ? std::log(q) : std::log1p(-q);
    }
    return sum / static_cast<double>(preds.size());
}

MetricSet compute_metrics(std::span<const SubjectPrediction> preds)
{
    const auto c = confusion(preds);
    const auto r = basic_rates(c);
    return {r.accuracy, r.specificity, r.sensitivity, r.precision, r.f1, mcc(c), cross_entropy(preds)};
}

MetricSummary summarize_folds(std::span<const MetricSet> per_fold)
{
    MetricSummary s;
    if (per_fold.empty())
        return s;
    const double k = static_cast<double>(per_fold.size());
    for (auto field : kFields) {
        // Offsets from the first fold keep identical folds exact.
        const double first = per_fold.front().*field;
        double sum = 0.0;
        for (const auto& m : per_fold)
            sum += m.*field - first;
        const double mean = first + sum / k;
        double ss = 0.0;
        for (const auto& m : per_fold)
            ss += (m.*field - mean) * (m.*field - mean);
        s.mean.*field = mean;
        s.std.*field = std::sqrt(ss / k);
    }
    return s;
}

} // namespace fsgate
