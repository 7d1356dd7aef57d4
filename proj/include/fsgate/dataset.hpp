#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fsgate/matrix.hpp"

namespace fsgate {

inline constexpr std::size_t kNumFeatures = 26;

// One row of the voice-feature summary table: canonical column name, display
// label and the reference corpus statistics used by validate_ranges().
struct FeatureInfo {
    std::string_view name;
    std::string_view label;
    bool integer;
    double mean;
    double std;
    double min;
    double max;
};

const std::array<FeatureInfo, kNumFeatures>& feature_table();
std::vector<std::string> feature_names();
std::optional<std::size_t> feature_index(std::string_view name);

using FeatureVector = std::array<double, kNumFeatures>;

struct RecordingRow {
    std::string subject_id;
    int recording_index = 0;
    FeatureVector features{};
    int label = 0; // 1 = PWP, 0 = healthy
};

struct Subject {
    std::string id;
    int label = 0;
};

// Immutable after construction. The constructor enforces: finite features,
// binary labels, one label per subject, and at least two subjects per class.
class Dataset {
public:
    explicit Dataset(std::vector<RecordingRow> rows);

    std::span<const RecordingRow> rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    // Subjects in order of first appearance.
    std::span<const Subject> subjects() const noexcept { return subjects_; }
    // Index into subjects() for every row.
    std::span<const std::size_t> subject_of_row() const noexcept { return subject_of_row_; }

    std::vector<std::size_t> rows_of_subjects(const std::set<std::string>& ids) const;
    Matrix feature_matrix(std::span<const std::size_t> rows) const;
    Matrix feature_matrix() const;
    std::vector<int> labels(std::span<const std::size_t> rows) const;
    std::vector<int> labels() const;

    // Restriction to a set of subjects (used for nested cross-validation).
    Dataset restrict_to(const std::set<std::string>& ids) const;

private:
    std::vector<RecordingRow> rows_;
    std::vector<Subject> subjects_;
    std::vector<std::size_t> subject_of_row_;
};

// Columns are addressed by 0-based position or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnSchema {
    char delimiter = ',';
    bool has_header = false;
    // Unset together with rows_per_subject set: subjects are consecutive
    // blocks of that many rows.
    std::optional<ColumnRef> subject;
    std::vector<ColumnRef> features; // exactly 26, in feature-table order
    ColumnRef label = std::size_t{0};
    std::vector<ColumnRef> ignore;   // e.g. UPDRS; checked for existence, then dropped
    std::optional<std::size_t> rows_per_subject;

    // Layout of the public voice-recording training file: id, 26 features,
    // UPDRS, class. No header.
    static ColumnSchema uci_default();
    // Layout written by write_csv(): header with subject_id, class, features.
    static ColumnSchema canonical();
};

Dataset parse_csv(std::istream& in, const ColumnSchema& schema);
Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);
void write_csv(const Dataset& d, std::ostream& out);

struct FeatureRangeStats {
    double mean = 0.0;
    double std = 0.0; // population
    std::size_t below_min = 0;
    std::size_t above_max = 0;
};

struct ValidationReport {
    std::size_t rows = 0;
    std::array<FeatureRangeStats, kNumFeatures> features{};
    std::vector<std::string> warnings;
};

ValidationReport validate_ranges(std::span<const RecordingRow> rows);
ValidationReport validate_ranges(const Dataset& d);

struct SynthesisSpec {
    std::uint64_t seed = 0;
    std::size_t n_subjects_per_class = 20;
    std::size_t n_recordings = 26;
    std::set<std::size_t> informative;
    double effect_size = 0.0;
    // Standard deviation of the per-subject offset, in units of the
    // per-recording noise.
    double subject_sd = 0.5;
};

// Deterministic synthetic cohort shaped like the voice corpus: each feature is
// mean_j + std_j * z with z standard-normal-ish noise; informative features are
// shifted by effect_size (in noise units) for PWP subjects.
Dataset synthesize(const SynthesisSpec& spec);

} // namespace fsgate
