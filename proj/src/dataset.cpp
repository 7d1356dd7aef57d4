#include "fsgate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

// clang-format off
constexpr std::array<FeatureInfo, kNumFeatures> kFeatures{{
    {"jitter_local",             "Jitter (local)",               false,   2.68,    1.78,   0.19,     14.38},
    {"jitter_local_absolute",    "Jitter (local, absolute)",     false,   0.0002,  0.0001, 0.000006, 0.0008},
    {"jitter_rap",               "Jitter (rap)",                 false,   1.25,    0.98,   0.06,     8.02},
    {"jitter_ppq5",              "Jitter (ppq5)",                false,   1.35,    1.14,   0.08,     13.54},
    {"jitter_ddp",               "Jitter (ddp)",                 false,   3.74,    2.94,   0.19,     24.05},
    {"shimmer_local",            "Shimmer (local)",              false,  12.92,    5.45,   1.19,     41.14},
    {"shimmer_local_db",         "Shimmer (local, dB)",          false,   1.19,    0.42,   0.10,     2.72},
    {"shimmer_apq3",             "Shimmer (apq3)",               false,   5.70,    3.02,   0.50,     25.82},
    {"shimmer_apq5",             "Shimmer (apq5)",               false,   7.98,    4.84,   0.71,     72.86},
    {"shimmer_apq11",            "Shimmer (apq11)",              false,  12.21,    6.02,   0.52,     44.76},
    {"shimmer_dda",              "Shimmer (dda)",                false,  17.10,    9.05,   1.49,     77.46},
    {"autocorrelation",          "Autocorrelation",              false,   0.85,    0.09,   0.54,     0.99},
    {"noise_to_harmonic",        "Noise-to-Harmonic",            false,   0.23,    0.15,   0.002,    0.87},
    {"harmonic_to_noise",        "Harmonic-to-Noise",            false,   9.99,    4.29,   0.70,     28.42},
    {"median_pitch",             "Median pitch",                 false, 163.37,   56.02,  81.46,     468.62},
    {"mean_pitch",               "Mean pitch",                   false, 168.73,   55.97,  82.36,     470.46},
    {"std_pitch",                "Standard dev. of pitch",       false,  27.55,   36.67,   0.53,     293.88},
    {"min_pitch",                "Minimum pitch",                false, 134.54,   47.06,  67.96,     452.08},
    {"max_pitch",                "Maximum pitch",                false, 234.86,  121.54,  85.54,     597.97},
    {"num_pulses",               "Number of pulses",             true,  109.74,  150.03,   0.0,      1490.0},
    {"num_periods",              "Number of periods",            true,  105.97,  149.42,   0.0,      1489.0},
    {"mean_period",              "Mean period",                  false,   0.007,   0.002,  0.002,    0.01},
    {"std_period",               "Standard dev. of period",      false,   0.001,   0.001,  0.0001,   0.01},
    {"fraction_unvoiced_frames", "Fraction of unvoiced frames",  false,  27.68,   20.98,   0.0,      88.16},
    {"num_voice_breaks",         "Number of voice breaks",       true,    1.13,    1.61,   0.0,      12.0},
    {"degree_voice_breaks",      "Degree of voice breaks",       false,  12.37,   15.16,   0.0,      69.12},
}};
// clang-format on

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell)
{
    if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::string describe(const ColumnRef& ref)
{
    if (const auto* idx = std::get_if<std::size_t>(&ref))
        return "column #" + std::to_string(*idx);
    return "column '" + std::get<std::string>(ref) + "'";
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header, std::size_t width)
{
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (*idx >= width)
            throw SchemaError("missing " + describe(ref) + " (file has " + std::to_string(width) +
                              " columns)");
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw SchemaError("missing " + describe(ref) + " in header");
    return static_cast<std::size_t>(it - header.begin());
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const std::array<FeatureInfo, kNumFeatures>& feature_table()
{
    return kFeatures;
}

std::vector<std::string> feature_names()
{
    std::vector<std::string> names;
    names.reserve(kNumFeatures);
    for (const auto& f : kFeatures)
        names.emplace_back(f.name);
    return names;
}

std::optional<std::size_t> feature_index(std::string_view name)
{
    for (std::size_t j = 0; j < kNumFeatures; ++j)
        if (kFeatures[j].name == name)
            return j;
    return std::nullopt;
}

Dataset::Dataset(std::vector<RecordingRow> rows) : rows_(std::move(rows))
{
    std::unordered_map<std::string, std::size_t> index;
    subject_of_row_.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (r.label != 0 && r.label != 1)
            throw IntegrityError("row " + std::to_string(i) + ": label must be 0 or 1");
        for (double v : r.features)
            if (!std::isfinite(v))
                throw IntegrityError("row " + std::to_string(i) + ": non-finite feature value");
        auto [it, inserted] = index.try_emplace(r.subject_id, subjects_.size());
        if (inserted)
            subjects_.push_back({r.subject_id, r.label});
        else if (subjects_[it->second].label != r.label)
            throw IntegrityError("subject '" + r.subject_id + "' has rows with both labels");
        subject_of_row_.push_back(it->second);
    }
    std::size_t positives = 0;
    for (const auto& s : subjects_)
        positives += static_cast<std::size_t>(s.label);
    const std::size_t negatives = subjects_.size() - positives;
    if (positives < 2 || negatives < 2)
        throw IntegrityError("need at least 2 subjects per class, got " + std::to_string(positives) +
                             " PWP and " + std::to_string(negatives) + " healthy");
}

std::vector<std::size_t> Dataset::rows_of_subjects(const std::set<std::string>& ids) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (ids.contains(rows_[i].subject_id))
            out.push_back(i);
    return out;
}

Matrix Dataset::feature_matrix(std::span<const std::size_t> rows) const
{
    Matrix m(rows.size(), kNumFeatures);
    for (std::size_t j = 0; j < kNumFeatures; ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            m(i, j) = rows_[rows[i]].features[j];
    return m;
}

Matrix Dataset::feature_matrix() const
{
    std::vector<std::size_t> all(rows_.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    return feature_matrix(all);
}

std::vector<int> Dataset::labels(std::span<const std::size_t> rows) const
{
    std::vector<int> y;
    y.reserve(rows.size());
    for (auto i : rows)
        y.push_back(rows_[i].label);
    return y;
}

std::vector<int> Dataset::labels() const
{
    std::vector<int> y;
    y.reserve(rows_.size());
    for (const auto& r : rows_)
        y.push_back(r.label);
    return y;
}

Dataset Dataset::restrict_to(const std::set<std::string>& ids) const
{
    std::vector<RecordingRow> kept;
    for (const auto& r : rows_)
        if (ids.contains(r.subject_id))
            kept.push_back(r);
    return Dataset(std::move(kept));
}

ColumnSchema ColumnSchema::uci_default()
{
    ColumnSchema s;
    s.subject = std::size_t{0};
    for (std::size_t j = 0; j < kNumFeatures; ++j)
        s.features.emplace_back(std::size_t{1 + j});
    s.ignore = {std::size_t{27}};
    s.label = std::size_t{28};
    return s;
}

ColumnSchema ColumnSchema::canonical()
{
    ColumnSchema s;
    s.has_header = true;
    s.subject = std::string("subject_id");
    s.label = std::string("class");
    for (const auto& f : kFeatures)
        s.features.emplace_back(std::string(f.name));
    return s;
}

Dataset parse_csv(std::istream& in, const ColumnSchema& schema)
{
    if (schema.features.size() != kNumFeatures)
        throw SchemaError("schema must name exactly 26 feature columns, got " +
                          std::to_string(schema.features.size()));
    if (!schema.subject && !schema.rows_per_subject)
        throw SchemaError("schema needs a subject column or rows_per_subject");
    if (schema.rows_per_subject && *schema.rows_per_subject == 0)
        throw SchemaError("rows_per_subject must be positive");

    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    bool header_read = !schema.has_header;

    std::size_t width = 0;
    std::size_t subject_col = 0;
    std::size_t label_col = 0;
    std::array<std::size_t, kNumFeatures> feature_cols{};
    bool resolved = false;

    std::vector<RecordingRow> rows;
    std::map<std::string, int> recording_counter;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto cells = split(line, schema.delimiter);
        if (!header_read) {
            for (auto c : cells)
                header.emplace_back(c);
            header_read = true;
            continue;
        }
        if (!resolved) {
            width = schema.has_header ? header.size() : cells.size();
            if (schema.subject)
                subject_col = resolve(*schema.subject, header, width);
            label_col = resolve(schema.label, header, width);
            for (std::size_t j = 0; j < kNumFeatures; ++j)
                feature_cols[j] = resolve(schema.features[j], header, width);
            for (const auto& ig : schema.ignore)
                resolve(ig, header, width);
            resolved = true;
        }
        if (cells.size() != width)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " cells, found " + std::to_string(cells.size()));

        RecordingRow row;
        if (schema.subject) {
            row.subject_id = std::string(cells[subject_col]);
            if (row.subject_id.empty())
                throw ParseError("line " + std::to_string(line_no) + ": empty subject id");
        } else {
            row.subject_id = std::to_string(rows.size() / *schema.rows_per_subject + 1);
        }
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            auto cell = cells[feature_cols[j]];
            auto v = parse_number(cell);
            if (!v)
                throw ParseError("line " + std::to_string(line_no) + ", column " +
                                 std::to_string(feature_cols[j]) + " (" + std::string(kFeatures[j].name) +
                                 "): cannot parse '" + std::string(cell) + "' as a finite number");
            row.features[j] = *v;
        }
        auto lv = parse_number(cells[label_col]);
        if (!lv || (*lv != 0.0 && *lv != 1.0))
            throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(label_col) +
                             ": class must be 0 or 1, got '" + std::string(cells[label_col]) + "'");
        row.label = static_cast<int>(*lv);
        row.recording_index = recording_counter[row.subject_id]++;
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("no data rows");
    return Dataset(std::move(rows));
}

Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open dataset file '" + path.string() + "'");
    return parse_csv(in, schema);
}

void write_csv(const Dataset& d, std::ostream& out)
{
    out << "subject_id,class";
    for (const auto& f : kFeatures)
        out << ',' << f.name;
    out << '\n';
    for (const auto& r : d.rows()) {
        out << r.subject_id << ',' << r.label;
        for (double v : r.features)
            out << ',' << format_double(v);
        out << '\n';
    }
}

ValidationReport validate_ranges(std::span<const RecordingRow> rows)
{
    ValidationReport report;
    report.rows = rows.size();
    if (rows.empty())
        return report;
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        auto& st = report.features[j];
        double sum = 0.0;
        for (const auto& r : rows)
            sum += r.features[j];
        st.mean = sum / n;
        double ss = 0.0;
        for (const auto& r : rows) {
            const double v = r.features[j];
            ss += (v - st.mean) * (v - st.mean);
            if (v < kFeatures[j].min)
                ++st.below_min;
            if (v > kFeatures[j].max)
                ++st.above_max;
        }
        st.std = std::sqrt(ss / n);
        const auto& info = kFeatures[j];
        if (st.below_min > 0)
            report.warnings.push_back(std::string(info.name) + ": " + std::to_string(st.below_min) +
                                      " value(s) below reference minimum " + format_double(info.min));
        if (st.above_max > 0)
            report.warnings.push_back(std::string(info.name) + ": " + std::to_string(st.above_max) +
                                      " value(s) above reference maximum " + format_double(info.max));
    }
    return report;
}

ValidationReport validate_ranges(const Dataset& d)
{
    return validate_ranges(d.rows());
}

Dataset synthesize(const SynthesisSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<RecordingRow> rows;
    rows.reserve(2 * spec.n_subjects_per_class * spec.n_recordings);
    std::size_t next_id = 1;
    // PWP subjects first, then healthy, matching the public file's layout.
    for (int label : {1, 0}) {
        for (std::size_t s = 0; s < spec.n_subjects_per_class; ++s) {
            const std::string id = std::to_string(next_id++);
            FeatureVector offset{};
            for (auto& o : offset)
                o = spec.subject_sd * normal(rng);
            for (std::size_t r = 0; r < spec.n_recordings; ++r) {
                RecordingRow row;
                row.subject_id = id;
                row.recording_index = static_cast<int>(r);
                row.label = label;
                for (std::size_t j = 0; j < kNumFeatures; ++j) {
                    double z = offset[j] + normal(rng);
                    if (label == 1 && spec.informative.contains(j))
                        z += spec.effect_size;
                    row.features[j] = kFeatures[j].mean + kFeatures[j].std * z;
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return Dataset(std::move(rows));
}

} // namespace fsgate
