#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsgate/cv.hpp"
#include "fsgate/featsel.hpp"

namespace fsgate {

// `;`-joined canonical feature names.
std::string format_subset(std::span<const std::size_t> subset);

std::string row_fs_name(const ResultRow& row);
std::string row_strategy_name(const ResultRow& row);

// Table-style results: fs, strategy, n_features, <metric>_mean, <metric>_std
// for accuracy .. mcc and cross_entropy, then subset. With a seed, a leading
// seed column is added.
void write_results_header(std::ostream& out, bool with_seed);
void write_results_rows(std::ostream& out, std::span<const ResultRow> rows, const std::uint64_t* seed);

// Per-fold detail records for every row.
void write_fold_details(std::ostream& out, std::span<const ResultRow> rows);

// Columns n, subset, accuracy, cross_entropy, is_best.
void write_curve_csv(std::ostream& out, const SelectionCurve& curve);

// Minimal line chart with a dashed vertical marker at best_n. Ranked methods
// plot the strategy's metric; SFS plots accuracy for both strategies.
void write_curve_svg(std::ostream& out, const SelectionCurve& curve);

std::string curve_basename(const SelectionCurve& curve);

// Median across seeds of every numeric results column, grouped by
// (fs, strategy).
struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<ResultRow> rows;
};
void write_seed_summary(std::ostream& out, std::span<const SeedRun> runs);

double median(std::vector<double> values);

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t file_hash(const std::filesystem::path& path);

// Writes to a temporary sibling then renames over the target.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace fsgate
