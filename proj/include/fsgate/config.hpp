#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fsgate/cv.hpp"
#include "fsgate/dataset.hpp"

namespace fsgate {

struct RunConfig {
    std::filesystem::path data;
    ColumnSchema schema = ColumnSchema::uci_default();
    std::string layout = "uci";
    ExperimentConfig experiment;
    std::vector<std::uint64_t> seeds; // non-empty selects multi-seed mode
    std::filesystem::path out = "fsgate_out";
    bool strict = false;
};

// Flat `key = value` lines; `#` starts a comment. Unknown keys are errors.
// Recognised keys: data, layout (uci|canonical), delimiter, header,
// subject_column, class_column, feature_columns, ignore_columns,
// rows_per_subject, k, seed, seeds, methods, strategies, nested, inner_k,
// tolerance, max_iters, ridge, n_lambdas, lambda_ratio, out, strict.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void parse_config(std::istream& in, RunConfig& cfg);
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

// Range checks shared by all subcommands (k >= 2, non-empty method lists).
void validate(const RunConfig& cfg);

// Key-value echo sufficient to reproduce the run.
std::string echo(const RunConfig& cfg);

std::vector<std::string> split_list(std::string_view s);

} // namespace fsgate
