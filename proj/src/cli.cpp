#include "fsgate/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "fsgate/config.hpp"
#include "fsgate/cv.hpp"
#include "fsgate/dataset.hpp"
#include "fsgate/error.hpp"
#include "fsgate/report.hpp"

namespace fsgate {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> data;
    std::optional<std::string> layout;
    std::optional<std::string> delimiter;
    std::optional<std::string> rows_per_subject;
    std::optional<std::string> k;
    std::optional<std::string> seed;
    std::optional<std::string> seeds;
    std::vector<std::string> methods;
    std::vector<std::string> strategies;
    bool nested = false;
    std::optional<std::string> out;
    bool strict = false;
};

void add_common(CLI::App& cmd, Overrides& o)
{
    cmd.add_option("--config", o.config, "Key-value run configuration file");
    cmd.add_option("--data", o.data, "Dataset file");
    cmd.add_option("--layout", o.layout, "Column layout preset: uci (default) or canonical");
    cmd.add_option("--delimiter", o.delimiter, "Field delimiter (single character or 'tab')");
    cmd.add_option("--rows-per-subject", o.rows_per_subject, "Assign subjects by consecutive row blocks");
    cmd.add_option("--k", o.k, "Number of folds");
    cmd.add_option("--seed", o.seed, "Fold-assignment seed");
    cmd.add_option("--seeds", o.seeds, "Comma-separated seeds (multi-seed mode)");
    cmd.add_option("--methods", o.methods, "anova, lasso, sfs")->delimiter(',');
    cmd.add_option("--strategies", o.strategies, "max_accuracy, min_cross_entropy")->delimiter(',');
    cmd.add_flag("--nested", o.nested, "Select features with inner folds of each training fold");
    cmd.add_option("--out", o.out, "Output directory");
    cmd.add_flag("--strict", o.strict, "validate: treat range warnings as failures");
}

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + v[i];
    return s;
}

RunConfig build_config(const Overrides& o)
{
    RunConfig cfg;
    if (o.config)
        load_config_file(*o.config, cfg);
    // Layout first: it resets the schema that later flags refine.
    if (o.layout)
        apply_setting(cfg, "layout", *o.layout);
    if (o.data)
        apply_setting(cfg, "data", *o.data);
    if (o.delimiter)
        apply_setting(cfg, "delimiter", *o.delimiter);
    if (o.rows_per_subject)
        apply_setting(cfg, "rows_per_subject", *o.rows_per_subject);
    if (o.k)
        apply_setting(cfg, "k", *o.k);
    if (o.seed)
        apply_setting(cfg, "seed", *o.seed);
    if (o.seeds)
        apply_setting(cfg, "seeds", *o.seeds);
    if (!o.methods.empty())
        apply_setting(cfg, "methods", join(o.methods));
    if (!o.strategies.empty())
        apply_setting(cfg, "strategies", join(o.strategies));
    if (o.nested)
        cfg.experiment.nested = true;
    if (o.out)
        apply_setting(cfg, "out", *o.out);
    if (o.strict)
        cfg.strict = true;
    validate(cfg);
    return cfg;
}

Dataset load(const RunConfig& cfg)
{
    if (cfg.data.empty())
        throw ConfigError("no dataset given (use --data or 'data =' in the config)");
    if (!fs::exists(cfg.data))
        throw ParseError("dataset file '" + cfg.data.string() + "' does not exist");
    return load_csv(cfg.data, cfg.schema);
}

std::string fmt(const char* f, double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void print_rows(std::ostream& out, std::span<const ResultRow> rows)
{
    out << "fs      strategy            n   accuracy       specificity    sensitivity    precision      "
           "f1             mcc             cross_entropy\n";
    for (const auto& r : rows) {
        std::string line = row_fs_name(r);
        line.resize(8, ' ');
        auto st = row_strategy_name(r);
        st.resize(20, ' ');
        line += st;
        auto n = std::to_string(r.n_selected);
        n.resize(4, ' ');
        line += n;
        const auto& m = r.summary.mean;
        const auto& s = r.summary.std;
        const double means[] = {m.accuracy, m.specificity, m.sensitivity, m.precision, m.f1, m.mcc,
                                m.cross_entropy};
        const double stds[] = {s.accuracy, s.specificity, s.sensitivity, s.precision, s.f1, s.mcc,
                               s.cross_entropy};
        for (int i = 0; i < 7; ++i) {
            auto cell = fmt("%.3f", means[i]) + " (" + fmt("%.3f", stds[i]) + ")";
            cell.resize(15, ' ');
            line += cell;
        }
        out << line << "  " << format_subset(r.subset) << '\n';
    }
}

std::string manifest_text(const std::string& command, const RunConfig& cfg, const Dataset& d,
                          const std::vector<FoldPlan>& plans)
{
    std::ostringstream o;
    o << "fsgate_version = " << kVersion << '\n';
    o << "command = " << command << '\n';
    o << echo(cfg);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(file_hash(cfg.data)));
    o << "dataset_hash = fnv1a64:" << hash << '\n';
    o << "dataset_rows = " << d.size() << '\n';
    o << "dataset_subjects = " << d.subjects().size() << '\n';
    o << "subject_decision = mean record probability >= 0.5\n";
    o << "cross_entropy = mean over subjects, probabilities clipped to [1e-15, 1-1e-15]\n";
    o << "fold_std = population (denominator k)\n";
    o << "refit_model = unpenalized logistic regression" << (cfg.experiment.model.solver.ridge > 0 ? " + ridge" : "")
      << '\n';
    o << "selection_protocol = "
      << (cfg.experiment.nested ? "nested (inner folds within each training fold)"
                                : "outer folds (selection curves use the reporting folds)")
      << '\n';
    for (const auto& plan : plans)
        for (std::size_t f = 0; f < plan.folds.size(); ++f) {
            o << "plan.seed" << plan.seed << ".fold" << f << " = ";
            for (std::size_t i = 0; i < plan.folds[f].size(); ++i)
                o << (i ? ";" : "") << plan.folds[f][i];
            o << '\n';
        }
    return o.str();
}

std::string results_text(std::span<const ResultRow> rows)
{
    std::ostringstream o;
    write_results_header(o, false);
    write_results_rows(o, rows, nullptr);
    return o.str();
}

std::string folds_text(std::span<const ResultRow> rows)
{
    std::ostringstream o;
    write_fold_details(o, rows);
    return o.str();
}

void write_run_outputs(const fs::path& dir, std::span<const ResultRow> rows, std::span<const CurveRecord> curves)
{
    fs::create_directories(dir);
    atomic_write(dir / "results.csv", results_text(rows));
    atomic_write(dir / "folds.csv", folds_text(rows));
    for (const auto& rec : curves) {
        auto base = curve_basename(rec.curve);
        if (rec.outer_fold)
            base += "_outer" + std::to_string(*rec.outer_fold);
        std::ostringstream csv, svg;
        write_curve_csv(csv, rec.curve);
        write_curve_svg(svg, rec.curve);
        atomic_write(dir / (base + ".csv"), csv.str());
        atomic_write(dir / (base + ".svg"), svg.str());
    }
}

int cmd_validate(const RunConfig& cfg, std::ostream& out)
{
    const auto d = load(cfg);
    const auto report = validate_ranges(d);
    const auto& table = feature_table();
    out << "rows " << report.rows << ", subjects " << d.subjects().size() << '\n';
    out << "feature                    mean        std         ref_mean    ref_std     below  above\n";
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        std::string name(table[j].name);
        name.resize(27, ' ');
        const auto& st = report.features[j];
        auto col = [](double v) {
            auto s = fmt("%.5g", v);
            s.resize(12, ' ');
            return s;
        };
        out << name << col(st.mean) << col(st.std) << col(table[j].mean) << col(table[j].std) << st.below_min
            << "      " << st.above_max << '\n';
    }
    for (const auto& w : report.warnings)
        out << "warning: " << w << '\n';
    out << report.warnings.size() << " warning(s)\n";
    if (cfg.strict && !report.warnings.empty())
        return kExitStrictFailure;
    return kExitOk;
}

int cmd_run(const std::string& command, const RunConfig& cfg, std::ostream& out)
{
    const auto d = load(cfg);
    const bool sweep = command == "sweep";
    std::vector<std::uint64_t> seeds = cfg.seeds;
    const bool multi = !seeds.empty();
    if (!multi)
        seeds.push_back(cfg.experiment.seed);

    fs::create_directories(cfg.out);
    std::vector<SeedRun> runs;
    std::vector<FoldPlan> plans;
    for (auto seed : seeds) {
        auto ex = cfg.experiment;
        ex.seed = seed;
        std::vector<ResultRow> rows;
        std::vector<CurveRecord> curves;
        if (sweep) {
            auto result = run_experiment(d, ex);
            rows = std::move(result.rows);
            curves = std::move(result.curves);
            plans.push_back(std::move(result.plan));
        } else {
            rows.push_back(run_baseline(d, ex));
            plans.push_back(stratified_group_kfold(d.subjects(), ex.k, seed));
        }
        const fs::path dir = multi ? cfg.out / ("seed_" + std::to_string(seed)) : cfg.out;
        write_run_outputs(dir, rows, curves);
        if (multi)
            out << "seed " << seed << '\n';
        print_rows(out, rows);
        runs.push_back({seed, std::move(rows)});
    }
    if (multi) {
        std::ostringstream all, summary;
        write_results_header(all, true);
        for (const auto& run : runs)
            write_results_rows(all, run.rows, &run.seed);
        write_seed_summary(summary, runs);
        atomic_write(cfg.out / "results.csv", all.str());
        atomic_write(cfg.out / "summary.csv", summary.str());
        out << "median over " << runs.size() << " seeds written to " << (cfg.out / "summary.csv").string() << '\n';
    }
    atomic_write(cfg.out / "manifest.txt", manifest_text(command, cfg, d, plans));
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Subject-level feature selection and logistic-regression evaluation", "fsgate"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);
    Overrides validate_o, baseline_o, sweep_o;
    auto* validate_cmd = app.add_subcommand("validate", "Check feature ranges and print per-feature statistics");
    auto* baseline_cmd = app.add_subcommand("baseline", "Evaluate the all-features model");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every feature-selection method and strategy");
    add_common(*validate_cmd, validate_o);
    add_common(*baseline_cmd, baseline_o);
    add_common(*sweep_cmd, sweep_o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::Success&) {
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "fsgate: " << e.what() << '\n';
        return kExitInputError;
    }

    try {
        if (validate_cmd->parsed())
            return cmd_validate(build_config(validate_o), out);
        if (baseline_cmd->parsed())
            return cmd_run("baseline", build_config(baseline_o), out);
        return cmd_run("sweep", build_config(sweep_o), out);
    } catch (const NumericalError& e) {
        err << "fsgate: numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const Error& e) {
        err << "fsgate: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "fsgate: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "fsgate: internal failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
}

} // namespace fsgate
