#include "fsgate/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <class T>
T parse_int(std::string_view key, std::string_view v)
{
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_real(std::string_view key, std::string_view v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

ColumnRef parse_column(std::string_view v)
{
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), idx);
    if (ec == std::errc{} && ptr == v.data() + v.size())
        return idx;
    return std::string(v);
}

std::string column_text(const ColumnRef& c)
{
    if (const auto* i = std::get_if<std::size_t>(&c))
        return std::to_string(*i);
    return std::get<std::string>(c);
}

std::string real_text(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(',', start);
        if (pos == std::string_view::npos)
            pos = s.size();
        auto item = trim(s.substr(start, pos - start));
        if (!item.empty())
            out.emplace_back(item);
        start = pos + 1;
    }
    return out;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value)
{
    value = trim(value);
    auto& ex = cfg.experiment;
    if (key == "data") {
        cfg.data = std::string(value);
    } else if (key == "layout") {
        if (value == "uci")
            cfg.schema = ColumnSchema::uci_default();
        else if (value == "canonical")
            cfg.schema = ColumnSchema::canonical();
        else
            throw ConfigError("layout must be 'uci' or 'canonical'");
        cfg.layout = std::string(value);
    } else if (key == "delimiter") {
        if (value == "tab" || value == "\\t")
            cfg.schema.delimiter = '\t';
        else if (value.size() == 1)
            cfg.schema.delimiter = value.front();
        else
            throw ConfigError("delimiter must be a single character or 'tab'");
    } else if (key == "header") {
        cfg.schema.has_header = parse_bool(key, value);
    } else if (key == "subject_column") {
        if (value.empty() || value == "none")
            cfg.schema.subject.reset();
        else
            cfg.schema.subject = parse_column(value);
    } else if (key == "class_column") {
        cfg.schema.label = parse_column(value);
    } else if (key == "feature_columns") {
        cfg.schema.features.clear();
        for (const auto& c : split_list(value))
            cfg.schema.features.push_back(parse_column(c));
    } else if (key == "ignore_columns") {
        cfg.schema.ignore.clear();
        for (const auto& c : split_list(value))
            cfg.schema.ignore.push_back(parse_column(c));
    } else if (key == "rows_per_subject") {
        cfg.schema.rows_per_subject = parse_int<std::size_t>(key, value);
        cfg.schema.subject.reset();
    } else if (key == "k") {
        ex.k = parse_int<std::size_t>(key, value);
    } else if (key == "seed") {
        ex.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& s : split_list(value))
            cfg.seeds.push_back(parse_int<std::uint64_t>(key, s));
    } else if (key == "methods") {
        ex.methods.clear();
        for (const auto& s : split_list(value)) {
            auto m = parse_method(s);
            if (!m)
                throw ConfigError("unknown method '" + s + "' (anova, lasso, sfs)");
            ex.methods.push_back(*m);
        }
    } else if (key == "strategies") {
        ex.strategies.clear();
        for (const auto& s : split_list(value)) {
            auto st = parse_strategy(s);
            if (!st)
                throw ConfigError("unknown strategy '" + s + "' (max_accuracy, min_cross_entropy)");
            ex.strategies.push_back(*st);
        }
    } else if (key == "nested") {
        ex.nested = parse_bool(key, value);
    } else if (key == "inner_k") {
        ex.inner_k = parse_int<std::size_t>(key, value);
    } else if (key == "tolerance") {
        ex.model.solver.tolerance = parse_real(key, value);
        ex.model.path.solver.tolerance = ex.model.solver.tolerance;
    } else if (key == "max_iters") {
        ex.model.solver.max_iters = parse_int<int>(key, value);
        ex.model.path.solver.max_iters = ex.model.solver.max_iters;
    } else if (key == "ridge") {
        ex.model.solver.ridge = parse_real(key, value);
    } else if (key == "n_lambdas") {
        ex.model.path.n_lambdas = parse_int<int>(key, value);
    } else if (key == "lambda_ratio") {
        ex.model.path.ratio = parse_real(key, value);
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else if (key == "strict") {
        cfg.strict = parse_bool(key, value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void parse_config(std::istream& in, RunConfig& cfg)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = line;
        if (auto hash = v.find('#'); hash != std::string_view::npos)
            v = v.substr(0, hash);
        v = trim(v);
        if (v.empty())
            continue;
        auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(cfg, trim(v.substr(0, eq)), v.substr(eq + 1));
    }
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    parse_config(in, cfg);
}

void validate(const RunConfig& cfg)
{
    const auto& ex = cfg.experiment;
    if (ex.k < 2)
        throw ConfigError("k must be at least 2, got " + std::to_string(ex.k));
    if (ex.nested && ex.inner_k < 2)
        throw ConfigError("inner_k must be at least 2");
    if (ex.methods.empty())
        throw ConfigError("methods must be non-empty");
    if (ex.strategies.empty())
        throw ConfigError("strategies must be non-empty");
    if (!(ex.model.solver.tolerance > 0.0) || ex.model.solver.max_iters < 1)
        throw ConfigError("solver tolerance and max_iters must be positive");
    if (ex.model.solver.ridge < 0.0)
        throw ConfigError("ridge must be non-negative");
    if (cfg.schema.features.size() != kNumFeatures)
        throw ConfigError("feature_columns must list 26 columns");
}

std::string echo(const RunConfig& cfg)
{
    const auto& ex = cfg.experiment;
    std::ostringstream o;
    o << "data = " << cfg.data.string() << '\n';
    o << "layout = " << cfg.layout << '\n';
    o << "delimiter = " << (cfg.schema.delimiter == '\t' ? std::string("tab") : std::string(1, cfg.schema.delimiter))
      << '\n';
    o << "header = " << (cfg.schema.has_header ? "true" : "false") << '\n';
    o << "subject_column = " << (cfg.schema.subject ? column_text(*cfg.schema.subject) : "none") << '\n';
    if (cfg.schema.rows_per_subject)
        o << "rows_per_subject = " << *cfg.schema.rows_per_subject << '\n';
    o << "class_column = " << column_text(cfg.schema.label) << '\n';
    o << "feature_columns = ";
    for (std::size_t i = 0; i < cfg.schema.features.size(); ++i)
        o << (i ? "," : "") << column_text(cfg.schema.features[i]);
    o << '\n';
    o << "ignore_columns = ";
    for (std::size_t i = 0; i < cfg.schema.ignore.size(); ++i)
        o << (i ? "," : "") << column_text(cfg.schema.ignore[i]);
    o << '\n';
    o << "k = " << ex.k << '\n';
    o << "seed = " << ex.seed << '\n';
    if (!cfg.seeds.empty()) {
        o << "seeds = ";
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            o << (i ? "," : "") << cfg.seeds[i];
        o << '\n';
    }
    o << "methods = ";
    for (std::size_t i = 0; i < ex.methods.size(); ++i)
        o << (i ? "," : "") << to_string(ex.methods[i]);
    o << '\n';
    o << "strategies = ";
    for (std::size_t i = 0; i < ex.strategies.size(); ++i)
        o << (i ? "," : "") << to_string(ex.strategies[i]);
    o << '\n';
    o << "nested = " << (ex.nested ? "true" : "false") << '\n';
    o << "inner_k = " << ex.inner_k << '\n';
    o << "tolerance = " << real_text(ex.model.solver.tolerance) << '\n';
    o << "max_iters = " << ex.model.solver.max_iters << '\n';
    o << "ridge = " << real_text(ex.model.solver.ridge) << '\n';
    o << "n_lambdas = " << ex.model.path.n_lambdas << '\n';
    o << "lambda_ratio = " << real_text(ex.model.path.ratio) << '\n';
    return o.str();
}

} // namespace fsgate
