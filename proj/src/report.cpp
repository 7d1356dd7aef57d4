#include "fsgate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "fsgate/error.hpp"

namespace fsgate {

namespace {

constexpr double MetricSet::*kReported[] = {
    &MetricSet::accuracy, &MetricSet::specificity, &MetricSet::sensitivity, &MetricSet::precision,
    &MetricSet::f1,       &MetricSet::mcc,         &MetricSet::cross_entropy,
};
constexpr const char* kReportedNames[] = {
    "accuracy", "specificity", "sensitivity", "precision", "f1", "mcc", "cross_entropy",
};

std::string fixed(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string compact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string format_subset(std::span<const std::size_t> subset)
{
    const auto& table = feature_table();
    std::string out;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i)
            out += ';';
        out += table.at(subset[i]).name;
    }
    return out;
}

std::string row_fs_name(const ResultRow& row)
{
    return row.method ? std::string(to_string(*row.method)) : "none";
}

std::string row_strategy_name(const ResultRow& row)
{
    return row.strategy ? std::string(to_string(*row.strategy)) : "none";
}

void write_results_header(std::ostream& out, bool with_seed)
{
    if (with_seed)
        out << "seed,";
    out << "fs,strategy,n_features";
    for (auto name : kReportedNames)
        out << ',' << name << "_mean," << name << "_std";
    out << ",subset\n";
}

void write_results_rows(std::ostream& out, std::span<const ResultRow> rows, const std::uint64_t* seed)
{
    for (const auto& row : rows) {
        if (seed)
            out << *seed << ',';
        out << row_fs_name(row) << ',' << row_strategy_name(row) << ',' << row.n_selected;
        for (auto field : kReported)
            out << ',' << fixed(row.summary.mean.*field) << ',' << fixed(row.summary.std.*field);
        out << ',' << format_subset(row.subset) << '\n';
    }
}

void write_fold_details(std::ostream& out, std::span<const ResultRow> rows)
{
    out << "fs,strategy,fold,n_features";
    for (auto name : kReportedNames)
        out << ',' << name;
    out << ",subset\n";
    for (const auto& row : rows) {
        for (std::size_t f = 0; f < row.folds.size(); ++f) {
            const auto& subset = f < row.fold_subsets.size() ? row.fold_subsets[f] : row.subset;
            out << row_fs_name(row) << ',' << row_strategy_name(row) << ',' << f << ',' << subset.size();
            for (auto field : kReported)
                out << ',' << fixed(row.folds[f].*field);
            out << ',' << format_subset(subset) << '\n';
        }
    }
}

void write_curve_csv(std::ostream& out, const SelectionCurve& curve)
{
    out << "n,subset,accuracy,cross_entropy,is_best\n";
    for (const auto& p : curve.points)
        out << p.n << ',' << format_subset(p.subset) << ',' << fixed(p.accuracy) << ','
            << fixed(p.cross_entropy) << ',' << (p.n == curve.best_n ? 1 : 0) << '\n';
}

std::string curve_basename(const SelectionCurve& curve)
{
    return "curve_" + std::string(to_string(curve.method)) + "_" + std::string(to_string(curve.strategy));
}

void write_curve_svg(std::ostream& out, const SelectionCurve& curve)
{
    const bool plot_accuracy = curve.method == Method::sfs || curve.strategy == Strategy::max_accuracy;
    const std::string ylabel = plot_accuracy ? "accuracy" : "cross-entropy";

    std::vector<double> ys;
    for (const auto& p : curve.points)
        ys.push_back(plot_accuracy ? p.accuracy : p.cross_entropy);
    double ymin = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end());
    double ymax = ys.empty() ? 1.0 : *std::max_element(ys.begin(), ys.end());
    if (ymax - ymin < 1e-9) {
        ymin -= 0.05;
        ymax += 0.05;
    }
    const double pad = 0.1 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const double xmax = static_cast<double>(curve.points.size() + 1);

    constexpr double W = 480, H = 320, L = 60, R = 20, T = 30, B = 50;
    const auto sx = [&](double x) { return L + (W - L - R) * x / xmax; };
    const auto sy = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };

    char buf[128];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<title>" << to_string(curve.method) << ' ' << to_string(curve.strategy) << "</title>\n";
    // axes
    std::snprintf(buf, sizeof buf, "<path d=\"M%.1f %.1f V%.1f H%.1f\" stroke=\"black\" fill=\"none\"/>\n",
                  L, T, H - B, W - R);
    out << buf;
    for (std::size_t n = 1; n <= curve.points.size(); ++n) {
        if (n != 1 && n % 5 != 0)
            continue;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%zu</text>\n",
                      sx(static_cast<double>(n)), H - B + 15, n);
        out << buf;
    }
    for (int t = 0; t <= 4; ++t) {
        const double y = ymin + (ymax - ymin) * t / 4.0;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n", L - 5,
                      sy(y) + 4, compact(y).c_str());
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">features (n)</text>\n",
                  (L + W - R) / 2, H - 12);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 14 %.1f)\">",
                  (T + H - B) / 2, (T + H - B) / 2);
    out << buf << ylabel << "</text>\n";
    // curve
    out << "<polyline fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", sx(static_cast<double>(curve.points[i].n)),
                      sy(ys[i]));
        out << buf;
    }
    out << "\"/>\n";
    // best-n marker
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"black\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  sx(static_cast<double>(curve.best_n)), T, sx(static_cast<double>(curve.best_n)), H - B);
    out << buf;
    out << "</svg>\n";
}

double median(std::vector<double> values)
{
    if (values.empty())
        return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_seed_summary(std::ostream& out, std::span<const SeedRun> runs)
{
    out << "fs,strategy,seeds,n_features_median";
    for (auto name : kReportedNames)
        out << ',' << name << "_mean_median," << name << "_std_median";
    out << '\n';
    if (runs.empty())
        return;
    // Row order follows the first run.
    for (std::size_t r = 0; r < runs.front().rows.size(); ++r) {
        const auto& proto = runs.front().rows[r];
        const auto fs = row_fs_name(proto);
        const auto st = row_strategy_name(proto);
        std::vector<double> n_sel;
        std::vector<std::vector<double>> means(std::size(kReported)), stds(std::size(kReported));
        for (const auto& run : runs) {
            for (const auto& row : run.rows) {
                if (row_fs_name(row) != fs || row_strategy_name(row) != st)
                    continue;
                n_sel.push_back(static_cast<double>(row.n_selected));
                for (std::size_t m = 0; m < std::size(kReported); ++m) {
                    means[m].push_back(row.summary.mean.*kReported[m]);
                    stds[m].push_back(row.summary.std.*kReported[m]);
                }
            }
        }
        out << fs << ',' << st << ',' << n_sel.size() << ',' << fixed(median(n_sel));
        for (std::size_t m = 0; m < std::size(kReported); ++m)
            out << ',' << fixed(median(means[m])) << ',' << fixed(median(stds[m]));
        out << '\n';
    }
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t file_hash(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "' for hashing");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a64(bytes);
}

void atomic_write(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace fsgate
