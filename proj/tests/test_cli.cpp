#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fsgate/cli.hpp"
#include "fsgate/dataset.hpp"

using namespace fsgate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("fsgate_cli_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_dataset(const fs::path& dir, std::uint64_t seed = 1)
{
    SynthesisSpec spec;
    spec.seed = seed;
    spec.n_subjects_per_class = 4;
    spec.n_recordings = 3;
    spec.informative = {3};
    spec.effect_size = 2.0;
    const auto path = dir / "data.csv";
    std::ofstream f(path);
    write_csv(synthesize(spec), f);
    return path;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text)
        *out_text = out.str() + err.str();
    return code;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help exit cleanly")
{
    std::string text;
    CHECK(run({"--version"}, &text) == 0);
    CHECK(text.find(kVersion) != std::string::npos);
    CHECK(run({"sweep", "--help"}, &text) == 0);
    CHECK(text.find("--seeds") != std::string::npos);
}

TEST_CASE("input and config errors exit with 2")
{
    TempDir tmp("errors");
    std::string text;
    CHECK(run({"validate", "--data", (tmp.path / "missing.csv").string()}, &text) == kExitInputError);
    CHECK(text.find("missing.csv") != std::string::npos);
    const auto data = write_dataset(tmp.path);
    CHECK(run({"baseline", "--data", data.string(), "--layout", "canonical", "--k", "1"}, &text) ==
          kExitInputError);
    CHECK(text.find("k must be at least 2") != std::string::npos);
    CHECK(run({"sweep", "--methods", "chi2", "--data", data.string()}) == kExitInputError);
    CHECK(run({"frobnicate"}) == kExitInputError);
}

TEST_CASE("strict validation fails on range warnings")
{
    TempDir tmp("strict");
    const auto data = write_dataset(tmp.path);
    std::string text;
    // The synthetic cohort is drawn around the reference means, with tails
    // outside the reference ranges.
    const int lax = run({"validate", "--data", data.string(), "--layout", "canonical"}, &text);
    CHECK(lax == 0);
    CHECK(text.find("jitter_ppq5") != std::string::npos);
    const bool warned = text.find("warning:") != std::string::npos;
    const int strict = run({"validate", "--data", data.string(), "--layout", "canonical", "--strict"});
    CHECK(strict == (warned ? kExitStrictFailure : kExitOk));
}

TEST_CASE("sweep writes results, curves and a manifest; reruns are byte-identical")
{
    TempDir tmp("sweep");
    const auto data = write_dataset(tmp.path);
    const auto a = tmp.path / "a", b = tmp.path / "b";
    const std::vector<std::string> common{"--data", data.string(), "--layout", "canonical", "--k", "2", "--seed", "3"};
    auto args_a = std::vector<std::string>{"sweep", "--out", a.string()};
    args_a.insert(args_a.end(), common.begin(), common.end());
    auto args_b = std::vector<std::string>{"sweep", "--out", b.string()};
    args_b.insert(args_b.end(), common.begin(), common.end());
    REQUIRE(run(args_a) == 0);
    REQUIRE(run(args_b) == 0);

    const auto results = slurp(a / "results.csv");
    CHECK(results.rfind("fs,strategy,n_features,accuracy_mean,accuracy_std", 0) == 0);
    std::size_t lines = 0;
    for (char c : results)
        lines += c == '\n';
    CHECK(lines == 8);
    CHECK(fs::exists(a / "folds.csv"));
    CHECK(fs::exists(a / "manifest.txt"));
    for (const char* m : {"anova", "lasso", "sfs"})
        for (const char* s : {"max_accuracy", "min_cross_entropy"}) {
            const auto base = std::string("curve_") + m + "_" + s;
            CHECK(fs::exists(a / (base + ".svg")));
            CHECK(slurp(a / (base + ".csv")) == slurp(b / (base + ".csv")));
        }
    CHECK(results == slurp(b / "results.csv"));
    CHECK(slurp(a / "manifest.txt").find("seed = 3") != std::string::npos);
}

TEST_CASE("multi-seed baseline writes per-seed directories and a summary")
{
    TempDir tmp("seeds");
    const auto data = write_dataset(tmp.path);
    REQUIRE(run({"baseline", "--data", data.string(), "--layout", "canonical", "--k", "2", "--seeds", "1,2,3",
                 "--out", tmp.path.string()}) == 0);
    for (int s = 1; s <= 3; ++s)
        CHECK(fs::exists(tmp.path / ("seed_" + std::to_string(s)) / "results.csv"));
    const auto all = slurp(tmp.path / "results.csv");
    CHECK(all.rfind("seed,", 0) == 0);
    CHECK(fs::exists(tmp.path / "summary.csv"));
}

TEST_CASE("command-line flags override the config file")
{
    TempDir tmp("config");
    const auto data = write_dataset(tmp.path);
    const auto cfg = tmp.path / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# test config\nlayout = canonical\nk = 3\nseed = 11\ndata = " << data.string() << "\n";
    }
    REQUIRE(run({"baseline", "--config", cfg.string(), "--k", "2", "--out", (tmp.path / "o").string()}) == 0);
    const auto manifest = slurp(tmp.path / "o" / "manifest.txt");
    CHECK(manifest.find("k = 2") != std::string::npos);
    CHECK(manifest.find("seed = 11") != std::string::npos);

    {
        std::ofstream f(cfg);
        f << "bogus_key = 1\n";
    }
    CHECK(run({"baseline", "--config", cfg.string(), "--data", data.string()}) == kExitInputError);
}

} // TEST_SUITE
