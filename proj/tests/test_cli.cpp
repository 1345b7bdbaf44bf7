#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "backscatter/cli.hpp"

using namespace backscatter;
using namespace backscatter::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

struct ScopedFile {
    fs::path path;
    explicit ScopedFile(fs::path p, const std::string& content = {}) : path(std::move(p)) {
        if (!content.empty()) std::ofstream(path) << content;
    }
    ~ScopedFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

}  // namespace

TEST_CASE("empty configuration gives the reference defaults") {
    unsetenv("BACKSCATTER_SEED");
    const RunConfig c = parse_config({});
    CHECK(c.params.cp_len == 256);
    CHECK(c.params.effective_len == 1024);
    CHECK(c.params.direct_order == 8);
    CHECK(c.params.tag_in_order == 8);
    CHECK(c.params.backscatter_order == 8);
    CHECK(c.params.eta == Complex(0.5, 0.0));
    CHECK(c.params.noise_power == 1.0);
    CHECK(c.params.window == 8);
    CHECK(c.params.trials == 100000);
    CHECK(c.params.seed == 1);
    CHECK(c.snr_db == std::vector<double>{20.0});
    CHECK(c.kinds == std::vector<ThresholdKind>{ThresholdKind::Optimal});
    CHECK(c.channel_mode == ChannelMode::FixedRealization);
}

TEST_CASE("invalid W is rejected with exit status 2") {
    try {
        parse_config({"--w", "0"});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "W");
    }
    std::ostringstream out, err;
    CHECK(main_entry({"--w", "0"}, out, err) == 2);
    CHECK(err.str().find("W") != std::string::npos);
    CHECK(main_entry({"--w", "241"}, out, err) == 2);
    CHECK(main_entry({"--bogus"}, out, err) == 2);
    CHECK(main_entry({"--threshold", "median"}, out, err) == 2);
    CHECK(main_entry({"--snr", "20:10:5"}, out, err) == 2);
    CHECK(main_entry({"--config", "/nonexistent/cfg.txt"}, out, err) == 2);
}

TEST_CASE("flags override the config file, which overrides the environment") {
    ScopedFile cfg("cli_test.cfg",
                   "# reference run\nC = 128\nK = 4\nw = 10\nseed = 11\nthreshold = both\n"
                   "channel_mode = redraw\nsnr = 0:10:5\n");
    setenv("BACKSCATTER_SEED", "99", 1);
    const RunConfig from_file = parse_config({"--config", cfg.path.string()});
    CHECK(from_file.params.cp_len == 128);
    CHECK(from_file.params.last_folded == 128 - 8 - 4 - 1);
    CHECK(from_file.windows == std::vector<int>{10});
    CHECK(from_file.params.seed == 11);
    CHECK(from_file.kinds.size() == 2);
    CHECK(from_file.channel_mode == ChannelMode::RedrawPerTrial);
    CHECK(from_file.snr_db == std::vector<double>{0.0, 5.0, 10.0});

    const RunConfig flagged = parse_config({"--config", cfg.path.string(), "--w", "4,6", "--seed", "5"});
    CHECK(flagged.windows == std::vector<int>{4, 6});
    CHECK(flagged.params.window == 4);
    CHECK(flagged.params.seed == 5);

    CHECK(parse_config({}).params.seed == 99);
    unsetenv("BACKSCATTER_SEED");

    ScopedFile bad("cli_bad.cfg", "Ps = 3\n");
    try {
        parse_config({"--config", bad.path.string()});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "Ps");
    }
}

TEST_CASE("axis syntax") {
    CHECK(parse_snr_range("15:25:5") == std::vector<double>{15.0, 20.0, 25.0});
    CHECK(parse_snr_range("0:1:0.25").size() == 5);
    CHECK(parse_snr_range("7.5") == std::vector<double>{7.5});
    CHECK_THROWS_AS(parse_snr_range("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_snr_range("1:2:0"), ConfigError);
    CHECK(parse_window_list("8, 10") == std::vector<int>{8, 10});
    CHECK_THROWS_AS(parse_window_list("8,x"), ConfigError);
}

TEST_CASE("default run writes one row") {
    ScopedFile out_file("cli_default.csv");
    std::ostringstream out, err;
    CHECK(main_entry({"--trials", "500", "--out", out_file.path.string()}, out, err) == 0);
    const auto rows = csv_rows(slurp(out_file.path));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"snr_db", "w", "threshold_kind", "channel_mode", "trials",
                                              "empirical_ber", "stderr", "analytic_ber"});
    CHECK(rows[1][0] == "20");
    CHECK(rows[1][2] == "optimal");
    CHECK(rows[1][3] == "fixed");
    CHECK(!rows[1][7].empty());
    CHECK(out.str().find("optimal") != std::string::npos);
    CHECK_FALSE(fs::exists(out_file.path.string() + ".tmp"));
}

TEST_CASE("SNR sweep with both thresholds, reproducible CSV") {
    ScopedFile a("cli_sweep_a.csv"), b("cli_sweep_b.csv");
    std::ostringstream out, err;
    const std::vector<std::string> base = {"--snr", "15:25:5", "--threshold", "both", "--trials", "400"};
    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", a.path.string(), "--workers", "1"});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", b.path.string(), "--workers", "3"});
    REQUIRE(main_entry(args_a, out, err) == 0);
    REQUIRE(main_entry(args_b, out, err) == 0);
    const std::string csv = slurp(a.path);
    CHECK(csv == slurp(b.path));
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 7);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ber = std::stod(rows[i][5]);
        const double trials = std::stod(rows[i][4]);
        CHECK(std::stod(rows[i][6]) == std::sqrt(ber * (1 - ber) / trials));
    }
}

TEST_CASE("redraw mode leaves the analytic column empty") {
    ScopedFile f("cli_redraw.csv");
    std::ostringstream out, err;
    REQUIRE(main_entry({"--channel-mode", "redraw", "--trials", "300", "--out", f.path.string()}, out, err) == 0);
    const auto rows = csv_rows(slurp(f.path));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][3] == "redraw");
    CHECK(rows[1][7].empty());
}

TEST_CASE("unwritable output path fails without leaving a file") {
    std::ostringstream out, err;
    const std::string path = "/nonexistent-dir/ber.csv";
    CHECK(main_entry({"--trials", "10", "--out", path}, out, err) == 1);
    CHECK_FALSE(fs::exists(path));
    CHECK(err.str().find("error") != std::string::npos);
}
