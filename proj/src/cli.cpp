#include "backscatter/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace backscatter::cli {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)) {}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T to_number(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(field, "invalid " + field + ": '" + text + "' is not a number");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
    std::map<std::string, std::string> fields;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", path + ":" + std::to_string(lineno) + ": expected key = value");
        fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return fields;
}

std::vector<double> parse_snr_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) {
        const double v = to_number<double>("snr", parts[0]);
        if (!std::isfinite(v)) throw ConfigError("snr", "invalid snr: must be finite");
        return {v};
    }
    if (parts.size() != 3) throw ConfigError("snr", "invalid snr: expected START:STOP:STEP");
    const double start = to_number<double>("snr", parts[0]);
    const double stop = to_number<double>("snr", parts[1]);
    const double step = to_number<double>("snr", parts[2]);
    if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0) || stop < start)
        throw ConfigError("snr", "invalid snr: need START <= STOP and STEP > 0");
    // Index-based so that 15:25:5 yields exactly 15, 20, 25.
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> values;
    for (long i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
}

std::vector<int> parse_window_list(const std::string& text) {
    std::vector<int> windows;
    for (const auto& part : split(text, ',')) windows.push_back(to_number<int>("W", part));
    if (windows.empty()) throw ConfigError("W", "invalid W: empty list");
    return windows;
}

namespace {

const std::vector<std::string> kSystemKeys = {"C", "N", "L", "M", "K", "Nw", "eta", "eta_im"};

std::vector<ThresholdKind> parse_kinds(const std::string& text) {
    if (text == "optimal") return {ThresholdKind::Optimal};
    if (text == "equiprobable") return {ThresholdKind::Equiprobable};
    if (text == "both") return {ThresholdKind::Optimal, ThresholdKind::Equiprobable};
    throw ConfigError("threshold", "invalid threshold: expected optimal, equiprobable or both");
}

ChannelMode parse_mode(const std::string& text) {
    if (text == "fixed") return ChannelMode::FixedRealization;
    if (text == "redraw") return ChannelMode::RedrawPerTrial;
    throw ConfigError("channel-mode", "invalid channel-mode: expected fixed or redraw");
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Ambient backscatter BER simulator"};
    std::optional<std::string> config_path, snr, windows, threshold, mode, trials, seed, out,
        workers;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--snr", snr, "SNR in dB: START:STOP:STEP or a single value");
    app.add_option("--w", windows, "comma-separated averaging windows W");
    app.add_option("--threshold", threshold, "optimal, equiprobable or both");
    app.add_option("--channel-mode", mode, "fixed or redraw");
    app.add_option("--trials", trials, "Monte Carlo trials per point");
    app.add_option("--seed", seed, "RNG seed (falls back to BACKSCATTER_SEED)");
    app.add_option("--out", out, "output CSV path");
    app.add_option("--workers", workers, "worker threads (default: hardware concurrency)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    std::map<std::string, std::string> fields;
    if (config_path) fields = read_config_file(*config_path);
    for (auto [alias, key] : {std::pair{"channel_mode", "channel-mode"}, std::pair{"W", "w"}}) {
        if (auto it = fields.find(alias); it != fields.end()) {
            fields[key] = it->second;
            fields.erase(it);
        }
    }
    auto set_flag = [&fields](const char* key, const std::optional<std::string>& value) {
        if (value) fields[key] = *value;
    };
    set_flag("snr", snr);
    set_flag("w", windows);
    set_flag("threshold", threshold);
    set_flag("channel-mode", mode);
    set_flag("trials", trials);
    set_flag("seed", seed);
    set_flag("out", out);
    set_flag("workers", workers);
    if (!fields.count("seed")) {
        if (const char* env = std::getenv("BACKSCATTER_SEED"); env && *env) fields["seed"] = env;
    }

    RunConfig config;
    std::map<std::string, std::string> system;
    for (const auto& [key, value] : fields) {
        if (std::find(kSystemKeys.begin(), kSystemKeys.end(), key) != kSystemKeys.end() ||
            key == "trials" || key == "seed") {
            system[key] = value;
        } else if (key == "snr") {
            config.snr_db = parse_snr_range(value);
        } else if (key == "w") {
            config.windows = parse_window_list(value);
        } else if (key == "threshold") {
            config.kinds = parse_kinds(value);
        } else if (key == "channel-mode") {
            config.channel_mode = parse_mode(value);
        } else if (key == "out") {
            if (value.empty()) throw ConfigError("out", "invalid out: empty path");
            config.out_path = value;
        } else if (key == "workers") {
            const int n = to_number<int>("workers", value);
            if (n < 1) throw ConfigError("workers", "invalid workers: must be at least 1");
            config.workers = static_cast<unsigned>(n);
        } else {
            throw ConfigError(key, "invalid " + key + ": unknown configuration key");
        }
    }
    if (!fields.count("workers"))
        config.workers = std::max(1u, std::thread::hardware_concurrency());

    try {
        system["Ps"] = "1";
        for (int w : config.windows) {
            auto with_w = system;
            with_w["W"] = std::to_string(w);
            derive_params(with_w);
        }
        system["W"] = std::to_string(config.windows.front());
        config.params = derive_params(system);
        for (double snr_db : config.snr_db) {
            BaseParams base = config.params.base();
            base.source_power = source_power_for_snr(snr_db, base.noise_power);
            derive_params(base);
        }
    } catch (const InvalidConfig& e) {
        throw ConfigError(e.field(), e.what());
    }
    return config;
}

std::vector<BerRecord> simulate(const RunConfig& config) {
    EstimateOptions options;
    options.workers = config.workers;
    std::vector<BerRecord> records;
    // Every W runs the full SNR list; a single SNR with several W is a W sweep.
    for (int w : config.windows) {
        BaseParams base = config.params.base();
        base.window = w;
        const SystemParams params = derive_params(base);
        auto part = sweep(params, SnrAxis{config.snr_db}, config.kinds, config.channel_mode, options);
        records.insert(records.end(), part.begin(), part.end());
    }
    return records;
}

namespace {

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_csv(const std::vector<BerRecord>& records) {
    std::string csv = "snr_db,w,threshold_kind,channel_mode,trials,empirical_ber,stderr,analytic_ber\n";
    for (const auto& r : records) {
        csv += number(r.snr_db) + ',' + std::to_string(r.window) + ',' + to_string(r.threshold_kind) +
               ',' + to_string(r.channel_mode) + ',' + std::to_string(r.trials) + ',' +
               number(r.empirical_ber) + ',' + number(r.stderr_ber) + ',' +
               (r.analytic_ber ? number(*r.analytic_ber) : std::string{}) + '\n';
    }
    return csv;
}

namespace {

void print_summary(const std::vector<BerRecord>& records, std::ostream& out) {
    out << std::left << std::setw(9) << "SNR(dB)" << std::setw(5) << "W" << std::setw(14)
        << "threshold" << std::setw(8) << "channel" << std::right << std::setw(10) << "trials"
        << std::setw(14) << "BER" << std::setw(13) << "stderr" << std::setw(14) << "analytic"
        << '\n';
    for (const auto& r : records) {
        out << std::left << std::setw(9) << r.snr_db << std::setw(5) << r.window << std::setw(14)
            << to_string(r.threshold_kind) << std::setw(8) << to_string(r.channel_mode)
            << std::right << std::setw(10) << r.trials << std::scientific << std::setprecision(4)
            << std::setw(14) << r.empirical_ber << std::setw(13) << r.stderr_ber;
        if (r.analytic_ber) out << std::setw(14) << *r.analytic_ber;
        else out << std::setw(14) << "-";
        out << std::defaultfloat << std::setprecision(6) << '\n';
    }
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    const fs::path target(config.out_path);
    fs::path temp = target;
    temp += ".tmp";
    try {
        {
            std::ofstream probe(temp, std::ios::binary | std::ios::trunc);
            if (!probe) throw std::runtime_error("cannot write output '" + config.out_path + "'");
        }
        const auto records = simulate(config);
        const std::string csv = format_csv(records);
        {
            std::ofstream file(temp, std::ios::binary | std::ios::trunc);
            file << csv;
            file.flush();
            if (!file) throw std::runtime_error("failed writing '" + temp.string() + "'");
        }
        fs::rename(temp, target);
        print_summary(records, out);
        out << "wrote " << records.size() << " rows to " << config.out_path << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::error_code ec;
        fs::remove(temp, ec);
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = parse_config(args);
    } catch (const CLI::CallForHelp&) {
        out << "usage: backscatter_sim [--config PATH] [--snr START:STOP:STEP] [--w LIST]\n"
               "                       [--threshold optimal|equiprobable|both]\n"
               "                       [--channel-mode fixed|redraw] [--trials N] [--seed N]\n"
               "                       [--out PATH] [--workers N]\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return run(config, out, err);
}

}  // namespace backscatter::cli
