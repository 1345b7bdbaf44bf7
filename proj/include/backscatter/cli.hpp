#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "backscatter/core.hpp"
#include "backscatter/sim.hpp"

namespace backscatter::cli {

/// Bad flag, config key or value. The command exits with status 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    SystemParams params;              // params.window is windows.front()
    std::vector<double> snr_db{20.0};
    std::vector<int> windows{8};
    std::vector<ThresholdKind> kinds{ThresholdKind::Optimal};
    ChannelMode channel_mode = ChannelMode::FixedRealization;
    std::string out_path = "ber.csv";
    unsigned workers = 1;
};

/// Flat `key = value` text; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// `start:stop:step` (inclusive stop) or a single value.
std::vector<double> parse_snr_range(const std::string& text);
std::vector<int> parse_window_list(const std::string& text);

/**
 * Builds a validated RunConfig. Precedence: flag, config file,
 * BACKSCATTER_SEED (seed only), built-in default. `args` excludes argv[0].
 * Throws ConfigError naming the offending field.
 */
RunConfig parse_config(const std::vector<std::string>& args);

std::string format_csv(const std::vector<BerRecord>& records);

std::vector<BerRecord> simulate(const RunConfig& config);

/// Runs the sweep, writes the CSV atomically, prints a summary. 0 on success,
/// 1 on runtime failure (nothing is left at out_path).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Whole command: parse then run. Returns the process exit status.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace backscatter::cli
