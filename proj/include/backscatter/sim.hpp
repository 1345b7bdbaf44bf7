#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "backscatter/core.hpp"
#include "backscatter/detector.hpp"
#include "backscatter/reader.hpp"

namespace backscatter {

enum class ChannelMode { FixedRealization, RedrawPerTrial };

const char* to_string(ChannelMode mode);

struct TrialOutcome {
    int true_bit = 0;
    int decided_bit = 0;
    double gamma = 0.0;
    double threshold_used = 0.0;

    bool operator==(const TrialOutcome&) const = default;
};

struct BerRecord {
    double snr_db = 0.0;
    int window = 0;
    ThresholdKind threshold_kind = ThresholdKind::Optimal;
    ChannelMode channel_mode = ChannelMode::FixedRealization;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double empirical_ber = 0.0;
    double stderr_ber = 0.0;                // sqrt(ber (1 - ber) / trials)
    std::optional<double> analytic_ber;     // FixedRealization only
    std::optional<double> threshold;        // FixedRealization only

    bool operator==(const BerRecord&) const = default;
};

/**
 * One symbol through the whole chain: source, tag input, gate, reader,
 * cancellation, fold, DFT, Gamma_1, decision. Draws from `rng` in that order
 * (source samples first, then reader noise).
 */
TrialOutcome run_trial(const SystemParams& params, const ChannelSet& ch, int bit,
                       double threshold, RandomStream& rng, const DftPlan& plan);
TrialOutcome run_trial(const SystemParams& params, const ChannelSet& ch, int bit,
                       double threshold, RandomStream& rng);

struct EstimateOptions {
    unsigned workers = 1;
    /// Replaces the genie-aided threshold (required when U = 0).
    std::optional<double> threshold_override;
};

/**
 * Monte Carlo BER at one operating point. `params.source_power` is replaced by
 * the value matching `snr_db`; `params.trials` and `params.seed` are used.
 * Trial i draws from the stream (seed, Trial, i); the fixed channel comes from
 * (seed, Channel, 0). Results do not depend on the worker count.
 */
BerRecord estimate_ber(const SystemParams& params, ThresholdKind kind, ChannelMode mode,
                       double snr_db, const EstimateOptions& options = {});

struct SnrAxis {
    std::vector<double> snr_db;
};

/// Windows swept at the SNR implied by params.source_power / noise_power.
struct WindowAxis {
    std::vector<int> windows;
};

using SweepAxis = std::variant<SnrAxis, WindowAxis>;

/// One record per (axis point, threshold kind), axis-major.
std::vector<BerRecord> sweep(const SystemParams& params, const SweepAxis& axis,
                             std::span<const ThresholdKind> kinds, ChannelMode mode,
                             const EstimateOptions& options = {});

}  // namespace backscatter
