#include "backscatter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "backscatter/waveform.hpp"

namespace backscatter {

const char* to_string(ChannelMode mode) {
    return mode == ChannelMode::FixedRealization ? "fixed" : "redraw";
}

TrialOutcome run_trial(const SystemParams& params, const ChannelSet& ch, int bit,
                       double threshold, RandomStream& rng, const DftPlan& plan) {
    if (plan.size() != static_cast<std::size_t>(params.folded_len()))
        throw std::invalid_argument("run_trial: DFT plan length must be R+1");
    const SymbolFrame source = gen_source_symbol(params, rng);
    const SymbolFrame x = tag_input(source, ch.g);
    const GateSequence gate = tag_gate(params, bit);
    const SymbolFrame y = synth_reader_rx(source, x, gate, ch, params, rng);
    const FoldedBlock folded = fold(cancel_interference(y, params), params);
    const double gamma = first_test_statistic(to_spectrum(folded, plan), params.window);
    return {bit, detect(gamma, threshold), gamma, threshold};
}

TrialOutcome run_trial(const SystemParams& params, const ChannelSet& ch, int bit,
                       double threshold, RandomStream& rng) {
    return run_trial(params, ch, bit, threshold, rng,
                     DftPlan(static_cast<std::size_t>(params.folded_len())));
}

namespace {

struct TrialContext {
    const SystemParams& params;
    ThresholdKind kind;
    ChannelMode mode;
    const EstimateOptions& options;
    const DftPlan& plan;
    const ChannelSet* fixed_channel;
    double fixed_threshold;
};

std::uint64_t count_errors(const TrialContext& ctx, std::uint64_t first, std::uint64_t last) {
    std::uint64_t errors = 0;
    for (std::uint64_t i = first; i < last; ++i) {
        RandomStream rng(ctx.params.seed, StreamPurpose::Trial, i);
        const int bit = rng.bit();
        TrialOutcome outcome;
        if (ctx.mode == ChannelMode::FixedRealization) {
            outcome = run_trial(ctx.params, *ctx.fixed_channel, bit, ctx.fixed_threshold, rng,
                                ctx.plan);
        } else {
            const ChannelSet ch = draw_channels(ctx.params, rng);
            const double threshold =
                ctx.options.threshold_override
                    ? *ctx.options.threshold_override
                    : select_threshold(ctx.kind, compute_scales(ctx.params, ch), ctx.params.window);
            outcome = run_trial(ctx.params, ch, bit, threshold, rng, ctx.plan);
        }
        if (outcome.decided_bit != outcome.true_bit) ++errors;
    }
    return errors;
}

std::uint64_t parallel_error_count(const TrialContext& ctx, unsigned workers) {
    const std::uint64_t trials = ctx.params.trials;
    workers = std::max(1u, workers);
    if (workers == 1 || trials < 2) return count_errors(ctx, 0, trials);

    const std::uint64_t n_workers = std::min<std::uint64_t>(workers, trials);
    std::vector<std::uint64_t> counts(n_workers, 0);
    std::vector<std::exception_ptr> failures(n_workers);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::uint64_t wkr = 0; wkr < n_workers; ++wkr) {
        const std::uint64_t first = trials * wkr / n_workers;
        const std::uint64_t last = trials * (wkr + 1) / n_workers;
        pool.emplace_back([&, wkr, first, last] {
            try {
                counts[wkr] = count_errors(ctx, first, last);
            } catch (...) {
                failures[wkr] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

}  // namespace

BerRecord estimate_ber(const SystemParams& params, ThresholdKind kind, ChannelMode mode,
                       double snr_db, const EstimateOptions& options) {
    BaseParams base = params.base();
    base.source_power = source_power_for_snr(snr_db, params.noise_power);
    const SystemParams point = derive_params(base);

    const DftPlan plan(static_cast<std::size_t>(point.folded_len()));
    ChannelSet fixed_channel;
    double fixed_threshold = 0.0;
    std::optional<DetectionScales> fixed_scales;
    if (mode == ChannelMode::FixedRealization) {
        RandomStream channel_rng(point.seed, StreamPurpose::Channel, 0);
        fixed_channel = draw_channels(point, channel_rng);
        fixed_scales = compute_scales(point, fixed_channel);
        fixed_threshold = options.threshold_override
                              ? *options.threshold_override
                              : select_threshold(kind, *fixed_scales, point.window);
    }

    const TrialContext ctx{point, kind, mode, options, plan, &fixed_channel, fixed_threshold};
    const std::uint64_t errors = parallel_error_count(ctx, options.workers);

    BerRecord rec;
    rec.snr_db = snr_db;
    rec.window = point.window;
    rec.threshold_kind = kind;
    rec.channel_mode = mode;
    rec.trials = point.trials;
    rec.errors = errors;
    rec.empirical_ber = static_cast<double>(errors) / static_cast<double>(point.trials);
    rec.stderr_ber = std::sqrt(rec.empirical_ber * (1.0 - rec.empirical_ber) /
                               static_cast<double>(point.trials));
    if (fixed_scales) {
        rec.threshold = fixed_threshold;
        rec.analytic_ber = analytic_ber(fixed_threshold, *fixed_scales, point.window);
    }
    return rec;
}

std::vector<BerRecord> sweep(const SystemParams& params, const SweepAxis& axis,
                             std::span<const ThresholdKind> kinds, ChannelMode mode,
                             const EstimateOptions& options) {
    if (kinds.empty()) throw std::invalid_argument("sweep: no threshold kinds given");
    std::vector<BerRecord> records;
    if (const auto* snr = std::get_if<SnrAxis>(&axis)) {
        if (snr->snr_db.empty()) throw std::invalid_argument("sweep: empty SNR axis");
        for (double point : snr->snr_db)
            for (auto kind : kinds) records.push_back(estimate_ber(params, kind, mode, point, options));
    } else {
        const auto& windows = std::get<WindowAxis>(axis).windows;
        if (windows.empty()) throw std::invalid_argument("sweep: empty W axis");
        for (int w : windows) {
            BaseParams base = params.base();
            base.window = w;
            const SystemParams point = derive_params(base);
            for (auto kind : kinds)
                records.push_back(estimate_ber(point, kind, mode, point.snr_db(), options));
        }
    }
    return records;
}

}  // namespace backscatter
