#include "backscatter/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace backscatter {

InvalidConfig::InvalidConfig(std::string field, const std::string& message)
    : std::invalid_argument("invalid " + field + ": " + message), field_(std::move(field)) {}

double SystemParams::snr_db() const { return 10.0 * std::log10(source_power / noise_power); }

double source_power_for_snr(double snr_db, double noise_power) {
    return noise_power * std::pow(10.0, snr_db / 10.0);
}

SystemParams derive_params(const BaseParams& base) {
    auto require = [](bool ok, const char* field, const std::string& msg) {
        if (!ok) throw InvalidConfig(field, msg);
    };
    require(base.cp_len >= 1, "C", "CP length must be positive");
    require(base.direct_order >= 0, "L", "channel order must be non-negative");
    require(base.tag_in_order >= 0, "M", "channel order must be non-negative");
    require(base.backscatter_order >= 0, "K", "channel order must be non-negative");
    require(base.effective_len >= base.cp_len, "N", "effective length must be at least C");

    SystemParams p;
    static_cast<BaseParams&>(p) = base;
    p.max_order = std::max({base.direct_order, base.tag_in_order, base.backscatter_order});
    p.last_cancelled = base.cp_len - p.max_order - 1;
    p.last_folded = base.cp_len - p.max_order - base.backscatter_order - 1;

    require(p.last_folded >= 0, "C",
            "C - Q - K - 1 = " + std::to_string(p.last_folded) + " is negative");
    require(base.window >= 1 && base.window <= p.folded_len(), "W",
            "window " + std::to_string(base.window) + " outside [1, " +
                std::to_string(p.folded_len()) + "]");
    require(std::isfinite(base.source_power) && base.source_power > 0.0, "Ps",
            "source power must be positive");
    require(std::isfinite(base.noise_power) && base.noise_power > 0.0, "Nw",
            "noise power must be positive");
    require(std::isfinite(base.eta.real()) && std::isfinite(base.eta.imag()), "eta",
            "attenuation must be finite");
    require(base.trials >= 1, "trials", "at least one trial is required");
    return p;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw InvalidConfig(key, "'" + text + "' is not a valid number");
    return value;
}

}  // namespace

SystemParams derive_params(const std::map<std::string, std::string>& fields) {
    BaseParams base;
    double eta_re = base.eta.real();
    double eta_im = base.eta.imag();
    for (const auto& [key, text] : fields) {
        if (key == "C") base.cp_len = parse_number<int>(key, text);
        else if (key == "N") base.effective_len = parse_number<int>(key, text);
        else if (key == "L") base.direct_order = parse_number<int>(key, text);
        else if (key == "M") base.tag_in_order = parse_number<int>(key, text);
        else if (key == "K") base.backscatter_order = parse_number<int>(key, text);
        else if (key == "Ps") base.source_power = parse_number<double>(key, text);
        else if (key == "Nw") base.noise_power = parse_number<double>(key, text);
        else if (key == "eta") eta_re = parse_number<double>(key, text);
        else if (key == "eta_im") eta_im = parse_number<double>(key, text);
        else if (key == "W") base.window = parse_number<int>(key, text);
        else if (key == "trials") base.trials = parse_number<std::uint64_t>(key, text);
        else if (key == "seed") base.seed = parse_number<std::uint64_t>(key, text);
        else throw InvalidConfig(key, "unknown parameter");
    }
    base.eta = Complex(eta_re, eta_im);
    return derive_params(base);
}

bool ChannelSet::matches(const SystemParams& params) const {
    return h.size() == static_cast<std::size_t>(params.direct_order + 1) &&
           g.size() == static_cast<std::size_t>(params.tag_in_order + 1) &&
           f.size() == static_cast<std::size_t>(params.backscatter_order + 1);
}

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(seed), hi(seed), lo(purpose), hi(purpose), lo(index), hi(index)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
    auto seq = make_seed_seq(seed, 0, 0);
    engine_.seed(seq);
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
    auto seq = make_seed_seq(seed, static_cast<std::uint64_t>(purpose), index);
    engine_.seed(seq);
}

Complex RandomStream::complex_gaussian(double variance) {
    const double sigma = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {sigma * re, sigma * im};
}

int RandomStream::bit() { return static_cast<int>(engine_() >> 63); }

ChannelSet draw_channels(const SystemParams& params, RandomStream& rng) {
    auto taps = [&rng](int order) {
        ComplexVector v(static_cast<std::size_t>(order) + 1);
        for (auto& tap : v) tap = rng.complex_gaussian(1.0);
        return v;
    };
    ChannelSet ch;
    ch.h = taps(params.direct_order);
    ch.g = taps(params.tag_in_order);
    ch.f = taps(params.backscatter_order);
    return ch;
}

}  // namespace backscatter
