#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace backscatter {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/**
 * Raised when a configuration violates a parameter invariant.
 * field() names the offending key (e.g. "W", "C").
 */
class InvalidConfig : public std::invalid_argument {
public:
    InvalidConfig(std::string field, const std::string& message);

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/**
 * User-facing scalar configuration of one OFDM symbol period.
 *
 * Symbols in comments are the conventional ones: C is the CP length, N the
 * effective length, L/M/K the memory orders (tap count minus one) of the
 * source->reader, source->tag and tag->reader channels.
 */
struct BaseParams {
    int cp_len = 256;              // C
    int effective_len = 1024;      // N
    int direct_order = 8;          // L
    int tag_in_order = 8;          // M
    int backscatter_order = 8;     // K
    double source_power = 100.0;   // Ps (20 dB over unit noise)
    double noise_power = 1.0;      // Nw
    Complex eta{0.5, 0.0};         // tag attenuation
    int window = 8;                // W, DFT bins averaged per decision
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;

    bool operator==(const BaseParams&) const = default;
};

/**
 * Validated configuration with its derived lengths. Obtain through
 * derive_params(); the derived members are not re-checked elsewhere.
 */
struct SystemParams : BaseParams {
    int max_order = 0;       // Q = max{L, M, K}
    int last_cancelled = 0;  // T = C - Q - 1
    int last_folded = 0;     // R = C - Q - K - 1

    int cancelled_len() const { return last_cancelled + 1; }
    int folded_len() const { return last_folded + 1; }
    int symbol_len() const { return cp_len + effective_len; }
    double snr_db() const;

    const BaseParams& base() const { return *this; }

    bool operator==(const SystemParams&) const = default;
};

SystemParams derive_params(const BaseParams& base);

/// Parses a raw key/value map (keys C, N, L, M, K, Ps, Nw, eta, eta_im, W,
/// trials, seed). Missing keys keep their defaults; unknown keys are rejected.
SystemParams derive_params(const std::map<std::string, std::string>& fields);

/// Source power giving the requested SNR in dB over the configured noise power.
double source_power_for_snr(double snr_db, double noise_power);

struct ChannelSet {
    ComplexVector h;  // source -> reader, L+1 taps
    ComplexVector g;  // source -> tag, M+1 taps
    ComplexVector f;  // tag -> reader, K+1 taps

    bool matches(const SystemParams& params) const;
};

enum class StreamPurpose : std::uint64_t { Channel = 1, Trial = 2, Auxiliary = 3 };

/**
 * Seeded random source. Independent streams are derived from
 * (seed, purpose, index) so trial i draws the same numbers no matter which
 * worker runs it.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

    /// Circularly-symmetric CN(0, variance): each quadrature has variance/2.
    Complex complex_gaussian(double variance);
    int bit();

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
};

ChannelSet draw_channels(const SystemParams& params, RandomStream& rng);

}  // namespace backscatter
