#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "backscatter/core.hpp"

namespace backscatter {

enum class SampleOrigin { Source, TagInput, ReaderRx };

/// One OFDM symbol period (C + N samples) observed at a point in the chain.
struct SymbolFrame {
    ComplexVector samples;
    SampleOrigin origin = SampleOrigin::Source;
};

/**
 * Tag reflection pattern over one symbol period. The tag only reflects in
 * [Q, C-K-1]; elsewhere the gate is closed regardless of the bit, so the
 * K-tap spread of the reflection ends by sample C-1.
 */
struct GateSequence {
    std::vector<std::uint8_t> gate;
    int bit = 0;
};

/// i.i.d. CN(0, Ps) effective part preceded by its last C samples as CP.
SymbolFrame gen_source_symbol(const SystemParams& params, RandomStream& rng);

GateSequence tag_gate(const SystemParams& params, int bit);

/// x(n) = sum_m g_m s(n-m) with zero pre-history.
SymbolFrame tag_input(const SymbolFrame& source, std::span<const Complex> g);

/**
 * Reader samples: y(n) = sum_l h_l s(n-l) + eta sum_k f_k B(n-k) x(n-k) + w(n).
 * The overload without a random stream leaves the noise out.
 */
SymbolFrame synth_reader_rx(const SymbolFrame& source, const SymbolFrame& x,
                            const GateSequence& gate, const ChannelSet& ch,
                            const SystemParams& params, RandomStream& rng);
SymbolFrame synth_reader_rx(const SymbolFrame& source, const SymbolFrame& x,
                            const GateSequence& gate, const ChannelSet& ch,
                            const SystemParams& params);

/// What a legacy OFDM receiver keeps after discarding the CP.
ComplexVector legacy_window(const SymbolFrame& y, const SystemParams& params);

}  // namespace backscatter
