#include "backscatter/waveform.hpp"

#include <stdexcept>

namespace backscatter {

namespace {

void require_origin(const SymbolFrame& frame, SampleOrigin expected, const char* what) {
    if (frame.origin != expected) throw std::invalid_argument(what);
}

// out(n) = sum_k taps_k in(n-k), truncated to in.size(). The summation order
// depends only on k, so equal inputs at two indices give bit-equal outputs.
ComplexVector causal_filter(std::span<const Complex> in, std::span<const Complex> taps) {
    ComplexVector out(in.size());
    for (std::size_t n = 0; n < in.size(); ++n) {
        Complex acc{};
        const std::size_t kmax = std::min(taps.size() - 1, n);
        for (std::size_t k = 0; k <= kmax; ++k) acc += taps[k] * in[n - k];
        out[n] = acc;
    }
    return out;
}

}  // namespace

SymbolFrame gen_source_symbol(const SystemParams& params, RandomStream& rng) {
    const auto cp = static_cast<std::size_t>(params.cp_len);
    const auto eff = static_cast<std::size_t>(params.effective_len);
    SymbolFrame frame{ComplexVector(cp + eff), SampleOrigin::Source};
    for (std::size_t n = cp; n < cp + eff; ++n)
        frame.samples[n] = rng.complex_gaussian(params.source_power);
    for (std::size_t n = 0; n < cp; ++n) frame.samples[n] = frame.samples[n + eff];
    return frame;
}

GateSequence tag_gate(const SystemParams& params, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("tag bit must be 0 or 1");
    GateSequence seq{std::vector<std::uint8_t>(static_cast<std::size_t>(params.symbol_len()), 0),
                     bit};
    if (bit == 1) {
        const int last = params.cp_len - params.backscatter_order - 1;
        for (int n = params.max_order; n <= last; ++n) seq.gate[static_cast<std::size_t>(n)] = 1;
    }
    return seq;
}

SymbolFrame tag_input(const SymbolFrame& source, std::span<const Complex> g) {
    require_origin(source, SampleOrigin::Source, "tag_input expects a source frame");
    if (g.empty()) throw std::invalid_argument("tag_input needs at least one tap");
    return {causal_filter(source.samples, g), SampleOrigin::TagInput};
}

namespace {

SymbolFrame reader_rx_noiseless(const SymbolFrame& source, const SymbolFrame& x,
                                const GateSequence& gate, const ChannelSet& ch,
                                const SystemParams& params) {
    require_origin(source, SampleOrigin::Source, "synth_reader_rx expects a source frame");
    require_origin(x, SampleOrigin::TagInput, "synth_reader_rx expects a tag-input frame");
    const auto len = static_cast<std::size_t>(params.symbol_len());
    if (source.samples.size() != len || x.samples.size() != len || gate.gate.size() != len)
        throw std::invalid_argument("synth_reader_rx: frame lengths disagree with params");
    if (!ch.matches(params)) throw std::invalid_argument("synth_reader_rx: channel orders disagree");

    SymbolFrame y{causal_filter(source.samples, ch.h), SampleOrigin::ReaderRx};

    // Reflected component. Only samples reached by an open gate are touched,
    // so everything outside [first open, last open + K] stays bit-identical
    // to the direct path.
    const auto open = [&gate](std::size_t n) { return gate.gate[n] != 0; };
    std::size_t first = 0;
    while (first < len && !open(first)) ++first;
    if (first == len) return y;
    std::size_t last = len - 1;
    while (!open(last)) --last;

    const std::size_t taps = ch.f.size();
    const std::size_t end = std::min(len, last + taps);
    for (std::size_t n = first; n < end; ++n) {
        Complex acc{};
        for (std::size_t k = 0; k < taps && k <= n - first; ++k) {
            if (open(n - k)) acc += ch.f[k] * (params.eta * x.samples[n - k]);
        }
        y.samples[n] += acc;
    }
    return y;
}

}  // namespace

SymbolFrame synth_reader_rx(const SymbolFrame& source, const SymbolFrame& x,
                            const GateSequence& gate, const ChannelSet& ch,
                            const SystemParams& params) {
    return reader_rx_noiseless(source, x, gate, ch, params);
}

SymbolFrame synth_reader_rx(const SymbolFrame& source, const SymbolFrame& x,
                            const GateSequence& gate, const ChannelSet& ch,
                            const SystemParams& params, RandomStream& rng) {
    SymbolFrame y = reader_rx_noiseless(source, x, gate, ch, params);
    for (auto& sample : y.samples) sample += rng.complex_gaussian(params.noise_power);
    return y;
}

ComplexVector legacy_window(const SymbolFrame& y, const SystemParams& params) {
    require_origin(y, SampleOrigin::ReaderRx, "legacy_window expects reader samples");
    const auto begin = y.samples.begin() + params.cp_len;
    return ComplexVector(begin, begin + params.effective_len);
}

}  // namespace backscatter
