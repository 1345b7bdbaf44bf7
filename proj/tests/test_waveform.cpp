#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "backscatter/waveform.hpp"
#include "oracles.hpp"

using namespace backscatter;

namespace {

const SystemParams kDefault = derive_params(BaseParams{});

ChannelSet unit_channels(const SystemParams& p) {
    ChannelSet ch{ComplexVector(p.direct_order + 1), ComplexVector(p.tag_in_order + 1),
                  ComplexVector(p.backscatter_order + 1)};
    ch.h[0] = ch.g[0] = ch.f[0] = 1.0;
    return ch;
}

}  // namespace

TEST_CASE("source symbol carries an exact cyclic prefix") {
    RandomStream rng(5);
    const SymbolFrame s = gen_source_symbol(kDefault, rng);
    REQUIRE(s.samples.size() == 256 + 1024);
    CHECK(s.origin == SampleOrigin::Source);
    for (int n = 0; n < kDefault.cp_len; ++n) CHECK(s.samples[n] == s.samples[n + kDefault.effective_len]);
}

TEST_CASE("source effective part has variance Ps") {
    const auto p = derive_params(BaseParams{.source_power = 4.0});
    RandomStream rng(11);
    std::vector<double> power;
    while (power.size() < 100000) {
        const SymbolFrame s = gen_source_symbol(p, rng);
        for (int n = p.cp_len; n < p.symbol_len(); ++n) power.push_back(std::norm(s.samples[n]));
    }
    const auto m = oracle::moments(power);
    // |s|^2 ~ Exp(Ps): standard error of the mean is Ps / sqrt(n).
    CHECK(std::abs(m.mean - 4.0) <= 3.0 * 4.0 / std::sqrt(static_cast<double>(m.count)));
}

TEST_CASE("tag gate support and weight") {
    const GateSequence zero = tag_gate(kDefault, 0);
    CHECK(std::accumulate(zero.gate.begin(), zero.gate.end(), 0) == 0);

    const GateSequence one = tag_gate(kDefault, 1);
    REQUIRE(one.gate.size() == 1280);
    CHECK(std::accumulate(one.gate.begin(), one.gate.end(), 0) == kDefault.folded_len());
    for (int n = 0; n < 1280; ++n) CHECK(one.gate[n] == ((n >= 8 && n <= 247) ? 1 : 0));
    CHECK(one.gate[kDefault.cp_len - kDefault.backscatter_order] == 0);
    CHECK(zero.gate[kDefault.cp_len - kDefault.backscatter_order] == 0);
    CHECK_THROWS(tag_gate(kDefault, 2));
}

TEST_CASE("tag input through identity, delay and random channels") {
    RandomStream rng(3);
    const SymbolFrame s = gen_source_symbol(kDefault, rng);

    ComplexVector identity(9);
    identity[0] = 1.0;
    CHECK(tag_input(s, identity).samples == s.samples);

    ComplexVector delay(9);
    delay[1] = 1.0;
    const SymbolFrame xd = tag_input(s, delay);
    CHECK(xd.samples[0] == Complex{});
    for (std::size_t n = 1; n < s.samples.size(); ++n) CHECK(xd.samples[n] == s.samples[n - 1]);

    const ChannelSet ch = draw_channels(kDefault, rng);
    const SymbolFrame x = tag_input(s, ch.g);
    CHECK(x.origin == SampleOrigin::TagInput);
    CHECK(oracle::rel_diff(oracle::scatter_convolve(s.samples, ch.g), x.samples) < 1e-14);

    CHECK_THROWS(tag_input(x, ch.g));
}

TEST_CASE("reader samples without backscatter") {
    RandomStream rng(8);
    const SymbolFrame s = gen_source_symbol(kDefault, rng);
    const ChannelSet ch = draw_channels(kDefault, rng);
    const SymbolFrame x = tag_input(s, ch.g);
    const ComplexVector direct = oracle::scatter_convolve(s.samples, ch.h);

    BaseParams muted = kDefault.base();
    muted.eta = 0.0;
    const SystemParams p0 = derive_params(muted);
    const SymbolFrame y_eta0 = synth_reader_rx(s, x, tag_gate(p0, 1), ch, p0);
    CHECK(oracle::rel_diff(direct, y_eta0.samples) < 1e-14);

    const SymbolFrame y_gate0 = synth_reader_rx(s, x, tag_gate(kDefault, 0), ch, kDefault);
    CHECK(y_gate0.samples == synth_reader_rx(s, x, tag_gate(p0, 0), ch, p0).samples);
    CHECK(oracle::rel_diff(direct, y_gate0.samples) < 1e-14);
}

TEST_CASE("unit taps: y = s + eta * gate * s") {
    const auto p = derive_params(BaseParams{.direct_order = 0, .tag_in_order = 0, .backscatter_order = 0,
                                            .eta = {0.5, 0.0}});
    RandomStream rng(9);
    const SymbolFrame s = gen_source_symbol(p, rng);
    const ChannelSet ch = unit_channels(p);
    const SymbolFrame x = tag_input(s, ch.g);
    const GateSequence gate = tag_gate(p, 1);
    const SymbolFrame y = synth_reader_rx(s, x, gate, ch, p);
    for (int n = 0; n < p.symbol_len(); ++n) {
        const Complex expected = s.samples[n] + 0.5 * double(gate.gate[n]) * s.samples[n];
        CHECK(std::abs(y.samples[n] - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("reader noise has variance Nw") {
    const auto p = derive_params(BaseParams{.noise_power = 2.0});
    RandomStream rng(10);
    const SymbolFrame s = gen_source_symbol(p, rng);
    const ChannelSet ch = draw_channels(p, rng);
    const SymbolFrame x = tag_input(s, ch.g);
    const auto gate = tag_gate(p, 0);
    const SymbolFrame clean = synth_reader_rx(s, x, gate, ch, p);
    std::vector<double> power;
    for (int rep = 0; rep < 80; ++rep) {
        const SymbolFrame y = synth_reader_rx(s, x, gate, ch, p, rng);
        for (std::size_t n = 0; n < y.samples.size(); ++n)
            power.push_back(std::norm(y.samples[n] - clean.samples[n]));
    }
    const auto m = oracle::moments(power);
    CHECK(std::abs(m.mean - 2.0) <= 3.0 * 2.0 / std::sqrt(static_cast<double>(m.count)));
}

TEST_CASE("legacy window is blind to the tag bit") {
    for (std::uint64_t draw = 0; draw < 20; ++draw) {
        RandomStream rng(77, StreamPurpose::Auxiliary, draw);
        const SymbolFrame s = gen_source_symbol(kDefault, rng);
        const ChannelSet ch = draw_channels(kDefault, rng);
        const SymbolFrame x = tag_input(s, ch.g);
        RandomStream noise_a(78, StreamPurpose::Auxiliary, draw), noise_b = noise_a;
        const auto y0 = synth_reader_rx(s, x, tag_gate(kDefault, 0), ch, kDefault, noise_a);
        const auto y1 = synth_reader_rx(s, x, tag_gate(kDefault, 1), ch, kDefault, noise_b);
        const ComplexVector w0 = legacy_window(y0, kDefault);
        CHECK(w0.size() == 1024);
        CHECK(w0 == legacy_window(y1, kDefault));
        CHECK(y0.samples != y1.samples);
    }
}

TEST_CASE("reflection is confined to [Q, C-1]") {
    RandomStream rng(12);
    const SymbolFrame s = gen_source_symbol(kDefault, rng);
    ChannelSet ch = draw_channels(kDefault, rng);
    std::fill(ch.h.begin(), ch.h.end(), Complex{});
    const SymbolFrame x = tag_input(s, ch.g);
    const SymbolFrame y = synth_reader_rx(s, x, tag_gate(kDefault, 1), ch, kDefault);
    for (int n = 0; n < kDefault.symbol_len(); ++n) {
        if (n < kDefault.max_order || n >= kDefault.cp_len) CHECK(y.samples[n] == Complex{});
    }
    CHECK(std::abs(y.samples[kDefault.cp_len - 1]) > 0.0);
}

TEST_CASE("direct path repeats across CP and tail") {
    RandomStream rng(13);
    const SymbolFrame s = gen_source_symbol(kDefault, rng);
    const ChannelSet ch = draw_channels(kDefault, rng);
    const SymbolFrame x = tag_input(s, ch.g);
    const SymbolFrame y = synth_reader_rx(s, x, tag_gate(kDefault, 0), ch, kDefault);
    for (int n = kDefault.max_order; n < kDefault.cp_len; ++n)
        CHECK(y.samples[n] == y.samples[n + kDefault.effective_len]);
}
