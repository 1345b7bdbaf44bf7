#include "backscatter/reader.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace backscatter {

CancelledBlock cancel_interference(const SymbolFrame& y, const SystemParams& params) {
    if (y.origin != SampleOrigin::ReaderRx)
        throw std::invalid_argument("cancel_interference expects reader samples");
    if (y.samples.size() != static_cast<std::size_t>(params.symbol_len()))
        throw std::invalid_argument("cancel_interference: frame length disagrees with params");
    const auto q = static_cast<std::size_t>(params.max_order);
    const auto n_eff = static_cast<std::size_t>(params.effective_len);
    CancelledBlock block{ComplexVector(static_cast<std::size_t>(params.cancelled_len()))};
    for (std::size_t n = 0; n < block.z.size(); ++n)
        block.z[n] = y.samples[n + q] - y.samples[n + n_eff + q];
    return block;
}

FoldedBlock fold(const CancelledBlock& block, const SystemParams& params) {
    if (block.z.size() != static_cast<std::size_t>(params.cancelled_len()))
        throw std::invalid_argument("fold: block length must be T+1");
    const auto len = static_cast<std::size_t>(params.folded_len());
    FoldedBlock out{ComplexVector(block.z.begin(), block.z.begin() + static_cast<std::ptrdiff_t>(len))};
    // T - R = K tail samples wrap onto the head.
    for (std::size_t i = 0; i < static_cast<std::size_t>(params.backscatter_order); ++i)
        out.zvec[i] += block.z[len + i];
    return out;
}

namespace {

// The FFTW planner is not reentrant; executing an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct DftPlan::Impl {
    fftw_plan plan = nullptr;

    explicit Impl(std::size_t n) {
        std::vector<fftw_complex> in(n), out(n);
        std::lock_guard lock(planner_mutex());
        // FFTW_ESTIMATE picks the same algorithm on every run, which keeps
        // results bit-reproducible.
        plan = fftw_plan_dft_1d(static_cast<int>(n), in.data(), out.data(), FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
    }
    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;
};

DftPlan::DftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("DFT length must be positive");
    impl_ = std::make_shared<const Impl>(n);
}

ComplexVector DftPlan::forward(std::span<const Complex> v) const {
    if (v.size() != n_) throw std::invalid_argument("DFT input length does not match plan");
    ComplexVector in(v.begin(), v.end());
    ComplexVector out(n_);
    fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

ComplexVector dft(std::span<const Complex> v) { return DftPlan(v.size()).forward(v); }

SpectralBlock to_spectrum(const FoldedBlock& block, const DftPlan& plan) {
    return {plan.forward(block.zvec)};
}

std::vector<double> test_statistics(const SpectralBlock& spectrum, int window) {
    if (window < 1 || static_cast<std::size_t>(window) > spectrum.ztilde.size())
        throw std::invalid_argument("test_statistics: window outside [1, R+1]");
    const auto w = static_cast<std::size_t>(window);
    std::vector<double> gammas(spectrum.ztilde.size() / w);
    for (std::size_t t = 0; t < gammas.size(); ++t) {
        double acc = 0.0;
        for (std::size_t n = t * w; n < (t + 1) * w; ++n) acc += std::norm(spectrum.ztilde[n]);
        gammas[t] = acc / static_cast<double>(w);
    }
    return gammas;
}

double first_test_statistic(const SpectralBlock& spectrum, int window) {
    return test_statistics(spectrum, window).front();
}

ComplexVector circulant_first_column(std::span<const Complex> f, std::size_t size) {
    if (f.size() > size) throw std::invalid_argument("circulant smaller than channel");
    ComplexVector col(size);
    std::copy(f.begin(), f.end(), col.begin());
    return col;
}

ComplexVector circulant_first_row(std::span<const Complex> f, std::size_t size) {
    if (f.size() > size || f.empty()) throw std::invalid_argument("circulant smaller than channel");
    ComplexVector row(size);
    row[0] = f[0];
    for (std::size_t k = 1; k < f.size(); ++k) row[size - k] = f[k];
    return row;
}

}  // namespace backscatter
