#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "backscatter/core.hpp"
#include "backscatter/waveform.hpp"

namespace backscatter {

/// z(n) = y(n+Q) - y(n+N+Q), n = 0..T.
struct CancelledBlock {
    ComplexVector z;
};

/// Length R+1 vector whose first K entries carry the folded linear tail.
struct FoldedBlock {
    ComplexVector zvec;
};

struct SpectralBlock {
    ComplexVector ztilde;
};

CancelledBlock cancel_interference(const SymbolFrame& y, const SystemParams& params);

FoldedBlock fold(const CancelledBlock& block, const SystemParams& params);

/**
 * Unnormalized forward DFT of a fixed length, X_p = sum_q exp(-j2pi pq/n) x_q.
 *
 * The plan is built once and is immutable afterwards; forward() may be called
 * concurrently from any number of threads. Copies share the plan.
 */
class DftPlan {
public:
    explicit DftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    ComplexVector forward(std::span<const Complex> v) const;

private:
    struct Impl;
    std::size_t n_;
    std::shared_ptr<const Impl> impl_;
};

ComplexVector dft(std::span<const Complex> v);

SpectralBlock to_spectrum(const FoldedBlock& block, const DftPlan& plan);

/// Gamma_t: mean of |ztilde|^2 over the t-th run of `window` consecutive bins,
/// starting at bin 0. Trailing bins that do not fill a window are dropped.
std::vector<double> test_statistics(const SpectralBlock& spectrum, int window);

/// Gamma_1 only; equal to test_statistics(...)[0].
double first_test_statistic(const SpectralBlock& spectrum, int window);

/// First column t_c = [f_0 .. f_K, 0 .. 0] of the (size x size) circulant
/// that maps the reflected block to the folded block.
ComplexVector circulant_first_column(std::span<const Complex> f, std::size_t size);

/// First row t_r = [f_0, 0 .. 0, f_K, .. f_1] of the same circulant.
ComplexVector circulant_first_row(std::span<const Complex> f, std::size_t size);

}  // namespace backscatter
