#include "backscatter/detector.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace backscatter {

namespace {

double energy(const ComplexVector& taps) {
    return std::accumulate(taps.begin(), taps.end(), 0.0,
                           [](double acc, const Complex& c) { return acc + std::norm(c); });
}

void require_nondegenerate(const DetectionScales& s, int window) {
    if (!(s.noise_floor > 0.0)) throw DegenerateScales("noise floor V must be positive");
    if (!(s.signal_lift > 0.0))
        throw DegenerateScales("signal lift U must be positive; both hypotheses coincide");
    if (window < 1) throw std::invalid_argument("window must be at least 1");
}

}  // namespace

DetectionScales compute_scales(const SystemParams& params, const ChannelSet& ch) {
    if (!ch.matches(params)) throw std::invalid_argument("compute_scales: channel orders disagree");
    DetectionScales s;
    s.tag_input_power = params.folded_len() * params.source_power * energy(ch.g);
    s.backscatter_gain = energy(ch.f);
    s.noise_bin_power = 2.0 * params.cancelled_len() * params.noise_power;
    s.signal_lift = std::norm(params.eta) * s.tag_input_power * s.backscatter_gain;
    s.noise_floor = s.noise_bin_power;
    return s;
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qfunc_approx(double x) {
    if (!(x >= 0.0)) throw DomainError("qfunc_approx is only defined for x >= 0");
    return 0.5 * std::exp(-kQApproxB * x - kQApproxA * x * x);
}

OptimalThreshold optimal_threshold(const DetectionScales& scales, int window) {
    require_nondegenerate(scales, window);
    const double u = scales.signal_lift;
    const double v = scales.noise_floor;
    const double w = window;
    const double log_ratio = std::log1p(u / v);

    // Multiplying through by V^2 (U+V)^2 gives
    //   U(U+2V) T^2 - 2UV(U+V) T - (2/W) ln(1+U/V) V^2 (U+V)^2 = 0,
    // whose constant term is negative, so exactly one root is positive.
    OptimalThreshold out;
    out.value = v * (u + v) * (1.0 + std::sqrt(1.0 + (2.0 + 4.0 * v / u) * log_ratio / w)) /
                (u + 2.0 * v);
    out.printed_closed_form =
        (v * (u + v) + std::sqrt(v * v * (u + v) * (u + v) + (2.0 + 4.0 * v / u) * log_ratio / w)) /
        (u + 2.0 * v);
    return out;
}

EquiprobableThreshold equiprobable_threshold(const DetectionScales& scales, int window) {
    require_nondegenerate(scales, window);
    const double u = scales.signal_lift;
    const double v = scales.noise_floor;
    const double sqrt_w = std::sqrt(static_cast<double>(window));

    EquiprobableThreshold out;
    out.s0 = kQApproxA * sqrt_w * (u * u + 2.0 * u * v) / (v * (u + v));
    out.s1 = kQApproxB * (u + 2.0 * v) - 2.0 * kQApproxA * sqrt_w * u;
    out.s2 = -2.0 * kQApproxB * v * (u + v);

    const double disc = out.s1 * out.s1 - 4.0 * out.s0 * out.s2;
    if (!(disc >= 0.0))
        throw NoRealRoot("equiprobable threshold: discriminant " + std::to_string(disc) + " < 0");
    const double root_disc = std::sqrt(disc);
    // (-s1 + sqrt(disc)) / (2 s0), rewritten to avoid cancellation when s1 > 0.
    out.value = out.s1 <= 0.0 ? (-out.s1 + root_disc) / (2.0 * out.s0)
                              : (2.0 * out.s2) / (-out.s1 - root_disc);

    // p0 - p1 falls from positive at V to negative at U+V.
    double lo = v;
    double hi = u + v;
    for (int iter = 0; iter < 200 && lo < hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const auto p = error_probabilities(mid, scales, window, QModel::Exact);
        if (p.p0 > p.p1) lo = mid;
        else hi = mid;
    }
    out.bisection_reference = 0.5 * (lo + hi);
    return out;
}

double select_threshold(ThresholdKind kind, const DetectionScales& scales, int window) {
    switch (kind) {
        case ThresholdKind::Optimal: return optimal_threshold(scales, window).value;
        case ThresholdKind::Equiprobable: return equiprobable_threshold(scales, window).value;
    }
    throw std::invalid_argument("unknown threshold kind");
}

int detect(double gamma, double threshold) { return gamma > threshold ? 1 : 0; }

ErrorProbabilities error_probabilities(double threshold, const DetectionScales& scales,
                                       int window, QModel model) {
    const double u = scales.signal_lift;
    const double v = scales.noise_floor;
    const double sqrt_w = std::sqrt(static_cast<double>(window));
    const double x0 = (threshold - v) * sqrt_w / v;
    const double x1 = (u + v - threshold) * sqrt_w / (u + v);
    if (model == QModel::Approximate) return {qfunc_approx(x0), qfunc_approx(x1)};
    return {qfunc(x0), qfunc(x1)};
}

double analytic_ber(double threshold, const DetectionScales& scales, int window) {
    const auto p = error_probabilities(threshold, scales, window, QModel::Exact);
    return 0.5 * (p.p0 + p.p1);
}

const char* to_string(ThresholdKind kind) {
    return kind == ThresholdKind::Optimal ? "optimal" : "equiprobable";
}

}  // namespace backscatter
