#pragma once

#include <stdexcept>

#include "backscatter/core.hpp"

namespace backscatter {

/**
 * Parameters of the Gaussian model for Gamma:
 *   bit 0: N(V, V^2/W),   bit 1: N(U+V, (U+V)^2/W).
 * The per-bin variances that make up U and V are kept for reporting.
 */
struct DetectionScales {
    double signal_lift = 0.0;      // U = |eta|^2 Px Pf
    double noise_floor = 0.0;      // V = Pw
    double tag_input_power = 0.0;  // Px = (R+1) Ps sum|g|^2
    double noise_bin_power = 0.0;  // Pw = 2 (T+1) Nw
    double backscatter_gain = 0.0; // Pf = sum|f|^2
};

enum class ThresholdKind { Optimal, Equiprobable };

class DegenerateScales : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NoRealRoot : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

DetectionScales compute_scales(const SystemParams& params, const ChannelSet& ch);

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
double qfunc(double x);

inline constexpr double kQApproxA = 0.416;
inline constexpr double kQApproxB = 0.717;

/// exp(-b x - a x^2) / 2 with a = 0.416, b = 0.717. Only defined for x >= 0.
double qfunc_approx(double x);

struct OptimalThreshold {
    double value = 0.0;
    /// Variant closed form whose logarithmic radicand term is missing the
    /// V^2 (U+V)^2 factor. Reported for comparison, never used to decide.
    double printed_closed_form = 0.0;
    double discrepancy() const { return printed_closed_form - value; }
};

/**
 * Intersection of the two conditional pdfs above V, i.e. the positive root of
 *   (T-V)^2/V^2 - (T-U-V)^2/(U+V)^2 = (2/W) ln((U+V)/V).
 * The root lies below U+V whenever (W/2)(U/V)^2 > ln(1 + U/V).
 */
OptimalThreshold optimal_threshold(const DetectionScales& scales, int window);

struct EquiprobableThreshold {
    double value = 0.0;                // positive root of s0 T^2 + s1 T + s2
    double bisection_reference = 0.0;  // p0 = p1 solved with the exact qfunc
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

EquiprobableThreshold equiprobable_threshold(const DetectionScales& scales, int window);

double select_threshold(ThresholdKind kind, const DetectionScales& scales, int window);

/// 1 iff gamma > threshold; equality decides 0.
int detect(double gamma, double threshold);

enum class QModel { Exact, Approximate };

struct ErrorProbabilities {
    double p0 = 0.0;  // Pr(decide 1 | bit 0)
    double p1 = 0.0;  // Pr(decide 0 | bit 1)
};

ErrorProbabilities error_probabilities(double threshold, const DetectionScales& scales,
                                       int window, QModel model = QModel::Exact);

/// (p0 + p1) / 2 under equiprobable bits, with the exact qfunc.
double analytic_ber(double threshold, const DetectionScales& scales, int window);

const char* to_string(ThresholdKind kind);

}  // namespace backscatter
