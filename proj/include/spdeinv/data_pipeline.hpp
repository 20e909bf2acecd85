#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spdeinv/core.hpp"

namespace spdeinv {

/// Observation series with multiplicative measurement noise
/// u^{n,eps} = u^n (1 + eps * zeta_n).
struct NoisyObservation {
    DataSeries clean;
    DataSeries noisy;
    double epsilon = 0.0;
    /// flagged[n] is set when 1 + eps*zeta_n <= 0; such samples have no logarithm.
    std::vector<bool> flagged;
    std::size_t flag_count = 0;
};

/// Multiplies values in place by (1 + eps*zeta_n), drawing zeta_n from `stream`.
/// Writes 1 to flags[n] for every sample whose factor is nonpositive and
/// returns the number of such samples. eps == 0 leaves values untouched and
/// draws nothing.
std::size_t apply_measurement_noise(std::span<double> values, double epsilon, NormalStream& stream,
                                    std::span<unsigned char> flags);

NoisyObservation inject_noise(const DataSeries& clean, double epsilon, NormalStream& stream);

/// psi^n = E[ln u^{n,eps}] - ln v^n.
DataSeries build_psi(const DataSeries& ensemble_log_mean, const DataSeries& v_observed);

/// Piecewise-linear interpolant of the psi samples; throws OutOfRange outside
/// the sampled span.
double interpolate_psi(const DataSeries& psi, double t);

/// Natural cubic spline through strictly increasing knots.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> knots, std::vector<double> values);

    double operator()(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

/// Number of trailing (leading) psi samples fitted for each wing.
inline constexpr int kWingDataPoints = 16;
/// Number of zero-valued anchors at the outer end of each wing.
inline constexpr int kWingZeroAnchors = 7;

/// psi extended from [0, T] to the half-open period [-T, 2T).
struct ExtendedSeries {
    DataSeries inner;     // N+1 samples on [0, T]
    DataSeries extended;  // 3N samples starting at -T
    /// Anchor abscissae / values used for the right and left wing splines.
    std::vector<double> right_anchor_t, right_anchor_v;
    std::vector<double> left_anchor_t, left_anchor_v;

    /// Index of t = 0 inside `extended`.
    std::size_t inner_offset() const { return inner.size() - 1; }
};

/// Periodic extension of psi with period 3T. Each wing is a natural cubic
/// spline through the 16 nearest psi samples and 7 zero anchors placed on the
/// outermost wing nodes, so the extension vanishes at -T and (by periodicity)
/// at 2T.
ExtendedSeries periodize(const DataSeries& psi);

}  // namespace spdeinv
