#include "spdeinv/data_pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace spdeinv {

std::size_t apply_measurement_noise(std::span<double> values, double epsilon, NormalStream& stream,
                                    std::span<unsigned char> flags) {
    if (!(epsilon >= 0.0)) throw InvalidInput("inject_noise: epsilon must be >= 0");
    if (flags.size() != values.size()) throw InvalidInput("inject_noise: flag buffer size mismatch");
    std::fill(flags.begin(), flags.end(), static_cast<unsigned char>(0));
    if (epsilon == 0.0) return 0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < values.size(); ++n) {
        const double factor = 1.0 + epsilon * stream.next();
        values[n] *= factor;
        if (factor <= 0.0) {
            flags[n] = 1;
            ++count;
        }
    }
    return count;
}

NoisyObservation inject_noise(const DataSeries& clean, double epsilon, NormalStream& stream) {
    NoisyObservation obs;
    obs.clean = clean;
    obs.noisy = clean;
    obs.epsilon = epsilon;
    std::vector<unsigned char> flags(clean.size());
    obs.flag_count = apply_measurement_noise(obs.noisy.values, epsilon, stream, flags);
    obs.flagged.assign(flags.begin(), flags.end());
    return obs;
}

DataSeries build_psi(const DataSeries& ensemble_log_mean, const DataSeries& v_observed) {
    if (!ensemble_log_mean.same_sampling(v_observed)) throw InvalidInput("build_psi: mismatched sampling");
    DataSeries psi = ensemble_log_mean;
    for (std::size_t n = 0; n < psi.size(); ++n) {
        const double v = v_observed.values[n];
        if (!(v > 0.0))
            throw InvalidInput("build_psi: deterministic solution is not positive at sample " + std::to_string(n));
        psi.values[n] -= std::log(v);
    }
    return psi;
}

double interpolate_psi(const DataSeries& psi, double t) {
    const double t_end = psi.t_end();
    const double tol = 1e-12 * std::max(1.0, std::abs(t_end));
    if (t < psi.t0 - tol || t > t_end + tol) throw OutOfRange("interpolate_psi: t outside the sampled span");
    if (psi.size() == 1) return psi.values.front();
    const double s = std::clamp((t - psi.t0) / psi.dt, 0.0, static_cast<double>(psi.size() - 1));
    const auto n = std::min(static_cast<std::size_t>(s), psi.size() - 2);
    const double tn = psi.t(n);
    const double w = (t - tn) / psi.dt;
    if (w == 0.0) return psi.values[n];
    if (w == 1.0) return psi.values[n + 1];
    return (1.0 - w) * psi.values[n] + w * psi.values[n + 1];
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> knots, std::vector<double> values)
    : x_(std::move(knots)), y_(std::move(values)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidInput("NaturalCubicSpline: need >= 2 matching knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw InvalidInput("NaturalCubicSpline: knots must increase strictly");

    m_.assign(n, 0.0);
    if (n == 2) return;
    // Tridiagonal system for interior second derivatives, M_0 = M_{n-1} = 0.
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double lower = x_[i + 1] - x_[i];  // h_{i} couples row i to i-1
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
}

double NaturalCubicSpline::operator()(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

ExtendedSeries periodize(const DataSeries& psi) {
    if (psi.size() < static_cast<std::size_t>(kWingDataPoints) + 1)
        throw InvalidInput("periodize: need N >= 16");
    const int N = static_cast<int>(psi.size()) - 1;
    const double tau = psi.dt;
    const double t0 = psi.t0;
    const auto time = [&](int n) { return t0 + n * tau; };

    ExtendedSeries out;
    out.inner = psi;
    std::vector<double> ext(static_cast<std::size_t>(3 * N), 0.0);
    const auto slot = [&](int n) -> double& { return ext[static_cast<std::size_t>(n + N)]; };

    for (int n = 0; n <= N; ++n) slot(n) = psi.values[static_cast<std::size_t>(n)];

    // Right wing on (T, 2T): data n = N-15..N, zeros at n = 2N-6..2N.
    for (int n = N - kWingDataPoints + 1; n <= N; ++n) {
        out.right_anchor_t.push_back(time(n));
        out.right_anchor_v.push_back(psi.values[static_cast<std::size_t>(n)]);
    }
    for (int n = 2 * N - kWingZeroAnchors + 1; n <= 2 * N; ++n) {
        out.right_anchor_t.push_back(time(n));
        out.right_anchor_v.push_back(0.0);
    }
    const NaturalCubicSpline right(out.right_anchor_t, out.right_anchor_v);
    for (int n = N + 1; n <= 2 * N - kWingZeroAnchors; ++n) slot(n) = right(time(n));

    // Left wing on [-T, 0): zeros at n = -N..-N+6, data n = 0..15.
    for (int n = -N; n < -N + kWingZeroAnchors; ++n) {
        out.left_anchor_t.push_back(time(n));
        out.left_anchor_v.push_back(0.0);
    }
    for (int n = 0; n < kWingDataPoints; ++n) {
        out.left_anchor_t.push_back(time(n));
        out.left_anchor_v.push_back(psi.values[static_cast<std::size_t>(n)]);
    }
    const NaturalCubicSpline left(out.left_anchor_t, out.left_anchor_v);
    for (int n = -N + kWingZeroAnchors; n < 0; ++n) slot(n) = left(time(n));

    out.extended = DataSeries(time(-N), tau, std::move(ext));
    return out;
}

}  // namespace spdeinv
