#include "spdeinv/regularized_diff.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace spdeinv {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void run_dft(std::vector<std::complex<double>>& data, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

std::size_t wrap(long j, std::size_t L) {
    const long n = static_cast<long>(L);
    return static_cast<std::size_t>(((j % n) + n) % n);
}

template <class Multiplier>
DataSeries filtered_derivative(const Spectrum& spectrum, Multiplier gain) {
    Spectrum d = spectrum;
    const bool even = d.length() % 2 == 0;
    for (long j = d.min_index(); j <= d.max_index(); ++j) {
        if (even && j == d.min_index()) {
            d.mode(j) = 0.0;  // unpaired Nyquist mode
            continue;
        }
        const double xi = d.frequency(j);
        d.mode(j) *= std::complex<double>(0.0, xi) * gain(xi);
    }
    const auto samples = inverse_transform(d);
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [](auto c) { return c.real(); });
    return DataSeries(spectrum.t0, spectrum.dt, std::move(out));
}

}  // namespace

double Spectrum::frequency(long j) const { return 2.0 * std::numbers::pi * static_cast<double>(j) / period(); }

Spectrum forward_transform(const DataSeries& samples) {
    const std::size_t L = samples.size();
    if (L < 4) throw InvalidInput("forward_transform: need at least 4 samples");
    std::vector<std::complex<double>> buf(samples.values.begin(), samples.values.end());
    run_dft(buf, FFTW_FORWARD);

    Spectrum s;
    s.t0 = samples.t0;
    s.dt = samples.dt;
    s.modes.resize(L);
    const double scale = 1.0 / static_cast<double>(L);
    for (long j = s.min_index(); j <= s.max_index(); ++j) s.mode(j) = buf[wrap(j, L)] * scale;
    return s;
}

Spectrum forward_transform(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw InvalidInput("forward_transform: size mismatch");
    if (times.size() < 4) throw InvalidInput("forward_transform: need at least 4 samples");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw InvalidInput("forward_transform: times must increase");
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double expected = times[0] + static_cast<double>(k) * dt;
        if (std::abs(times[k] - expected) > 1e-9 * std::max(dt, std::abs(expected)))
            throw InvalidInput("forward_transform: non-uniform sampling");
    }
    return forward_transform(DataSeries(times[0], dt, std::vector<double>(values.begin(), values.end())));
}

std::vector<std::complex<double>> inverse_transform(const Spectrum& spectrum) {
    const std::size_t L = spectrum.length();
    std::vector<std::complex<double>> buf(L);
    for (long j = spectrum.min_index(); j <= spectrum.max_index(); ++j) buf[wrap(j, L)] = spectrum.mode(j);
    run_dft(buf, FFTW_BACKWARD);
    return buf;
}

FilterSpec FilterSpec::tikhonov(double mu) {
    if (!(mu >= 0.0)) throw InvalidInput("FilterSpec: mu must be >= 0");
    return FilterSpec{DiffMethod::tikhonov, mu, 0.0};
}

FilterSpec FilterSpec::cutoff(double xi_max) {
    if (!(xi_max > 0.0)) throw InvalidInput("FilterSpec: xi_max must be > 0");
    return FilterSpec{DiffMethod::cutoff, 0.0, xi_max};
}

DataSeries tikhonov_derivative(const Spectrum& spectrum, double mu) {
    if (!(mu >= 0.0)) throw InvalidInput("tikhonov_derivative: mu must be >= 0");
    return filtered_derivative(spectrum, [mu](double xi) {
        const double s = mu * xi;
        return 1.0 / (1.0 + s * s);
    });
}

DataSeries cutoff_derivative(const Spectrum& spectrum, double xi_max) {
    if (!(xi_max > 0.0)) throw InvalidInput("cutoff_derivative: xi_max must be > 0");
    return filtered_derivative(spectrum, [xi_max](double xi) { return std::abs(xi) <= xi_max ? 1.0 : 0.0; });
}

DataSeries regularized_derivative(const Spectrum& spectrum, const FilterSpec& filter) {
    return filter.kind == DiffMethod::tikhonov ? tikhonov_derivative(spectrum, filter.mu)
                                               : cutoff_derivative(spectrum, filter.xi_max);
}

double filter_error_bound(double p, const FilterSpec& filter) {
    if (!(p > 1.0)) throw InvalidInput("filter_error_bound: p must be > 1");
    if (filter.kind == DiffMethod::tikhonov) {
        if (!(filter.mu > 0.0)) throw InvalidInput("filter_error_bound: mu must be > 0");
        return std::max(std::pow(filter.mu, p - 1.0), 1.0 / filter.mu);
    }
    if (!(filter.xi_max > 0.0)) throw InvalidInput("filter_error_bound: xi_max must be > 0");
    return std::pow(filter.xi_max, -(p - 1.0));
}

double tikhonov_error_symbol(double mu, double xi, double p) {
    const double ax = std::abs(xi);
    const double s = mu * xi;
    return mu * mu * ax * ax * ax / (1.0 + s * s) * std::pow(1.0 + xi * xi, -0.5 * p);
}

}  // namespace spdeinv
