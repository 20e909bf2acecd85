#pragma once

#include <complex>
#include <span>
#include <vector>

#include "spdeinv/core.hpp"

namespace spdeinv {

/// Fourier-series coefficients of a uniformly sampled periodic signal.
///
/// For L samples x_k at t0 + k*dt the period is L*dt and
///   c_j = (1/L) sum_k x_k exp(-2 pi i j k / L),
///   x_k = sum_j c_j exp(+2 pi i j k / L),
/// for j = -floor(L/2) .. ceil(L/2)-1, with angular frequency
/// xi_j = 2 pi j / period. With this normalization Parseval reads
/// sum_k |x_k|^2 dt = period * sum_j |c_j|^2.
struct Spectrum {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<std::complex<double>> modes;  // modes[i] holds j = i + min_index()

    std::size_t length() const { return modes.size(); }
    double period() const { return static_cast<double>(modes.size()) * dt; }
    long min_index() const { return -static_cast<long>(modes.size() / 2); }
    long max_index() const { return min_index() + static_cast<long>(modes.size()) - 1; }
    double frequency(long j) const;
    std::complex<double> mode(long j) const { return modes[static_cast<std::size_t>(j - min_index())]; }
    std::complex<double>& mode(long j) { return modes[static_cast<std::size_t>(j - min_index())]; }
};

Spectrum forward_transform(const DataSeries& samples);

/// Same as above for explicitly timestamped samples; throws InvalidInput when
/// the timestamps are not uniformly spaced.
Spectrum forward_transform(std::span<const double> times, std::span<const double> values);

/// Complex samples reconstructed from the coefficients.
std::vector<std::complex<double>> inverse_transform(const Spectrum& spectrum);

struct FilterSpec {
    DiffMethod kind = DiffMethod::tikhonov;
    double mu = 0.0;
    double xi_max = 0.0;

    static FilterSpec tikhonov(double mu);
    static FilterSpec cutoff(double xi_max);
};

/// Derivative with every mode scaled by i*xi / (1 + (mu*xi)^2). mu = 0 is the
/// plain spectral derivative.
DataSeries tikhonov_derivative(const Spectrum& spectrum, double mu);

/// Derivative keeping only modes with |xi| <= xi_max.
DataSeries cutoff_derivative(const Spectrum& spectrum, double xi_max);

DataSeries regularized_derivative(const Spectrum& spectrum, const FilterSpec& filter);

/// Factor multiplying ||phi||_{H^p} in the L2 error bound of the filter:
/// max{mu^{p-1}, mu^{-1}} for Tikhonov, xi_max^{-(p-1)} for cut-off.
double filter_error_bound(double p, const FilterSpec& filter);

/// mu^2 |xi|^3 / (1 + (mu xi)^2) * (1 + xi^2)^{-p/2}
double tikhonov_error_symbol(double mu, double xi, double p);

}  // namespace spdeinv
