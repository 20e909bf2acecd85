#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdeinv {

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Uniform space-time grid on [-a, a] x [0, T].
///
/// Nodes are x_m = m*h for m = -M..M with h = a/M, so the boundary nodes sit
/// exactly at +-a, and t_n = n*tau for n = 0..N with tau = T/N.
struct Grid1D {
    double a = 1.0;
    double T = 1.0;
    int M = 2;
    int N = 2;
    double h = 0.5;
    double tau = 0.5;

    static Grid1D make(double a, double T, int M, int N);

    int node_count() const { return 2 * M + 1; }
    int time_count() const { return N + 1; }
    /// Storage column for spatial index m in [-M, M].
    int column(int m) const { return m + M; }
    double x(int m) const { return m * h; }
    double t(int n) const { return n * tau; }
    bool is_interior(int m) const { return m > -M && m < M; }
};

/// Uniformly sampled scalar time series: values[i] sits at t0 + i*dt.
struct DataSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    DataSeries() = default;
    DataSeries(double t0, double dt, std::vector<double> values);

    std::size_t size() const { return values.size(); }
    double t(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double t_end() const { return t(values.size() - 1); }
    bool same_sampling(const DataSeries& other) const;
};

/// Sample f at t0, t0+dt, ..., t0+(count-1)*dt.
DataSeries sample_series(double t0, double dt, std::size_t count, const std::function<double(double)>& f);

/// Sub-series of the samples whose times lie in [t_lo, t_hi] (with a small
/// tolerance so nodes sitting on the bounds are kept).
DataSeries restrict_to(const DataSeries& series, double t_lo, double t_hi);

/// Composite trapezoid rule over the span of the series.
double trapezoid_integral(const DataSeries& series);

/// ||approx - exact|| / ||exact|| in l2; falls back to ||approx - exact|| when
/// exact is identically zero.
double relative_l2_error(const DataSeries& approx, const DataSeries& exact);

/// h^{1/2} * ||v||_{l2}
double weighted_l2_norm(std::span<const double> v, double h);

/// Time-dependent deterministic potential q(t).
struct Potential {
    std::string name;
    std::function<double(double)> eval;

    double operator()(double t) const { return eval(t); }
};

/// Deterministic stream of standard normal variates keyed on
/// (base_seed, path_index, domain). The same key always reproduces the same
/// stream, independent of which thread draws it or when.
class NormalStream {
public:
    enum class Domain : std::uint64_t { brownian = 0, measurement = 1 };

    NormalStream(std::uint64_t base_seed, std::uint64_t path_index, Domain domain = Domain::brownian);

    double next() { return normal_(engine_); }
    void fill(std::span<double> out);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

NormalStream rng_stream(std::uint64_t base_seed, std::uint64_t path_index);

/// Stream for measurement-noise variates; disjoint from every Brownian stream.
NormalStream measurement_stream(std::uint64_t base_seed, std::uint64_t path_index);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write to per-index slots so the result does
/// not depend on the worker count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

enum class DiffMethod { tikhonov, cutoff };
enum class Sampler { fd, exact_exponential };

/// Spatial initial condition u0(x).
struct InitialCondition {
    std::string name;
    std::function<double(double)> eval;

    double operator()(double x) const { return eval(x); }
};

/// Complete experiment description.
struct RunConfig {
    Grid1D grid = Grid1D::make(1.0, 1.0, 50, 128);
    Potential potential;
    InitialCondition initial_condition;
    int observation_index = 0;
    long P = 10000;
    double epsilon = 0.1;
    DiffMethod method = DiffMethod::tikhonov;
    double mu = 0.03;
    double xi_max = 30.0;
    std::uint64_t base_seed = 20240601;
    Sampler sampler = Sampler::fd;
    int threads = 1;

    /// Throws InvalidInput naming the first offending field.
    void validate() const;
};

}  // namespace spdeinv
