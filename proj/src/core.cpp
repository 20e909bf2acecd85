#include "spdeinv/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace spdeinv {

Grid1D Grid1D::make(double a, double T, int M, int N) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("grid: a must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("grid: T must be positive");
    if (M < 2) throw InvalidInput("grid: M must be >= 2");
    if (N < 2) throw InvalidInput("grid: N must be >= 2");
    Grid1D g;
    g.a = a;
    g.T = T;
    g.M = M;
    g.N = N;
    g.h = a / M;
    g.tau = T / N;
    return g;
}

DataSeries::DataSeries(double t0_, double dt_, std::vector<double> values_)
    : t0(t0_), dt(dt_), values(std::move(values_)) {
    if (values.empty()) throw InvalidInput("DataSeries: no samples");
    if (!(dt > 0.0)) throw InvalidInput("DataSeries: dt must be positive");
}

bool DataSeries::same_sampling(const DataSeries& other) const {
    if (values.size() != other.values.size()) return false;
    const double tol = 1e-12 * std::max({1.0, std::abs(t0), std::abs(dt) * values.size()});
    return std::abs(t0 - other.t0) <= tol && std::abs(dt - other.dt) <= 1e-12 * dt;
}

DataSeries sample_series(double t0, double dt, std::size_t count, const std::function<double(double)>& f) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = f(t0 + static_cast<double>(i) * dt);
    return DataSeries(t0, dt, std::move(v));
}

DataSeries restrict_to(const DataSeries& series, double t_lo, double t_hi) {
    const double tol = 1e-9 * series.dt;
    std::size_t first = series.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.t(i);
        if (t >= t_lo - tol && t <= t_hi + tol) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == series.size()) throw InvalidInput("restrict_to: no samples in range");
    std::vector<double> v(series.values.begin() + static_cast<long>(first),
                          series.values.begin() + static_cast<long>(last) + 1);
    return DataSeries(series.t(first), series.dt, std::move(v));
}

double trapezoid_integral(const DataSeries& series) {
    if (series.size() < 2) throw InvalidInput("trapezoid_integral: need at least 2 samples");
    const auto& v = series.values;
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) interior += v[i];
    return series.dt * (0.5 * (v.front() + v.back()) + interior);
}

double relative_l2_error(const DataSeries& approx, const DataSeries& exact) {
    if (!approx.same_sampling(exact)) throw InvalidInput("relative_l2_error: mismatched sampling");
    double diff2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        const double d = approx.values[i] - exact.values[i];
        diff2 += d * d;
        ref2 += exact.values[i] * exact.values[i];
    }
    if (ref2 == 0.0) return std::sqrt(diff2);
    return std::sqrt(diff2 / ref2);
}

double weighted_l2_norm(std::span<const double> v, double h) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(h * s);
}

namespace {

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t base_seed, std::uint64_t path_index, Domain domain)
    : engine_(mix(mix(mix(base_seed) ^ path_index) ^ (static_cast<std::uint64_t>(domain) << 56))) {}

void NormalStream::fill(std::span<double> out) {
    for (double& x : out) x = next();
}

NormalStream rng_stream(std::uint64_t base_seed, std::uint64_t path_index) {
    return NormalStream(base_seed, path_index, NormalStream::Domain::brownian);
}

NormalStream measurement_stream(std::uint64_t base_seed, std::uint64_t path_index) {
    return NormalStream(base_seed, path_index, NormalStream::Domain::measurement);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void RunConfig::validate() const {
    Grid1D::make(grid.a, grid.T, grid.M, grid.N);
    if (!potential.eval) throw InvalidInput("potential: not set");
    if (!initial_condition.eval) throw InvalidInput("u0: not set");
    if (!grid.is_interior(observation_index))
        throw InvalidInput("observation_index: must be strictly interior (|m| < M)");
    if (P < 1) throw InvalidInput("P: must be >= 1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvalidInput("epsilon: must be >= 0");
    if (method == DiffMethod::tikhonov && !(mu > 0.0)) throw InvalidInput("mu: must be > 0 for tikhonov");
    if (method == DiffMethod::cutoff && !(xi_max > 0.0)) throw InvalidInput("xi_max: must be > 0 for cutoff");
    if (threads < 1) throw InvalidInput("threads: must be >= 1");
}

}  // namespace spdeinv
