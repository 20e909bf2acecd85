#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spdeinv/core.hpp"
#include "spdeinv/heat_solver.hpp"

namespace spdeinv {

/// Brownian increments on a uniform time grid: dB_n = sqrt(tau) * etas[n].
struct BrownianIncrements {
    double tau = 0.0;
    std::vector<double> etas;

    static BrownianIncrements draw(NormalStream& stream, int N, double tau);

    int steps() const { return static_cast<int>(etas.size()); }
    double increment(int n) const;

    /// Path on a grid `factor` times coarser: each coarse increment is the sum
    /// of `factor` consecutive fine increments, rescaled to unit variance.
    BrownianIncrements coarsen(int factor) const;
};

/// Multiplicative noise factor sampled on t_0..t_N, factors[0] = 1.
struct NoiseFactorPath {
    std::vector<double> factors;
};

struct FactorSamples {
    /// prod_{j<n} (1 + q(t_j) dB_j): the factor produced by the implicit
    /// Euler-Maruyama scheme.
    NoiseFactorPath discrete;
    /// exp(sum_{j<n} q(t_j) dB_j - 0.5 sum_{j<n} q(t_j)^2 tau): always positive.
    NoiseFactorPath exponential;
};

FactorSamples sample_exact_factor(const Potential& q, const BrownianIncrements& path);

/// (I - tau Delta_h) U^{n+1} = U^n (1 + q(t_n) dB_n) on interior nodes, zero
/// boundary. The noise multiplies the left-endpoint state.
FieldTrajectory solve_spde_fd(const Grid1D& grid, std::span<const double> u0, const Potential& q,
                              const BrownianIncrements& path);

class DegenerateEnsemble : public std::runtime_error {
public:
    DegenerateEnsemble(const std::string& what, long discarded)
        : std::runtime_error(what), discarded_paths(discarded) {}
    long discarded_paths;
};

/// Monte Carlo statistics of the observation-point solution.
struct EnsembleSummary {
    long P = 0;
    std::uint64_t base_seed = 0;  // path p draws from rng_stream(base_seed, p)
    DataSeries v_observed;        // deterministic FD solution at the observation point
    DataSeries mean_log_u;        // mean of ln u^{n,eps} over retained samples
    DataSeries var_log_u;         // unbiased sample variance of the same samples
    DataSeries mean_u;            // mean of u^n (noise-free) over retained paths
    std::vector<long> samples_per_node;  // retained samples contributing to each node
    long discarded_paths = 0;            // fd paths with u <= 0 somewhere on the observation series
    long flagged_noise_samples = 0;      // samples with 1 + eps*zeta <= 0
};

/// Simulates config.P independent paths. Path p uses rng_stream(base_seed, p)
/// for its Brownian increments and measurement_stream(base_seed, p) for its
/// measurement noise; results are reduced in ascending path order so the
/// summary is bitwise independent of config.threads.
EnsembleSummary run_ensemble(const RunConfig& config, Sampler mode);

struct StrongConvergenceOptions {
    int M = 25;
    int base_N = 256;
    int halvings = 3;
    int paths = 200;
    int reference_refinement = 16;  // reference path is this much finer than the finest level
    double a = 1.0;
    double T = 1.0;
    std::uint64_t seed = 7;
    int threads = 1;
};

struct StrongConvergenceResult {
    std::vector<int> N;
    std::vector<double> tau;
    std::vector<double> rms_error;
};

/// RMS of ||U(T) - U^N||_h over sample paths, level k using N = base_N * 2^k.
/// The reference solution is v(x, T) from the eigen-series times the exact
/// exponential factor on a common finer path; every level uses the same path
/// coarsened by summing increments.
StrongConvergenceResult strong_convergence_probe(const Potential& q, const std::function<double(double)>& u0,
                                                 const StrongConvergenceOptions& options);

}  // namespace spdeinv
