#include "spdeinv/spde_solver.hpp"

#include <algorithm>
#include <cmath>

#include "spdeinv/data_pipeline.hpp"

namespace spdeinv {

BrownianIncrements BrownianIncrements::draw(NormalStream& stream, int N, double tau) {
    if (N < 1 || !(tau > 0.0)) throw InvalidInput("BrownianIncrements: need N >= 1 and tau > 0");
    BrownianIncrements b;
    b.tau = tau;
    b.etas.resize(static_cast<std::size_t>(N));
    stream.fill(b.etas);
    return b;
}

double BrownianIncrements::increment(int n) const { return std::sqrt(tau) * etas[static_cast<std::size_t>(n)]; }

BrownianIncrements BrownianIncrements::coarsen(int factor) const {
    if (factor < 1 || etas.size() % static_cast<std::size_t>(factor) != 0)
        throw InvalidInput("BrownianIncrements::coarsen: factor must divide the step count");
    BrownianIncrements c;
    c.tau = tau * factor;
    c.etas.resize(etas.size() / static_cast<std::size_t>(factor));
    const double norm = 1.0 / std::sqrt(static_cast<double>(factor));
    for (std::size_t i = 0; i < c.etas.size(); ++i) {
        double s = 0.0;
        for (int k = 0; k < factor; ++k) s += etas[i * static_cast<std::size_t>(factor) + static_cast<std::size_t>(k)];
        c.etas[i] = s * norm;
    }
    return c;
}

FactorSamples sample_exact_factor(const Potential& q, const BrownianIncrements& path) {
    const int N = path.steps();
    FactorSamples out;
    out.discrete.factors.resize(static_cast<std::size_t>(N) + 1);
    out.exponential.factors.resize(static_cast<std::size_t>(N) + 1);
    out.discrete.factors[0] = 1.0;
    out.exponential.factors[0] = 1.0;
    double product = 1.0;
    double exponent = 0.0;
    for (int n = 0; n < N; ++n) {
        const double qn = q(n * path.tau);
        const double dB = path.increment(n);
        product *= 1.0 + qn * dB;
        exponent += qn * dB - 0.5 * qn * qn * path.tau;
        out.discrete.factors[static_cast<std::size_t>(n) + 1] = product;
        out.exponential.factors[static_cast<std::size_t>(n) + 1] = std::exp(exponent);
    }
    return out;
}

namespace {

void check_inputs(const Grid1D& grid, std::span<const double> u0, const BrownianIncrements& path) {
    if (u0.size() != static_cast<std::size_t>(grid.node_count()))
        throw InvalidInput("solve_spde_fd: u0 must have 2M+1 samples");
    if (path.steps() != grid.N) throw InvalidInput("solve_spde_fd: path length must equal N");
    if (std::abs(path.tau - grid.tau) > 1e-12 * grid.tau)
        throw InvalidInput("solve_spde_fd: path step differs from grid step");
}

// Advances one row of the implicit Euler-Maruyama scheme in place.
inline void spde_step(const ImplicitHeatStep& step, std::span<double> row, double noise_factor) {
    for (double& x : row) x *= noise_factor;
    step.apply(row);
}

}  // namespace

FieldTrajectory solve_spde_fd(const Grid1D& grid, std::span<const double> u0, const Potential& q,
                              const BrownianIncrements& path) {
    check_inputs(grid, u0, path);
    FieldTrajectory traj(grid);
    std::copy(u0.begin(), u0.end(), traj.row(0).begin());
    const ImplicitHeatStep step(grid);
    for (int n = 0; n < grid.N; ++n) {
        auto next = traj.row(n + 1);
        const auto cur = traj.row(n);
        std::copy(cur.begin(), cur.end(), next.begin());
        spde_step(step, next, 1.0 + q(grid.t(n)) * path.increment(n));
    }
    return traj;
}

EnsembleSummary run_ensemble(const RunConfig& config, Sampler mode) {
    config.validate();
    const Grid1D& grid = config.grid;
    const int N = grid.N;
    const auto width = static_cast<std::size_t>(N) + 1;
    const int obs = config.observation_index;
    const auto obs_col = static_cast<std::size_t>(grid.column(obs));

    const auto u0 = sample_initial(grid, config.initial_condition.eval);
    const auto heat = solve_heat_fd(grid, u0);
    const DataSeries v_obs = heat.at_node(obs);
    const ImplicitHeatStep step(grid);

    std::vector<double> q_at(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) q_at[static_cast<std::size_t>(n)] = config.potential(grid.t(n));

    constexpr std::size_t kChunk = 4096;
    std::vector<double> clean_buf(kChunk * width);
    std::vector<double> noisy_buf(kChunk * width);
    std::vector<unsigned char> flag_buf(kChunk * width);
    std::vector<unsigned char> discard_buf(kChunk);

    // Welford accumulators per node, updated in ascending path order.
    std::vector<double> mean(width, 0.0), m2(width, 0.0), mean_u(width, 0.0);
    std::vector<long> count(width, 0);
    long paths_kept = 0;

    EnsembleSummary summary;
    summary.P = config.P;
    summary.base_seed = config.base_seed;

    const auto total = static_cast<std::size_t>(config.P);
    for (std::size_t begin = 0; begin < total; begin += kChunk) {
        const std::size_t len = std::min(kChunk, total - begin);
        parallel_for(len, config.threads, [&](std::size_t local) {
            const std::uint64_t p = begin + local;
            std::span<double> clean(clean_buf.data() + local * width, width);
            auto brown = rng_stream(config.base_seed, p);
            const auto path = BrownianIncrements::draw(brown, N, grid.tau);

            if (mode == Sampler::fd) {
                std::vector<double> row(u0);
                clean[0] = row[obs_col];
                for (int n = 0; n < N; ++n) {
                    spde_step(step, row, 1.0 + q_at[static_cast<std::size_t>(n)] * path.increment(n));
                    clean[static_cast<std::size_t>(n) + 1] = row[obs_col];
                }
            } else {
                double exponent = 0.0;
                clean[0] = v_obs.values[0];
                for (int n = 0; n < N; ++n) {
                    const double qn = q_at[static_cast<std::size_t>(n)];
                    exponent += qn * path.increment(n) - 0.5 * qn * qn * grid.tau;
                    clean[static_cast<std::size_t>(n) + 1] = v_obs.values[static_cast<std::size_t>(n) + 1] * std::exp(exponent);
                }
            }
            discard_buf[local] = std::any_of(clean.begin(), clean.end(), [](double u) { return !(u > 0.0); }) ? 1 : 0;

            std::span<double> noisy(noisy_buf.data() + local * width, width);
            std::span<unsigned char> flags(flag_buf.data() + local * width, width);
            std::copy(clean.begin(), clean.end(), noisy.begin());
            if (config.epsilon > 0.0) {
                auto meas = measurement_stream(config.base_seed, p);
                apply_measurement_noise(noisy, config.epsilon, meas, flags);
            } else {
                std::fill(flags.begin(), flags.end(), static_cast<unsigned char>(0));
            }
        });

        for (std::size_t local = 0; local < len; ++local) {
            if (mode == Sampler::fd && discard_buf[local]) {
                ++summary.discarded_paths;
                continue;
            }
            ++paths_kept;
            const double* clean = clean_buf.data() + local * width;
            const double* noisy = noisy_buf.data() + local * width;
            const unsigned char* flags = flag_buf.data() + local * width;
            for (std::size_t n = 0; n < width; ++n) {
                mean_u[n] += (clean[n] - mean_u[n]) / static_cast<double>(paths_kept);
                if (flags[n]) {
                    ++summary.flagged_noise_samples;
                    continue;
                }
                const double x = std::log(noisy[n]);
                ++count[n];
                const double delta = x - mean[n];
                mean[n] += delta / static_cast<double>(count[n]);
                m2[n] += delta * (x - mean[n]);
            }
        }
    }

    if (paths_kept == 0)
        throw DegenerateEnsemble("ensemble: all " + std::to_string(summary.discarded_paths) +
                                     " paths discarded for nonpositive observation values",
                                 summary.discarded_paths);
    for (std::size_t n = 0; n < width; ++n)
        if (count[n] == 0)
            throw DegenerateEnsemble("ensemble: no usable noisy sample at node " + std::to_string(n) + " (" +
                                         std::to_string(summary.discarded_paths) + " paths discarded)",
                                     summary.discarded_paths);

    std::vector<double> var(width);
    for (std::size_t n = 0; n < width; ++n) var[n] = count[n] > 1 ? m2[n] / static_cast<double>(count[n] - 1) : 0.0;

    summary.v_observed = v_obs;
    summary.mean_log_u = DataSeries(0.0, grid.tau, std::move(mean));
    summary.var_log_u = DataSeries(0.0, grid.tau, std::move(var));
    summary.mean_u = DataSeries(0.0, grid.tau, std::move(mean_u));
    summary.samples_per_node = std::move(count);
    return summary;
}

StrongConvergenceResult strong_convergence_probe(const Potential& q, const std::function<double(double)>& u0,
                                                 const StrongConvergenceOptions& opt) {
    if (opt.halvings < 1) throw InvalidInput("strong_convergence_probe: halvings must be >= 1");
    if (opt.paths < 1 || opt.base_N < 2 || opt.reference_refinement < 1)
        throw InvalidInput("strong_convergence_probe: invalid options");

    const int levels = opt.halvings + 1;
    const int finest_N = opt.base_N << opt.halvings;
    const int ref_N = finest_N * opt.reference_refinement;
    const double ref_tau = opt.T / ref_N;

    StrongConvergenceResult result;
    std::vector<Grid1D> grids;
    for (int k = 0; k < levels; ++k) {
        grids.push_back(Grid1D::make(opt.a, opt.T, opt.M, opt.base_N << k));
        result.N.push_back(grids.back().N);
        result.tau.push_back(grids.back().tau);
    }
    const Grid1D& g0 = grids.front();
    const auto init = sample_initial(g0, u0);

    // Deterministic part of the reference: v(x_m, T) from the eigen-series.
    const auto expansion = EigenExpansion::project(opt.a, 200, u0);
    std::vector<double> v_final(static_cast<std::size_t>(g0.node_count()));
    for (int m = -g0.M; m <= g0.M; ++m)
        v_final[static_cast<std::size_t>(g0.column(m))] = spectral_reference(expansion, g0.x(m), opt.T);

    std::vector<ImplicitHeatStep> steps;
    for (const auto& g : grids) steps.emplace_back(g);

    std::vector<double> sq_err(static_cast<std::size_t>(opt.paths) * levels);
    parallel_for(static_cast<std::size_t>(opt.paths), opt.threads, [&](std::size_t p) {
        auto stream = rng_stream(opt.seed, p);
        const auto fine = BrownianIncrements::draw(stream, ref_N, ref_tau);
        double exponent = 0.0;
        for (int j = 0; j < ref_N; ++j) {
            const double qj = q(j * ref_tau);
            exponent += qj * fine.increment(j) - 0.5 * qj * qj * ref_tau;
        }
        const double z = std::exp(exponent);

        std::vector<double> row(init.size()), diff(init.size());
        for (int k = 0; k < levels; ++k) {
            const auto& g = grids[static_cast<std::size_t>(k)];
            const auto path = fine.coarsen(ref_N / g.N);
            std::copy(init.begin(), init.end(), row.begin());
            for (int n = 0; n < g.N; ++n) spde_step(steps[static_cast<std::size_t>(k)], row, 1.0 + q(g.t(n)) * path.increment(n));
            for (std::size_t i = 0; i < row.size(); ++i) diff[i] = v_final[i] * z - row[i];
            const double e = weighted_l2_norm(diff, g.h);
            sq_err[p * static_cast<std::size_t>(levels) + static_cast<std::size_t>(k)] = e * e;
        }
    });

    for (int k = 0; k < levels; ++k) {
        double s = 0.0;
        for (int p = 0; p < opt.paths; ++p) s += sq_err[static_cast<std::size_t>(p) * levels + static_cast<std::size_t>(k)];
        result.rms_error.push_back(std::sqrt(s / opt.paths));
    }
    return result;
}

}  // namespace spdeinv
