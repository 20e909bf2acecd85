#include "spdeinv/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "spdeinv/spde_solver.hpp"

namespace spdeinv {

ReconstructionResult reconstruct(const ExtendedSeries& extended, const FilterSpec& filter,
                                 const std::optional<DataSeries>& truth) {
    const auto spectrum = forward_transform(extended.extended);
    const auto derivative = regularized_derivative(spectrum, filter);

    const std::size_t offset = extended.inner_offset();
    const std::size_t count = extended.inner.size();
    std::vector<double> qsq(count);
    for (std::size_t n = 0; n < count; ++n) qsq[n] = -2.0 * derivative.values[offset + n];

    ReconstructionResult r;
    r.method = filter;
    r.q_squared = DataSeries(extended.inner.t0, extended.inner.dt, qsq);
    std::vector<double> clamped(count), negative(count);
    for (std::size_t n = 0; n < count; ++n) {
        clamped[n] = std::sqrt(std::max(qsq[n], 0.0));
        negative[n] = std::max(-qsq[n], 0.0);
    }
    r.q_nonneg = DataSeries(extended.inner.t0, extended.inner.dt, std::move(clamped));
    r.negative_mass = count >= 2 ? trapezoid_integral(DataSeries(extended.inner.t0, extended.inner.dt, negative)) : 0.0;

    if (truth) {
        if (!truth->same_sampling(r.q_squared)) throw InvalidInput("reconstruct: ground truth sampling mismatch");
        r.rel_l2_error_qsq_full = relative_l2_error(r.q_squared, *truth);
        const double t0 = r.q_squared.t0;
        const double span = r.q_squared.t_end() - t0;
        const double lo = t0 + kTrimFraction * span;
        const double hi = t0 + (1.0 - kTrimFraction) * span;
        r.rel_l2_error_qsq = relative_l2_error(restrict_to(r.q_squared, lo, hi), restrict_to(*truth, lo, hi));
    }
    return r;
}

DataSeries squared_potential(const Potential& q, const DataSeries& like) {
    return sample_series(like.t0, like.dt, like.size(), [&](double t) {
        const double v = q(t);
        return v * v;
    });
}

double uniqueness_probe(const Potential& q1, const Potential& q2, const RunConfig& shared) {
    RunConfig c1 = shared;
    c1.potential = q1;
    c1.epsilon = 0.0;
    RunConfig c2 = c1;
    c2.potential = q2;
    const auto s1 = run_ensemble(c1, Sampler::exact_exponential);
    const auto s2 = run_ensemble(c2, Sampler::exact_exponential);
    const auto psi1 = build_psi(s1.mean_log_u, s1.v_observed);
    const auto psi2 = build_psi(s2.mean_log_u, s2.v_observed);
    std::vector<double> sq(psi1.size());
    for (std::size_t n = 0; n < sq.size(); ++n) {
        const double d = psi1.values[n] - psi2.values[n];
        sq[n] = d * d;
    }
    return std::sqrt(trapezoid_integral(DataSeries(psi1.t0, psi1.dt, std::move(sq))));
}

}  // namespace spdeinv
