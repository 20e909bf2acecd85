#include "spdeinv/heat_solver.hpp"

#include <cmath>
#include <numbers>

namespace spdeinv {

DataSeries FieldTrajectory::at_node(int m) const {
    std::vector<double> v(static_cast<std::size_t>(grid.time_count()));
    for (int n = 0; n <= grid.N; ++n) v[static_cast<std::size_t>(n)] = at(n, m);
    return DataSeries(0.0, grid.tau, std::move(v));
}

ImplicitHeatStep::ImplicitHeatStep(const Grid1D& grid) : r_(grid.tau / (grid.h * grid.h)) {
    // Interior unknowns m = -(M-1)..(M-1): diag 1 + 2r, off-diagonals -r.
    const std::size_t n = static_cast<std::size_t>(2 * grid.M - 1);
    inv_pivot_.resize(n);
    upper_.resize(n);
    const double diag = 1.0 + 2.0 * r_;
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = diag + r_ * prev_upper;  // diag - (-r) * c'_{i-1}
        inv_pivot_[i] = 1.0 / pivot;
        upper_[i] = -r_ * inv_pivot_[i];
        prev_upper = upper_[i];
    }
}

void ImplicitHeatStep::apply(std::span<double> row) const {
    const std::size_t n = inv_pivot_.size();
    double* d = row.data() + 1;
    // forward sweep: d'_i = (d_i + r d'_{i-1}) / pivot_i
    d[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] + r_ * d[i - 1]) * inv_pivot_[i];
    // back substitution: x_i = d'_i - c'_i x_{i+1}
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= upper_[i] * d[i + 1];
    row.front() = 0.0;
    row.back() = 0.0;
}

std::vector<double> sample_initial(const Grid1D& grid, const std::function<double(double)>& u0) {
    std::vector<double> v(static_cast<std::size_t>(grid.node_count()));
    for (int m = -grid.M; m <= grid.M; ++m) v[static_cast<std::size_t>(grid.column(m))] = u0(grid.x(m));
    return v;
}

FieldTrajectory solve_heat_fd(const Grid1D& grid, std::span<const double> u0) {
    if (u0.size() != static_cast<std::size_t>(grid.node_count()))
        throw InvalidInput("solve_heat_fd: u0 must have 2M+1 samples");
    FieldTrajectory traj(grid);
    std::copy(u0.begin(), u0.end(), traj.row(0).begin());
    const ImplicitHeatStep step(grid);
    for (int n = 0; n < grid.N; ++n) {
        auto next = traj.row(n + 1);
        const auto cur = traj.row(n);
        std::copy(cur.begin(), cur.end(), next.begin());
        step.apply(next);
    }
    return traj;
}

double EigenExpansion::eigenvalue(int k) const {
    const double w = k * std::numbers::pi / (2.0 * a);
    return w * w;
}

double eigenfunction(double a, int k, double x) {
    return std::sin(k * std::numbers::pi * (x + a) / (2.0 * a)) / std::sqrt(a);
}

EigenExpansion EigenExpansion::project(double a, int K, const std::function<double(double)>& u0) {
    if (K < 1) throw InvalidInput("EigenExpansion: K must be >= 1");
    if (!(a > 0.0)) throw InvalidInput("EigenExpansion: a must be positive");
    const int nodes = 8 * K + 1;
    const double dx = 2.0 * a / (nodes - 1);
    std::vector<double> samples(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) samples[static_cast<std::size_t>(i)] = u0(-a + i * dx);

    EigenExpansion e;
    e.a = a;
    e.coefficients.resize(static_cast<std::size_t>(K));
    std::vector<double> integrand(static_cast<std::size_t>(nodes));
    for (int k = 1; k <= K; ++k) {
        for (int i = 0; i < nodes; ++i)
            integrand[static_cast<std::size_t>(i)] =
                samples[static_cast<std::size_t>(i)] * eigenfunction(a, k, -a + i * dx);
        e.coefficients[static_cast<std::size_t>(k - 1)] = trapezoid_integral(DataSeries(-a, dx, integrand));
    }
    return e;
}

double spectral_reference(const EigenExpansion& expansion, double x, double t) {
    if (expansion.order() < 1) throw InvalidInput("spectral_reference: K must be >= 1");
    if (t < 0.0) throw InvalidInput("spectral_reference: t must be >= 0");
    double sum = 0.0;
    for (int k = 1; k <= expansion.order(); ++k) {
        const double decay = std::exp(-expansion.eigenvalue(k) * t);
        if (decay == 0.0) break;
        sum += expansion.coefficients[static_cast<std::size_t>(k - 1)] * decay * eigenfunction(expansion.a, k, x);
    }
    return sum;
}

std::vector<double> fd_convergence_probe(const std::function<double(double)>& u0, double a, double T,
                                         std::span<const RefinementLevel> levels, int K) {
    if (levels.empty()) throw InvalidInput("fd_convergence_probe: no levels");
    const auto expansion = EigenExpansion::project(a, K, u0);
    std::vector<double> errors;
    errors.reserve(levels.size());
    for (const auto& level : levels) {
        const auto grid = Grid1D::make(a, T, level.M, level.N);
        const auto init = sample_initial(grid, u0);
        // March without storing the full trajectory; fine levels can be long.
        std::vector<double> row(init);
        const ImplicitHeatStep step(grid);
        for (int n = 0; n < grid.N; ++n) step.apply(row);
        std::vector<double> diff(row.size());
        for (int m = -grid.M; m <= grid.M; ++m) {
            const auto c = static_cast<std::size_t>(grid.column(m));
            diff[c] = spectral_reference(expansion, grid.x(m), T) - row[c];
        }
        errors.push_back(weighted_l2_norm(diff, grid.h));
    }
    return errors;
}

double fitted_order(std::span<const double> steps, std::span<const double> errors) {
    if (steps.size() != errors.size() || steps.size() < 2)
        throw InvalidInput("fitted_order: need >= 2 matching points");
    const double n = static_cast<double>(steps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0) || !(errors[i] > 0.0)) throw InvalidInput("fitted_order: nonpositive value");
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spdeinv
