#pragma once

#include <span>
#include <vector>

#include "spdeinv/core.hpp"

namespace spdeinv {

/// Field values on the full grid, row-major: row n holds the 2M+1 nodal
/// values at t_n ordered from x_{-M} to x_M.
struct FieldTrajectory {
    Grid1D grid;
    std::vector<double> values;

    explicit FieldTrajectory(const Grid1D& g)
        : grid(g), values(static_cast<std::size_t>(g.time_count()) * g.node_count(), 0.0) {}

    double at(int n, int m) const { return values[index(n, m)]; }
    double& at(int n, int m) { return values[index(n, m)]; }

    std::span<const double> row(int n) const {
        return {values.data() + static_cast<std::size_t>(n) * grid.node_count(),
                static_cast<std::size_t>(grid.node_count())};
    }
    std::span<double> row(int n) {
        return {values.data() + static_cast<std::size_t>(n) * grid.node_count(),
                static_cast<std::size_t>(grid.node_count())};
    }

    /// Time series of the field at spatial index m.
    DataSeries at_node(int m) const;

private:
    std::size_t index(int n, int m) const {
        return static_cast<std::size_t>(n) * grid.node_count() + grid.column(m);
    }
};

/// One backward-Euler step (I - tau*Delta_h) V^{n+1} = V^n with homogeneous
/// Dirichlet data. The constant tridiagonal matrix is factored once (Thomas
/// algorithm), so each apply() is a forward and a backward sweep.
class ImplicitHeatStep {
public:
    explicit ImplicitHeatStep(const Grid1D& grid);

    /// Overwrites a full row (2M+1 values) with the next time level. Boundary
    /// entries are set to zero.
    void apply(std::span<double> row) const;

private:
    double r_ = 0.0;                 // tau / h^2
    std::vector<double> inv_pivot_;  // 1 / modified diagonal
    std::vector<double> upper_;      // modified super-diagonal
};

/// u0 sampled on the 2M+1 spatial nodes.
std::vector<double> sample_initial(const Grid1D& grid, const std::function<double(double)>& u0);

FieldTrajectory solve_heat_fd(const Grid1D& grid, std::span<const double> u0);

/// Truncated Dirichlet eigen-series of the heat semigroup on (-a, a).
struct EigenExpansion {
    double a = 1.0;
    std::vector<double> coefficients;  // u_{0,k}, k = 1..K

    int order() const { return static_cast<int>(coefficients.size()); }
    /// lambda_k = (k*pi / (2a))^2
    double eigenvalue(int k) const;

    /// Coefficients by composite trapezoid quadrature on 8K+1 nodes.
    static EigenExpansion project(double a, int K, const std::function<double(double)>& u0);
};

/// phi_k(x) = a^{-1/2} sin(k*pi*(x + a) / (2a))
double eigenfunction(double a, int k, double x);

/// sum_k u_{0,k} exp(-lambda_k t) phi_k(x)
double spectral_reference(const EigenExpansion& expansion, double x, double t);

struct RefinementLevel {
    int M;
    int N;
};

/// Weighted-l2 error ||V(T) - V^N||_h of the implicit scheme at the final time
/// for each level, measured against the eigen-series reference.
std::vector<double> fd_convergence_probe(const std::function<double(double)>& u0, double a, double T,
                                         std::span<const RefinementLevel> levels, int K = 200);

/// Least-squares slope of log(error) against log(step).
double fitted_order(std::span<const double> steps, std::span<const double> errors);

}  // namespace spdeinv
