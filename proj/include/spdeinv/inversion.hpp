#pragma once

#include <optional>

#include "spdeinv/core.hpp"
#include "spdeinv/data_pipeline.hpp"
#include "spdeinv/regularized_diff.hpp"

namespace spdeinv {

/// Trimmed window used as the primary figure of merit: [0.1T, 0.9T].
inline constexpr double kTrimFraction = 0.1;

struct ReconstructionResult {
    DataSeries q_squared;  // -2 psi' on [0, T]
    DataSeries q_nonneg;   // sqrt(max(q_squared, 0))
    FilterSpec method;
    std::optional<double> rel_l2_error_qsq;          // on the trimmed window
    std::optional<double> rel_l2_error_qsq_full;     // on [0, T]
    double negative_mass = 0.0;                      // integral of max(-q_squared, 0)
};

/// q^2 = -2 d/dt psi, with the derivative taken by the regularized spectral
/// filter over the whole extended period and restricted to [0, T].
/// When `truth` (q^2 sampled like the inner series) is given, the relative
/// errors are filled in.
ReconstructionResult reconstruct(const ExtendedSeries& extended, const FilterSpec& filter,
                                 const std::optional<DataSeries>& truth = std::nullopt);

/// q(t)^2 sampled on the inner grid of `like`.
DataSeries squared_potential(const Potential& q, const DataSeries& like);

/// Noise-free data separation between two potentials: runs the exact
/// exponential ensemble for each with the shared config (same seed, epsilon
/// forced to 0) and returns sqrt(int_0^T (psi_1 - psi_2)^2 dt).
double uniqueness_probe(const Potential& q1, const Potential& q2, const RunConfig& shared);

}  // namespace spdeinv
