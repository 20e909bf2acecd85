#pragma once

#include <filesystem>
#include <string>

#include "spdeinv/core.hpp"
#include "spdeinv/inversion.hpp"
#include "spdeinv/spde_solver.hpp"

namespace spdeinv {

/// Everything a pipeline run produces before file output.
struct PipelineResult {
    RunConfig config;
    EnsembleSummary ensemble;
    DataSeries psi;
    ExtendedSeries extended;
    ReconstructionResult reconstruction;
    DataSeries q_squared_true;
};

FilterSpec filter_from(const RunConfig& config);

/// psi -> periodization -> reconstruction for an already simulated ensemble.
PipelineResult postprocess(const RunConfig& config, EnsembleSummary ensemble);

/// Heat solve, ensemble, psi, periodization and reconstruction.
PipelineResult run_pipeline(const RunConfig& config);

/// Runs the pipeline and writes a result bundle into `out_dir`:
///   config.txt    the run configuration (without `threads`)
///   ensemble.csv  t, mean_log_u, var_log_u, mean_u, v, samples
///   run.json      P, base_seed, discarded_paths, flagged_noise_samples
/// followed by the plot data written by emit_plot_data().
PipelineResult run_pipeline_to(const RunConfig& config, const std::filesystem::path& out_dir);

/// Rebuilds the reconstruction from a bundle's config.txt, ensemble.csv and
/// run.json and writes psi.csv, psi_extended.csv, reconstruction.csv and
/// metrics.json next to them. Throws InvalidInput when the bundle is missing
/// or incomplete.
PipelineResult emit_plot_data(const std::filesystem::path& bundle_dir);

enum class ConvergenceKind { heat, spde };

struct ConvergenceRow {
    std::string study;  // temporal, spatial or strong
    int M;
    int N;
    double step;        // tau or h, whichever is refined
    double error;
    double local_order;   // observed order against the previous row; NaN on the first row
    double fitted_order;  // least-squares slope over the whole study
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double temporal_order = 0.0;  // heat: backward Euler; spde: strong order in tau
    double spatial_order = 0.0;   // heat only
};

struct ConvergenceSettings {
    int time_halvings = 4;   // heat temporal study
    int space_halvings = 3;  // heat spatial study
    int spde_halvings = 3;
    int spde_paths = 200;
};

ConvergenceTable run_convergence(ConvergenceKind kind, const RunConfig& config,
                                 const ConvergenceSettings& settings = {});

std::string format_convergence_csv(const ConvergenceTable& table);

}  // namespace spdeinv
