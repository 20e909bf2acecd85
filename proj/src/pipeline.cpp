#include "spdeinv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spdeinv/config.hpp"
#include "spdeinv/heat_solver.hpp"

namespace spdeinv {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("bundle file missing: '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string series_csv(const std::string& header, const DataSeries& s) {
    std::string out = "t," + header + "\n";
    for (std::size_t i = 0; i < s.size(); ++i) out += format_number(s.t(i)) + "," + format_number(s.values[i]) + "\n";
    return out;
}

std::vector<std::vector<double>> parse_csv_columns(const std::string& text, std::size_t columns, const std::string& name) {
    std::vector<std::vector<double>> cols(columns);
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= columns) throw InvalidInput(name + ": too many columns");
            try {
                cols[c].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidInput(name + ": unparsable cell '" + cell + "'");
            }
            ++c;
        }
        if (c != columns) throw InvalidInput(name + ": expected " + std::to_string(columns) + " columns");
    }
    if (cols[0].empty()) throw InvalidInput(name + ": no rows");
    return cols;
}

std::string ensemble_csv(const EnsembleSummary& e) {
    std::string out = "t,mean_log_u,var_log_u,mean_u,v,samples\n";
    for (std::size_t n = 0; n < e.mean_log_u.size(); ++n) {
        out += format_number(e.mean_log_u.t(n)) + "," + format_number(e.mean_log_u.values[n]) + "," +
               format_number(e.var_log_u.values[n]) + "," + format_number(e.mean_u.values[n]) + "," +
               format_number(e.v_observed.values[n]) + "," + std::to_string(e.samples_per_node[n]) + "\n";
    }
    return out;
}

nlohmann::json run_json(const EnsembleSummary& e) {
    nlohmann::json j;
    j["P"] = e.P;
    j["base_seed"] = e.base_seed;
    j["discarded_paths"] = e.discarded_paths;
    j["flagged_noise_samples"] = e.flagged_noise_samples;
    return j;
}

nlohmann::json metrics_json(const PipelineResult& r) {
    const auto& c = r.config;
    nlohmann::json params;
    params["a"] = c.grid.a;
    params["T"] = c.grid.T;
    params["M"] = c.grid.M;
    params["N"] = c.grid.N;
    params["u0"] = c.initial_condition.name;
    params["potential"] = c.potential.name;
    params["observation_index"] = c.observation_index;
    params["P"] = c.P;
    params["epsilon"] = c.epsilon;
    params["method"] = c.method == DiffMethod::tikhonov ? "tikhonov" : "cutoff";
    params["mu"] = c.mu;
    params["xi_max"] = c.xi_max;
    params["base_seed"] = c.base_seed;
    params["sampler"] = c.sampler == Sampler::fd ? "fd" : "exact";

    nlohmann::json m;
    m["parameters"] = params;
    m["rel_l2_error_trimmed"] = r.reconstruction.rel_l2_error_qsq.value_or(std::numeric_limits<double>::quiet_NaN());
    m["rel_l2_error_full"] = r.reconstruction.rel_l2_error_qsq_full.value_or(std::numeric_limits<double>::quiet_NaN());
    m["trim_window"] = {kTrimFraction * c.grid.T, (1.0 - kTrimFraction) * c.grid.T};
    m["negative_mass"] = r.reconstruction.negative_mass;
    m["discarded_paths"] = r.ensemble.discarded_paths;
    m["flagged_noise_samples"] = r.ensemble.flagged_noise_samples;
    m["psi_at_0"] = r.psi.values.front();
    m["psi_at_T"] = r.psi.values.back();
    return m;
}

void write_plot_data(const PipelineResult& r, const fs::path& dir) {
    write_file(dir / "psi.csv", series_csv("psi", r.psi));
    write_file(dir / "psi_extended.csv", series_csv("psi_extended", r.extended.extended));
    std::string rec = "t,q2_true,q2_rec\n";
    const auto& q2 = r.reconstruction.q_squared;
    for (std::size_t n = 0; n < q2.size(); ++n)
        rec += format_number(q2.t(n)) + "," + format_number(r.q_squared_true.values[n]) + "," +
               format_number(q2.values[n]) + "\n";
    write_file(dir / "reconstruction.csv", rec);
    write_file(dir / "metrics.json", metrics_json(r).dump(2) + "\n");
}

}  // namespace

FilterSpec filter_from(const RunConfig& config) {
    return config.method == DiffMethod::tikhonov ? FilterSpec::tikhonov(config.mu) : FilterSpec::cutoff(config.xi_max);
}

PipelineResult postprocess(const RunConfig& config, EnsembleSummary ensemble) {
    PipelineResult r;
    r.config = config;
    r.psi = build_psi(ensemble.mean_log_u, ensemble.v_observed);
    r.extended = periodize(r.psi);
    r.q_squared_true = squared_potential(config.potential, r.psi);
    r.reconstruction = reconstruct(r.extended, filter_from(config), r.q_squared_true);
    r.ensemble = std::move(ensemble);
    return r;
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    return postprocess(config, run_ensemble(config, config.sampler));
}

PipelineResult run_pipeline_to(const RunConfig& config, const fs::path& out_dir) {
    config.validate();
    auto ensemble = run_ensemble(config, config.sampler);
    fs::create_directories(out_dir);
    write_file(out_dir / "config.txt", format_config(config, false));
    write_file(out_dir / "ensemble.csv", ensemble_csv(ensemble));
    write_file(out_dir / "run.json", run_json(ensemble).dump(2) + "\n");
    return emit_plot_data(out_dir);
}

PipelineResult emit_plot_data(const fs::path& bundle_dir) {
    if (!fs::is_directory(bundle_dir)) throw InvalidInput("bundle directory not found: '" + bundle_dir.string() + "'");
    RunConfig config = parse_config(read_file(bundle_dir / "config.txt"));
    const auto cols = parse_csv_columns(read_file(bundle_dir / "ensemble.csv"), 6, "ensemble.csv");
    const auto run = nlohmann::json::parse(read_file(bundle_dir / "run.json"));

    const double tau = config.grid.tau;
    if (cols[0].size() != static_cast<std::size_t>(config.grid.N) + 1)
        throw InvalidInput("ensemble.csv: row count does not match N + 1");
    EnsembleSummary e;
    e.P = run.at("P").get<long>();
    e.base_seed = run.at("base_seed").get<std::uint64_t>();
    e.discarded_paths = run.at("discarded_paths").get<long>();
    e.flagged_noise_samples = run.at("flagged_noise_samples").get<long>();
    e.mean_log_u = DataSeries(0.0, tau, cols[1]);
    e.var_log_u = DataSeries(0.0, tau, cols[2]);
    e.mean_u = DataSeries(0.0, tau, cols[3]);
    e.v_observed = DataSeries(0.0, tau, cols[4]);
    for (double s : cols[5]) e.samples_per_node.push_back(static_cast<long>(s));

    auto result = postprocess(config, std::move(e));
    write_plot_data(result, bundle_dir);
    return result;
}

ConvergenceTable run_convergence(ConvergenceKind kind, const RunConfig& config, const ConvergenceSettings& s) {
    config.validate();
    const Grid1D& g = config.grid;
    ConvergenceTable table;
    const auto add_rows = [&](const std::string& study, const std::vector<RefinementLevel>& levels,
                              const std::vector<double>& steps, const std::vector<double>& errors) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const double local = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::log(errors[i - 1] / errors[i]) / std::log(steps[i - 1] / steps[i]);
            table.rows.push_back({study, levels[i].M, levels[i].N, steps[i], errors[i], local, 0.0});
        }
        const double fitted = fitted_order(steps, errors);
        for (auto& row : table.rows)
            if (row.study == study) row.fitted_order = fitted;
        return fitted;
    };

    if (kind == ConvergenceKind::heat) {
        // Temporal study: spatial error made negligible with a 4x finer mesh.
        std::vector<RefinementLevel> t_levels;
        std::vector<double> taus;
        const int n0 = std::max(2, g.N / 4);
        for (int k = 0; k <= s.time_halvings; ++k) {
            t_levels.push_back({4 * g.M, n0 << k});
            taus.push_back(g.T / (n0 << k));
        }
        const auto t_err = fd_convergence_probe(config.initial_condition.eval, g.a, g.T, t_levels);
        table.temporal_order = add_rows("temporal", t_levels, taus, t_err);

        // Spatial study: tau small enough that the O(tau) part sits far below O(h^2).
        std::vector<RefinementLevel> x_levels;
        std::vector<double> hs;
        const int m0 = std::max(4, g.M / 10);
        constexpr int kFineSteps = 1 << 19;
        for (int k = 0; k <= s.space_halvings; ++k) {
            x_levels.push_back({m0 << k, kFineSteps});
            hs.push_back(g.a / (m0 << k));
        }
        const auto x_err = fd_convergence_probe(config.initial_condition.eval, g.a, g.T, x_levels);
        table.spatial_order = add_rows("spatial", x_levels, hs, x_err);
        return table;
    }

    StrongConvergenceOptions opt;
    opt.M = g.M;
    opt.base_N = g.N;
    opt.halvings = s.spde_halvings;
    opt.paths = s.spde_paths;
    opt.a = g.a;
    opt.T = g.T;
    opt.seed = config.base_seed;
    opt.threads = config.threads;
    const auto strong = strong_convergence_probe(config.potential, config.initial_condition.eval, opt);
    std::vector<RefinementLevel> levels;
    for (int n : strong.N) levels.push_back({g.M, n});
    table.temporal_order = add_rows("strong", levels, strong.tau, strong.rms_error);
    return table;
}

std::string format_convergence_csv(const ConvergenceTable& table) {
    std::string out = "study,M,N,step,error,local_order,fitted_order\n";
    for (const auto& r : table.rows) {
        out += r.study + "," + std::to_string(r.M) + "," + std::to_string(r.N) + "," + format_number(r.step) + "," +
               format_number(r.error) + "," + (std::isnan(r.local_order) ? std::string() : format_number(r.local_order)) +
               "," + format_number(r.fitted_order) + "\n";
    }
    return out;
}

}  // namespace spdeinv
