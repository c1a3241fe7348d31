#pragma once

#include <filesystem>

#include "anideg/config.hpp"
#include "anideg/estimates.hpp"
#include "anideg/io.hpp"

namespace anideg {

/// Everything needed to start one regularized simulation, derived from a
/// RunConfig: certified anisotropy, material base + delta, shared (still
/// unregularized) initial datum, solver settings with kappa resolved
/// (kappa = 2 * A1_certified * B^* when the config says auto).
struct SimSetup {
    GridPtr grid;
    std::shared_ptr<const AnisotropySpec> aniso;
    MaterialSpec material;
    double delta = 0.1;
    Field phi0;
    SolverConfig solver;
};

Field build_initial(const RunConfig& cfg, const GridPtr& grid);
std::shared_ptr<AnisotropySpec> build_anisotropy(const RunConfig& cfg);
MaterialSpec build_material(const RunConfig& cfg);
SimSetup build_setup(const RunConfig& cfg);

/// Executes one run, writing diagnostics.csv, snapshots/, checks.csv and
/// manifest.json under cfg.output.directory. Returns 0 iff the recorded
/// checks (energy law, entropy estimate, pointwise excess bound, final-state
/// H2 chain) all pass.
int cmd_run(const RunConfig& cfg, const std::string& raw_config_text);

/// delta-continuation study; writes study.csv, study.json and per-delta
/// diagnostics under cfg.output.directory.
int cmd_continuation(const RunConfig& cfg, const std::string& raw_config_text,
                     std::vector<double> deltas);

/// Plot-data emission from a finished run directory (two-column .dat files
/// plus a gnuplot grid dump of the final snapshot for d <= 2).
int cmd_plot_data(const std::filesystem::path& run_dir);

} // namespace anideg
