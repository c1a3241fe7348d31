#include "anideg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "anideg/version.hpp"

namespace anideg {

namespace {

// Certification sampling is fixed so identical configs give identical runs.
constexpr int kCertifySamples = 20000;
constexpr std::uint64_t kCertifySeed = 42;

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex_hash(const std::string& text) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

nlohmann::json row_json(const CheckRow& row) {
    return {{"name", row.name}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"margin", row.margin},
            {"pass", row.pass}};
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
    std::string out = "name,lhs,rhs,margin,pass\n";
    for (const auto& r : rows) {
        out += r.name;
        out += ',';
        out += format_double(r.lhs);
        out += ',';
        out += format_double(r.rhs);
        out += ',';
        out += format_double(r.margin);
        out += ',';
        out += r.pass ? '1' : '0';
        out += '\n';
    }
    return out;
}

} // namespace

Field build_initial(const RunConfig& cfg, const GridPtr& grid) {
    Field phi(grid);
    switch (cfg.initial.kind) {
    case InitialKind::Constant:
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = cfg.initial.value;
        break;
    case InitialKind::SeededNoise: {
        std::mt19937_64 rng(cfg.initial.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i] = cfg.initial.mean + cfg.initial.amplitude * u(rng);
        break;
    }
    case InitialKind::TanhProfile: {
        // Planar interfaces normal to axis 0 at the listed positions,
        // pairwise (up at c_{2k}, down at c_{2k+1}).
        const TorusGrid& g = *grid;
        const std::size_t inner = g.inner_size(0);
        const double w = cfg.initial.width;
        for (int i0 = 0; i0 < g.extent(0); ++i0) {
            const double x = g.coord(0, i0);
            double v = -1.0;
            for (std::size_t k = 0; k + 1 < cfg.initial.centers.size(); k += 2)
                v += std::tanh((x - cfg.initial.centers[k]) / w) -
                     std::tanh((x - cfg.initial.centers[k + 1]) / w);
            for (std::size_t r = 0; r < inner; ++r) phi[static_cast<std::size_t>(i0) * inner + r] = v;
        }
        break;
    }
    case InitialKind::FromSnapshot: {
        const SnapshotFile snap = read_snapshot(cfg.initial.path);
        if (!snap.grid->same_as(*grid))
            throw ValidationError("initial.path: snapshot grid does not match the configured grid");
        return snap.field;
    }
    }
    return phi;
}

std::shared_ptr<AnisotropySpec> build_anisotropy(const RunConfig& cfg) {
    switch (cfg.anisotropy.family) {
    case AnisotropyFamily::Isotropic:
        return std::make_shared<AnisotropySpec>(AnisotropySpec::isotropic(cfg.grid.dim));
    case AnisotropyFamily::Quadratic:
        return std::make_shared<AnisotropySpec>(
            AnisotropySpec::quadratic(cfg.grid.dim, cfg.anisotropy.matrix));
    case AnisotropyFamily::EllipsoidSum:
        return std::make_shared<AnisotropySpec>(
            AnisotropySpec::ellipsoid_sum(cfg.grid.dim, cfg.anisotropy.matrices));
    }
    throw ValidationError("unknown anisotropy family");
}

MaterialSpec build_material(const RunConfig& cfg) {
    if (cfg.material.potential == "log_quench")
        return MaterialSpec::log_quench(cfg.material.theta, cfg.material.theta_c);
    return MaterialSpec::double_well(cfg.material.m);
}

SimSetup build_setup(const RunConfig& cfg) {
    SimSetup s;
    s.grid = std::make_shared<TorusGrid>(cfg.grid.n, cfg.grid.a, cfg.grid.b);
    auto aniso = build_anisotropy(cfg);
    aniso->certify(kCertifySamples, kCertifySeed);
    s.aniso = aniso;
    s.material = build_material(cfg);
    s.delta = cfg.material.delta;
    s.phi0 = build_initial(cfg, s.grid);
    s.solver = cfg.solver;
    if (cfg.kappa_auto) s.solver.kappa = 2.0 * aniso->constants()->a1 * s.material.B_hi;
    return s;
}

int cmd_run(const RunConfig& cfg, const std::string& raw_config_text) {
    const auto started = iso8601_now();
    const SimSetup setup = build_setup(cfg);
    const auto reg = std::make_shared<RegularizedMaterial>(setup.material, setup.delta);
    SimState state = make_state(regularize_initial(setup.phi0, setup.delta), reg, setup.aniso);

    const std::filesystem::path dir = cfg.output.directory;
    std::filesystem::create_directories(dir / "snapshots");

    Trajectory traj;
    std::vector<std::string> artifacts;
    AdvanceSinks sinks = collect_into(traj);
    auto base_snapshot_hook = sinks.on_snapshot;
    sinks.on_snapshot = [&](const SimState& s) {
        base_snapshot_hook(s);
        char name[40];
        std::snprintf(name, sizeof(name), "snapshots/step_%08ld.bin", s.step_count);
        write_snapshot(dir / name, s.phi, s.t);
        artifacts.emplace_back(name);
    };

    const SimState final_state = advance(std::move(state), setup.solver, sinks);

    atomic_write(dir / "diagnostics.csv", diagnostics_csv(traj.records));
    artifacts.emplace_back("diagnostics.csv");

    // Recorded checks: failures are reported, not thrown.
    std::vector<CheckRow> checks;
    try {
        checks.push_back(check_energy_law(traj.records, 1e-6).rows.front());
    } catch (const EstimateViolated& e) {
        checks.push_back({std::string("energy_law: ") + e.what(), 0, 0, -1, false});
    }
    try {
        checks.push_back(check_entropy_estimate(traj, *reg, *setup.aniso, 1e-4).rows.front());
    } catch (const EstimateViolated& e) {
        checks.push_back({std::string("entropy_estimate: ") + e.what(), 0, 0, -1, false});
    }
    CheckRow excess_worst;
    excess_worst.name = "excess_vs_entropy";
    excess_worst.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : traj.records) {
        const CheckRow row = check_excess_entropy(r, *reg);
        if (row.margin < excess_worst.margin) excess_worst = row;
    }
    checks.push_back(excess_worst);
    try {
        const H2Result h2 = check_h2_monotonicity(final_state.phi, *setup.aniso, 1e-8);
        checks.push_back({"h2_monotonicity_final", h2.lhs, h2.rhs, h2.rhs - h2.lhs, h2.pass});
    } catch (const EstimateViolated& e) {
        checks.push_back({std::string("h2_monotonicity_final: ") + e.what(), 0, 0, -1, false});
    }

    atomic_write(dir / "checks.csv", checks_csv(checks));
    artifacts.emplace_back("checks.csv");

    nlohmann::json manifest;
    manifest["code_version"] = kVersion;
    manifest["config_hash"] = hex_hash(raw_config_text);
    manifest["started_at"] = started;
    manifest["finished_at"] = iso8601_now();
    manifest["artifacts"] = artifacts;
    manifest["final"] = {{"t", final_state.t},
                         {"steps", final_state.step_count},
                         {"mass", integral(final_state.phi)},
                         {"energy", final_state.energy},
                         {"dissipation_cum", final_state.dissipation_cum},
                         {"excess_l2", traj.records.back().excess_l2}};
    nlohmann::json check_json = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& row : checks) {
        check_json.push_back(row_json(row));
        all_pass = all_pass && row.pass;
    }
    manifest["checks"] = check_json;
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "run finished: t = " << final_state.t << ", steps = " << final_state.step_count
              << ", energy = " << final_state.energy << "\n";
    for (const auto& row : checks)
        std::cout << "  [" << (row.pass ? "PASS" : "FAIL") << "] " << row.name
                  << " (margin " << row.margin << ")\n";
    return all_pass ? 0 : 1;
}

int cmd_continuation(const RunConfig& cfg, const std::string& raw_config_text,
                     std::vector<double> deltas) {
    const auto started = iso8601_now();
    const SimSetup setup = build_setup(cfg);
    ContinuationSetup cs;
    cs.grid = setup.grid;
    cs.aniso = setup.aniso;
    cs.material = setup.material;
    cs.solver = setup.solver;
    cs.phi0 = setup.phi0;

    const ScalingStudyResult res = run_delta_continuation(cs, deltas);

    const std::filesystem::path dir = cfg.output.directory;
    std::filesystem::create_directories(dir);

    std::string study = "delta,excess_sup\n";
    for (std::size_t i = 0; i < res.deltas.size(); ++i)
        study += format_double(res.deltas[i]) + "," + format_double(res.excess_sup[i]) + "\n";
    atomic_write(dir / "study.csv", study);

    double excess_entropy_worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.deltas.size(); ++i) {
        const RegularizedMaterial reg(setup.material, res.deltas[i]);
        for (const auto& r : res.trajectories[i].records)
            excess_entropy_worst = std::min(excess_entropy_worst, check_excess_entropy(r, reg).margin);
        char sub[32];
        std::snprintf(sub, sizeof(sub), "delta_%.6g", res.deltas[i]);
        atomic_write(dir / sub / "diagnostics.csv", diagnostics_csv(res.trajectories[i].records));
    }

    nlohmann::json j;
    j["code_version"] = kVersion;
    j["config_hash"] = hex_hash(raw_config_text);
    j["started_at"] = started;
    j["finished_at"] = iso8601_now();
    j["deltas"] = res.deltas;
    j["excess_sup"] = res.excess_sup;
    j["cauchy"] = res.cauchy;
    j["vacuous"] = res.vacuous;
    if (!res.vacuous) {
        j["slope"] = res.slope;
        j["intercept"] = res.intercept;
    }
    j["excess_entropy_worst_margin"] = excess_entropy_worst;
    atomic_write(dir / "study.json", j.dump(2) + "\n");

    if (res.vacuous)
        std::cout << "continuation: excess bound vacuously satisfied (excess = 0 for some delta)\n";
    else
        std::cout << "continuation: fitted log-log slope = " << res.slope << " over "
                  << res.deltas.size() << " deltas\n";
    for (std::size_t i = 0; i < res.deltas.size(); ++i)
        std::cout << "  delta = " << res.deltas[i] << ": sup excess_L2 = " << res.excess_sup[i]
                  << "\n";
    for (std::size_t i = 0; i < res.cauchy.size(); ++i)
        std::cout << "  cauchy ||phi_" << res.deltas[i] << " - phi_" << res.deltas[i + 1]
                  << "||_L2 = " << res.cauchy[i] << "\n";
    return 0;
}

int cmd_plot_data(const std::filesystem::path& run_dir) {
    const std::filesystem::path diag = run_dir / "diagnostics.csv";
    if (!std::filesystem::exists(diag))
        throw MissingArtifact("no diagnostics.csv under " + run_dir.string());
    std::ifstream in(diag, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    const auto records = parse_diagnostics_csv(os.str());

    const std::filesystem::path plot = run_dir / "plot";
    std::filesystem::create_directories(plot);
    struct Quantity {
        const char* name;
        double DiagnosticsRecord::* member;
    };
    const Quantity quantities[] = {
        {"mass", &DiagnosticsRecord::mass},
        {"energy", &DiagnosticsRecord::energy},
        {"entropy", &DiagnosticsRecord::entropy},
        {"dissipation_cum", &DiagnosticsRecord::dissipation_cum},
        {"excess_L2", &DiagnosticsRecord::excess_l2},
        {"hess_sq_cum", &DiagnosticsRecord::hess_sq_cum},
        {"dt", &DiagnosticsRecord::dt},
    };
    for (const auto& q : quantities) {
        std::string out;
        for (const auto& r : records)
            out += format_double(r.t) + " " + format_double(r.*(q.member)) + "\n";
        atomic_write(plot / (std::string(q.name) + ".dat"), out);
    }

    // Final snapshot dump (1D/2D).
    const std::filesystem::path snaps = run_dir / "snapshots";
    std::filesystem::path latest;
    long best = -1;
    if (std::filesystem::exists(snaps)) {
        for (const auto& e : std::filesystem::directory_iterator(snaps)) {
            long step = -1;
            if (std::sscanf(e.path().filename().string().c_str(), "step_%08ld.bin", &step) == 1 &&
                step > best) {
                best = step;
                latest = e.path();
            }
        }
    }
    if (best >= 0) {
        const SnapshotFile snap = read_snapshot(latest);
        const TorusGrid& g = *snap.grid;
        std::string out;
        if (g.dim() == 1) {
            for (int i = 0; i < g.extent(0); ++i)
                out += format_double(g.coord(0, i)) + " " + format_double(snap.field[i]) + "\n";
            atomic_write(plot / "final_snapshot.dat", out);
        } else if (g.dim() == 2) {
            std::size_t idx = 0;
            for (int i0 = 0; i0 < g.extent(0); ++i0) {
                for (int i1 = 0; i1 < g.extent(1); ++i1, ++idx)
                    out += format_double(g.coord(0, i0)) + " " + format_double(g.coord(1, i1)) +
                           " " + format_double(snap.field[idx]) + "\n";
                out += "\n";
            }
            atomic_write(plot / "final_snapshot.dat", out);
        }
    }
    return 0;
}

} // namespace anideg
