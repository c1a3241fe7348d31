#include "anideg/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace anideg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sorted(const std::vector<DiagnosticsRecord>& records) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].t < records[i - 1].t)
            throw ValidationError("diagnostics records must be sorted by t");
}

} // namespace

bool CheckReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

double CheckReport::worst_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.margin);
    return m;
}

CheckReport check_energy_law(const std::vector<DiagnosticsRecord>& records, double tol) {
    if (records.empty()) throw ValidationError("check_energy_law needs at least one record");
    require_sorted(records);
    const double e0 = records.front().energy;
    const double budget = e0 + tol * (1.0 + std::abs(e0));
    CheckRow worst;
    worst.name = "energy_law";
    worst.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        const double lhs = r.energy + 0.5 * r.dissipation_cum;
        const double margin = budget - lhs;
        if (margin < worst.margin) {
            worst.lhs = lhs;
            worst.rhs = budget;
            worst.margin = margin;
        }
    }
    worst.pass = worst.margin >= 0.0;
    if (!worst.pass) {
        std::ostringstream os;
        os << "energy law violated: E + D/2 = " << worst.lhs << " exceeds E(0) budget " << worst.rhs;
        throw EstimateViolated(os.str());
    }
    CheckReport rep;
    rep.rows.push_back(std::move(worst));
    return rep;
}

namespace {

// Left-endpoint reconstruction of sum dt int psi2''(phi)|grad_h phi|^2 at the
// snapshot times, for trajectories that lack the per-step running sum.
std::vector<double> psi2_term_from_snapshots(const Trajectory& traj, const RegularizedMaterial& material) {
    std::vector<double> cum(traj.snapshots.size(), 0.0);
    for (std::size_t i = 0; i + 1 < traj.snapshots.size(); ++i) {
        const Snapshot& s = traj.snapshots[i];
        const double dt = traj.snapshots[i + 1].t - s.t;
        double term = 0.0;
        const TorusGrid& g = s.phi.grid();
        for (int j = 0; j < g.dim(); ++j) {
            const Field gphi = dq_forward(s.phi, j);
            const std::size_t inner = g.inner_size(j);
            const std::size_t outer = g.outer_size(j);
            const int n = g.extent(j);
            std::vector<double> buf(s.phi.size());
            for (std::size_t o = 0; o < outer; ++o) {
                const std::size_t block = o * static_cast<std::size_t>(n) * inner;
                for (int q = 0; q < n; ++q) {
                    const std::size_t here = block + static_cast<std::size_t>(q) * inner;
                    const std::size_t next = block + static_cast<std::size_t>((q + 1) % n) * inner;
                    for (std::size_t k = 0; k < inner; ++k) {
                        const double phif = 0.5 * (s.phi[here + k] + s.phi[next + k]);
                        buf[here + k] = material.base().d2psi2(phif) * gphi[here + k] * gphi[here + k];
                    }
                }
            }
            term += pairwise_sum(buf) * g.cell_volume();
        }
        cum[i + 1] = cum[i] + dt * term;
    }
    return cum;
}

} // namespace

CheckReport check_entropy_estimate(const Trajectory& traj, const RegularizedMaterial& material,
                                   const AnisotropySpec& aniso, double tol) {
    if (traj.records.empty()) throw ValidationError("check_entropy_estimate needs records");
    require_sorted(traj.records);
    if (!aniso.constants()) throw ValidationError("check_entropy_estimate needs certified constants");
    const double ca = aniso.constants()->ca;
    const double entropy0 = traj.records.front().entropy;

    bool have_running = true;
    for (const auto& r : traj.records)
        if (!std::isfinite(r.psi2_grad_cum)) have_running = false;

    std::vector<double> snap_cum;
    std::vector<double> snap_t;
    if (!have_running) {
        snap_cum = psi2_term_from_snapshots(traj, material);
        for (const auto& s : traj.snapshots) snap_t.push_back(s.t);
    }
    auto psi2_at = [&](const DiagnosticsRecord& r) {
        if (have_running) return r.psi2_grad_cum;
        // last snapshot time <= r.t
        std::size_t i = 0;
        while (i + 1 < snap_t.size() && snap_t[i + 1] <= r.t + 1e-15) ++i;
        return snap_cum.empty() ? 0.0 : snap_cum[i];
    };

    CheckRow worst;
    worst.name = "entropy_estimate";
    worst.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : traj.records) {
        const double lhs = r.entropy + ca * r.hess_sq_cum;
        const double rhs = entropy0 - psi2_at(r);
        const double margin = rhs + tol * (1.0 + std::abs(rhs)) - lhs;
        if (margin < worst.margin) {
            worst.lhs = lhs;
            worst.rhs = rhs;
            worst.margin = margin;
        }
    }
    worst.pass = worst.margin >= 0.0;
    if (!worst.pass) {
        std::ostringstream os;
        os << "entropy estimate violated: LHS " << worst.lhs << " vs RHS " << worst.rhs
           << " (tol " << tol << ")";
        throw EstimateViolated(os.str());
    }
    CheckReport rep;
    rep.rows.push_back(std::move(worst));
    return rep;
}

H2Result check_h2_monotonicity(const Field& phi, const AnisotropySpec& aniso, double tol) {
    if (!aniso.constants()) throw ValidationError("check_h2_monotonicity needs certified constants");
    const double ca = aniso.constants()->ca;
    H2Result res;
    res.lhs = ca * hessian_frobenius_sq(phi);

    const VectorField gphi = grad_h(phi);
    const VectorField ap = aniso_grad_field(aniso, gphi);
    res.rhs = inner(div_h(ap), lap_h(phi));

    double alt = 0.0;
    for (int j = 0; j < phi.grid().dim(); ++j)
        for (int c = 0; c < phi.grid().dim(); ++c)
            alt += inner(dq_forward(ap[c], j), dq_forward(gphi[c], j));
    res.rhs_alt = alt;

    res.pass = res.lhs <= res.rhs + tol * (1.0 + std::abs(res.rhs));
    if (!res.pass) {
        std::ostringstream os;
        os << "H2 monotonicity chain violated: c_A|D^2 phi|^2 = " << res.lhs
           << " exceeds div(A') lap term " << res.rhs;
        throw EstimateViolated(os.str());
    }
    return res;
}

namespace {

// Smooth periodic test function as a short cosine-mode sum; evaluable at
// arbitrary points so vector components can be sampled at face midpoints.
struct SmoothTestFn {
    struct Mode {
        std::array<int, 3> k{0, 0, 0};
        double amp = 0.0;
        double phase = 0.0;
    };
    std::vector<Mode> modes;

    double operator()(const TorusGrid& g, const std::array<double, 3>& x) const {
        double v = 0.0;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (int j = 0; j < g.dim(); ++j)
                arg += 2.0 * kPi * m.k[j] * (x[j] - g.lower(j)) / (g.upper(j) - g.lower(j));
            v += m.amp * std::cos(arg);
        }
        return v;
    }
};

SmoothTestFn random_test_fn(const TorusGrid& g, std::mt19937_64& rng, int max_wave) {
    std::uniform_int_distribution<int> kdist(-max_wave, max_wave);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
    SmoothTestFn f;
    const int nmodes = 4;
    for (int m = 0; m < nmodes; ++m) {
        SmoothTestFn::Mode mode;
        for (int j = 0; j < g.dim(); ++j) mode.k[j] = kdist(rng);
        mode.amp = amp(rng);
        mode.phase = ph(rng);
        f.modes.push_back(mode);
    }
    // Always include a nonzero low mode so the function cannot degenerate.
    SmoothTestFn::Mode base;
    base.k[0] = 1;
    base.amp = 0.5;
    base.phase = 0.3;
    f.modes.push_back(base);
    return f;
}

Field sample_nodal(const TorusGrid& g, const GridPtr& gp, const SmoothTestFn& f) {
    Field out(gp);
    std::array<int, 3> n{1, 1, 1};
    for (int j = 0; j < g.dim(); ++j) n[j] = g.extent(j);
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n[0]; ++i0)
        for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i2 = 0; i2 < n[2]; ++i2, ++idx) {
                std::array<double, 3> x{g.coord(0, i0), 0.0, 0.0};
                if (g.dim() > 1) x[1] = g.coord(1, i1);
                if (g.dim() > 2) x[2] = g.coord(2, i2);
                out[idx] = f(g, x);
            }
    return out;
}

// Component `axis` sampled at x + (h_axis/2) e_axis.
Field sample_face(const TorusGrid& g, const GridPtr& gp, const SmoothTestFn& f, int axis) {
    Field out(gp);
    std::array<int, 3> n{1, 1, 1};
    for (int j = 0; j < g.dim(); ++j) n[j] = g.extent(j);
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n[0]; ++i0)
        for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i2 = 0; i2 < n[2]; ++i2, ++idx) {
                std::array<double, 3> x{g.coord(0, i0), 0.0, 0.0};
                if (g.dim() > 1) x[1] = g.coord(1, i1);
                if (g.dim() > 2) x[2] = g.coord(2, i2);
                x[axis] += 0.5 * g.spacing(axis);
                out[idx] = f(g, x);
            }
    return out;
}

double test_norm(const Field& f) {
    return l2_norm(f) + h1_seminorm(f) + linf_norm(f);
}

double test_norm(const VectorField& v) {
    double s = 0.0;
    for (int j = 0; j < v.dim(); ++j) s += test_norm(v[j]);
    return s;
}

} // namespace

WeakResiduals weak_residual_state(const Snapshot& snap, const RegularizedMaterial& material,
                                  const AnisotropySpec& aniso, int n_test, std::uint64_t seed) {
    const GridPtr gp = snap.phi.grid_ptr();
    const TorusGrid& g = *gp;
    std::mt19937_64 rng(seed);
    WeakResiduals out;

    const VectorField ap = aniso_grad_field(aniso, grad_h(snap.phi));

    for (int t = 0; t < n_test; ++t) {
        // (3.2c)-type identity: int w xi = int A'(grad phi) . grad xi.
        const SmoothTestFn fxi = random_test_fn(g, rng, 3);
        const Field xi = sample_nodal(g, gp, fxi);
        const double r3 = inner(snap.w, xi) - inner(ap, grad_h(xi));
        out.res_w = std::max(out.res_w, std::abs(r3) / test_norm(xi));

        // (3.2b)-type identity with eta sampled at faces.
        VectorField eta(gp);
        for (int j = 0; j < g.dim(); ++j) eta[j] = sample_face(g, gp, random_test_fn(g, rng, 3), j);

        VectorField beta(gp);  // b_delta(phi_face) * eta, face-indexed
        double j_dot_eta = 0.0;
        double psi_term = 0.0;
        for (int j = 0; j < g.dim(); ++j) {
            const Field bf = face_mobility(snap.phi, material, j);
            const Field gphi = dq_forward(snap.phi, j);
            std::vector<double> psibuf(snap.phi.size());
            const std::size_t inner_sz = g.inner_size(j);
            const std::size_t outer_sz = g.outer_size(j);
            const int n = g.extent(j);
            for (std::size_t o = 0; o < outer_sz; ++o) {
                const std::size_t block = o * static_cast<std::size_t>(n) * inner_sz;
                for (int q = 0; q < n; ++q) {
                    const std::size_t here = block + static_cast<std::size_t>(q) * inner_sz;
                    const std::size_t next = block + static_cast<std::size_t>((q + 1) % n) * inner_sz;
                    for (std::size_t k = 0; k < inner_sz; ++k) {
                        const double phif = 0.5 * (snap.phi[here + k] + snap.phi[next + k]);
                        beta[j][here + k] = bf[here + k] * eta[j][here + k];
                        psibuf[here + k] = bf[here + k] * material.psi_delta(phif, 2) *
                                           gphi[here + k] * eta[j][here + k];
                    }
                }
            }
            j_dot_eta += inner(snap.flux[j], eta[j]);
            psi_term += pairwise_sum(psibuf) * g.cell_volume();
        }
        const double r2 = j_dot_eta - inner(snap.w, div_h(beta)) + psi_term;
        out.res_flux = std::max(out.res_flux, std::abs(r2) / test_norm(eta));
    }
    return out;
}

double weak_residual_time(const Snapshot& prev, const Snapshot& next, int n_test, std::uint64_t seed) {
    const GridPtr gp = next.phi.grid_ptr();
    const TorusGrid& g = *gp;
    std::mt19937_64 rng(seed);
    Field dphi = next.phi;
    dphi -= prev.phi;
    double worst = 0.0;
    for (int t = 0; t < n_test; ++t) {
        const SmoothTestFn fz = random_test_fn(g, rng, 3);
        const Field zeta = sample_nodal(g, gp, fz);
        const double r = inner(dphi, zeta) - inner(next.flux_integral, grad_h(zeta));
        worst = std::max(worst, std::abs(r) / test_norm(zeta));
    }
    return worst;
}

WeakResiduals check_weak_residual(const Trajectory& traj, const RegularizedMaterial& material,
                                  const AnisotropySpec& aniso, int n_test, std::uint64_t seed) {
    WeakResiduals out;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const WeakResiduals r = weak_residual_state(traj.snapshots[i], material, aniso, n_test, seed + i);
        out.res_flux = std::max(out.res_flux, r.res_flux);
        out.res_w = std::max(out.res_w, r.res_w);
        if (i > 0)
            out.res_time = std::max(
                out.res_time, weak_residual_time(traj.snapshots[i - 1], traj.snapshots[i], n_test, seed + i));
    }
    return out;
}

CheckRow check_excess_entropy(const DiagnosticsRecord& record, const RegularizedMaterial& material) {
    CheckRow row;
    row.name = "excess_vs_entropy";
    row.lhs = record.excess_l2 * record.excess_l2;
    row.rhs = std::pow(2.0, material.base().m + 1.0) * std::pow(material.delta(), material.base().m) *
              material.base().B_hi * record.entropy;
    row.margin = row.rhs + 1e-10 - row.lhs;
    row.pass = row.margin >= 0.0;
    return row;
}

LipschitzResult check_lipschitz_composition(const Field& u, const std::function<double(double)>& v,
                                            double lipschitz) {
    Field vu(u.grid_ptr());
    for (std::size_t i = 0; i < u.size(); ++i) vu[i] = v(u[i]);
    LipschitzResult res;
    res.lhs = h1_seminorm(vu);
    res.rhs = lipschitz * h1_seminorm(u);  // m_out = 1
    res.pass = res.lhs <= res.rhs * (1.0 + 1e-12) + 1e-12;
    if (!res.pass) {
        std::ostringstream os;
        os << "Lipschitz composition bound violated: " << res.lhs << " > " << res.rhs;
        throw EstimateViolated(os.str());
    }
    return res;
}

LipschitzResult check_lipschitz_composition(
    const VectorField& u, const std::function<void(std::span<const double>, std::span<double>)>& v,
    int m_out, double lipschitz) {
    const GridPtr gp = u[0].grid_ptr();
    const int n_in = u.dim();
    std::vector<Field> comps;
    comps.reserve(m_out);
    for (int c = 0; c < m_out; ++c) comps.emplace_back(gp);
    std::vector<double> in(n_in), out(m_out);
    for (std::size_t i = 0; i < u[0].size(); ++i) {
        for (int j = 0; j < n_in; ++j) in[j] = u[j][i];
        v(in, out);
        for (int c = 0; c < m_out; ++c) comps[c][i] = out[c];
    }
    double lhs2 = 0.0;
    for (int c = 0; c < m_out; ++c) {
        const double h1 = h1_seminorm(comps[c]);
        lhs2 += h1 * h1;
    }
    double du2 = 0.0;
    for (int j = 0; j < n_in; ++j) {
        const double h1 = h1_seminorm(u[j]);
        du2 += h1 * h1;
    }
    LipschitzResult res;
    res.lhs = std::sqrt(lhs2);
    res.rhs = std::sqrt(static_cast<double>(m_out)) * lipschitz * std::sqrt(du2);
    res.pass = res.lhs <= res.rhs * (1.0 + 1e-12) + 1e-12;
    if (!res.pass) {
        std::ostringstream os;
        os << "Lipschitz composition bound violated: " << res.lhs << " > " << res.rhs;
        throw EstimateViolated(os.str());
    }
    return res;
}

namespace {

int worker_cap(std::size_t jobs) {
    int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("ANIDEG_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) cap = parsed;
    }
    return static_cast<int>(std::min<std::size_t>(cap, jobs));
}

struct DeltaRunOutput {
    Trajectory traj;
    Field final_phi;
};

} // namespace

ScalingStudyResult run_delta_continuation(const ContinuationSetup& setup, std::vector<double> deltas) {
    if (deltas.empty()) throw ValidationError("continuation needs at least one delta");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] < 1.0))
            throw ValidationError("continuation deltas must lie in (0,1)");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw ValidationError("continuation deltas must be strictly decreasing");
    }

    auto run_one = [&](double delta) {
        auto reg = std::make_shared<RegularizedMaterial>(setup.material, delta);
        SimState state = make_state(regularize_initial(setup.phi0, delta), reg, setup.aniso);
        DeltaRunOutput out;
        AdvanceSinks sinks;
        sinks.on_record = [&out](const DiagnosticsRecord& r) { out.traj.records.push_back(r); };
        const SimState final_state = advance(std::move(state), setup.solver, sinks);
        out.final_phi = final_state.phi;
        return out;
    };

    std::vector<DeltaRunOutput> outs(deltas.size());
    const int cap = worker_cap(deltas.size());
    std::size_t next_job = 0;
    while (next_job < deltas.size()) {
        const std::size_t batch = std::min<std::size_t>(cap, deltas.size() - next_job);
        std::vector<std::future<DeltaRunOutput>> futs;
        for (std::size_t k = 0; k < batch; ++k)
            futs.push_back(std::async(std::launch::async, run_one, deltas[next_job + k]));
        for (std::size_t k = 0; k < batch; ++k) outs[next_job + k] = futs[k].get();
        next_job += batch;
    }

    ScalingStudyResult res;
    res.deltas = std::move(deltas);
    for (auto& o : outs) {
        double sup = 0.0;
        for (const auto& r : o.traj.records) sup = std::max(sup, r.excess_l2);
        res.excess_sup.push_back(sup);
        res.trajectories.push_back(std::move(o.traj));
    }
    for (std::size_t i = 0; i + 1 < outs.size(); ++i) {
        Field diff = outs[i].final_phi;
        diff -= outs[i + 1].final_phi;
        res.cauchy.push_back(l2_norm(diff));
    }

    res.vacuous = std::any_of(res.excess_sup.begin(), res.excess_sup.end(),
                              [](double e) { return e == 0.0; });
    if (res.vacuous) {
        res.slope = std::numeric_limits<double>::quiet_NaN();
        res.intercept = std::numeric_limits<double>::quiet_NaN();
        return res;
    }

    // Least-squares fit log(excess_sup) = slope * log(delta) + intercept.
    const std::size_t n = res.deltas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(res.deltas[i]);
        const double y = std::log(res.excess_sup[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw SlopeUndefined("degenerate delta list; slope not identifiable");
    res.slope = (n * sxy - sx * sy) / denom;
    res.intercept = (sy - res.slope * sx) / n;
    return res;
}

} // namespace anideg
