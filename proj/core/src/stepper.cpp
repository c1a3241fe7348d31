#include "anideg/stepper.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace anideg {

void SolverConfig::validate() const {
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw ValidationError("solver requires 0 < dt_min <= dt_init <= dt_max");
    if (!(kappa >= 0.0)) throw ValidationError("solver.kappa must be >= 0");
    if (!(t_final >= 0.0)) throw ValidationError("solver.t_final must be >= 0");
    if (!(energy_tol_per_step >= 0.0)) throw ValidationError("solver.energy_tol_per_step must be >= 0");
    if (snapshot_stride < 1 || diagnostics_stride < 1)
        throw ValidationError("solver strides must be >= 1");
}

VectorField aniso_grad_field(const AnisotropySpec& aniso, const VectorField& g) {
    const int d = g.dim();
    VectorField out(g[0].grid_ptr());
    std::array<double, 3> p{}, ap{};
    for (std::size_t i = 0; i < g[0].size(); ++i) {
        for (int j = 0; j < d; ++j) p[j] = g[j][i];
        aniso.eval_grad(std::span<const double>(p.data(), d), std::span<double>(ap.data(), d));
        for (int j = 0; j < d; ++j) out[j][i] = ap[j];
    }
    return out;
}

Field assemble_w(const Field& phi, const AnisotropySpec& aniso) {
    Field w = div_h(aniso_grad_field(aniso, grad_h(phi)));
    w *= -1.0;
    return w;
}

Field assemble_mu(const Field& phi, const RegularizedMaterial& material, const AnisotropySpec& aniso) {
    Field mu = assemble_w(phi, aniso);
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += material.psi_delta(phi[i], 1);
    if (!mu.all_finite()) throw NonFiniteField("assemble_mu produced non-finite values");
    return mu;
}

Field face_mobility(const Field& phi, const RegularizedMaterial& material, int axis) {
    const TorusGrid& g = phi.grid();
    Field out(phi.grid_ptr());
    const std::size_t inner = g.inner_size(axis);
    const std::size_t outer = g.outer_size(axis);
    const int n = g.extent(axis);
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t block = o * static_cast<std::size_t>(n) * inner;
        for (int i = 0; i < n; ++i) {
            const std::size_t here = block + static_cast<std::size_t>(i) * inner;
            const std::size_t next = block + static_cast<std::size_t>((i + 1) % n) * inner;
            for (std::size_t k = 0; k < inner; ++k)
                out[here + k] = material.b_delta(0.5 * (phi[here + k] + phi[next + k]));
        }
    }
    return out;
}

double energy_of(const Field& phi, const RegularizedMaterial& material, const AnisotropySpec& aniso) {
    const int d = phi.grid().dim();
    const VectorField g = grad_h(phi);
    std::vector<double> density(phi.size());
    std::array<double, 3> p{};
    for (std::size_t i = 0; i < phi.size(); ++i) {
        for (int j = 0; j < d; ++j) p[j] = g[j][i];
        density[i] = aniso.eval(std::span<const double>(p.data(), d)) + material.psi_delta(phi[i], 0);
    }
    return pairwise_sum(density) * phi.grid().cell_volume();
}

namespace {

void refresh(SimState& s) {
    const RegularizedMaterial& reg = *s.material;
    const AnisotropySpec& aniso = *s.aniso;
    if (!s.phi.all_finite()) throw NonFiniteField("phi contains non-finite values");
    s.w = assemble_w(s.phi, aniso);
    s.mu = s.w;
    for (std::size_t i = 0; i < s.mu.size(); ++i) s.mu[i] += reg.psi_delta(s.phi[i], 1);
    if (!s.mu.all_finite()) throw NonFiniteField("mu contains non-finite values");
    s.flux = VectorField(s.phi.grid_ptr());
    for (int j = 0; j < s.phi.grid().dim(); ++j) {
        const Field bf = face_mobility(s.phi, reg, j);
        const Field gmu = dq_forward(s.mu, j);
        for (std::size_t i = 0; i < bf.size(); ++i) s.flux[j][i] = -bf[i] * gmu[i];
    }
    s.energy = energy_of(s.phi, reg, aniso);
}

// Per-step increments measured at the left endpoint (the pre-step state).
struct StepIncrements {
    double dissipation = 0.0;  // int b_delta(phi)|grad_h mu|^2
    double psi2_grad = 0.0;    // int psi2''(phi)|grad_h phi|^2
};

// Face fluxes F_j = b_delta(phi_face) d_j^+ mu of the current state and the
// associated quadratures.
VectorField transport_flux(const SimState& s, StepIncrements& inc) {
    const TorusGrid& g = s.phi.grid();
    VectorField F(s.phi.grid_ptr());
    std::vector<double> diss(s.phi.size());
    std::vector<double> psi2term(s.phi.size());
    double diss_total = 0.0, psi2_total = 0.0;
    for (int j = 0; j < g.dim(); ++j) {
        const Field bf = face_mobility(s.phi, *s.material, j);
        const Field gmu = dq_forward(s.mu, j);
        const Field gphi = dq_forward(s.phi, j);
        const std::size_t inner = g.inner_size(j);
        const std::size_t outer = g.outer_size(j);
        const int n = g.extent(j);
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t block = o * static_cast<std::size_t>(n) * inner;
            for (int i = 0; i < n; ++i) {
                const std::size_t here = block + static_cast<std::size_t>(i) * inner;
                const std::size_t next = block + static_cast<std::size_t>((i + 1) % n) * inner;
                for (std::size_t k = 0; k < inner; ++k) {
                    const double phif = 0.5 * (s.phi[here + k] + s.phi[next + k]);
                    F[j][here + k] = bf[here + k] * gmu[here + k];
                    diss[here + k] = bf[here + k] * gmu[here + k] * gmu[here + k];
                    psi2term[here + k] =
                        s.material->base().d2psi2(phif) * gphi[here + k] * gphi[here + k];
                }
            }
        }
        diss_total += pairwise_sum(diss);
        psi2_total += pairwise_sum(psi2term);
    }
    inc.dissipation = diss_total * g.cell_volume();
    inc.psi2_grad = psi2_total * g.cell_volume();
    return F;
}

SimState finish_step(const SimState& s, Field new_phi, double dt, const VectorField& step_flux,
                     const StepIncrements& inc) {
    SimState n;
    n.phi = std::move(new_phi);
    n.material = s.material;
    n.aniso = s.aniso;
    n.t = s.t + dt;
    n.step_count = s.step_count + 1;
    refresh(n);
    n.dissipation_cum = s.dissipation_cum + dt * inc.dissipation;
    n.hess_sq_cum = s.hess_sq_cum + dt * hessian_frobenius_sq(s.phi);
    n.psi2_grad_cum = s.psi2_grad_cum + dt * inc.psi2_grad;
    n.flux_integral = s.flux_integral;
    n.flux_integral.axpy(-1.0, step_flux);  // J integral; step_flux carries phi^{n+1}-phi^n = div(step_flux)
    return n;
}

} // namespace

SimState make_state(Field phi, std::shared_ptr<const RegularizedMaterial> material,
                    std::shared_ptr<const AnisotropySpec> aniso) {
    SimState s;
    s.phi = std::move(phi);
    s.material = std::move(material);
    s.aniso = std::move(aniso);
    s.flux_integral = VectorField(s.phi.grid_ptr());
    refresh(s);
    return s;
}

SimState step_explicit(const SimState& state, double dt) {
    if (!(dt > 0.0)) throw ValidationError("step requires dt > 0");
    StepIncrements inc;
    VectorField F = transport_flux(state, inc);
    Field new_phi = state.phi;
    new_phi.axpy(dt, div_h(F));
    F *= dt;
    return finish_step(state, std::move(new_phi), dt, F, inc);
}

SimState step_imex(const SimState& state, double dt, double kappa, SpectralSolver& solver) {
    if (!(dt > 0.0)) throw ValidationError("step requires dt > 0");
    if (!(kappa >= 0.0)) throw ValidationError("step_imex requires kappa >= 0");
    StepIncrements inc;
    VectorField F = transport_flux(state, inc);
    Field rhs = div_h(F);
    rhs *= dt;
    // (1 + dt kappa lambda^2) never vanishes, so SingularMode cannot fire here.
    Field xi = solver.solve(
        [&](std::span<const int> k) {
            const double lam = solver.lap_symbol(k);
            return 1.0 + dt * kappa * lam * lam;
        },
        rhs);
    Field new_phi = state.phi;
    new_phi += xi;
    // phi^{n+1} - phi^n = div_h(dt F - dt kappa grad_h(lap_h xi)).
    F *= dt;
    if (kappa != 0.0) F.axpy(-dt * kappa, grad_h(lap_h(xi)));
    return finish_step(state, std::move(new_phi), dt, F, inc);
}

DiagnosticsRecord make_record(const SimState& s, double dt, bool accepted) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = integral(s.phi);
    r.energy = s.energy;
    std::vector<double> buf(s.phi.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = s.material->phi_delta(s.phi[i], 0);
    r.entropy = pairwise_sum(buf) * s.phi.grid().cell_volume();
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const double e = std::max(std::abs(s.phi[i]) - 1.0, 0.0);
        buf[i] = e * e;
    }
    r.excess_l2 = std::sqrt(pairwise_sum(buf) * s.phi.grid().cell_volume());
    r.dissipation_cum = s.dissipation_cum;
    r.hess_sq_cum = s.hess_sq_cum;
    r.psi2_grad_cum = s.psi2_grad_cum;
    r.dt = dt;
    r.accepted = accepted;
    return r;
}

SimState advance(SimState state, const SolverConfig& config, const AdvanceSinks& sinks) {
    config.validate();
    if (config.scheme == Scheme::StabilizedIMEX && state.aniso->constants() &&
        config.kappa < state.aniso->constants()->a1) {
        std::ostringstream os;
        os << "solver.kappa = " << config.kappa << " is below the certified A1 = "
           << state.aniso->constants()->a1;
        throw ValidationError(os.str());
    }

    std::unique_ptr<SpectralSolver> solver;
    if (config.scheme == Scheme::StabilizedIMEX)
        solver = std::make_unique<SpectralSolver>(state.phi.grid_ptr());

    const auto emit_record = [&](const SimState& s, double dt, bool ok) {
        if (sinks.on_record) sinks.on_record(make_record(s, dt, ok));
    };
    const auto emit_snapshot = [&](SimState& s) {
        if (sinks.on_snapshot) sinks.on_snapshot(s);
        s.flux_integral = VectorField(s.phi.grid_ptr());
    };

    emit_record(state, config.dt_init, true);
    emit_snapshot(state);
    if (config.t_final <= 0.0) return state;

    double dt = config.dt_init;
    int consecutive_accepted = 0;
    long last_record_step = 0;
    long last_snapshot_step = 0;
    const double t_eps = 1e-12 * std::max(1.0, config.t_final);

    while (config.t_final - state.t > t_eps) {
        const double dt_eff = std::min(dt, config.t_final - state.t);
        SimState attempt = (config.scheme == Scheme::Explicit)
                               ? step_explicit(state, dt_eff)
                               : step_imex(state, dt_eff, config.kappa, *solver);
        const bool energy_ok =
            attempt.energy <= state.energy + config.energy_tol_per_step * (1.0 + std::abs(state.energy));
        if (!energy_ok && config.safeguard == Safeguard::RejectAndHalve) {
            if (dt <= config.dt_min * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "energy increased by " << attempt.energy - state.energy << " at dt_min = "
                   << config.dt_min << " (t = " << state.t << ")";
                throw EnergySafeguardExhausted(os.str());
            }
            dt = std::max(0.5 * dt, config.dt_min);
            consecutive_accepted = 0;
            continue;
        }

        state = std::move(attempt);
        ++consecutive_accepted;
        if (consecutive_accepted >= 50) {
            dt = std::min(2.0 * dt, config.dt_max);
            consecutive_accepted = 0;
        }
        if (state.step_count % config.diagnostics_stride == 0) {
            emit_record(state, dt_eff, energy_ok);
            last_record_step = state.step_count;
        }
        if (state.step_count % config.snapshot_stride == 0) {
            emit_snapshot(state);
            last_snapshot_step = state.step_count;
        }
    }

    if (state.step_count != last_record_step) emit_record(state, dt, true);
    if (state.step_count != last_snapshot_step) emit_snapshot(state);
    return state;
}

Snapshot snapshot_of(const SimState& s) {
    Snapshot snap;
    snap.t = s.t;
    snap.step = s.step_count;
    snap.phi = s.phi;
    snap.mu = s.mu;
    snap.w = s.w;
    snap.flux = s.flux;
    snap.flux_integral = s.flux_integral;
    return snap;
}

AdvanceSinks collect_into(Trajectory& out) {
    AdvanceSinks sinks;
    sinks.on_record = [&out](const DiagnosticsRecord& r) { out.records.push_back(r); };
    sinks.on_snapshot = [&out](const SimState& s) { out.snapshots.push_back(snapshot_of(s)); };
    return sinks;
}

} // namespace anideg
