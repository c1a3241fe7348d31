#pragma once

#include <functional>
#include <memory>

#include "anideg/anisotropy.hpp"
#include "anideg/material.hpp"
#include "anideg/spectral.hpp"
#include "anideg/trajectory.hpp"

namespace anideg {

enum class Scheme { Explicit, StabilizedIMEX };
enum class Safeguard { RejectAndHalve, WarnOnly };

struct SolverConfig {
    Scheme scheme = Scheme::StabilizedIMEX;
    double dt_init = 1e-6;
    double dt_min = 1e-9;
    double dt_max = 1e-4;
    double kappa = 0.0;  // stabilization constant of the IMEX split
    double t_final = 0.01;
    double energy_tol_per_step = 0.0;
    Safeguard safeguard = Safeguard::RejectAndHalve;
    long snapshot_stride = 100;
    long diagnostics_stride = 10;

    void validate() const;
};

/// One regularized run: (phi, mu, J, w, t) plus cached diagnostics.
/// Consistency (maintained by make_state and the steppers):
///   w  = -div_h(A'(grad_h phi))
///   mu = w + psi_delta'(phi)
///   J_j(x) = -b_delta(phi_face) d_j^{+h} mu,  phi_face = (phi(x)+phi(x+h e_j))/2
struct SimState {
    Field phi;
    Field mu;
    Field w;
    VectorField flux;  // J, face-indexed
    double t = 0.0;
    long step_count = 0;
    std::shared_ptr<const RegularizedMaterial> material;
    std::shared_ptr<const AnisotropySpec> aniso;

    double energy = 0.0;  // cached discrete energy of phi

    // Left-endpoint time accumulators.
    double dissipation_cum = 0.0;   // sum dt * int b_delta(phi) |grad_h mu|^2
    double hess_sq_cum = 0.0;       // sum dt * sum_{i,j} ||d_j^+ d_i^+ phi||^2
    double psi2_grad_cum = 0.0;     // sum dt * int psi2''(phi) |grad_h phi|^2
    VectorField flux_integral;      // exact transport-flux integral since last snapshot
};

/// A'(g) applied pointwise to a d-tuple of quotient fields.
VectorField aniso_grad_field(const AnisotropySpec& aniso, const VectorField& g);

/// w = -div_h(A'(grad_h phi)).
Field assemble_w(const Field& phi, const AnisotropySpec& aniso);

/// mu = -div_h(A'(grad_h phi)) + psi_delta'(phi). Throws NonFiniteField if the
/// result contains non-finite values (blow-up; reject the step).
Field assemble_mu(const Field& phi, const RegularizedMaterial& material, const AnisotropySpec& aniso);

/// Mobility at faces along `axis`: b_delta of the arithmetic mean of the two
/// adjacent nodal values; entry x belongs to the face (x, x + h e_axis).
Field face_mobility(const Field& phi, const RegularizedMaterial& material, int axis);

/// Discrete free energy int A(grad_h phi) + int psi_delta(phi).
double energy_of(const Field& phi, const RegularizedMaterial& material, const AnisotropySpec& aniso);

/// Builds a consistent state (mu, w, J, cached energy) around phi with zeroed
/// accumulators.
SimState make_state(Field phi, std::shared_ptr<const RegularizedMaterial> material,
                    std::shared_ptr<const AnisotropySpec> aniso);

/// Explicit Euler step of the regularized system in conservative flux form;
/// preserves mean(phi) to roundoff.
SimState step_explicit(const SimState& state, double dt);

/// Stabilized linearly-implicit step: one constant-coefficient spectral solve of
///   (I + dt kappa lap_h^2) (phi^{n+1} - phi^n) = dt div_h(b_delta grad_h mu^n).
/// kappa = 0 degenerates to the explicit scheme. The zero mode is untouched,
/// so mass is conserved to roundoff.
SimState step_imex(const SimState& state, double dt, double kappa, SpectralSolver& solver);

DiagnosticsRecord make_record(const SimState& state, double dt, bool accepted);

/// Snapshot of the current state (phi, mu, w, flux, accumulated flux integral).
Snapshot snapshot_of(const SimState& state);

struct AdvanceSinks {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(const SimState&)> on_snapshot;
};

/// Runs the configured scheme until t >= t_final with the energy safeguard:
/// a step that raises the energy by more than energy_tol_per_step*(1+|E|) is
/// rejected and dt halved (down to dt_min; EnergySafeguardExhausted if the
/// violation persists there), or merely flagged under WarnOnly. dt doubles
/// (capped at dt_max) after 50 consecutive accepted steps. Records and
/// snapshots are emitted at the configured strides plus at t = 0 and t_final;
/// flux_integral resets at each snapshot.
SimState advance(SimState state, const SolverConfig& config, const AdvanceSinks& sinks);

/// Convenience sink pair that collects a Trajectory.
AdvanceSinks collect_into(Trajectory& out);

} // namespace anideg
