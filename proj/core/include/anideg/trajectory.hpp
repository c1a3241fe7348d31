#pragma once

#include <vector>

#include "anideg/grid.hpp"

namespace anideg {

/// One diagnostics row. The serialized CSV column order is fixed:
///   t, mass, energy, entropy, dissipation_cum, excess_L2, hess_sq_cum, dt, accepted
/// psi2_grad_cum (the running sum dt * int psi2''(phi)|grad_h phi|^2 entering
/// the entropy estimate) is carried in memory only.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double entropy = 0.0;
    double dissipation_cum = 0.0;
    double excess_l2 = 0.0;
    double hess_sq_cum = 0.0;
    double dt = 0.0;
    bool accepted = true;
    double psi2_grad_cum = 0.0;
};

/// State snapshot kept for the a-posteriori checks. `flux` is the
/// instantaneous face flux J = -b_delta(phi) grad_h mu; `flux_integral` is the
/// exact time integral of the transport flux over (previous snapshot, t], so
/// the time-integrated weak form (3.2a analogue) telescopes to roundoff.
struct Snapshot {
    double t = 0.0;
    long step = 0;
    Field phi;
    Field mu;
    Field w;
    VectorField flux;
    VectorField flux_integral;
};

struct Trajectory {
    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
};

} // namespace anideg
