#pragma once

#include <cstdint>
#include <string>

#include "anideg/stepper.hpp"

namespace anideg {

struct CheckRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs (+ tolerance) - lhs; >= 0 means pass
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckRow> rows;
    bool all_pass() const;
    double worst_margin() const;
};

/// Energy law: E(t) + dissipation_cum(t)/2 <= E(0) + tol*(1+|E(0)|) for every
/// record. Throws EstimateViolated naming the offending record; the returned
/// report carries the worst margin.
CheckReport check_energy_law(const std::vector<DiagnosticsRecord>& records, double tol);

/// Entropy/H^2 estimate: int Phi_delta(phi(t)) + c_A * hess_sq_cum(t)
///   <= int Phi_delta(phi_0) - sum dt int psi2''(phi)|grad_h phi|^2 + tol*(1+|RHS|).
/// Uses the certified c_A. The psi2 term comes from the records' running sum
/// when present, otherwise it is reconstructed from the snapshots by
/// left-endpoint quadrature (stride must then be dense enough for tol).
CheckReport check_entropy_estimate(const Trajectory& traj, const RegularizedMaterial& material,
                                   const AnisotropySpec& aniso, double tol);

struct H2Result {
    double lhs = 0.0;            // c_A * sum_{i,j} ||d_j^+ d_i^+ phi||^2
    double rhs = 0.0;            // sum div_h(A'(grad_h phi)) * lap_h phi
    double rhs_alt = 0.0;        // change-of-variables form sum_j d_j^+[A'(grad phi)] . d_j^+ grad phi
    bool pass = false;
};

/// Discrete difference-quotient chain behind the H^2 bound: with exact
/// summation by parts, lhs <= rhs follows from strong monotonicity alone.
/// Throws EstimateViolated when lhs > rhs + tol*(1+|rhs|).
H2Result check_h2_monotonicity(const Field& phi, const AnisotropySpec& aniso, double tol);

struct WeakResiduals {
    double res_time = 0.0;  // time-integrated mass equation between snapshots
    double res_flux = 0.0;  // flux identity with div(b eta) test fields
    double res_w = 0.0;     // w = -div(A'(grad phi)) identity
};

/// Residuals of the weak formulation on one consistent snapshot, maximized
/// over n_test seeded smooth scalar/vector test functions and normalized by
/// the discrete H^1-cap-L^inf norms of the test fields. res_time stays 0 here.
WeakResiduals weak_residual_state(const Snapshot& snap, const RegularizedMaterial& material,
                                  const AnisotropySpec& aniso, int n_test, std::uint64_t seed);

/// Time-integrated mass-equation residual between consecutive snapshots using
/// the stored flux integral; telescopes to roundoff for both schemes.
double weak_residual_time(const Snapshot& prev, const Snapshot& next, int n_test, std::uint64_t seed);

/// All three residual families over a trajectory (maxima).
WeakResiduals check_weak_residual(const Trajectory& traj, const RegularizedMaterial& material,
                                  const AnisotropySpec& aniso, int n_test, std::uint64_t seed);

/// Pointwise excess bound integrated against the quadrature weights:
/// excess_L2^2 <= 2^{m+1} delta^m B^* * entropy + 1e-10, evaluated on a record.
CheckRow check_excess_entropy(const DiagnosticsRecord& record, const RegularizedMaterial& material);

struct LipschitzResult {
    double lhs = 0.0;   // ||D(v o u)||_{L^2}
    double rhs = 0.0;   // sqrt(m_out) * L * ||D u||_{L^2}
    bool pass = false;
};

/// Discrete Lipschitz-composition bound (scalar v).
LipschitzResult check_lipschitz_composition(const Field& u, const std::function<double(double)>& v,
                                            double lipschitz);
/// Vector-valued version: v maps R^n -> R^m with n = u.dim().
LipschitzResult check_lipschitz_composition(const VectorField& u,
                                            const std::function<void(std::span<const double>, std::span<double>)>& v,
                                            int m_out, double lipschitz);

struct ScalingStudyResult {
    std::vector<double> deltas;
    std::vector<double> excess_sup;          // sup over time of excess_L2, per delta
    std::vector<double> cauchy;              // ||phi_{d_i}(T) - phi_{d_{i+1}}(T)||_{L^2}
    double slope = 0.0;
    double intercept = 0.0;
    bool vacuous = false;                    // some excess_sup is exactly 0
    std::vector<Trajectory> trajectories;    // records only
};

struct ContinuationSetup {
    GridPtr grid;
    std::shared_ptr<const AnisotropySpec> aniso;  // certified
    MaterialSpec material;                        // unregularized base
    SolverConfig solver;
    Field phi0;                                   // shared unregularized initial datum
};

/// One simulation per delta (concurrently, capped by ANIDEG_THREADS), identical
/// grid/material/t_final; fits the log-log slope of sup-time excess_L2 vs delta
/// and reports the Cauchy indicator of final states. If any excess vanishes the
/// bound is vacuous: the result is flagged and the slope left undefined (NaN).
ScalingStudyResult run_delta_continuation(const ContinuationSetup& setup, std::vector<double> deltas);

} // namespace anideg
