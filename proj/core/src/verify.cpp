#include "anideg/verify.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "anideg/runner.hpp"

namespace anideg {

namespace {

constexpr double kPi = 3.14159265358979323846;

CheckRow bound_row(std::string name, double measured, double allowed) {
    CheckRow row;
    row.name = std::move(name);
    row.lhs = measured;
    row.rhs = allowed;
    row.margin = allowed - measured;
    row.pass = row.margin >= 0.0;
    return row;
}

std::vector<AnisotropySpec> reference_families() {
    std::vector<AnisotropySpec> out;
    out.push_back(AnisotropySpec::isotropic(2));
    out.push_back(AnisotropySpec::quadratic(2, {1, 0, 0, 4}));
    out.push_back(AnisotropySpec::ellipsoid_sum(2, {{1.0, 0.3, 0.3, 1.5}, {2.0, -0.2, -0.2, 0.8}}));
    out.push_back(AnisotropySpec::ellipsoid_sum(3, {{1.5, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 2.0},
                                                    {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0}}));
    return out;
}

void sample_vec(std::mt19937_64& rng, int dim, std::array<double, 3>& p) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < dim; ++i) p[i] = u(rng);
}

CheckReport anisotropy_suite(bool inject_indefinite) {
    CheckReport rep;
    std::mt19937_64 rng(20240601);
    std::array<double, 3> p{}, q{}, g1{}, g2{};

    // Euler identity A'(p).p = 2A(p), normalized by (1+|p|^2).
    double euler_worst = 0.0;
    double homog_worst = 0.0;
    for (const auto& spec : reference_families()) {
        for (int s = 0; s < 100000; ++s) {
            sample_vec(rng, spec.dim(), p);
            const std::span<const double> ps(p.data(), spec.dim());
            const double a = spec.eval(ps);
            spec.eval_grad(ps, std::span<double>(g1.data(), spec.dim()));
            double dot = 0.0, norm2 = 0.0;
            for (int i = 0; i < spec.dim(); ++i) {
                dot += g1[i] * p[i];
                norm2 += p[i] * p[i];
            }
            euler_worst = std::max(euler_worst, std::abs(dot - 2.0 * a) / (1.0 + norm2));
        }
        for (int s = 0; s < 3000; ++s) {
            sample_vec(rng, spec.dim(), p);
            const std::span<const double> ps(p.data(), spec.dim());
            spec.eval_grad(ps, std::span<double>(g1.data(), spec.dim()));
            for (double lam : {0.5, 2.0, 10.0}) {
                for (int i = 0; i < spec.dim(); ++i) q[i] = lam * p[i];
                spec.eval_grad(std::span<const double>(q.data(), spec.dim()),
                               std::span<double>(g2.data(), spec.dim()));
                double diff = 0.0, norm = 0.0;
                for (int i = 0; i < spec.dim(); ++i) {
                    diff += (g2[i] - lam * g1[i]) * (g2[i] - lam * g1[i]);
                    norm += p[i] * p[i];
                }
                homog_worst = std::max(homog_worst, std::sqrt(diff) / (lam * std::sqrt(norm) + 1e-300));
            }
        }
    }
    rep.rows.push_back(bound_row("euler_identity_max_residual", euler_worst, 1e-12));
    rep.rows.push_back(bound_row("grad_one_homogeneity_max_residual", homog_worst, 1e-12));

    // Gradient vs central differences of eval, relative 1e-6 away from p = 0.
    double fd_worst = 0.0;
    for (const auto& spec : reference_families()) {
        for (int s = 0; s < 2000; ++s) {
            sample_vec(rng, spec.dim(), p);
            double norm2 = 0.0;
            for (int i = 0; i < spec.dim(); ++i) norm2 += p[i] * p[i];
            if (norm2 < 0.25) continue;
            spec.eval_grad(std::span<const double>(p.data(), spec.dim()),
                           std::span<double>(g1.data(), spec.dim()));
            const double h = 1e-6;
            double diff2 = 0.0, ref2 = 0.0;
            for (int i = 0; i < spec.dim(); ++i) {
                q = p;
                q[i] = p[i] + h;
                const double ap = spec.eval(std::span<const double>(q.data(), spec.dim()));
                q[i] = p[i] - h;
                const double am = spec.eval(std::span<const double>(q.data(), spec.dim()));
                const double fd = (ap - am) / (2.0 * h);
                diff2 += (fd - g1[i]) * (fd - g1[i]);
                ref2 += g1[i] * g1[i];
            }
            fd_worst = std::max(fd_worst, std::sqrt(diff2) / (std::sqrt(ref2) + 1e-300));
        }
    }
    rep.rows.push_back(bound_row("grad_vs_central_difference_rel", fd_worst, 1e-6));

    // Certification against closed-form constants.
    AnisotropySpec iso = AnisotropySpec::isotropic(2);
    const auto ciso = iso.certify(20000, 7);
    const double iso_err = std::max({std::abs(ciso.a0 - 0.5), std::abs(ciso.a1 - 0.5),
                                     std::abs(ciso.a2 - 1.0), std::abs(ciso.ca - 1.0)});
    rep.rows.push_back(bound_row("certify_isotropic_exact", iso_err, 1e-10));

    AnisotropySpec quad = AnisotropySpec::quadratic(2, {1, 0, 0, 4});
    const auto cq = quad.certify(20000, 7);
    const double quad_err = std::max({std::abs(cq.a0 - 0.5), std::abs(cq.a1 - 2.0),
                                      std::abs(cq.a2 - 4.0), std::abs(cq.ca - 1.0)});
    rep.rows.push_back(bound_row("certify_quadratic_diag_1_4", quad_err, 1e-6));

    if (inject_indefinite) {
        AnisotropySpec bad = AnisotropySpec::quadratic(2, {1, 0, 0, -1});
        CheckRow row;
        row.lhs = 0.0;
        row.rhs = 0.0;
        row.margin = -1.0;
        row.pass = false;
        try {
            bad.certify(2000, 7);
            row.name = "InjectionError: certification unexpectedly accepted diag(1,-1)";
        } catch (const NotStronglyMonotone&) {
            row.name = "NotStronglyMonotone: injected indefinite fixture rejected as required";
        }
        rep.rows.push_back(row);
    }
    return rep;
}

CheckReport material_suite() {
    CheckReport rep;
    std::mt19937_64 rng(20240602);
    std::uniform_real_distribution<double> wide(-5.0, 5.0);

    const MaterialSpec quench = MaterialSpec::log_quench(1.0, 2.0);

    // b_delta lower bound, and the delta-uniform Lipschitz bound
    // |b_delta'| <= sup_{[-1,1]}|b'|: the sampled slope never exceeds it and
    // the reported constant is the same for every delta.
    double floor_violation = 0.0;
    double lip_excess = 0.0;
    double lip_spread = 0.0;
    const double lip_base = quench.lipschitz_b();
    for (double delta : {0.2, 0.1, 0.05, 0.01}) {
        const RegularizedMaterial reg(quench, delta);
        double lip_sampled = 0.0;
        for (int s = 0; s < 100000; ++s) {
            const double r = wide(rng);
            floor_violation = std::max(floor_violation, reg.b_delta_floor() - reg.b_delta(r));
            lip_sampled = std::max(lip_sampled, std::abs(reg.b_delta_prime(r)));
        }
        lip_excess = std::max(lip_excess, lip_sampled - lip_base);
        lip_spread = std::max(lip_spread, std::abs(reg.lipschitz_b() - lip_base));
    }
    rep.rows.push_back(bound_row("b_delta_above_floor", floor_violation, 0.0));
    rep.rows.push_back(bound_row("b_delta_slope_within_uniform_bound", lip_excess, 1e-12));
    rep.rows.push_back(bound_row("b_delta_lipschitz_delta_independent", lip_spread, 1e-12));

    // Closed-form Phi (m = 1) against the generic quadrature table.
    const MaterialSpec table_variant = MaterialSpec::custom(
        1.0, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 1.0,
        [](double) { return 1.0; }, quench.psi1, quench.dpsi1, quench.d2psi1, quench.psi2,
        quench.dpsi2, quench.d2psi2);
    {
        const double delta = 0.05;
        const RegularizedMaterial closed(quench, delta);
        const RegularizedMaterial tabled(table_variant, delta);
        double worst = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            const double r = -(1.0 - delta) + k * (2.0 * (1.0 - delta)) / 2000;
            worst = std::max(worst, std::abs(closed.phi_delta(r, 0) - tabled.phi_delta(r, 0)));
            worst = std::max(worst, std::abs(closed.phi_delta(r, 1) - tabled.phi_delta(r, 1)));
        }
        rep.rows.push_back(bound_row("phi_closed_form_vs_quadrature_table", worst, 1e-9));
    }

    // Identity (b psi'')(r) = F B + b psi2'' on the interior of [-1,1].
    double id_worst = 0.0;
    for (const MaterialSpec& spec : {quench, MaterialSpec::double_well(2.0)}) {
        for (int k = 1; k < 20000; ++k) {
            const double r = -1.0 + 2.0 * k / 20000;
            const double lhs = spec.b(r) * spec.psi(r, 2);
            const double rhs = spec.F(r) * spec.B(r) + spec.b(r) * spec.d2psi2(r);
            id_worst = std::max(id_worst, std::abs(lhs - rhs));
        }
    }
    rep.rows.push_back(bound_row("identity_b_psi2_bounded", id_worst, 1e-12));

    // C2 gluing of psi_{1,delta}: a jump in value/derivative/curvature at the
    // gluing points would blow up the centered comparisons below by orders of
    // magnitude over the smooth-remainder bounds.
    double glue0 = 0.0, glue1 = 0.0, glue2 = 0.0;
    double convexity_violation = 0.0;
    const double eps = 1e-6;
    for (double delta : {0.2, 0.1, 0.05}) {
        const RegularizedMaterial reg(quench, delta);
        for (double e : {1.0 - delta, -(1.0 - delta)}) {
            glue0 = std::max(glue0, std::abs(reg.psi1_delta(e + eps, 0) - reg.psi1_delta(e - eps, 0) -
                                             2.0 * eps * reg.psi1_delta(e, 1)));
            glue1 = std::max(glue1, std::abs(reg.psi1_delta(e + eps, 1) - reg.psi1_delta(e - eps, 1) -
                                             2.0 * eps * reg.psi1_delta(e, 2)));
            glue2 = std::max(glue2, std::abs(reg.psi1_delta(e + eps, 2) - reg.psi1_delta(e - eps, 2)));
        }
        for (int s = 0; s < 20000; ++s) {
            const double r = wide(rng);
            convexity_violation = std::max(convexity_violation, -reg.phi_delta(r, 2));
            convexity_violation = std::max(convexity_violation, -reg.psi1_delta(r, 2));
        }
    }
    rep.rows.push_back(bound_row("psi1_delta_gluing_value", glue0, 1e-10));
    rep.rows.push_back(bound_row("psi1_delta_gluing_slope", glue1, 1e-8));
    rep.rows.push_back(bound_row("psi1_delta_gluing_curvature", glue2, 1e-3));
    rep.rows.push_back(bound_row("phi_and_psi1_convexity", convexity_violation, 0.0));

    // Excess bound over a grid of z for (m, delta) in {1,2} x {0.2, 0.1, 0.05}.
    long violations = 0;
    for (double m : {1.0, 2.0}) {
        const MaterialSpec base = (m == 1.0) ? quench : MaterialSpec::double_well(m);
        for (double delta : {0.2, 0.1, 0.05}) {
            const RegularizedMaterial reg(base, delta);
            for (int k = 0; k <= 10000; ++k) {
                const double z = -3.0 + 6.0 * k / 10000;
                if (!reg.excess_bound_holds(z)) ++violations;
            }
        }
    }
    rep.rows.push_back(bound_row("excess_bound_grid_violations", static_cast<double>(violations), 0.0));

    // |Phi_delta''| <= c_delta and |Phi_delta'(r)| <= c_delta |r|.
    double cdelta_violation = 0.0;
    for (double delta : {0.2, 0.05}) {
        const RegularizedMaterial reg(quench, delta);
        for (int s = 0; s < 50000; ++s) {
            const double r = wide(rng);
            cdelta_violation = std::max(cdelta_violation, std::abs(reg.phi_delta(r, 2)) - reg.c_delta());
            cdelta_violation =
                std::max(cdelta_violation, std::abs(reg.phi_delta(r, 1)) - reg.c_delta() * std::abs(r));
        }
    }
    rep.rows.push_back(bound_row("phi_delta_c_delta_bounds", cdelta_violation, 1e-12));
    return rep;
}

GridPtr make_grid_1d(int n, double len) {
    return std::make_shared<TorusGrid>(std::vector<int>{n}, std::vector<double>{0.0},
                                       std::vector<double>{len});
}

CheckReport grid_suite() {
    CheckReport rep;
    std::mt19937_64 rng(20240603);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // Exact summation by parts and grad/div adjointness.
    double sbp_worst = 0.0;
    double adj_worst = 0.0;
    double meandiv_worst = 0.0;
    {
        const auto grid2 = std::make_shared<TorusGrid>(std::vector<int>{32, 16},
                                                       std::vector<double>{0.0, -1.0},
                                                       std::vector<double>{2.0, 1.0});
        for (int rep_i = 0; rep_i < 100; ++rep_i) {
            Field f(grid2), g(grid2);
            VectorField v(grid2);
            for (std::size_t i = 0; i < f.size(); ++i) {
                f[i] = u(rng);
                g[i] = u(rng);
                v[0][i] = u(rng);
                v[1][i] = u(rng);
            }
            for (int ax = 0; ax < 2; ++ax) {
                const double s1 = inner(dq_forward(f, ax), g);
                const double s2 = inner(f, dq_backward(g, ax));
                sbp_worst = std::max(sbp_worst, std::abs(s1 + s2) / (std::abs(s1) + std::abs(s2) + 1e-300));
            }
            const double a1 = inner(grad_h(f), v);
            const double a2 = inner(f, div_h(v));
            adj_worst = std::max(adj_worst, std::abs(a1 + a2) / (std::abs(a1) + std::abs(a2) + 1e-300));
            meandiv_worst = std::max(meandiv_worst, std::abs(mean(div_h(v))));
        }
    }
    rep.rows.push_back(bound_row("summation_by_parts_rel", sbp_worst, 1e-13));
    rep.rows.push_back(bound_row("grad_div_adjointness_rel", adj_worst, 1e-13));
    rep.rows.push_back(bound_row("mean_div_zero", meandiv_worst, 1e-13));

    // Second-order consistency of lap_h on sin(2 pi x).
    std::array<double, 3> errs{};
    const std::array<int, 3> sizes{32, 64, 128};
    for (int t = 0; t < 3; ++t) {
        const auto g = make_grid_1d(sizes[t], 1.0);
        Field f(g);
        for (int i = 0; i < sizes[t]; ++i) f[i] = std::sin(2.0 * kPi * g->coord(0, i));
        const Field lap = lap_h(f);
        double err = 0.0;
        for (int i = 0; i < sizes[t]; ++i)
            err = std::max(err, std::abs(lap[i] + 4.0 * kPi * kPi * f[i]));
        errs[t] = err;
    }
    const double slope = std::log2(errs[0] / errs[2]) / 2.0;
    rep.rows.push_back(bound_row("lap_consistency_slope_deviation", std::abs(slope - 2.0), 0.1));

    // Spectral solve: identity, Helmholtz symbol, Poisson residual.
    {
        const auto g = make_grid_1d(64, 1.0);
        SpectralSolver solver(g);
        Field f(g);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
        const Field id = solver.solve([](std::span<const int>) { return 1.0; }, f);
        double id_err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) id_err = std::max(id_err, std::abs(id[i] - f[i]));
        rep.rows.push_back(bound_row("spectral_identity_multiplier", id_err, 1e-13));

        Field mode(g);
        const int kw = 5;
        for (int i = 0; i < 64; ++i) mode[i] = std::cos(2.0 * kPi * kw * g->coord(0, i));
        const Field sol = solver.solve(
            [&](std::span<const int> k) { return 1.0 + solver.lap_symbol(k); }, mode);
        const double lam = 4.0 / (g->spacing(0) * g->spacing(0)) *
                           std::sin(kPi * kw / 64.0) * std::sin(kPi * kw / 64.0);
        double sym_err = 0.0;
        for (int i = 0; i < 64; ++i)
            sym_err = std::max(sym_err, std::abs(sol[i] - mode[i] / (1.0 + lam)));
        rep.rows.push_back(bound_row("spectral_helmholtz_symbol", sym_err, 1e-12));

        Field rhs(g);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = u(rng);
        const double mu = mean(rhs);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= mu;
        const Field pois = solver.solve([&](std::span<const int> k) { return -solver.lap_symbol(k); }, rhs);
        Field residual = lap_h(pois);
        residual -= rhs;
        rep.rows.push_back(
            bound_row("spectral_poisson_residual", linf_norm(residual) / (linf_norm(rhs) + 1e-300), 1e-10));
    }
    return rep;
}

CheckReport estimates_suite() {
    CheckReport rep;

    // Short 1D quench run as the shared fixture.
    RunConfig cfg;
    cfg.grid.dim = 1;
    cfg.grid.n = {64};
    cfg.grid.a = {0.0};
    cfg.grid.b = {10.0};
    cfg.material.potential = "log_quench";
    cfg.material.delta = 0.1;
    cfg.initial.kind = InitialKind::TanhProfile;
    cfg.initial.centers = {2.5, 7.5};
    cfg.initial.width = 0.5;
    cfg.solver.scheme = Scheme::StabilizedIMEX;
    cfg.solver.dt_init = 1e-5;
    cfg.solver.dt_min = 1e-8;
    cfg.solver.dt_max = 1e-5;
    cfg.solver.t_final = 2e-3;
    cfg.solver.snapshot_stride = 50;
    cfg.solver.diagnostics_stride = 5;

    const SimSetup setup = build_setup(cfg);
    const auto reg = std::make_shared<RegularizedMaterial>(setup.material, setup.delta);
    Trajectory traj;
    advance(make_state(regularize_initial(setup.phi0, setup.delta), reg, setup.aniso), setup.solver,
            collect_into(traj));

    try {
        const auto r = check_energy_law(traj.records, 1e-6);
        rep.rows.push_back(r.rows.front());
    } catch (const EstimateViolated&) {
        rep.rows.push_back(bound_row("energy_law", 1.0, 0.0));
    }
    try {
        const auto r = check_entropy_estimate(traj, *reg, *setup.aniso, 1e-4);
        rep.rows.push_back(r.rows.front());
    } catch (const EstimateViolated&) {
        rep.rows.push_back(bound_row("entropy_estimate", 1.0, 0.0));
    }

    // Isotropic H2 chain is an equality.
    const Snapshot& last = traj.snapshots.back();
    const H2Result h2 = check_h2_monotonicity(last.phi, *setup.aniso, 1e-10);
    rep.rows.push_back(bound_row("h2_isotropic_equality_rel",
                                 std::abs(h2.lhs - h2.rhs) / (1.0 + std::abs(h2.rhs)), 1e-12));
    rep.rows.push_back(bound_row("h2_change_of_variables_rel",
                                 std::abs(h2.rhs - h2.rhs_alt) / (1.0 + std::abs(h2.rhs)), 1e-12));

    const WeakResiduals wr = check_weak_residual(traj, *reg, *setup.aniso, 4, 99);
    rep.rows.push_back(bound_row("weak_residual_w_identity", wr.res_w, 1e-10));
    rep.rows.push_back(bound_row("weak_residual_time_integrated", wr.res_time, 1e-10));
    rep.rows.push_back(bound_row("weak_residual_flux", wr.res_flux, 0.1));

    // Lipschitz composition with v = b_delta and v = A'.
    std::mt19937_64 rng(20240604);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    double lip_fail = 0.0;
    const auto g2 = std::make_shared<TorusGrid>(std::vector<int>{32, 32}, std::vector<double>{0.0, 0.0},
                                                std::vector<double>{1.0, 1.0});
    auto aniso2 = std::make_shared<AnisotropySpec>(
        AnisotropySpec::ellipsoid_sum(2, {{1.0, 0.3, 0.3, 1.5}, {2.0, -0.2, -0.2, 0.8}}));
    aniso2->certify(20000, 11);
    for (int t = 0; t < 20; ++t) {
        Field f(g2);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
        const auto res = check_lipschitz_composition(
            f, [&](double r) { return reg->b_delta(r); }, reg->lipschitz_b());
        lip_fail = std::max(lip_fail, res.lhs - res.rhs);
        const VectorField gf = grad_h(f);
        const auto res2 = check_lipschitz_composition(
            gf,
            [&](std::span<const double> in, std::span<double> out) { aniso2->eval_grad(in, out); },
            2, *aniso2->grad_lipschitz() * (1.0 + 1e-9));
        lip_fail = std::max(lip_fail, res2.lhs - res2.rhs);
    }
    rep.rows.push_back(bound_row("lipschitz_composition_worst_excess", lip_fail, 0.0));

    // Pointwise excess bound against the recorded entropy.
    double excess_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : traj.records)
        excess_margin = std::min(excess_margin, check_excess_entropy(r, *reg).margin);
    rep.rows.push_back(bound_row("excess_vs_entropy_worst", -excess_margin, 0.0));
    return rep;
}

} // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{"anisotropy", "material", "grid", "estimates", "all"};
    return names;
}

CheckReport verify_suite(const std::string& name, bool inject_indefinite) {
    CheckReport rep;
    auto append = [&rep](CheckReport part) {
        for (auto& row : part.rows) rep.rows.push_back(std::move(row));
    };
    if (name == "anisotropy") append(anisotropy_suite(inject_indefinite));
    else if (name == "material") append(material_suite());
    else if (name == "grid") append(grid_suite());
    else if (name == "estimates") append(estimates_suite());
    else if (name == "all") {
        append(anisotropy_suite(inject_indefinite));
        append(material_suite());
        append(grid_suite());
        append(estimates_suite());
    } else {
        throw ValidationError("unknown verify suite '" + name +
                              "'; expected anisotropy, material, grid, estimates or all");
    }
    return rep;
}

} // namespace anideg
