#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "anideg/material.hpp"
#include "support/oracles.hpp"

using namespace anideg;

namespace {

// Taylor value of psi_{1,delta} beyond the gluing point, computed in long
// double from the closed-form logarithmic potential. Independent of the
// library's branch logic.
long double psi1_log_taylor(long double theta, long double edge, long double r) {
    const long double v = 0.5L * theta * ((1.0L + edge) * std::log(1.0L + edge) +
                                          (1.0L - edge) * std::log(1.0L - edge));
    const long double d1 = theta * std::atanh(edge);
    const long double d2 = theta / (1.0L - edge * edge);
    const long double t = r - edge;
    return v + d1 * t + 0.5L * d2 * t * t;
}

Field constant_field(const GridPtr& g, double v) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = v;
    return f;
}

GridPtr small_grid() {
    return std::make_shared<TorusGrid>(std::vector<int>{16}, std::vector<double>{0.0},
                                       std::vector<double>{1.0});
}

} // namespace

TEST_CASE("mobility (A4): values for m = 1, B = 1") {
    const MaterialSpec s = MaterialSpec::log_quench(1.0, 2.0);
    CHECK(s.b(0.0) == 1.0);
    CHECK(s.b(1.5) == 0.0);   // zero outside [-1,1]
    CHECK(s.b(-1.5) == 0.0);
    CHECK(s.b(0.9) == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(s.b(1.0) == 0.0);
    CHECK(s.b(-1.0) == 0.0);
}

TEST_CASE("b_delta: clamped mobility and its derivative") {
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    CHECK(reg.b_delta(0.95) == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(reg.b_delta(-3.0) == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(reg.b_delta(0.5) == doctest::Approx(0.75).epsilon(1e-14));

    // Derivative: b'(r) inside, 0 outside and at the kinks.
    CHECK(reg.b_delta_prime(0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(reg.b_delta_prime(0.9) == 0.0);
    CHECK(reg.b_delta_prime(-0.9) == 0.0);
    CHECK(reg.b_delta_prime(2.0) == 0.0);

    // sup |b_delta'| <= sup_{[-1,1]} |b'| = 2 for b = 1 - r^2.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double sup = 0.0;
    for (int i = 0; i < 100000; ++i) sup = std::max(sup, std::abs(reg.b_delta_prime(u(rng))));
    CHECK(sup <= 2.0 + 1e-15);
    CHECK(reg.lipschitz_b() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("b_delta is bounded below by min(b(-1+delta), b(1-delta)) > 0") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (double delta : {0.2, 0.1, 0.05, 0.01}) {
        const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), delta);
        CHECK(reg.b_delta_floor() > 0.0);
        for (int i = 0; i < 100000; ++i) CHECK(reg.b_delta(u(rng)) >= reg.b_delta_floor());
    }
}

TEST_CASE("Lipschitz constant of b_delta: uniform bound independent of delta") {
    const MaterialSpec base = MaterialSpec::log_quench(1.0, 2.0);
    const double lip = base.lipschitz_b();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (double delta : {0.2, 0.1, 0.05, 0.01}) {
        const RegularizedMaterial reg(base, delta);
        CHECK(std::abs(reg.lipschitz_b() - lip) <= 1e-12);
        for (int i = 0; i < 20000; ++i)
            CHECK(std::abs(reg.b_delta_prime(u(rng))) <= lip + 1e-15);
    }
}

TEST_CASE("psi_delta: second derivative inside and frozen outside") {
    // theta = 1, theta_c = 2: psi1'' = 1/(1-r^2), psi2'' = -2.
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    CHECK(reg.psi_delta(0.5, 2) == doctest::Approx(1.0 / 0.75 - 2.0).epsilon(1e-14));
    // Frozen second derivative at r = 2: psi1''(0.9) - 2 = 1/0.19 - 2.
    const long double frozen = 1.0L / (1.0L - 0.81L) - 2.0L;
    CHECK(reg.psi_delta(2.0, 2) == doctest::Approx(static_cast<double>(frozen)).epsilon(1e-13));
}

TEST_CASE("psi_{1,delta}(1): three-term Taylor value via long-double oracle") {
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    const long double expected = psi1_log_taylor(1.0L, 0.9L, 1.0L);
    CHECK(reg.psi1_delta(1.0, 0) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-13));
}

TEST_CASE("psi_{1,delta} is C^2 at the gluing points") {
    for (double delta : {0.2, 0.1, 0.05}) {
        const RegularizedMaterial reg(MaterialSpec::log_quench(1.3, 2.0), delta);
        const MaterialSpec& base = reg.base();
        for (double e : {1.0 - delta, -(1.0 - delta)}) {
            // One-sided limits coincide: the Taylor branch at the edge equals
            // the interior values.
            CHECK(std::abs(reg.psi1_delta(e, 0) - base.psi1(e)) <= 1e-12 * (1.0 + std::abs(base.psi1(e))));
            CHECK(std::abs(reg.psi1_delta(e, 1) - base.dpsi1(e)) <= 1e-12 * (1.0 + std::abs(base.dpsi1(e))));
            CHECK(std::abs(reg.psi1_delta(e, 2) - base.d2psi1(e)) <= 1e-12 * (1.0 + std::abs(base.d2psi1(e))));
            // No kink: centered comparisons stay at their smooth-remainder size.
            const double eps = 1e-6;
            CHECK(std::abs(reg.psi1_delta(e + eps, 0) - reg.psi1_delta(e - eps, 0) -
                           2.0 * eps * reg.psi1_delta(e, 1)) <= 1e-10);
            CHECK(std::abs(reg.psi1_delta(e + eps, 1) - reg.psi1_delta(e - eps, 1) -
                           2.0 * eps * reg.psi1_delta(e, 2)) <= 1e-8);
        }
    }
}

TEST_CASE("psi_{1,delta}'' >= 0 everywhere; psi matches psi1+psi2 inside") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.05);
    for (int i = 0; i < 50000; ++i) CHECK(reg.psi1_delta(u(rng), 2) >= 0.0);
    for (int i = 0; i < 1000; ++i) {
        const double r = 0.9 * u(rng) / 4.0;
        CHECK(reg.psi_delta(r, 0) ==
              doctest::Approx(reg.base().psi(r, 0)).epsilon(1e-13));
    }
}

TEST_CASE("Phi_delta: anchor values and second derivative") {
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    CHECK(reg.phi_delta(0.0, 0) == 0.0);
    CHECK(reg.phi_delta(0.0, 1) == 0.0);
    CHECK(reg.phi_delta(0.0, 2) == 1.0);
    // Phi_delta'' = 1/b_delta exactly, also beyond the cut-off.
    CHECK(reg.phi_delta(0.95, 2) == doctest::Approx(1.0 / 0.19).epsilon(1e-14));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20000; ++i) {
        const double r = u(rng);
        CHECK(reg.phi_delta(r, 2) * reg.b_delta(r) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("Phi(0.5) against the double-quadrature oracle") {
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    const double oracle = oracle::phi_delta_quadrature([&](double t) { return reg.b_delta(t); }, 0.5);
    CHECK(oracle == doctest::Approx(0.130812).epsilon(1e-5));  // 0.130812... from the oracle
    CHECK(reg.phi_delta(0.5, 0) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("Phi_delta agrees with the quadrature oracle on [-1+delta, 1-delta]") {
    for (double delta : {0.2, 0.05}) {
        const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), delta);
        for (int k = 0; k <= 40; ++k) {
            const double r = -(1.0 - delta) + k * (2.0 * (1.0 - delta)) / 40.0;
            const double oracle =
                oracle::phi_delta_quadrature([&](double t) { return reg.b_delta(t); }, r);
            CHECK(std::abs(reg.phi_delta(r, 0) - oracle) <= 1e-9);
        }
    }
}

TEST_CASE("Phi_delta closed form (m = 2) against oracle and table path") {
    const MaterialSpec dw = MaterialSpec::double_well(2.0);
    const RegularizedMaterial closed(dw, 0.1);
    // Same material forced through the generic quadrature-table path.
    const MaterialSpec table_variant = MaterialSpec::custom(
        2.0, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 1.0, dw.F, dw.psi1,
        dw.dpsi1, dw.d2psi1, dw.psi2, dw.dpsi2, dw.d2psi2);
    const RegularizedMaterial tabled(table_variant, 0.1);
    for (int k = 0; k <= 30; ++k) {
        const double r = -1.2 + 2.4 * k / 30.0;
        const double oracle =
            oracle::phi_delta_quadrature([&](double t) { return closed.b_delta(t); }, r);
        CHECK(std::abs(closed.phi_delta(r, 0) - oracle) <= 1e-9);
        CHECK(std::abs(tabled.phi_delta(r, 0) - closed.phi_delta(r, 0)) <= 1e-9);
        CHECK(std::abs(tabled.phi_delta(r, 1) - closed.phi_delta(r, 1)) <= 1e-9);
    }
}

TEST_CASE("QuadratureFailure on a pathological custom B") {
    const MaterialSpec bad = MaterialSpec::custom(
        1.5, [](double r) { return r > 0.3 ? std::numeric_limits<double>::quiet_NaN() : 1.0; },
        [](double) { return 0.0; }, 1.0, 1.0, [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    CHECK_THROWS_AS((void)RegularizedMaterial(bad, 0.1), QuadratureFailure);
}

TEST_CASE("excess bound (|z|-1)_+^2 <= 2^{m+1} delta^m B^* Phi_delta(z)") {
    // Trivial branch: |z| <= 1.
    const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    CHECK(reg.excess_bound_holds(0.5));

    // Derived branch: both sides via the quadrature oracle.
    {
        const double z = 1.2;
        const double lhs = (std::abs(z) - 1.0) * (std::abs(z) - 1.0);
        const double phi =
            oracle::phi_delta_quadrature([&](double t) { return reg.b_delta(t); }, z);
        CHECK(lhs <= std::pow(2.0, 2.0) * 0.1 * phi + 1e-12);
        CHECK(reg.excess_bound_holds(z));
    }
    {
        const RegularizedMaterial reg2(MaterialSpec::double_well(2.0), 0.05);
        const double z = -1.05;
        const double lhs = (std::abs(z) - 1.0) * (std::abs(z) - 1.0);
        const double phi =
            oracle::phi_delta_quadrature([&](double t) { return reg2.b_delta(t); }, z);
        CHECK(lhs <= std::pow(2.0, 3.0) * std::pow(0.05, 2.0) * 1.0 * phi + 1e-12);
        CHECK(reg2.excess_bound_holds(z));
    }
}

TEST_CASE("excess bound holds on a grid for (m, delta) in {1,2} x {0.2,0.1,0.05}") {
    for (double m : {1.0, 2.0}) {
        const MaterialSpec base = (m == 1.0) ? MaterialSpec::log_quench(1.0, 2.0)
                                             : MaterialSpec::double_well(m);
        for (double delta : {0.2, 0.1, 0.05}) {
            const RegularizedMaterial reg(base, delta);
            for (int k = 0; k <= 10000; ++k) CHECK(reg.excess_bound_holds(-3.0 + 6.0 * k / 10000.0));
        }
    }
}

TEST_CASE("identity (2.1): b psi'' = F B + b psi2'' on the interior") {
    for (const MaterialSpec& s : {MaterialSpec::log_quench(1.0, 2.0), MaterialSpec::double_well(2.0)}) {
        double worst = 0.0;
        for (int k = 1; k < 50000; ++k) {
            const double r = -1.0 + 2.0 * k / 50000.0;
            worst = std::max(worst,
                             std::abs(s.b(r) * s.psi(r, 2) - (s.F(r) * s.B(r) + s.b(r) * s.d2psi2(r))));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("c_delta bounds Phi_delta'' and Phi_delta'") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (double delta : {0.2, 0.02}) {
        const RegularizedMaterial reg(MaterialSpec::log_quench(1.0, 2.0), delta);
        for (int i = 0; i < 50000; ++i) {
            const double r = u(rng);
            CHECK(std::abs(reg.phi_delta(r, 2)) <= reg.c_delta() + 1e-12);
            CHECK(std::abs(reg.phi_delta(r, 1)) <= reg.c_delta() * std::abs(r) + 1e-12);
        }
    }
}

TEST_CASE("regularize_initial scales by (1-delta)") {
    const auto g = small_grid();
    const Field ones = constant_field(g, 1.0);
    const Field scaled = regularize_initial(ones, 0.1);
    for (std::size_t i = 0; i < scaled.size(); ++i) CHECK(scaled[i] == doctest::Approx(0.9).epsilon(1e-15));

    const Field zero = constant_field(g, 0.0);
    const Field z = regularize_initial(zero, 0.3);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);

    Field tanh_like(g);
    for (std::size_t i = 0; i < tanh_like.size(); ++i) tanh_like[i] = 0.5;
    tanh_like[3] = 0.999;
    const Field t = regularize_initial(tanh_like, 0.05);
    CHECK(linf_norm(t) == doctest::Approx(0.94905).epsilon(1e-12));
}

TEST_CASE("regularize_initial rejects |phi0| > 1") {
    const auto g = small_grid();
    Field bad = constant_field(g, 0.0);
    bad[0] = 1.0 + 1e-9;
    CHECK_THROWS_AS((void)regularize_initial(bad, 0.1), InitialDatumOutOfRange);
}

TEST_CASE("material validation") {
    CHECK_THROWS_AS((void)MaterialSpec::log_quench(-1.0, 2.0), ValidationError);
    CHECK_THROWS_AS((void)MaterialSpec::double_well(0.5), ValidationError);
    CHECK_THROWS_AS((void)RegularizedMaterial(MaterialSpec::double_well(1.0), 1.5), ValidationError);
    const RegularizedMaterial reg(MaterialSpec::double_well(1.0), 0.1);
    CHECK_THROWS_AS((void)reg.phi_delta(0.0, 3), ValidationError);
}
