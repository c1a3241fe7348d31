#pragma once

#include <functional>
#include <vector>

#include "anideg/grid.hpp"

namespace anideg {

enum class MaterialPreset { LogarithmicQuench, SmoothDoubleWell, Custom };

/// The material triple (psi, b, Phi):
///   psi = psi1 + psi2 with psi1''(r) = (1-r^2)^{-m} F(r)   on (-1,1),
///   b(r) = (1-r^2)^m B(r) on [-1,1], zero outside,  B_* <= B <= B^*.
/// Consequently b psi'' = F B + b psi2'' stays bounded on [-1,1].
///
/// Presets:
///   LogarithmicQuench(theta, theta_c): F = theta, m = 1, B = 1,
///       psi1(r) = (theta/2)[(1+r)ln(1+r) + (1-r)ln(1-r)],
///       psi2(r) = (theta_c/2)(1-r^2).
///   SmoothDoubleWell(m): F = 0, B = 1, psi1 = 0, psi2(r) = (1-r^2)^2/4.
/// Custom supplies all evaluators directly (library-level extension point).
struct MaterialSpec {
    double m = 1.0;
    MaterialPreset preset = MaterialPreset::Custom;
    double theta = 0.0;
    double theta_c = 0.0;

    std::function<double(double)> B;
    std::function<double(double)> dB;
    double B_lo = 1.0;  // B_*
    double B_hi = 1.0;  // B^*
    std::function<double(double)> F;

    std::function<double(double)> psi1, dpsi1, d2psi1;  // on (-1,1)
    std::function<double(double)> psi2, dpsi2, d2psi2;  // on all of R

    bool unit_B = false;  // B identically 1 (enables closed-form Phi for m in {1,2})

    static MaterialSpec log_quench(double theta, double theta_c);
    static MaterialSpec double_well(double m);
    static MaterialSpec custom(double m, std::function<double(double)> B, std::function<double(double)> dB,
                               double B_lo, double B_hi, std::function<double(double)> F,
                               std::function<double(double)> psi1, std::function<double(double)> dpsi1,
                               std::function<double(double)> d2psi1, std::function<double(double)> psi2,
                               std::function<double(double)> dpsi2, std::function<double(double)> d2psi2);

    /// Degenerate mobility (A4); defined on all of R, zero outside [-1,1].
    double b(double r) const;
    /// b' on [-1,1] (one-sided at the endpoints).
    double db(double r) const;
    /// psi = psi1 + psi2 and derivatives, valid for |r| < 1.
    double psi(double r, int order) const;

    /// sup_{[-1,1]} |b'| by deterministic dense scan (the delta-independent
    /// Lipschitz constant of every b_delta).
    double lipschitz_b() const;

    double pow_m(double x) const;
};

/// The delta-regularization (b_delta, psi_delta, Phi_delta) of a MaterialSpec,
/// immutable after construction (the Phi lookup table is built eagerly).
class RegularizedMaterial {
public:
    RegularizedMaterial(MaterialSpec base, double delta);

    const MaterialSpec& base() const noexcept { return base_; }
    double delta() const noexcept { return delta_; }
    /// Cached bound with |Phi_delta''| <= c_delta and |Phi_delta'(r)| <= c_delta |r|.
    double c_delta() const noexcept { return c_delta_; }
    /// sup |b_delta'| = sup_{[-1,1]} |b'|, independent of delta.
    double lipschitz_b() const noexcept { return lipschitz_b_; }
    /// min(b(-1+delta), b(1-delta)) > 0, the uniform lower bound of b_delta.
    double b_delta_floor() const noexcept { return b_floor_; }

    /// Cut-off mobility: b(clamp(r, -1+delta, 1-delta)).
    double b_delta(double r) const;
    /// Derivative of b_delta; 0 outside |r| < 1-delta and at the two kinks.
    double b_delta_prime(double r) const;

    /// psi_{1,delta}: quadratic Taylor extension of psi1 beyond +-(1-delta).
    double psi1_delta(double r, int order) const;
    /// psi_delta = psi_{1,delta} + psi2 (order 0, 1 or 2).
    double psi_delta(double r, int order) const;

    /// Phi_delta with Phi_delta'' = 1/b_delta exactly, Phi_delta(0) = Phi_delta'(0) = 0.
    /// Closed forms when B = 1 and m in {1,2}; otherwise an eagerly built
    /// 10^4-node table of adaptive quadratures with cubic Hermite interpolation.
    double phi_delta(double r, int order) const;

    /// (|z|-1)_+^2 <= 2^{m+1} delta^m B^* Phi_delta(z) + 1e-12.
    bool excess_bound_holds(double z) const;

private:
    double phi_inside(double r, int order) const;  // |r| <= 1-delta

    MaterialSpec base_;
    double delta_;
    double edge_;  // 1 - delta
    double c_delta_;
    double lipschitz_b_;
    double b_floor_;

    // Taylor data of psi1 at the gluing points.
    double p1_hi_[3], p1_lo_[3];
    // Phi, Phi' at the gluing points and 1/b there.
    double phi_hi_[3], phi_lo_[3];

    bool closed_form_;
    int closed_m_ = 0;
    // Lookup table over [-(1-delta), 1-delta] when no closed form applies.
    std::vector<double> tab_phi_, tab_dphi_;
    double tab_x0_ = 0.0, tab_h_ = 0.0;
};

/// phi_{0,delta} = (1-delta) phi_0. Requires ||phi0||_inf <= 1 (+1e-12 slack),
/// otherwise InitialDatumOutOfRange.
Field regularize_initial(const Field& phi0, double delta);

} // namespace anideg
