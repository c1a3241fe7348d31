#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "anideg/errors.hpp"

namespace anideg {

enum class AnisotropyFamily { Isotropic, Quadratic, EllipsoidSum };

/// Structural constants of an admissible anisotropy density:
///   a0 |p|^2 <= A(p) <= a1 |p|^2,  |A'(p)| <= a2 |p|,
///   (A'(p) - A'(q)).(p - q) >= ca |p - q|^2.
struct AnisotropyConstants {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double ca = 0.0;
};

/// A positively two-homogeneous interfacial energy density A with gradient
/// access. Three families are provided:
///   Isotropic     A(p) = |p|^2 / 2
///   Quadratic     A(p) = p.Mp / 2          (M symmetric positive definite)
///   EllipsoidSum  A(p) = gamma(p)^2 / 2,   gamma(p) = sum_l sqrt(p.G_l p)
/// The ellipsoid sum is genuinely non-quadratic: A' is Lipschitz but not
/// differentiable at p = 0, which is the structural difficulty the theory
/// is built around.
class AnisotropySpec {
public:
    static AnisotropySpec isotropic(int dim);
    /// `m` is the d x d matrix in row-major order; it is symmetrized on input.
    static AnisotropySpec quadratic(int dim, std::vector<double> m);
    /// Each entry of `gs` is one d x d matrix in row-major order.
    static AnisotropySpec ellipsoid_sum(int dim, std::vector<std::vector<double>> gs);

    int dim() const noexcept { return dim_; }
    AnisotropyFamily family() const noexcept { return family_; }
    const std::optional<AnisotropyConstants>& constants() const noexcept { return constants_; }

    /// A(p). Throws DimensionMismatch if p.size() != dim().
    double eval(std::span<const double> p) const;

    /// A'(p) into `out` (size dim()). A'(0) = 0 for every family; this is the
    /// continuous extension forced by |A'(p)| <= a2 |p|.
    void eval_grad(std::span<const double> p, std::span<double> out) const;

    /// Certifies (a0, a1, a2, ca) by deterministic seeded sampling of unit
    /// directions and of monotonicity pairs, and stores the result.
    /// Throws NotStronglyMonotone if a sampled monotonicity quotient is <= 0
    /// (or non-finite), NotPositive if A(p) <= 0 for a sampled p != 0.
    /// Requires n_samples >= 1000.
    const AnisotropyConstants& certify(int n_samples, std::uint64_t seed);

    /// Lipschitz constant of A' estimated from the same deterministic sampling
    /// scheme (max difference quotient). Available after certify().
    std::optional<double> grad_lipschitz() const noexcept { return grad_lipschitz_; }

private:
    AnisotropySpec(AnisotropyFamily family, int dim);

    void check_dim(std::size_t n) const;

    AnisotropyFamily family_;
    int dim_;
    std::vector<double> matrix_;                 // Quadratic
    std::vector<std::vector<double>> matrices_;  // EllipsoidSum
    std::optional<AnisotropyConstants> constants_;
    std::optional<double> grad_lipschitz_;
};

} // namespace anideg
