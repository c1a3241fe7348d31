#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "anideg/errors.hpp"

namespace anideg {

/// Uniform periodic grid on the flat torus (a_1,b_1) x ... x (a_d,b_d),
/// d in {1,2,3}, N_i points per axis (power of two >= 8), row-major storage
/// with axis 0 slowest. Quadrature weight is the cell volume.
class TorusGrid {
public:
    TorusGrid(std::vector<int> extents, std::vector<double> lower, std::vector<double> upper);

    int dim() const noexcept { return dim_; }
    int extent(int axis) const { return n_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    double lower(int axis) const { return a_[axis]; }
    double upper(int axis) const { return b_[axis]; }
    std::size_t size() const noexcept { return total_; }
    double cell_volume() const noexcept { return cell_volume_; }
    double domain_volume() const noexcept { return cell_volume_ * static_cast<double>(total_); }

    /// Node coordinate along one axis: a + i*h.
    double coord(int axis, int i) const { return a_[axis] + i * h_[axis]; }

    /// Number of contiguous entries between consecutive indices of `axis`.
    std::size_t inner_size(int axis) const;
    /// Number of blocks of extent(axis)*inner_size(axis) entries.
    std::size_t outer_size(int axis) const;

    bool same_as(const TorusGrid& other) const;

private:
    int dim_;
    std::array<int, 3> n_{1, 1, 1};
    std::array<double, 3> a_{0, 0, 0};
    std::array<double, 3> b_{1, 1, 1};
    std::array<double, 3> h_{0, 0, 0};
    std::size_t total_ = 1;
    double cell_volume_ = 1.0;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// One scalar unknown on the grid; plain value semantics.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double fill = 0.0);

    const TorusGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const double* data() const noexcept { return values_.data(); }
    double* data() noexcept { return values_.data(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool all_finite() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);
    Field& axpy(double alpha, const Field& x);  // *this += alpha * x

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// A d-tuple of scalar fields; the carrier of grad_h f, fluxes and vector
/// test functions. Component j of a face quantity is understood to live at
/// x + (h_j/2) e_j.
struct VectorField {
    std::vector<Field> comp;

    VectorField() = default;
    explicit VectorField(const GridPtr& grid);

    int dim() const { return static_cast<int>(comp.size()); }
    Field& operator[](int j) { return comp[j]; }
    const Field& operator[](int j) const { return comp[j]; }

    bool all_finite() const;
    VectorField& axpy(double alpha, const VectorField& x);
    VectorField& operator*=(double s);
};

// ---- summation (pairwise, deterministic) -----------------------------------

double pairwise_sum(std::span<const double> v);

// ---- difference quotients and compound operators ---------------------------

/// Forward quotient (f(x + h e_j) - f(x)) / h_j with periodic wrap.
Field dq_forward(const Field& f, int axis);
/// Backward quotient (f(x) - f(x - h e_j)) / h_j with periodic wrap.
Field dq_backward(const Field& f, int axis);

/// grad_h: forward quotients per axis.
VectorField grad_h(const Field& f);
/// div_h: sum of backward quotients per component (discrete adjoint of -grad_h).
Field div_h(const VectorField& v);
/// lap_h = div_h(grad_h .) = sum_j backward(forward) along each axis.
Field lap_h(const Field& f);

// ---- quadrature, inner products, norms --------------------------------------

double integral(const Field& f);
double mean(const Field& f);
double inner(const Field& f, const Field& g);
double inner(const VectorField& v, const VectorField& w);
double l2_norm(const Field& f);
double l2_norm(const VectorField& v);
double linf_norm(const Field& f);
double h1_seminorm(const Field& f);

/// Sum_{i,j} || d_j^{+h} d_i^{+h} f ||_{L^2}^2 — the discrete carrier of
/// the |D^2 f|^2 term in the entropy estimate.
double hessian_frobenius_sq(const Field& f);

} // namespace anideg
