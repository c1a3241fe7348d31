#include "anideg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anideg {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

TorusGrid::TorusGrid(std::vector<int> extents, std::vector<double> lower, std::vector<double> upper) {
    dim_ = static_cast<int>(extents.size());
    if (dim_ < 1 || dim_ > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
    if (lower.size() != extents.size() || upper.size() != extents.size())
        throw ValidationError("grid extents and bounds must have matching sizes");
    total_ = 1;
    cell_volume_ = 1.0;
    for (int i = 0; i < dim_; ++i) {
        if (!power_of_two(extents[i]) || extents[i] < 8) {
            std::ostringstream os;
            os << "grid points per axis must be a power of two >= 8, got " << extents[i];
            throw ValidationError(os.str());
        }
        if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw ValidationError("grid extents must satisfy a < b and be finite");
        n_[i] = extents[i];
        a_[i] = lower[i];
        b_[i] = upper[i];
        h_[i] = (upper[i] - lower[i]) / extents[i];
        total_ *= static_cast<std::size_t>(extents[i]);
        cell_volume_ *= h_[i];
    }
}

std::size_t TorusGrid::inner_size(int axis) const {
    std::size_t s = 1;
    for (int i = axis + 1; i < dim_; ++i) s *= static_cast<std::size_t>(n_[i]);
    return s;
}

std::size_t TorusGrid::outer_size(int axis) const {
    std::size_t s = 1;
    for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(n_[i]);
    return s;
}

bool TorusGrid::same_as(const TorusGrid& other) const {
    if (dim_ != other.dim_) return false;
    for (int i = 0; i < dim_; ++i)
        if (n_[i] != other.n_[i] || a_[i] != other.a_[i] || b_[i] != other.b_[i]) return false;
    return true;
}

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

bool Field::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

Field& Field::operator+=(const Field& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

Field& Field::axpy(double alpha, const Field& x) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * x.values_[i];
    return *this;
}

VectorField::VectorField(const GridPtr& grid) {
    comp.reserve(grid->dim());
    for (int j = 0; j < grid->dim(); ++j) comp.emplace_back(grid);
}

bool VectorField::all_finite() const {
    for (const auto& c : comp)
        if (!c.all_finite()) return false;
    return true;
}

VectorField& VectorField::axpy(double alpha, const VectorField& x) {
    for (std::size_t j = 0; j < comp.size(); ++j) comp[j].axpy(alpha, x.comp[j]);
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& c : comp) c *= s;
    return *this;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

namespace {

// Applies a two-point stencil along `axis`: out(x) = (f(x + dir*h) - f(x)) * (dir/h).
// dir = +1 gives the forward quotient, dir = -1 the backward quotient.
Field shifted_difference(const Field& f, int axis, int dir) {
    const TorusGrid& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw ValidationError("difference quotient axis out of range");
    Field out(f.grid_ptr());
    const std::size_t inner = g.inner_size(axis);
    const std::size_t outer = g.outer_size(axis);
    const int n = g.extent(axis);
    const double invh = 1.0 / g.spacing(axis);
    const double* src = f.data();
    double* dst = out.data();
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t block = o * static_cast<std::size_t>(n) * inner;
        for (int i = 0; i < n; ++i) {
            const int ishift = (dir > 0) ? (i + 1) % n : (i - 1 + n) % n;
            const double* a = src + block + static_cast<std::size_t>(i) * inner;
            const double* b = src + block + static_cast<std::size_t>(ishift) * inner;
            double* d = dst + block + static_cast<std::size_t>(i) * inner;
            if (dir > 0)
                for (std::size_t k = 0; k < inner; ++k) d[k] = (b[k] - a[k]) * invh;
            else
                for (std::size_t k = 0; k < inner; ++k) d[k] = (a[k] - b[k]) * invh;
        }
    }
    return out;
}

std::vector<double> product_buffer(const Field& f, const Field& g) {
    std::vector<double> buf(f.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = f[i] * g[i];
    return buf;
}

} // namespace

Field dq_forward(const Field& f, int axis) { return shifted_difference(f, axis, +1); }
Field dq_backward(const Field& f, int axis) { return shifted_difference(f, axis, -1); }

VectorField grad_h(const Field& f) {
    VectorField v(f.grid_ptr());
    for (int j = 0; j < f.grid().dim(); ++j) v[j] = dq_forward(f, j);
    return v;
}

Field div_h(const VectorField& v) {
    Field out = dq_backward(v[0], 0);
    for (int j = 1; j < v.dim(); ++j) out += dq_backward(v[j], j);
    return out;
}

Field lap_h(const Field& f) {
    Field out = dq_backward(dq_forward(f, 0), 0);
    for (int j = 1; j < f.grid().dim(); ++j) out += dq_backward(dq_forward(f, j), j);
    return out;
}

double integral(const Field& f) { return pairwise_sum(f.values()) * f.grid().cell_volume(); }

double mean(const Field& f) { return integral(f) / f.grid().domain_volume(); }

double inner(const Field& f, const Field& g) {
    return pairwise_sum(product_buffer(f, g)) * f.grid().cell_volume();
}

double inner(const VectorField& v, const VectorField& w) {
    double s = 0.0;
    for (int j = 0; j < v.dim(); ++j) s += inner(v[j], w[j]);
    return s;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

double linf_norm(const Field& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

double h1_seminorm(const Field& f) {
    double s = 0.0;
    for (int j = 0; j < f.grid().dim(); ++j) {
        const Field d = dq_forward(f, j);
        s += inner(d, d);
    }
    return std::sqrt(s);
}

double hessian_frobenius_sq(const Field& f) {
    double s = 0.0;
    for (int i = 0; i < f.grid().dim(); ++i) {
        const Field di = dq_forward(f, i);
        for (int j = 0; j < f.grid().dim(); ++j) {
            const Field dji = dq_forward(di, j);
            s += inner(dji, dji);
        }
    }
    return s;
}

} // namespace anideg
