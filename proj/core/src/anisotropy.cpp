#include "anideg/anisotropy.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace anideg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// p.Mp for a row-major d x d matrix.
double quad_form(const std::vector<double>& m, std::span<const double> p) {
    const std::size_t d = p.size();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += m[i * d + j] * p[j];
        s += p[i] * row;
    }
    return s;
}

void mat_vec(const std::vector<double>& m, std::span<const double> p, std::span<double> out) {
    const std::size_t d = p.size();
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += m[i * d + j] * p[j];
        out[i] = row;
    }
}

std::vector<double> symmetrized(int dim, std::vector<double> m) {
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const double v = 0.5 * (m[i * dim + j] + m[j * dim + i]);
            m[i * dim + j] = v;
            m[j * dim + i] = v;
        }
    return m;
}

using Vec3 = std::array<double, 3>;

// Deterministic quasi-uniform unit directions; canonical axes always included
// so diagonal quadratic forms certify exactly.
std::vector<Vec3> unit_directions(int dim, int n) {
    std::vector<Vec3> dirs;
    for (int ax = 0; ax < dim; ++ax) {
        Vec3 e{0, 0, 0};
        e[ax] = 1.0;
        dirs.push_back(e);
        e[ax] = -1.0;
        dirs.push_back(e);
    }
    if (dim == 2) {
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * kPi * k / n;
            dirs.push_back({std::cos(th), std::sin(th), 0.0});
        }
    } else if (dim == 3) {
        // Fibonacci sphere.
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int k = 0; k < n; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = 2.0 * kPi * k / golden;
            dirs.push_back({r * std::cos(th), r * std::sin(th), z});
        }
    }
    return dirs;
}

} // namespace

AnisotropySpec::AnisotropySpec(AnisotropyFamily family, int dim) : family_(family), dim_(dim) {
    if (dim < 1 || dim > 3) throw DimensionMismatch("anisotropy dimension must be 1, 2 or 3");
}

AnisotropySpec AnisotropySpec::isotropic(int dim) { return AnisotropySpec(AnisotropyFamily::Isotropic, dim); }

AnisotropySpec AnisotropySpec::quadratic(int dim, std::vector<double> m) {
    AnisotropySpec spec(AnisotropyFamily::Quadratic, dim);
    if (m.size() != static_cast<std::size_t>(dim) * dim)
        throw DimensionMismatch("quadratic anisotropy matrix must have dim*dim entries");
    spec.matrix_ = symmetrized(dim, std::move(m));
    return spec;
}

AnisotropySpec AnisotropySpec::ellipsoid_sum(int dim, std::vector<std::vector<double>> gs) {
    AnisotropySpec spec(AnisotropyFamily::EllipsoidSum, dim);
    if (gs.empty()) throw DimensionMismatch("ellipsoid_sum needs at least one matrix");
    for (auto& g : gs) {
        if (g.size() != static_cast<std::size_t>(dim) * dim)
            throw DimensionMismatch("ellipsoid_sum matrix must have dim*dim entries");
        g = symmetrized(dim, std::move(g));
    }
    spec.matrices_ = std::move(gs);
    return spec;
}

void AnisotropySpec::check_dim(std::size_t n) const {
    if (n != static_cast<std::size_t>(dim_)) {
        std::ostringstream os;
        os << "expected a " << dim_ << "-vector, got size " << n;
        throw DimensionMismatch(os.str());
    }
}

double AnisotropySpec::eval(std::span<const double> p) const {
    check_dim(p.size());
    switch (family_) {
    case AnisotropyFamily::Isotropic:
        return 0.5 * dot(p, p);
    case AnisotropyFamily::Quadratic:
        return 0.5 * quad_form(matrix_, p);
    case AnisotropyFamily::EllipsoidSum: {
        double gamma = 0.0;
        for (const auto& g : matrices_) gamma += std::sqrt(quad_form(g, p));
        return 0.5 * gamma * gamma;
    }
    }
    return 0.0;
}

void AnisotropySpec::eval_grad(std::span<const double> p, std::span<double> out) const {
    check_dim(p.size());
    check_dim(out.size());
    switch (family_) {
    case AnisotropyFamily::Isotropic:
        for (int i = 0; i < dim_; ++i) out[i] = p[i];
        return;
    case AnisotropyFamily::Quadratic:
        mat_vec(matrix_, p, out);
        return;
    case AnisotropyFamily::EllipsoidSum: {
        // A' = gamma(p) * sum_l G_l p / sqrt(p.G_l p), with A'(0) := 0.
        double norm2 = dot(p, p);
        if (norm2 == 0.0) {
            for (int i = 0; i < dim_; ++i) out[i] = 0.0;
            return;
        }
        std::array<double, 3> acc{0, 0, 0};
        std::array<double, 3> gp{0, 0, 0};
        double gamma = 0.0;
        for (const auto& g : matrices_) {
            mat_vec(g, p, std::span<double>(gp.data(), dim_));
            const double gl = std::sqrt(quad_form(g, p));
            gamma += gl;
            for (int i = 0; i < dim_; ++i) acc[i] += gp[i] / gl;
        }
        for (int i = 0; i < dim_; ++i) out[i] = gamma * acc[i];
        return;
    }
    }
}

const AnisotropyConstants& AnisotropySpec::certify(int n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw ValidationError("certify_constants requires n_samples >= 1000");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uradius(0.25, 4.0);

    const auto dirs = unit_directions(dim_, n_samples);

    auto grad_at = [&](std::span<const double> p, std::span<double> out) { eval_grad(p, out); };

    double a0 = std::numeric_limits<double>::infinity();
    double a1 = 0.0;
    double a2 = 0.0;
    bool positive_ok = true;

    std::array<double, 3> g{};
    for (const auto& u : dirs) {
        const std::span<const double> up(u.data(), dim_);
        const double a = eval(up);
        if (!(a > 0.0)) positive_ok = false;
        a0 = std::min(a0, a);
        a1 = std::max(a1, a);
        grad_at(up, std::span<double>(g.data(), dim_));
        double gn = 0.0;
        for (int i = 0; i < dim_; ++i) gn += g[i] * g[i];
        a2 = std::max(a2, std::sqrt(gn));
    }
    // A(p)/|p|^2 is 0-homogeneous, so sampling |u| = 1 suffices for a0/a1.

    // Monotonicity quotients. Three pair populations:
    //  (1) (u, 0): quotient = 2 A(u) / |u|^2 (exact for quadratic forms),
    //  (2) near pairs q = p + eps v probing local curvature,
    //  (3) seeded random far pairs at mixed radii.
    double ca = std::numeric_limits<double>::infinity();
    double lip = 0.0;
    bool monotone_ok = true;

    std::array<double, 3> gp{}, gq{}, pq{};
    auto quotient = [&](std::span<const double> p, std::span<const double> q) {
        grad_at(p, std::span<double>(gp.data(), dim_));
        grad_at(q, std::span<double>(gq.data(), dim_));
        double num = 0.0, den = 0.0, dg2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double dp = p[i] - q[i];
            const double dgi = gp[i] - gq[i];
            num += dgi * dp;
            den += dp * dp;
            dg2 += dgi * dgi;
        }
        if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
        lip = std::max(lip, std::sqrt(dg2 / den));
        return num / den;
    };
    auto take = [&](double q) {
        if (!std::isfinite(q) || q <= 0.0) monotone_ok = false;
        else ca = std::min(ca, q);
    };

    const std::array<double, 3> zero{0, 0, 0};
    for (const auto& u : dirs)
        take(quotient(std::span<const double>(u.data(), dim_), std::span<const double>(zero.data(), dim_)));

    if (dim_ > 1) {
        const int base_count = std::min<std::size_t>(dirs.size(), 512);
        const std::size_t stride = std::max<std::size_t>(1, dirs.size() / base_count);
        constexpr double eps = 1e-4;
        for (std::size_t iu = 0; iu < dirs.size(); iu += stride) {
            for (std::size_t iv = 0; iv < dirs.size(); iv += stride) {
                Vec3 q = dirs[iu];
                for (int i = 0; i < dim_; ++i) q[i] += eps * dirs[iv][i];
                take(quotient(std::span<const double>(dirs[iu].data(), dim_),
                              std::span<const double>(q.data(), dim_)));
            }
        }
    }

    const int n_random = std::max(1000, n_samples / 10);
    for (int k = 0; k < n_random; ++k) {
        Vec3 p{}, q{};
        double pn = 0.0, qn = 0.0;
        for (int i = 0; i < dim_; ++i) {
            p[i] = gauss(rng);
            q[i] = gauss(rng);
            pn += p[i] * p[i];
            qn += q[i] * q[i];
        }
        if (pn == 0.0 || qn == 0.0) continue;
        const double rp = uradius(rng) / std::sqrt(pn);
        const double rq = uradius(rng) / std::sqrt(qn);
        for (int i = 0; i < dim_; ++i) {
            p[i] *= rp;
            q[i] *= rq;
        }
        take(quotient(std::span<const double>(p.data(), dim_), std::span<const double>(q.data(), dim_)));
    }

    if (!monotone_ok)
        throw NotStronglyMonotone("sampled monotonicity quotient of A' is not positive; (A2) violated");
    if (!positive_ok)
        throw NotPositive("A(p) <= 0 for a sampled unit direction; (A2) violated");

    constants_ = AnisotropyConstants{a0, std::max(a0, a1), a2, ca};
    grad_lipschitz_ = lip;
    return *constants_;
}

} // namespace anideg
