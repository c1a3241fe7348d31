#include "anideg/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anideg {

namespace {

// x ln x, continuously extended by 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt_rec(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                 double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0) throw QuadratureFailure("adaptive Simpson did not reach tolerance");
    return adapt_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson with absolute tolerance; throws QuadratureFailure at the
// recursion cap.
double adaptive_quad(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adapt_rec(f, a, fa, b, fb, m, fm, simpson(fa, fm, fb, a, b), tol, 40);
}

} // namespace

MaterialSpec MaterialSpec::log_quench(double theta, double theta_c) {
    if (!(theta > 0.0) || !(theta_c > 0.0))
        throw ValidationError("log_quench requires theta > 0 and theta_c > 0");
    MaterialSpec s;
    s.m = 1.0;
    s.preset = MaterialPreset::LogarithmicQuench;
    s.theta = theta;
    s.theta_c = theta_c;
    s.B = [](double) { return 1.0; };
    s.dB = [](double) { return 0.0; };
    s.B_lo = s.B_hi = 1.0;
    s.unit_B = true;
    s.F = [theta](double) { return theta; };
    s.psi1 = [theta](double r) { return 0.5 * theta * (xlogx(1.0 + r) + xlogx(1.0 - r)); };
    s.dpsi1 = [theta](double r) { return theta * std::atanh(r); };
    s.d2psi1 = [theta](double r) { return theta / ((1.0 - r) * (1.0 + r)); };
    s.psi2 = [theta_c](double r) { return 0.5 * theta_c * (1.0 - r * r); };
    s.dpsi2 = [theta_c](double r) { return -theta_c * r; };
    s.d2psi2 = [theta_c](double) { return -theta_c; };
    return s;
}

MaterialSpec MaterialSpec::double_well(double m) {
    if (!(m >= 1.0)) throw ValidationError("double_well requires m >= 1");
    MaterialSpec s;
    s.m = m;
    s.preset = MaterialPreset::SmoothDoubleWell;
    s.B = [](double) { return 1.0; };
    s.dB = [](double) { return 0.0; };
    s.B_lo = s.B_hi = 1.0;
    s.unit_B = true;
    s.F = [](double) { return 0.0; };
    s.psi1 = [](double) { return 0.0; };
    s.dpsi1 = [](double) { return 0.0; };
    s.d2psi1 = [](double) { return 0.0; };
    s.psi2 = [](double r) { return 0.25 * (1.0 - r * r) * (1.0 - r * r); };
    s.dpsi2 = [](double r) { return -r * (1.0 - r * r); };
    s.d2psi2 = [](double r) { return 3.0 * r * r - 1.0; };
    return s;
}

MaterialSpec MaterialSpec::custom(double m, std::function<double(double)> B, std::function<double(double)> dB,
                                  double B_lo, double B_hi, std::function<double(double)> F,
                                  std::function<double(double)> psi1, std::function<double(double)> dpsi1,
                                  std::function<double(double)> d2psi1, std::function<double(double)> psi2,
                                  std::function<double(double)> dpsi2, std::function<double(double)> d2psi2) {
    if (!(m >= 1.0)) throw ValidationError("material requires m >= 1");
    if (!(0.0 < B_lo && B_lo <= B_hi)) throw ValidationError("material requires 0 < B_* <= B^*");
    MaterialSpec s;
    s.m = m;
    s.preset = MaterialPreset::Custom;
    s.B = std::move(B);
    s.dB = std::move(dB);
    s.B_lo = B_lo;
    s.B_hi = B_hi;
    s.F = std::move(F);
    s.psi1 = std::move(psi1);
    s.dpsi1 = std::move(dpsi1);
    s.d2psi1 = std::move(d2psi1);
    s.psi2 = std::move(psi2);
    s.dpsi2 = std::move(dpsi2);
    s.d2psi2 = std::move(d2psi2);
    return s;
}

double MaterialSpec::pow_m(double x) const {
    if (m == 1.0) return x;
    if (m == 2.0) return x * x;
    return std::pow(x, m);
}

double MaterialSpec::b(double r) const {
    if (r < -1.0 || r > 1.0) return 0.0;
    return pow_m((1.0 - r) * (1.0 + r)) * B(r);
}

double MaterialSpec::db(double r) const {
    const double q = (1.0 - r) * (1.0 + r);
    double dpow;
    if (m == 1.0) dpow = -2.0 * r;
    else if (m == 2.0) dpow = -4.0 * r * q;
    else dpow = -2.0 * m * r * std::pow(q, m - 1.0);
    return dpow * B(r) + pow_m(q) * dB(r);
}

double MaterialSpec::psi(double r, int order) const {
    switch (order) {
    case 0: return psi1(r) + psi2(r);
    case 1: return dpsi1(r) + dpsi2(r);
    case 2: return d2psi1(r) + d2psi2(r);
    default: throw ValidationError("psi order must be 0, 1 or 2");
    }
}

double MaterialSpec::lipschitz_b() const {
    constexpr int kScan = 100000;
    double lip = 0.0;
    for (int k = 0; k <= kScan; ++k) {
        const double r = -1.0 + 2.0 * k / kScan;
        lip = std::max(lip, std::abs(db(r)));
    }
    return lip;
}

RegularizedMaterial::RegularizedMaterial(MaterialSpec base, double delta)
    : base_(std::move(base)), delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
    edge_ = 1.0 - delta_;

    const double b_hi = base_.b(edge_);
    const double b_lo = base_.b(-edge_);
    b_floor_ = std::min(b_hi, b_lo);
    c_delta_ = 1.0 / b_floor_;
    lipschitz_b_ = base_.lipschitz_b();

    p1_hi_[0] = base_.psi1(edge_);
    p1_hi_[1] = base_.dpsi1(edge_);
    p1_hi_[2] = base_.d2psi1(edge_);
    p1_lo_[0] = base_.psi1(-edge_);
    p1_lo_[1] = base_.dpsi1(-edge_);
    p1_lo_[2] = base_.d2psi1(-edge_);

    closed_form_ = base_.unit_B && (base_.m == 1.0 || base_.m == 2.0);
    closed_m_ = static_cast<int>(base_.m);

    if (!closed_form_) {
        // Phi' and Phi at 10^4+1 uniform nodes over [-(1-delta), 1-delta],
        // anchored at Phi(0) = Phi'(0) = 0 (the center node is exactly 0).
        constexpr int K = 10000;
        tab_phi_.assign(K + 1, 0.0);
        tab_dphi_.assign(K + 1, 0.0);
        tab_x0_ = -edge_;
        tab_h_ = 2.0 * edge_ / K;
        auto node = [&](int k) { return edge_ * (2.0 * k - K) / K; };
        auto inv_b = [this](double r) { return 1.0 / base_.b(r); };
        const int c = K / 2;
        std::vector<double> seg(K);
        for (int k = 0; k < K; ++k) seg[k] = adaptive_quad(inv_b, node(k), node(k + 1), 1e-14);
        for (int k = c; k < K; ++k) tab_dphi_[k + 1] = tab_dphi_[k] + seg[k];
        for (int k = c - 1; k >= 0; --k) tab_dphi_[k] = tab_dphi_[k + 1] - seg[k];
        for (int k = 0; k < K; ++k) {
            const double xr = node(k + 1);
            auto weighted = [&](double s) { return (xr - s) / base_.b(s); };
            seg[k] = tab_dphi_[k] * tab_h_ + adaptive_quad(weighted, node(k), xr, 1e-14);
        }
        for (int k = c; k < K; ++k) tab_phi_[k + 1] = tab_phi_[k] + seg[k];
        for (int k = c - 1; k >= 0; --k) tab_phi_[k] = tab_phi_[k + 1] - seg[k];
    }

    phi_hi_[0] = phi_inside(edge_, 0);
    phi_hi_[1] = phi_inside(edge_, 1);
    phi_hi_[2] = 1.0 / b_hi;
    phi_lo_[0] = phi_inside(-edge_, 0);
    phi_lo_[1] = phi_inside(-edge_, 1);
    phi_lo_[2] = 1.0 / b_lo;
}

double RegularizedMaterial::b_delta(double r) const {
    return base_.b(std::clamp(r, -edge_, edge_));
}

double RegularizedMaterial::b_delta_prime(double r) const {
    if (std::abs(r) < edge_) return base_.db(r);
    return 0.0;  // kink points take the outer one-sided value
}

double RegularizedMaterial::psi1_delta(double r, int order) const {
    if (order < 0 || order > 2) throw ValidationError("psi order must be 0, 1 or 2");
    const double* taylor = nullptr;
    double t = 0.0;
    if (r >= edge_) {
        taylor = p1_hi_;
        t = r - edge_;
    } else if (r <= -edge_) {
        taylor = p1_lo_;
        t = r + edge_;
    } else {
        switch (order) {
        case 0: return base_.psi1(r);
        case 1: return base_.dpsi1(r);
        default: return base_.d2psi1(r);
        }
    }
    switch (order) {
    case 0: return taylor[0] + taylor[1] * t + 0.5 * taylor[2] * t * t;
    case 1: return taylor[1] + taylor[2] * t;
    default: return taylor[2];
    }
}

double RegularizedMaterial::psi_delta(double r, int order) const {
    const double p2 = (order == 0) ? base_.psi2(r) : (order == 1) ? base_.dpsi2(r) : base_.d2psi2(r);
    return psi1_delta(r, order) + p2;
}

double RegularizedMaterial::phi_inside(double r, int order) const {
    if (closed_form_) {
        if (closed_m_ == 1) {
            // Phi'' = 1/(1-r^2): Phi' = atanh(r), Phi = r atanh(r) + ln(1-r^2)/2.
            if (order == 1) return std::atanh(r);
            return r * std::atanh(r) + 0.5 * std::log1p(-r * r);
        }
        // m = 2: Phi'' = (1-r^2)^{-2}: Phi' = [r/(1-r^2) + atanh(r)]/2, Phi = r atanh(r)/2.
        if (order == 1) return 0.5 * (r / ((1.0 - r) * (1.0 + r)) + std::atanh(r));
        return 0.5 * r * std::atanh(r);
    }
    // Cubic Hermite interpolation of the cached table.
    const int K = static_cast<int>(tab_phi_.size()) - 1;
    int i = static_cast<int>(std::floor((r - tab_x0_) / tab_h_));
    i = std::clamp(i, 0, K - 1);
    const double t = (r - (tab_x0_ + i * tab_h_)) / tab_h_;
    const double t2 = t * t, t3 = t2 * t;
    const double x_i = tab_x0_ + i * tab_h_;
    const double x_j = x_i + tab_h_;
    if (order == 1) {
        // Hermite on Phi' with slopes Phi'' = 1/b.
        const double s_i = 1.0 / base_.b(x_i);
        const double s_j = 1.0 / base_.b(x_j);
        return (2 * t3 - 3 * t2 + 1) * tab_dphi_[i] + (t3 - 2 * t2 + t) * tab_h_ * s_i +
               (-2 * t3 + 3 * t2) * tab_dphi_[i + 1] + (t3 - t2) * tab_h_ * s_j;
    }
    return (2 * t3 - 3 * t2 + 1) * tab_phi_[i] + (t3 - 2 * t2 + t) * tab_h_ * tab_dphi_[i] +
           (-2 * t3 + 3 * t2) * tab_phi_[i + 1] + (t3 - t2) * tab_h_ * tab_dphi_[i + 1];
}

double RegularizedMaterial::phi_delta(double r, int order) const {
    if (order < 0 || order > 2) throw ValidationError("Phi order must be 0, 1 or 2");
    if (order == 2) return 1.0 / b_delta(r);
    if (r > edge_) {
        const double t = r - edge_;
        if (order == 1) return phi_hi_[1] + phi_hi_[2] * t;
        return phi_hi_[0] + phi_hi_[1] * t + 0.5 * phi_hi_[2] * t * t;
    }
    if (r < -edge_) {
        const double t = r + edge_;
        if (order == 1) return phi_lo_[1] + phi_lo_[2] * t;
        return phi_lo_[0] + phi_lo_[1] * t + 0.5 * phi_lo_[2] * t * t;
    }
    return phi_inside(r, order);
}

bool RegularizedMaterial::excess_bound_holds(double z) const {
    const double excess = std::max(std::abs(z) - 1.0, 0.0);
    const double lhs = excess * excess;
    const double rhs = std::pow(2.0, base_.m + 1.0) * std::pow(delta_, base_.m) * base_.B_hi *
                       phi_delta(z, 0);
    return lhs <= rhs + 1e-12;
}

Field regularize_initial(const Field& phi0, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
    const double sup = linf_norm(phi0);
    if (sup > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "initial datum must satisfy |phi0| <= 1, got sup " << sup;
        throw InitialDatumOutOfRange(os.str());
    }
    Field out = phi0;
    out *= (1.0 - delta);
    return out;
}

} // namespace anideg
