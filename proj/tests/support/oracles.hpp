// Test-side oracles, independent of the library implementation paths they
// check: long-double adaptive Simpson quadrature (for the entropy function
// Phi), central finite differences, and log-log slope fits.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline long double simpson(long double fa, long double fm, long double fb, long double a,
                           long double b) {
    return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

inline long double adapt(const std::function<long double(long double)>& f, long double a,
                         long double fa, long double b, long double fb, long double m,
                         long double fm, long double whole, long double tol, int depth) {
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const long double flm = f(lm), frm = f(rm);
    const long double left = simpson(fa, flm, fm, a, m);
    const long double right = simpson(fm, frm, fb, m, b);
    const long double err = left + right - whole;
    if (std::abs(static_cast<double>(err)) <= 15.0 * static_cast<double>(tol) || depth <= 0)
        return left + right + err / 15.0L;
    return adapt(f, a, fa, m, fm, lm, flm, left, tol / 2.0L, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, tol / 2.0L, depth - 1);
}

inline long double integrate(const std::function<long double(long double)>& f, long double a,
                             long double b, long double tol = 1e-12L) {
    if (a == b) return 0.0L;
    const long double m = 0.5L * (a + b);
    const long double fa = f(a), fb = f(b), fm = f(m);
    return adapt(f, a, fa, b, fb, m, fm, simpson(fa, fm, fb, a, b), tol, 48);
}

/// Phi_delta(r) by direct double quadrature of 1/b_delta, where b_delta is
/// supplied by the caller as a plain callable. Independent of the library's
/// closed forms and lookup tables.
inline double phi_delta_quadrature(const std::function<double(double)>& b_delta, double r,
                                   double tol = 1e-11) {
    auto inner = [&](long double s) {
        return integrate([&](long double tau) { return 1.0L / b_delta(static_cast<double>(tau)); },
                         0.0L, s, tol / 10.0);
    };
    return static_cast<double>(
        integrate([&](long double s) { return inner(s); }, 0.0L, static_cast<long double>(r), tol));
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracle
