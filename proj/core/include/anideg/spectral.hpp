#pragma once

#include <functional>
#include <span>

#include "anideg/grid.hpp"

namespace anideg {

/// Constant-coefficient solves diagonalized by the discrete Fourier transform.
/// Given a per-mode multiplier sigma, solve() returns the grid function with
/// sigma(k) * u_hat(k) = rhs_hat(k) for every retained mode.
///
/// The multiplier callback receives the unreduced integer mode indices
/// k_j in [0, N_j); symbols built from sin^2(pi k/N) are insensitive to the
/// k -> N-k aliasing, see lap_symbol().
///
/// One instance owns FFT buffers and is not safe for concurrent solve()
/// calls; create one instance per worker.
class SpectralSolver {
public:
    explicit SpectralSolver(GridPtr grid);
    ~SpectralSolver();

    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    const TorusGrid& grid() const { return *grid_; }

    /// Symbol of -lap_h: lambda(k) = sum_j (4/h_j^2) sin^2(pi k_j / N_j) >= 0.
    double lap_symbol(std::span<const int> k) const;

    /// Solves multiplier(k) * u_hat(k) = rhs_hat(k). A zero multiplier on a
    /// mode whose rhs amplitude exceeds 1e-12 * max|rhs_hat| raises
    /// SingularMode; otherwise that mode of the solution is set to zero.
    Field solve(const std::function<double(std::span<const int>)>& multiplier, const Field& rhs);

private:
    GridPtr grid_;
    void* plan_fwd_ = nullptr;   // fftw_plan
    void* plan_bwd_ = nullptr;
    double* real_buf_ = nullptr;
    void* cplx_buf_ = nullptr;   // fftw_complex*
    std::size_t n_complex_ = 0;
};

} // namespace anideg
