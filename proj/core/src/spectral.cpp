#include "anideg/spectral.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstring>
#include <mutex>

namespace anideg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

SpectralSolver::SpectralSolver(GridPtr grid) : grid_(std::move(grid)) {
    const int d = grid_->dim();
    std::array<int, 3> n{};
    for (int i = 0; i < d; ++i) n[i] = grid_->extent(i);

    n_complex_ = 1;
    for (int i = 0; i < d - 1; ++i) n_complex_ *= static_cast<std::size_t>(n[i]);
    n_complex_ *= static_cast<std::size_t>(n[d - 1] / 2 + 1);

    real_buf_ = fftw_alloc_real(grid_->size());
    cplx_buf_ = fftw_alloc_complex(n_complex_);

    std::lock_guard<std::mutex> lock(plan_mutex());
    plan_fwd_ = fftw_plan_dft_r2c(d, n.data(), real_buf_, static_cast<fftw_complex*>(cplx_buf_),
                                  FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r(d, n.data(), static_cast<fftw_complex*>(cplx_buf_), real_buf_,
                                  FFTW_ESTIMATE);
}

SpectralSolver::~SpectralSolver() {
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
        if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    }
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
}

double SpectralSolver::lap_symbol(std::span<const int> k) const {
    double s = 0.0;
    for (int j = 0; j < grid_->dim(); ++j) {
        const double x = std::sin(kPi * k[j] / grid_->extent(j));
        s += 4.0 / (grid_->spacing(j) * grid_->spacing(j)) * x * x;
    }
    return s;
}

Field SpectralSolver::solve(const std::function<double(std::span<const int>)>& multiplier,
                            const Field& rhs) {
    if (!rhs.grid().same_as(*grid_)) throw ValidationError("spectral_solve: rhs lives on a different grid");

    std::memcpy(real_buf_, rhs.data(), sizeof(double) * grid_->size());
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    auto* spec = static_cast<fftw_complex*>(cplx_buf_);

    double ref = 0.0;
    for (std::size_t i = 0; i < n_complex_; ++i)
        ref = std::max(ref, std::hypot(spec[i][0], spec[i][1]));

    const int d = grid_->dim();
    std::array<int, 3> n{1, 1, 1};
    for (int i = 0; i < d; ++i) n[i] = grid_->extent(i);
    const int nc_last = n[d - 1] / 2 + 1;

    // Iterate the reduced (r2c) spectrum; axes before the last run full range.
    std::array<int, 3> k{0, 0, 0};
    std::size_t idx = 0;
    const int n0 = (d >= 2) ? n[0] : 1;
    const int n1 = (d == 3) ? n[1] : 1;
    for (int k0 = 0; k0 < n0; ++k0) {
        for (int k1 = 0; k1 < n1; ++k1) {
            for (int kl = 0; kl < nc_last; ++kl, ++idx) {
                if (d == 1) {
                    k[0] = kl;
                } else if (d == 2) {
                    k[0] = k0;
                    k[1] = kl;
                } else {
                    k[0] = k0;
                    k[1] = k1;
                    k[2] = kl;
                }
                const double m = multiplier(std::span<const int>(k.data(), d));
                if (m == 0.0) {
                    const double mag = std::hypot(spec[idx][0], spec[idx][1]);
                    if (mag > 1e-12 * ref)
                        throw SingularMode("spectral_solve: zero multiplier meets a nonzero rhs mode");
                    spec[idx][0] = 0.0;
                    spec[idx][1] = 0.0;
                } else {
                    spec[idx][0] /= m;
                    spec[idx][1] /= m;
                }
            }
        }
    }

    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    Field out(rhs.grid_ptr());
    const double scale = 1.0 / static_cast<double>(grid_->size());
    for (std::size_t i = 0; i < grid_->size(); ++i) out[i] = real_buf_[i] * scale;
    return out;
}

} // namespace anideg
