#include "wavegrad/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <utility>

namespace wavegrad {

namespace {

void check_length(std::size_t got, const Grid& grid, const char* who) {
    if (got != grid.total()) {
        throw std::invalid_argument(std::string(who) + ": expected length " +
                                    std::to_string(grid.total()) + ", got " + std::to_string(got));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Forward/backward r2c plans for one grid shape. Executed with the new-array
// interface, which FFTW guarantees to be thread-safe.
class SpectralLaplacian {
public:
    explicit SpectralLaplacian(const Grid& grid) : grid_(grid) {
        const int n = static_cast<int>(grid.n());
        const std::size_t half = grid.n() / 2 + 1;
        complex_size_ = grid.dim() == 1 ? half : grid.n() * half;
        auto* in = fftw_alloc_real(grid.total());
        auto* out = fftw_alloc_complex(complex_size_);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (grid.dim() == 1) {
            forward_ = fftw_plan_dft_r2c_1d(n, in, out, flags);
            backward_ = fftw_plan_dft_c2r_1d(n, out, in, flags);
        } else {
            forward_ = fftw_plan_dft_r2c_2d(n, n, in, out, flags);
            backward_ = fftw_plan_dft_c2r_2d(n, n, out, in, flags);
        }
        fftw_free(in);
        fftw_free(out);

        inverse_symbol_.assign(complex_size_, 0.0);
        const double norm = static_cast<double>(grid.total());
        for (std::size_t idx = 0; idx < complex_size_; ++idx) {
            double lambda = 0.0;
            if (grid.dim() == 1) {
                lambda = laplacian_symbol(grid.n(), idx);
            } else {
                lambda = laplacian_symbol(grid.n(), idx / half) + laplacian_symbol(grid.n(), idx % half);
            }
            inverse_symbol_[idx] = idx == 0 ? 0.0 : 1.0 / (lambda * norm);
        }
    }

    SpectralLaplacian(const SpectralLaplacian&) = delete;
    SpectralLaplacian& operator=(const SpectralLaplacian&) = delete;

    ~SpectralLaplacian() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void solve(std::span<const double> rhs, std::span<double> out) const {
        std::vector<double> real(rhs.begin(), rhs.end());
        std::vector<fftw_complex> spectrum(complex_size_);
        fftw_execute_dft_r2c(forward_, real.data(), spectrum.data());
        for (std::size_t k = 0; k < complex_size_; ++k) {
            spectrum[k][0] *= inverse_symbol_[k];
            spectrum[k][1] *= inverse_symbol_[k];
        }
        // c2r destroys its input; spectrum is a scratch copy.
        fftw_execute_dft_c2r(backward_, spectrum.data(), out.data());
    }

private:
    Grid grid_;
    std::size_t complex_size_ = 0;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    std::vector<double> inverse_symbol_;
};

const SpectralLaplacian& spectral_laplacian(const Grid& grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::size_t>, std::unique_ptr<SpectralLaplacian>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{grid.dim(), grid.n()}];
    if (!slot) slot = std::make_unique<SpectralLaplacian>(grid);
    return *slot;
}

}  // namespace

DiffOperator::DiffOperator(Grid grid, int axis) : grid_(grid), axis_(axis) {
    if (axis < 0 || axis >= grid.dim()) {
        throw std::invalid_argument("DiffOperator: axis " + std::to_string(axis) +
                                    " invalid for a " + std::to_string(grid.dim()) + "D grid");
    }
}

std::size_t DiffOperator::next(std::size_t site) const {
    const std::size_t stride = grid_.stride(axis_);
    const std::size_t i = (site / stride) % grid_.n();
    return i + 1 == grid_.n() ? site - i * stride : site + stride;
}

std::size_t DiffOperator::prev(std::size_t site) const {
    const std::size_t stride = grid_.stride(axis_);
    const std::size_t i = (site / stride) % grid_.n();
    return i == 0 ? site + (grid_.n() - 1) * stride : site - stride;
}

void DiffOperator::apply(std::span<const double> v, std::span<double> out) const {
    check_length(v.size(), grid_, "DiffOperator::apply");
    check_length(out.size(), grid_, "DiffOperator::apply");
    const double n = scale();
    for (std::size_t s = 0; s < v.size(); ++s) out[s] = n * (v[next(s)] - v[s]);
}

void DiffOperator::apply_adjoint(std::span<const double> v, std::span<double> out) const {
    check_length(v.size(), grid_, "DiffOperator::apply_adjoint");
    check_length(out.size(), grid_, "DiffOperator::apply_adjoint");
    const double n = scale();
    for (std::size_t s = 0; s < v.size(); ++s) out[s] = n * (v[prev(s)] - v[s]);
}

std::vector<double> diff_apply(const DiffOperator& op, std::span<const double> v) {
    std::vector<double> out(v.size());
    op.apply(v, out);
    return out;
}

std::vector<double> diff_adjoint_apply(const DiffOperator& op, std::span<const double> v) {
    std::vector<double> out(v.size());
    op.apply_adjoint(v, out);
    return out;
}

std::vector<double> weighted_laplacian_apply(const Grid& grid, std::span<const double> w,
                                             std::span<const double> v) {
    check_length(v.size(), grid, "weighted_laplacian_apply");
    if (!w.empty()) check_length(w.size(), grid, "weighted_laplacian_apply");
    std::vector<double> out(v.size(), 0.0);
    std::vector<double> flux(v.size());
    std::vector<double> div(v.size());
    for (int axis = 0; axis < grid.dim(); ++axis) {
        DiffOperator d(grid, axis);
        d.apply(v, flux);
        if (!w.empty()) {
            for (std::size_t s = 0; s < flux.size(); ++s) flux[s] *= w[s];
        }
        d.apply_adjoint(flux, div);
        for (std::size_t s = 0; s < out.size(); ++s) out[s] += div[s];
    }
    return out;
}

std::vector<double> laplacian_apply(const Grid& grid, std::span<const double> v) {
    return weighted_laplacian_apply(grid, {}, v);
}

double laplacian_symbol(std::size_t n, std::size_t k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    const double nn = static_cast<double>(n);
    return 4.0 * nn * nn * s * s;
}

std::vector<double> project_mean_zero(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    if (out.empty()) return out;
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
    for (double& x : out) x -= mean;
    return out;
}

std::vector<double> laplacian_pinv_apply(const Grid& grid, std::span<const double> rhs) {
    check_length(rhs.size(), grid, "laplacian_pinv_apply");
    std::vector<double> out(rhs.size());
    spectral_laplacian(grid).solve(rhs, out);
    return project_mean_zero(out);
}

std::vector<double> weighted_elliptic_pinv_apply(const Density& w, std::span<const double> rhs,
                                                 const EllipticSolveConfig& cfg) {
    const Grid& grid = w.grid();
    check_length(rhs.size(), grid, "weighted_elliptic_pinv_apply");
    if (!(w.min() > 0.0)) {
        throw std::invalid_argument("weighted_elliptic_pinv_apply: weights must be strictly positive");
    }
    if (!(cfg.rel_tolerance > 0.0)) {
        throw std::invalid_argument("weighted_elliptic_pinv_apply: tolerance must be positive");
    }

    const std::size_t size = rhs.size();
    std::vector<double> b = project_mean_zero(rhs);
    std::vector<double> x(size, 0.0);
    const double b_norm = std::sqrt(dot(b, b));
    // A mean-zero part at the rounding level of the projection is a constant rhs.
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::sqrt(static_cast<double>(size)) * rhs_norm;
    if (b_norm <= noise) return x;

    const double inv_mean_weight = static_cast<double>(size) / w.mass();
    auto precondition = [&](std::span<const double> r) {
        std::vector<double> z = laplacian_pinv_apply(grid, r);
        for (double& v : z) v *= inv_mean_weight;
        return z;
    };

    // CG recurrences drift from the true residual, so each pass restarts from
    // b - Kx and stops at half the target; at most a few passes are needed.
    const double target = 0.5 * cfg.rel_tolerance * b_norm;
    const std::size_t cap = cfg.iteration_cap(grid);
    std::size_t it = 0;
    double achieved = 1.0;
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<double> r = b;
        if (pass > 0) {
            std::vector<double> kx = weighted_laplacian_apply(grid, w.values(), x);
            for (std::size_t s = 0; s < size; ++s) r[s] -= kx[s];
        }
        std::vector<double> z = precondition(r);
        std::vector<double> p = z;
        double rz = dot(r, z);
        double r_norm = std::sqrt(dot(r, r));
        while (r_norm > target && it < cap) {
            std::vector<double> q = weighted_laplacian_apply(grid, w.values(), p);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t s = 0; s < size; ++s) {
                x[s] += alpha * p[s];
                r[s] -= alpha * q[s];
            }
            r_norm = std::sqrt(dot(r, r));
            ++it;
            if (r_norm <= target) break;
            z = precondition(r);
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t s = 0; s < size; ++s) p[s] = z[s] + beta * p[s];
        }

        x = project_mean_zero(x);
        std::vector<double> kx = weighted_laplacian_apply(grid, w.values(), x);
        double true_sq = 0.0;
        for (std::size_t s = 0; s < size; ++s) true_sq += (kx[s] - b[s]) * (kx[s] - b[s]);
        achieved = std::sqrt(true_sq) / b_norm;
        if (achieved <= cfg.rel_tolerance || it >= cap) break;
    }
    if (achieved > cfg.rel_tolerance) {
        throw EllipticSolveError("weighted_elliptic_pinv_apply: relative residual " +
                                     std::to_string(achieved) + " after " + std::to_string(it) +
                                     " iterations",
                                 achieved, it);
    }
    return x;
}

}  // namespace wavegrad
