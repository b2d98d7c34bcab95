#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavegrad/grid.hpp"

namespace wavegrad {

/// Periodic forward difference along one axis: (D v)_s = n (v_{s+e} - v_s).
class DiffOperator {
public:
    DiffOperator(Grid grid, int axis = 0);

    const Grid& grid() const { return grid_; }
    int axis() const { return axis_; }
    double scale() const { return static_cast<double>(grid_.n()); }

    // Index of the forward / backward neighbour of a site along the axis.
    std::size_t next(std::size_t site) const;
    std::size_t prev(std::size_t site) const;

    void apply(std::span<const double> v, std::span<double> out) const;
    void apply_adjoint(std::span<const double> v, std::span<double> out) const;

private:
    Grid grid_;
    int axis_;
};

std::vector<double> diff_apply(const DiffOperator& op, std::span<const double> v);
std::vector<double> diff_adjoint_apply(const DiffOperator& op, std::span<const double> v);

/// A = -Laplacian = sum over axes of D_a^T D_a.
std::vector<double> laplacian_apply(const Grid& grid, std::span<const double> v);

/// sum over axes of D_a^T diag(w) D_a v.
std::vector<double> weighted_laplacian_apply(const Grid& grid, std::span<const double> w,
                                             std::span<const double> v);

struct EllipticSolveConfig {
    double rel_tolerance = 1e-10;
    std::size_t max_iterations = 0;  // 0 selects 10 * n

    std::size_t iteration_cap(const Grid& grid) const {
        return max_iterations != 0 ? max_iterations : 10 * grid.n();
    }
};

class EllipticSolveError : public std::runtime_error {
public:
    EllipticSolveError(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), achieved_residual(residual), iterations(iterations) {}

    double achieved_residual;
    std::size_t iterations;
};

/// Removes the mean: the projection onto the complement of the constants.
std::vector<double> project_mean_zero(std::span<const double> v);

/**
 * Minimum-norm solution of D^T diag(w) D x = P(rhs), P the mean-zero
 * projection. Preconditioned CG on the mean-zero subspace, with the
 * constant-coefficient Laplacian pseudo-inverse scaled by mean(w) as
 * preconditioner. Throws std::invalid_argument for non-positive weights and
 * EllipticSolveError when the relative residual target is not met.
 */
std::vector<double> weighted_elliptic_pinv_apply(const Density& w, std::span<const double> rhs,
                                                 const EllipticSolveConfig& cfg = {});

/// (-Laplacian)^+ rhs by FFT diagonalization; the constant mode maps to 0.
std::vector<double> laplacian_pinv_apply(const Grid& grid, std::span<const double> rhs);

/// Eigenvalue of D^T D for the 1D Fourier mode k: 4 n^2 sin^2(pi k / n).
double laplacian_symbol(std::size_t n, std::size_t k);

}  // namespace wavegrad
