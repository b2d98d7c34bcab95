#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavegrad {

/**
 * Periodic uniform lattice on [0,1)^dim with n points per direction.
 *
 * Sites are stored row-major: in 2D, site (i, j) lives at flat index i*n + j,
 * so axis 0 has stride n and axis 1 has stride 1. The coordinate of site i
 * along an axis is i/n.
 */
class Grid {
public:
    // Throws std::invalid_argument unless dim is 1 or 2 and n is a power of
    // two with n >= 4.
    Grid(int dim, std::size_t n);

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    std::size_t total() const { return total_; }
    double spacing() const { return 1.0 / static_cast<double>(n_); }

    std::size_t stride(int axis) const;
    std::size_t index_along(std::size_t site, int axis) const;
    double coordinate(std::size_t site, int axis) const;

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    std::size_t n_;
    std::size_t total_;
};

Grid make_grid(int dim, std::size_t n);

bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);

/// Mass-per-site vector over a grid (sums to 1 when normalized).
class Density {
public:
    // Throws std::invalid_argument on length mismatch or non-finite entries.
    // Positivity is not enforced here; losses and metrics check it.
    Density(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& vector() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double mass() const;
    double min() const;
    bool is_positive() const { return min() > 0.0; }
    bool is_normalized(double tol = 1e-12) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Potential V sampled at the grid sites.
class Potential {
public:
    Potential(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

// V(s) = sin(4 pi s) in 1D, sin(4 pi s1) sin(4 pi s2) in 2D.
Potential double_well_potential(const Grid& grid);
Potential zero_potential(const Grid& grid);

/// exp(-V) / sum exp(-V), shifted by max(-V) before exponentiating.
std::vector<double> gibbs_weights(std::span<const double> potential);

Density reference_measure(const Grid& grid, const Potential& potential);
Density uniform_density(const Grid& grid);

}  // namespace wavegrad
