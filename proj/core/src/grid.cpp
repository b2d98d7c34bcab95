#include "wavegrad/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wavegrad {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("log2_exact: " + std::to_string(n) + " is not a power of two");
    }
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

Grid::Grid(int dim, std::size_t n) : dim_(dim), n_(n), total_(0) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("Grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    if (!is_power_of_two(n) || n < 4) {
        throw std::invalid_argument("Grid: n must be a power of two >= 4, got " + std::to_string(n));
    }
    total_ = dim == 1 ? n : n * n;
}

std::size_t Grid::stride(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::out_of_range("Grid::stride: bad axis");
    return (dim_ == 2 && axis == 0) ? n_ : 1;
}

std::size_t Grid::index_along(std::size_t site, int axis) const {
    return (site / stride(axis)) % n_;
}

double Grid::coordinate(std::size_t site, int axis) const {
    return static_cast<double>(index_along(site, axis)) / static_cast<double>(n_);
}

Grid make_grid(int dim, std::size_t n) { return Grid(dim, n); }

Density::Density(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.total()) {
        throw std::invalid_argument("Density: expected " + std::to_string(grid_.total()) +
                                    " values, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("Density: non-finite entry");
    }
}

double Density::mass() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Density::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool Density::is_normalized(double tol) const { return std::abs(mass() - 1.0) <= tol; }

Potential::Potential(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.total()) {
        throw std::invalid_argument("Potential: length does not match grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("Potential: non-finite entry");
    }
}

Potential double_well_potential(const Grid& grid) {
    std::vector<double> v(grid.total());
    const double k = 4.0 * std::numbers::pi;
    for (std::size_t s = 0; s < grid.total(); ++s) {
        double value = std::sin(k * grid.coordinate(s, 0));
        if (grid.dim() == 2) value *= std::sin(k * grid.coordinate(s, 1));
        v[s] = value;
    }
    return Potential(grid, std::move(v));
}

Potential zero_potential(const Grid& grid) {
    return Potential(grid, std::vector<double>(grid.total(), 0.0));
}

std::vector<double> gibbs_weights(std::span<const double> potential) {
    if (potential.empty()) return {};
    const double shift = -*std::min_element(potential.begin(), potential.end());
    std::vector<double> w(potential.size());
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-potential[i] - shift);
        z += w[i];
    }
    for (double& x : w) x /= z;
    return w;
}

Density reference_measure(const Grid& grid, const Potential& potential) {
    if (!(potential.grid() == grid)) {
        throw std::invalid_argument("reference_measure: potential lives on a different grid");
    }
    return Density(grid, gibbs_weights(potential.values()));
}

Density uniform_density(const Grid& grid) {
    return Density(grid, std::vector<double>(grid.total(), 1.0 / static_cast<double>(grid.total())));
}

}  // namespace wavegrad
