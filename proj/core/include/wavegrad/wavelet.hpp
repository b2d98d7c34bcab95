#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavegrad/grid.hpp"

namespace wavegrad {

/**
 * Orthogonal quadrature-mirror filter pair.
 *
 * highpass[i] = (-1)^i * lowpass[L-1-i] with L = 2*order. Analysis pairs the
 * filter taps with samples starting at even indices:
 *   approx[k] = sum_j lowpass[j]  * v[(2k + j) mod len]
 *   detail[k] = sum_j highpass[j] * v[(2k + j) mod len]
 */
struct FilterPair {
    int order = 0;
    std::vector<double> lowpass;
    std::vector<double> highpass;

    std::size_t length() const { return lowpass.size(); }
};

constexpr int kMaxDaubechiesOrder = 10;

/// Minimum-phase Daubechies filters with `order` vanishing moments (1 = Haar).
FilterPair daubechies_filters(int order);

/// Tabulated minimum-phase lowpass taps, 2*order entries.
std::span<const double> daubechies_lowpass_table(int order);

/// One contiguous block of the 1D coefficient layout.
struct LevelSegment {
    std::size_t offset = 0;
    std::size_t length = 0;
    int level = 0;         // 1 = finest
    bool scaling = false;  // true only for the coarsest approximation block
};

/// Sorted nonzeros of one basis column.
struct SparseColumn {
    std::vector<std::size_t> indices;
    std::vector<double> values;

    std::size_t nnz() const { return indices.size(); }
    std::vector<double> dense(std::size_t size) const;
};

/**
 * Periodized orthogonal wavelet basis on a Grid.
 *
 * 1D coefficient layout (pyramid order):
 *   [ approx_L | detail_L | detail_{L-1} | ... | detail_1 ]
 * with |detail_l| = n / 2^l and |approx_L| = n / 2^L.
 *
 * 2D uses the full tensor product of the 1D basis: coefficient (a, b) sits at
 * a*n + b and its basis function is w_a (axis 0) times w_b (axis 1).
 *
 * levels == 0 selects the full decomposition, log2(n) levels, whose single
 * coarsest scaling function is the constant 1/sqrt(n).
 */
class WaveletBasis {
public:
    WaveletBasis(Grid grid, FilterPair filters, int levels = 0);

    const Grid& grid() const { return grid_; }
    const FilterPair& filters() const { return filters_; }
    int levels() const { return levels_; }
    std::size_t size() const { return grid_.total(); }
    const std::vector<LevelSegment>& segments() const { return segments_; }

    // Segment holding 1D coefficient index i.
    const LevelSegment& segment_of(std::size_t i) const;

    // True when the coarsest scaling block has one entry, i.e. the constant.
    bool has_constant_column() const;

    // Full transform along the grid's dimension(s): W^T v and W c.
    std::vector<double> forward(std::span<const double> v) const;
    std::vector<double> inverse(std::span<const double> c) const;

    // Nonzeros of the 1D column i (length n), cascaded over its support only.
    SparseColumn column_1d(std::size_t i) const;

    // Nonzeros of column i of W (length grid.total()).
    SparseColumn column(std::size_t i) const;

    static int max_levels(std::size_t n);

private:
    void forward_line(std::span<double> work, std::vector<double>& scratch) const;
    void inverse_line(std::span<double> work, std::vector<double>& scratch) const;

    Grid grid_;
    FilterPair filters_;
    int levels_;
    std::vector<LevelSegment> segments_;
};

// 1D transforms; throw std::invalid_argument on dimension or length mismatch.
std::vector<double> dwt_forward(std::span<const double> v, const WaveletBasis& basis);
std::vector<double> dwt_inverse(std::span<const double> c, const WaveletBasis& basis);

// 2D tensor-product transforms.
std::vector<double> dwt2_forward(std::span<const double> v, const WaveletBasis& basis);
std::vector<double> dwt2_inverse(std::span<const double> c, const WaveletBasis& basis);

SparseColumn basis_column(const WaveletBasis& basis, std::size_t i);

}  // namespace wavegrad
