#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "wavegrad/grid.hpp"
#include "wavegrad/losses.hpp"
#include "wavegrad/wavelet.hpp"

namespace wavegrad {

/// Row-compressed sparse matrix; rows are wavelet indices, columns sites.
class SparseRows {
public:
    SparseRows() = default;
    explicit SparseRows(std::size_t cols) : cols_(cols) {}

    void append_row(std::span<const std::size_t> cols, std::span<const double> values);

    std::size_t rows() const { return offsets_.size() - 1; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::vector<double> multiply(std::span<const double> x) const;
    double row_sum(std::size_t row) const;
    std::size_t row_nnz(std::size_t row) const { return offsets_[row + 1] - offsets_[row]; }
    // (column, value) pairs of one row.
    std::span<const std::uint32_t> row_columns(std::size_t row) const;
    std::span<const double> row_values(std::size_t row) const;

private:
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> columns_;
    std::vector<double> values_;
};

/**
 * Diagonal data of the combined metric for one wavelet basis:
 *   H1[i][s] = sum over axes (D_a W)_{s i}^2   ->  diag(W^T D^T diag(p) D W) = H1 p
 *   H2[i][s] = W_{s i}^2                         ->  diag(W^T diag(p) W)       = H2 p
 *   h3[i]    = (W^T A W)_{i i},  A = -Laplacian
 */
struct MetricPrecomp {
    WaveletBasis basis;
    SparseRows h1;
    SparseRows h2;
    std::vector<double> h3;

    const Grid& grid() const { return basis.grid(); }
};

MetricPrecomp build_precomp(const WaveletBasis& basis);

/// W diag(1/d) W^T g with d = a1/(H1 p) + a2/(H2 p) + a3 h3.
///
/// Zero-weight terms are skipped. A positive weight over a nonpositive
/// diagonal entry makes d infinite, and an infinite d maps to 0. d == 0 (only
/// possible with a1 = a2 = 0 on the constant coefficient) also maps to 0, the
/// pseudo-inverse of that coordinate. p must be strictly positive when a2 > 0;
/// otherwise any p is accepted and the result stays positive semidefinite.
std::vector<double> apply_combined_metric(const MetricPrecomp& pre, const LossWeights& alphas,
                                          const Density& p, std::span<const double> g);

// D^T diag(p) D g, summed over axes in 2D.
std::vector<double> apply_wasserstein_metric(const Density& p, std::span<const double> g);
// p * g entrywise.
std::vector<double> apply_fisher_rao_metric(const Density& p, std::span<const double> g);
// (-Laplacian)^+ g.
std::vector<double> apply_mahalanobis_metric(const Grid& grid, std::span<const double> g);

enum class MetricKind { wasserstein, fisher_rao, mahalanobis, combined };

std::string_view metric_name(MetricKind kind);
// Accepts the names produced by metric_name; throws std::invalid_argument.
MetricKind parse_metric_kind(std::string_view name);

/// A preconditioner s = M(p) g used by the descent loop.
class Metric {
public:
    virtual ~Metric() = default;
    virtual std::vector<double> apply(const Density& p, std::span<const double> g) const = 0;
    virtual std::string_view name() const = 0;
    // Whether apply() is only defined for strictly positive p.
    virtual bool requires_positive_density() const { return true; }
};

class WassersteinMetric final : public Metric {
public:
    std::vector<double> apply(const Density& p, std::span<const double> g) const override {
        return apply_wasserstein_metric(p, g);
    }
    std::string_view name() const override { return metric_name(MetricKind::wasserstein); }
};

class FisherRaoMetric final : public Metric {
public:
    std::vector<double> apply(const Density& p, std::span<const double> g) const override {
        return apply_fisher_rao_metric(p, g);
    }
    std::string_view name() const override { return metric_name(MetricKind::fisher_rao); }
};

class MahalanobisMetric final : public Metric {
public:
    std::vector<double> apply(const Density& p, std::span<const double> g) const override {
        return apply_mahalanobis_metric(p.grid(), g);
    }
    std::string_view name() const override { return metric_name(MetricKind::mahalanobis); }
    bool requires_positive_density() const override { return false; }
};

class CombinedMetric final : public Metric {
public:
    CombinedMetric(std::shared_ptr<const MetricPrecomp> precomp, LossWeights alphas)
        : precomp_(std::move(precomp)), alphas_(alphas) {}

    std::vector<double> apply(const Density& p, std::span<const double> g) const override {
        return apply_combined_metric(*precomp_, alphas_, p, g);
    }
    std::string_view name() const override { return metric_name(MetricKind::combined); }
    bool requires_positive_density() const override { return alphas_.kl > 0.0; }

private:
    std::shared_ptr<const MetricPrecomp> precomp_;
    LossWeights alphas_;
};

// precomp may be null for every kind except combined.
std::unique_ptr<Metric> make_metric(MetricKind kind, std::shared_ptr<const MetricPrecomp> precomp,
                                    const LossWeights& alphas);

}  // namespace wavegrad
