#include "wavegrad/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "wavegrad/operators.hpp"

namespace wavegrad {

namespace {

void require_positive(const Density& p, const char* who) {
    if (!p.is_positive()) throw std::invalid_argument(std::string(who) + ": density must be strictly positive");
}

void check_length(std::size_t got, std::size_t want, const char* who) {
    if (got != want) {
        throw std::invalid_argument(std::string(who) + ": expected length " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

// A 1D basis column and its forward difference on the union of both supports.
struct ColumnSquares {
    std::vector<std::size_t> sites;
    std::vector<double> value_sq;  // w_s^2
    std::vector<double> diff_sq;   // (D w)_s^2
};

ColumnSquares column_squares(const WaveletBasis& basis, std::size_t i) {
    const std::size_t n = basis.grid().n();
    const double scale = static_cast<double>(n);
    const SparseColumn col = basis.column_1d(i);
    auto value_at = [&](std::size_t s) {
        auto it = std::lower_bound(col.indices.begin(), col.indices.end(), s);
        if (it == col.indices.end() || *it != s) return 0.0;
        return col.values[static_cast<std::size_t>(it - col.indices.begin())];
    };

    // (Dw)_s is nonzero only where s or s+1 is in the support.
    std::vector<std::size_t> sites;
    sites.reserve(2 * col.nnz());
    for (std::size_t idx : col.indices) {
        sites.push_back(idx);
        sites.push_back((idx + n - 1) % n);
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

    ColumnSquares out;
    for (std::size_t s : sites) {
        const double w = value_at(s);
        const double dw = scale * (value_at((s + 1) % n) - w);
        if (w == 0.0 && dw == 0.0) continue;
        out.sites.push_back(s);
        out.value_sq.push_back(w * w);
        out.diff_sq.push_back(dw * dw);
    }
    return out;
}

}  // namespace

void SparseRows::append_row(std::span<const std::size_t> cols, std::span<const double> values) {
    if (cols.size() != values.size()) throw std::invalid_argument("SparseRows::append_row: size mismatch");
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= cols_) throw std::out_of_range("SparseRows::append_row: column out of range");
        columns_.push_back(static_cast<std::uint32_t>(cols[k]));
        values_.push_back(values[k]);
    }
    offsets_.push_back(values_.size());
}

std::vector<double> SparseRows::multiply(std::span<const double> x) const {
    check_length(x.size(), cols_, "SparseRows::multiply");
    std::vector<double> y(rows(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
        double acc = 0.0;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += values_[k] * x[columns_[k]];
        y[r] = acc;
    }
    return y;
}

double SparseRows::row_sum(std::size_t row) const {
    double acc = 0.0;
    for (std::size_t k = offsets_[row]; k < offsets_[row + 1]; ++k) acc += values_[k];
    return acc;
}

std::span<const std::uint32_t> SparseRows::row_columns(std::size_t row) const {
    return std::span<const std::uint32_t>(columns_).subspan(offsets_[row], row_nnz(row));
}

std::span<const double> SparseRows::row_values(std::size_t row) const {
    return std::span<const double>(values_).subspan(offsets_[row], row_nnz(row));
}

MetricPrecomp build_precomp(const WaveletBasis& basis) {
    const Grid& grid = basis.grid();
    const std::size_t n = grid.n();
    const std::size_t total = grid.total();
    if (total > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("build_precomp: grid too large for 32-bit site indices");
    }

    std::vector<ColumnSquares> columns;
    columns.reserve(n);
    for (std::size_t i = 0; i < n; ++i) columns.push_back(column_squares(basis, i));

    MetricPrecomp pre{basis, SparseRows(total), SparseRows(total), std::vector<double>(total, 0.0)};
    std::vector<std::size_t> h1_cols;
    std::vector<double> h1_vals;
    std::vector<std::size_t> h2_cols;
    std::vector<double> h2_vals;

    auto flush = [&](std::size_t row) {
        pre.h1.append_row(h1_cols, h1_vals);
        pre.h2.append_row(h2_cols, h2_vals);
        pre.h3[row] = pre.h1.row_sum(row);
        h1_cols.clear();
        h1_vals.clear();
        h2_cols.clear();
        h2_vals.clear();
    };

    if (grid.dim() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = columns[i];
            for (std::size_t k = 0; k < c.sites.size(); ++k) {
                if (c.diff_sq[k] != 0.0) {
                    h1_cols.push_back(c.sites[k]);
                    h1_vals.push_back(c.diff_sq[k]);
                }
                if (c.value_sq[k] != 0.0) {
                    h2_cols.push_back(c.sites[k]);
                    h2_vals.push_back(c.value_sq[k]);
                }
            }
            flush(i);
        }
        return pre;
    }

    // Column (a, b) is w_a (x) w_b, so D_0 hits the first factor and D_1 the second.
    for (std::size_t a = 0; a < n; ++a) {
        const auto& ca = columns[a];
        for (std::size_t b = 0; b < n; ++b) {
            const auto& cb = columns[b];
            for (std::size_t p = 0; p < ca.sites.size(); ++p) {
                const std::size_t base = ca.sites[p] * n;
                for (std::size_t q = 0; q < cb.sites.size(); ++q) {
                    const double h1 = ca.diff_sq[p] * cb.value_sq[q] + ca.value_sq[p] * cb.diff_sq[q];
                    const double h2 = ca.value_sq[p] * cb.value_sq[q];
                    if (h1 != 0.0) {
                        h1_cols.push_back(base + cb.sites[q]);
                        h1_vals.push_back(h1);
                    }
                    if (h2 != 0.0) {
                        h2_cols.push_back(base + cb.sites[q]);
                        h2_vals.push_back(h2);
                    }
                }
            }
            flush(a * n + b);
        }
    }
    return pre;
}

std::vector<double> apply_combined_metric(const MetricPrecomp& pre, const LossWeights& alphas,
                                          const Density& p, std::span<const double> g) {
    const std::size_t total = pre.grid().total();
    check_length(p.size(), total, "apply_combined_metric");
    check_length(g.size(), total, "apply_combined_metric");
    if (alphas.kl > 0.0) require_positive(p, "apply_combined_metric");

    std::vector<double> coeffs = pre.basis.forward(g);
    std::vector<double> h1p;
    std::vector<double> h2p;
    if (alphas.h_minus_one > 0.0) h1p = pre.h1.multiply(p.values());
    if (alphas.kl > 0.0) h2p = pre.h2.multiply(p.values());

    for (std::size_t i = 0; i < total; ++i) {
        double d = 0.0;
        bool infinite = false;
        if (alphas.h_minus_one > 0.0) {
            if (h1p[i] > 0.0) {
                d += alphas.h_minus_one / h1p[i];
            } else {
                infinite = true;
            }
        }
        if (alphas.kl > 0.0) {
            if (h2p[i] > 0.0) {
                d += alphas.kl / h2p[i];
            } else {
                infinite = true;
            }
        }
        if (alphas.dirichlet > 0.0) d += alphas.dirichlet * pre.h3[i];
        coeffs[i] *= (infinite || !(d > 0.0)) ? 0.0 : 1.0 / d;
    }
    return pre.basis.inverse(coeffs);
}

std::vector<double> apply_wasserstein_metric(const Density& p, std::span<const double> g) {
    check_length(g.size(), p.size(), "apply_wasserstein_metric");
    return weighted_laplacian_apply(p.grid(), p.values(), g);
}

std::vector<double> apply_fisher_rao_metric(const Density& p, std::span<const double> g) {
    check_length(g.size(), p.size(), "apply_fisher_rao_metric");
    std::vector<double> out(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) out[s] = p[s] * g[s];
    return out;
}

std::vector<double> apply_mahalanobis_metric(const Grid& grid, std::span<const double> g) {
    return laplacian_pinv_apply(grid, g);
}

std::string_view metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::wasserstein: return "wasserstein";
        case MetricKind::fisher_rao: return "fisher-rao";
        case MetricKind::mahalanobis: return "mahalanobis";
        case MetricKind::combined: return "combined";
    }
    return "unknown";
}

MetricKind parse_metric_kind(std::string_view name) {
    for (auto kind : {MetricKind::wasserstein, MetricKind::fisher_rao, MetricKind::mahalanobis,
                      MetricKind::combined}) {
        if (metric_name(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

std::unique_ptr<Metric> make_metric(MetricKind kind, std::shared_ptr<const MetricPrecomp> precomp,
                                    const LossWeights& alphas) {
    switch (kind) {
        case MetricKind::wasserstein: return std::make_unique<WassersteinMetric>();
        case MetricKind::fisher_rao: return std::make_unique<FisherRaoMetric>();
        case MetricKind::mahalanobis: return std::make_unique<MahalanobisMetric>();
        case MetricKind::combined:
            if (!precomp) throw std::invalid_argument("make_metric: combined metric needs a precomputation");
            return std::make_unique<CombinedMetric>(std::move(precomp), alphas);
    }
    throw std::invalid_argument("make_metric: unknown kind");
}

}  // namespace wavegrad
