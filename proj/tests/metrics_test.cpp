#include "wavegrad/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "support/oracle.hpp"

using namespace wavegrad;

namespace {

std::shared_ptr<const MetricPrecomp> precomp_for(int dim, std::size_t n, int order = 2, int levels = 0) {
    return std::make_shared<const MetricPrecomp>(
        build_precomp(WaveletBasis(Grid(dim, n), daubechies_filters(order), levels)));
}

}  // namespace

TEST(SparseRows, BuildAndMultiply) {
    SparseRows m(4);
    m.append_row(std::vector<std::size_t>{0, 2}, std::vector<double>{1.0, 2.0});
    m.append_row(std::vector<std::size_t>{}, std::vector<double>{});
    m.append_row(std::vector<std::size_t>{3}, std::vector<double>{-1.0});
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.nnz(), 3u);
    EXPECT_EQ(m.row_nnz(1), 0u);
    EXPECT_DOUBLE_EQ(m.row_sum(0), 3.0);
    const auto y = m.multiply(std::vector<double>{1, 10, 100, 1000});
    EXPECT_DOUBLE_EQ(y[0], 201.0);
    EXPECT_DOUBLE_EQ(y[1], 0.0);
    EXPECT_DOUBLE_EQ(y[2], -1000.0);
    EXPECT_THROW(m.append_row(std::vector<std::size_t>{4}, std::vector<double>{1.0}), std::out_of_range);
    EXPECT_THROW(m.append_row(std::vector<std::size_t>{1}, std::vector<double>{}), std::invalid_argument);
}

TEST(Precomp, HaarFinestH3) {
    for (std::size_t n : {8u, 64u}) {
        const auto pre = precomp_for(1, n, 1);
        for (std::size_t i = n / 2; i < n; ++i) EXPECT_NEAR(pre->h3[i], 3.0 * n * n, 1e-9 * n * n);
    }
}

TEST(Precomp, StructuralIdentities) {
    for (int dim : {1, 2}) {
        const Grid g(dim, dim == 1 ? 128 : 16);
        const auto pre = precomp_for(dim, g.n(), 3);
        const std::vector<double> ones(g.total(), 1.0);

        // Rows of W have unit norm: column sums of H2 are 1.
        std::vector<double> col_sums(g.total(), 0.0);
        for (std::size_t i = 0; i < pre->h2.rows(); ++i) {
            const auto cols = pre->h2.row_columns(i);
            const auto vals = pre->h2.row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                EXPECT_GE(vals[k], 0.0);
                col_sums[cols[k]] += vals[k];
            }
        }
        for (double s : col_sums) EXPECT_NEAR(s, 1.0, 1e-10);

        const auto h2u = pre->h2.multiply(uniform_density(g).values());
        for (double x : h2u) EXPECT_NEAR(x, 1.0 / static_cast<double>(g.total()), 1e-12);

        const auto h1_ones = pre->h1.multiply(ones);
        for (std::size_t i = 0; i < g.total(); ++i) {
            EXPECT_GE(pre->h3[i], 0.0);
            EXPECT_NEAR(h1_ones[i], pre->h3[i], 1e-10 * std::max(1.0, pre->h3[i]));
        }

        // The constant column: empty H1 row, zero h3.
        EXPECT_EQ(pre->h1.row_nnz(0), 0u);
        EXPECT_EQ(pre->h3[0], 0.0);
    }
}

TEST(Precomp, DiagonalIdentitiesAgainstDenseOracle) {
    std::mt19937_64 rng(15);
    for (auto [dim, n] : {std::pair{1, std::size_t{16}}, std::pair{1, std::size_t{64}}, std::pair{2, std::size_t{8}}}) {
        const Grid g(dim, n);
        const WaveletBasis basis(g, daubechies_filters(2));
        const auto pre = build_precomp(basis);
        const auto cols = oracle::dense_columns(basis);
        const auto p = oracle::random_density(rng, g);

        const auto wass = oracle::dense_operator(g.total(), [&](auto v) {
            return weighted_laplacian_apply(g, p.values(), v);
        });
        const auto fr = oracle::dense_operator(g.total(), [&](auto v) {
            std::vector<double> out(v.size());
            for (std::size_t s = 0; s < v.size(); ++s) out[s] = p[s] * v[s];
            return out;
        });
        const auto lap = oracle::dense_operator(g.total(), [&](auto v) { return laplacian_apply(g, v); });

        const auto d1 = oracle::projected_diagonal(cols, wass);
        const auto d2 = oracle::projected_diagonal(cols, fr);
        const auto d3 = oracle::projected_diagonal(cols, lap);
        const auto h1p = pre.h1.multiply(p.values());
        const auto h2p = pre.h2.multiply(p.values());
        for (std::size_t i = 0; i < g.total(); ++i) {
            EXPECT_NEAR(h1p[i], d1[i], 1e-10 * std::max(1.0, d1[i]));
            EXPECT_NEAR(h2p[i], d2[i], 1e-10);
            EXPECT_NEAR(pre.h3[i], d3[i], 1e-10 * std::max(1.0, d3[i]));
        }
    }
}

TEST(Precomp, NnzGrowthIsNearLinear) {
    const auto a = precomp_for(1, 512);
    const auto b = precomp_for(1, 1024);
    EXPECT_LE(static_cast<double>(b->h2.nnz()) / static_cast<double>(a->h2.nnz()), 2.3);
    EXPECT_LE(static_cast<double>(b->h1.nnz()) / static_cast<double>(a->h1.nnz()), 2.3);
}

TEST(CombinedMetric, ZeroGradient) {
    const auto pre = precomp_for(1, 32);
    const auto p = uniform_density(pre->grid());
    for (double x : apply_combined_metric(*pre, {1, 1e-3, 1e-4}, p, std::vector<double>(32, 0.0))) EXPECT_EQ(x, 0.0);
}

TEST(CombinedMetric, KlOnlyAtUniformIsFisherRao) {
    std::mt19937_64 rng(16);
    for (int dim : {1, 2}) {
        const auto pre = precomp_for(dim, dim == 1 ? 64 : 16);
        const Grid& g = pre->grid();
        const auto p = uniform_density(g);
        const auto grad = oracle::random_vector(rng, g.total());
        const auto out = apply_combined_metric(*pre, {0, 1, 0}, p, grad);
        const auto fr = apply_fisher_rao_metric(p, grad);
        EXPECT_LE(oracle::max_abs_diff(out, fr), 1e-12);
    }
}

TEST(CombinedMetric, MassFrozenWithTransportTerm) {
    std::mt19937_64 rng(17);
    for (int dim : {1, 2}) {
        const auto pre = precomp_for(dim, dim == 1 ? 128 : 16);
        const Grid& g = pre->grid();
        const auto p = oracle::random_density(rng, g);
        for (int t = 0; t < 10; ++t) {
            const auto grad = oracle::random_vector(rng, g.total());
            const auto out = apply_combined_metric(*pre, {1, 1e-3, 1e-4}, p, grad);
            double mass = 0.0;
            for (double x : out) mass += x;
            EXPECT_NEAR(mass, 0.0, 1e-10);
            EXPECT_NEAR(pre->basis.forward(out)[0], 0.0, 1e-10);
        }
    }
}

TEST(CombinedMetric, KlWithoutTransportMovesMass) {
    const auto pre = precomp_for(1, 32);
    const auto p = uniform_density(pre->grid());
    const auto out = apply_combined_metric(*pre, {0, 1e-3, 1e-4}, p, std::vector<double>(32, 1.0));
    double mass = 0.0;
    for (double x : out) mass += x;
    EXPECT_NEAR(mass, 32.0 / 32 / 1e-3, 1e-9);
}

TEST(CombinedMetric, PositiveSemidefinite) {
    std::mt19937_64 rng(18);
    const auto pre = precomp_for(1, 64);
    const auto p = oracle::random_density(rng, pre->grid());
    for (int t = 0; t < 50; ++t) {
        const auto grad = oracle::random_vector(rng, 64);
        const double q = oracle::dot(grad, apply_combined_metric(*pre, {1, 1e-3, 1e-4}, p, grad));
        EXPECT_GT(q, 0.0);
    }
}

TEST(CombinedMetric, DomainDependsOnKlWeight) {
    const auto pre = precomp_for(1, 16);
    std::vector<double> v(16, 1.0 / 16);
    v[3] = -0.01;
    const Density p(pre->grid(), v);
    const std::vector<double> grad(16, 0.5);
    EXPECT_THROW(apply_combined_metric(*pre, {1, 1e-3, 0}, p, grad), std::invalid_argument);
    EXPECT_NO_THROW(apply_combined_metric(*pre, {1, 0, 1e-4}, p, grad));

    auto with_kl = make_metric(MetricKind::combined, pre, {1, 1e-3, 0});
    auto without_kl = make_metric(MetricKind::combined, pre, {1, 0, 1e-4});
    EXPECT_TRUE(with_kl->requires_positive_density());
    EXPECT_FALSE(without_kl->requires_positive_density());
}

TEST(WassersteinMetric, ConstantsAndUniformEigen) {
    const std::size_t n = 64;
    const Grid g(1, n);
    const auto u = uniform_density(g);
    for (double x : apply_wasserstein_metric(u, std::vector<double>(n, 2.0))) EXPECT_EQ(x, 0.0);
    const auto mode = oracle::sine_mode(n, 7);
    const auto out = apply_wasserstein_metric(u, mode);
    const double lambda = laplacian_symbol(n, 7);
    for (std::size_t s = 0; s < n; ++s) EXPECT_NEAR(out[s], lambda / n * mode[s], 1e-8 * lambda / n);
}

TEST(FisherRaoMetric, Entrywise) {
    std::mt19937_64 rng(19);
    const Grid g(1, 16);
    const auto p = oracle::random_density(rng, g);
    const auto ones = apply_fisher_rao_metric(p, std::vector<double>(16, 1.0));
    for (std::size_t s = 0; s < 16; ++s) EXPECT_EQ(ones[s], p[s]);
    const auto grad = oracle::random_vector(rng, 16);
    const auto out = apply_fisher_rao_metric(p, grad);
    for (std::size_t s = 0; s < 16; ++s) EXPECT_EQ(out[s], p[s] * grad[s]);
}

TEST(MahalanobisMetric, SymbolAndRange) {
    std::mt19937_64 rng(20);
    const std::size_t n = 64;
    const Grid g(1, n);
    for (double x : apply_mahalanobis_metric(g, std::vector<double>(n, 1.0))) EXPECT_NEAR(x, 0.0, 1e-14);
    const auto mode = oracle::sine_mode(n, 2);
    const auto out = apply_mahalanobis_metric(g, mode);
    for (std::size_t s = 0; s < n; ++s) EXPECT_NEAR(out[s], mode[s] / laplacian_symbol(n, 2), 1e-8);
    const auto r = oracle::random_vector(rng, n);
    EXPECT_LE(oracle::max_abs_diff(laplacian_apply(g, apply_mahalanobis_metric(g, r)), project_mean_zero(r)), 1e-8);
}

TEST(Metrics, SymmetryAndNonnegativity) {
    std::mt19937_64 rng(21);
    for (int dim : {1, 2}) {
        const auto pre = precomp_for(dim, dim == 1 ? 64 : 16);
        const Grid& g = pre->grid();
        for (auto kind : {MetricKind::wasserstein, MetricKind::fisher_rao, MetricKind::mahalanobis,
                          MetricKind::combined}) {
            const auto metric = make_metric(kind, pre, {1, 1e-3, 1e-4});
            EXPECT_EQ(metric->name(), metric_name(kind));
            for (int t = 0; t < 50; ++t) {
                const auto p = oracle::random_density(rng, g);
                const auto g1 = oracle::random_vector(rng, g.total());
                const auto g2 = oracle::random_vector(rng, g.total());
                const auto m1 = metric->apply(p, g1);
                const double a = oracle::dot(g1, metric->apply(p, g2));
                const double b = oracle::dot(m1, g2);
                ASSERT_LE(oracle::relative_error(a, b), 1e-10) << metric_name(kind);
                ASSERT_GE(oracle::dot(g1, m1), -1e-12 * oracle::dot(g1, g1)) << metric_name(kind);
            }
        }
    }
}

TEST(MetricKind, NamesRoundTrip) {
    for (auto kind : {MetricKind::wasserstein, MetricKind::fisher_rao, MetricKind::mahalanobis,
                      MetricKind::combined}) {
        EXPECT_EQ(parse_metric_kind(metric_name(kind)), kind);
    }
    EXPECT_EQ(metric_name(MetricKind::fisher_rao), "fisher-rao");
    EXPECT_THROW(parse_metric_kind("euclid"), std::invalid_argument);
    EXPECT_THROW(make_metric(MetricKind::combined, nullptr, {1, 0, 0}), std::invalid_argument);
    EXPECT_NO_THROW(make_metric(MetricKind::wasserstein, nullptr, {1, 0, 0}));
}
