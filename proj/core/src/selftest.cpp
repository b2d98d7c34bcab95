#include "wavegrad/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>

#include "wavegrad/experiments.hpp"
#include "wavegrad/losses.hpp"
#include "wavegrad/metrics.hpp"
#include "wavegrad/operators.hpp"
#include "wavegrad/optimizer.hpp"
#include "wavegrad/wavelet.hpp"

namespace wavegrad {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

SelfTestCheck check(std::string name, double error, double tol) {
    return {std::move(name), error <= tol, "max error " + sci(error) + " (tol " + sci(tol) + ")"};
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t size, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(size);
    for (double& x : v) x = dist(rng);
    return v;
}

Density random_density(std::mt19937_64& rng, const Grid& grid) {
    auto v = random_vector(rng, grid.total(), 0.5, 1.5);
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= total;
    return Density(grid, std::move(v));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Columns of W by reconstructing unit coefficient vectors.
std::vector<std::vector<double>> dense_columns(const WaveletBasis& basis) {
    std::vector<std::vector<double>> cols;
    std::vector<double> e(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        e[i] = 1.0;
        cols.push_back(basis.inverse(e));
        e[i] = 0.0;
    }
    return cols;
}

}  // namespace

std::vector<SelfTestCheck> run_selftest() {
    std::vector<SelfTestCheck> out;
    std::mt19937_64 rng(20200917);

    {
        double err = 0.0;
        for (int order = 1; order <= kMaxDaubechiesOrder; ++order) {
            const auto f = daubechies_filters(order);
            double sl = 0, sh = 0, nl = 0, nh = 0;
            for (std::size_t i = 0; i < f.length(); ++i) {
                sl += f.lowpass[i];
                sh += f.highpass[i];
                nl += f.lowpass[i] * f.lowpass[i];
                nh += f.highpass[i] * f.highpass[i];
            }
            err = std::max({err, std::abs(sl - std::sqrt(2.0)), std::abs(sh), std::abs(nl - 1), std::abs(nh - 1)});
        }
        out.push_back(check("daubechies filter invariants (orders 1-10)", err, 1e-12));
    }

    {
        double err = 0.0;
        for (int order = 1; order <= 4; ++order) {
            for (auto [dim, n] : {std::pair{1, std::size_t{512}}, std::pair{2, std::size_t{64}}}) {
                const Grid grid(dim, n);
                const WaveletBasis basis(grid, daubechies_filters(order));
                const auto v = random_vector(rng, grid.total(), -1.0, 1.0);
                err = std::max(err, max_abs_diff(basis.inverse(basis.forward(v)), v));
            }
        }
        out.push_back(check("wavelet round trip (1D 512, 2D 64x64, orders 1-4)", err, 1e-10));
    }

    {
        double err = 0.0;
        for (int order = 1; order <= 4; ++order) {
            const WaveletBasis basis(Grid(1, 64), daubechies_filters(order));
            const auto cols = dense_columns(basis);
            for (std::size_t i = 0; i < cols.size(); ++i) {
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    err = std::max(err, std::abs(dot(cols[i], cols[j]) - (i == j ? 1.0 : 0.0)));
                }
            }
        }
        out.push_back(check("orthonormality of W (n = 64, orders 1-4)", err, 1e-10));
    }

    for (int dim : {1, 2}) {
        const Grid grid(dim, dim == 1 ? 32 : 8);
        const WaveletBasis basis(grid, daubechies_filters(2));
        const MetricPrecomp pre = build_precomp(basis);
        const Density p = random_density(rng, grid);
        const auto cols = dense_columns(basis);
        const auto h1p = pre.h1.multiply(p.values());
        const auto h2p = pre.h2.multiply(p.values());
        double err1 = 0.0, err2 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& w = cols[i];
            const double d1 = dot(w, weighted_laplacian_apply(grid, p.values(), w));
            double d2 = 0.0;
            for (std::size_t s = 0; s < w.size(); ++s) d2 += w[s] * p[s] * w[s];
            const double d3 = dot(w, laplacian_apply(grid, w));
            err1 = std::max(err1, std::abs(d1 - h1p[i]) / std::max(1.0, std::abs(d1)));
            err2 = std::max(err2, std::abs(d2 - h2p[i]));
            err3 = std::max(err3, std::abs(d3 - pre.h3[i]) / std::max(1.0, std::abs(d3)));
        }
        const std::string tag = dim == 1 ? " (1D n=32)" : " (2D 8x8)";
        out.push_back(check("diag(W^T D^T diag(p) D W) = H1 p" + tag, err1, 1e-10));
        out.push_back(check("diag(W^T diag(p) W) = H2 p" + tag, err2, 1e-10));
        out.push_back(check("diag(W^T A W) = h3" + tag, err3, 1e-10));
    }

    {
        const Grid grid(1, 32);
        const Density mu = reference_measure(grid, double_well_potential(grid));
        const LossSpec spec{{1.0, 1e-3, 1e-4}, mu};
        const Density p = random_density(rng, grid);
        const auto eval = combined_eval(p.values(), spec);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            auto dir = random_vector(rng, grid.total(), -1.0, 1.0);
            const double h = 1e-5 * 1.0 / static_cast<double>(grid.total());
            std::vector<double> plus(p.vector()), minus(p.vector());
            for (std::size_t s = 0; s < dir.size(); ++s) {
                plus[s] += h * dir[s];
                minus[s] -= h * dir[s];
            }
            const double fd = (combined_eval(plus, spec).value - combined_eval(minus, spec).value) / (2 * h);
            const double an = dot(eval.gradient, dir);
            worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
        }
        out.push_back(check("combined gradient vs central differences (n = 32)", worst, 1e-5));
    }

    {
        const Grid grid(1, 32);
        const WaveletBasis basis(grid, daubechies_filters(2));
        auto pre = std::make_shared<const MetricPrecomp>(build_precomp(basis));
        const LossWeights alphas{1.0, 1e-3, 1e-4};
        const Density p = random_density(rng, grid);
        double worst = 0.0;
        for (auto kind : {MetricKind::wasserstein, MetricKind::fisher_rao, MetricKind::mahalanobis,
                          MetricKind::combined}) {
            const auto metric = make_metric(kind, pre, alphas);
            const auto g1 = random_vector(rng, grid.total(), -1.0, 1.0);
            const auto g2 = random_vector(rng, grid.total(), -1.0, 1.0);
            const double a = dot(g1, metric->apply(p, g2));
            const double b = dot(metric->apply(p, g1), g2);
            worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
        }
        out.push_back(check("metric symmetry (all four metrics)", worst, 1e-10));
    }

    {
        double worst = 0.0;
        for (const auto& preset : experiment_presets()) {
            if (preset.dim != 1) continue;
            ExperimentOverrides ov;
            ov.initial = InitialDensity::reference;
            ov.metrics = std::vector<MetricKind>{MetricKind::combined};
            const auto report = run_experiment(preset, ov);
            const auto& run = report.runs.front();
            if (!run.history || run.history->iterations() != 0) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            worst = std::max(worst, std::abs(run.history->final_gap()));
        }
        out.push_back(check("fixed point: descent from mu stops at iteration 0 (1D presets)", worst, 1e-12));
    }
    return out;
}

}  // namespace wavegrad
