#include "wavegrad/experiments.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>

namespace wavegrad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ExperimentPreset> build_presets() {
    using M = MetricKind;
    const double kl_1d = 1e-3;
    const double kl_2d = 3e-4;
    const double dirichlet = 1e-4;
    return {
        {"1d-1", 1, 512, {1.0, kl_1d, 0.0}, {M::wasserstein, M::fisher_rao, M::combined},
         "1D: H^-1 plus KL"},
        {"1d-2", 1, 512, {1.0, 0.0, dirichlet}, {M::wasserstein, M::mahalanobis, M::combined},
         "1D: H^-1 plus Dirichlet"},
        {"1d-3", 1, 512, {0.0, kl_1d, dirichlet}, {M::fisher_rao, M::mahalanobis, M::combined},
         "1D: KL plus Dirichlet"},
        {"1d-4", 1, 512, {1.0, kl_1d, dirichlet},
         {M::wasserstein, M::fisher_rao, M::mahalanobis, M::combined}, "1D: all three terms"},
        {"2d-1", 2, 64, {1.0, kl_2d, 0.0}, {M::wasserstein, M::fisher_rao, M::combined},
         "2D: H^-1 plus KL"},
        {"2d-2", 2, 64, {1.0, 0.0, dirichlet}, {M::wasserstein, M::mahalanobis, M::combined},
         "2D: H^-1 plus Dirichlet"},
        {"2d-3", 2, 64, {0.0, kl_2d, dirichlet}, {M::fisher_rao, M::mahalanobis, M::combined},
         "2D: KL plus Dirichlet"},
        {"2d-4", 2, 64, {1.0, kl_2d, dirichlet},
         {M::wasserstein, M::fisher_rao, M::mahalanobis, M::combined}, "2D: all three terms"},
    };
}

}  // namespace

const std::vector<ExperimentPreset>& experiment_presets() {
    static const std::vector<ExperimentPreset> presets = build_presets();
    return presets;
}

ExperimentPreset load_preset(std::string_view id) {
    for (const auto& p : experiment_presets()) {
        if (p.id == id) return p;
    }
    throw std::invalid_argument("unknown preset '" + std::string(id) + "'");
}

bool RunReport::all_succeeded() const {
    for (const auto& r : runs) {
        if (!r.history) return false;
    }
    return true;
}

const MetricRun* RunReport::find(MetricKind kind) const {
    for (const auto& r : runs) {
        if (r.metric == kind) return &r;
    }
    return nullptr;
}

RunReport run_experiment(const ExperimentPreset& preset, const ExperimentOverrides& overrides) {
    RunReport report;
    report.preset_id = preset.id;
    report.dim = preset.dim;
    report.n = preset.n;
    report.weights = overrides.weights.value_or(preset.weights);
    report.kl_form = overrides.kl_form.value_or(KlForm::mass_corrected);
    report.wavelet_order = overrides.wavelet_order.value_or(kDefaultWaveletOrder);
    report.solver = overrides.solver.value_or(EllipticSolveConfig{});
    if (overrides.max_iterations) report.descent.max_iterations = *overrides.max_iterations;
    if (overrides.gap_tolerance) report.descent.gap_tolerance = *overrides.gap_tolerance;
    if (overrides.relative_gap_tolerance) {
        report.descent.relative_gap_tolerance = *overrides.relative_gap_tolerance;
    }
    report.descent.validate();

    const Grid grid(preset.dim, preset.n);
    const Density mu = reference_measure(grid, double_well_potential(grid));
    const Density p0 = overrides.initial == InitialDensity::reference ? mu : uniform_density(grid);
    const auto metrics = overrides.metrics.value_or(preset.metrics);

    LossSpec spec{report.weights, mu, report.kl_form, report.solver};
    const CombinedObjective objective(spec);

    const WaveletBasis basis(grid, daubechies_filters(report.wavelet_order), overrides.levels.value_or(0));
    report.levels = basis.levels();

    std::shared_ptr<const MetricPrecomp> precomp;
    for (auto kind : metrics) {
        if (kind == MetricKind::combined && !precomp) {
            const auto start = Clock::now();
            precomp = std::make_shared<const MetricPrecomp>(build_precomp(basis));
            report.precomp_seconds = seconds_since(start);
            report.h1_nnz = precomp->h1.nnz();
            report.h2_nnz = precomp->h2.nnz();
        }
    }

    for (auto kind : metrics) {
        MetricRun run;
        run.metric = kind;
        const auto start = Clock::now();
        try {
            const auto metric = make_metric(kind, precomp, report.weights);
            run.history = run_descent(p0, objective, *metric, report.descent);
        } catch (const DescentError& e) {
            run.error = e.what();
            run.failed_iteration = e.iteration;
        } catch (const std::exception& e) {
            run.error = e.what();
        }
        run.seconds = seconds_since(start);
        report.runs.push_back(std::move(run));
    }
    return report;
}

}  // namespace wavegrad
