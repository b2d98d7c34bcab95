#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavegrad/losses.hpp"
#include "wavegrad/metrics.hpp"
#include "wavegrad/optimizer.hpp"

namespace wavegrad {

inline constexpr int kDefaultWaveletOrder = 2;

/// One convergence comparison: grid, loss weights and the metrics raced.
struct ExperimentPreset {
    std::string id;
    int dim = 1;
    std::size_t n = 0;
    LossWeights weights;
    std::vector<MetricKind> metrics;
    std::string description;
};

/// 1d-1 .. 1d-4 (n = 512) and 2d-1 .. 2d-4 (n = 64 per direction), all with
/// the double-well potential.
const std::vector<ExperimentPreset>& experiment_presets();

// Throws std::invalid_argument for unknown ids.
ExperimentPreset load_preset(std::string_view id);

enum class InitialDensity { uniform, reference };

struct ExperimentOverrides {
    std::optional<int> wavelet_order;
    std::optional<int> levels;  // 0 = full decomposition
    std::optional<std::size_t> max_iterations;
    std::optional<double> gap_tolerance;
    std::optional<double> relative_gap_tolerance;
    std::optional<KlForm> kl_form;
    std::optional<LossWeights> weights;
    std::optional<std::vector<MetricKind>> metrics;
    std::optional<EllipticSolveConfig> solver;
    InitialDensity initial = InitialDensity::uniform;
};

struct MetricRun {
    MetricKind metric = MetricKind::combined;
    std::optional<DescentHistory> history;  // empty when the run failed
    std::string error;
    std::optional<std::size_t> failed_iteration;
    double seconds = 0.0;
};

struct RunReport {
    std::string preset_id;
    int dim = 1;
    std::size_t n = 0;
    LossWeights weights;
    KlForm kl_form = KlForm::mass_corrected;
    int wavelet_order = kDefaultWaveletOrder;
    int levels = 0;
    EllipticSolveConfig solver;
    DescentConfig descent;
    std::size_t h1_nnz = 0;
    std::size_t h2_nnz = 0;
    double precomp_seconds = 0.0;
    std::vector<MetricRun> runs;

    bool all_succeeded() const;
    const MetricRun* find(MetricKind kind) const;
};

/**
 * Builds grid, reference measure, basis and precomputation once, then runs
 * the descent for every metric from the same initial density. A failing
 * metric is recorded in its MetricRun and does not stop the others.
 */
RunReport run_experiment(const ExperimentPreset& preset, const ExperimentOverrides& overrides = {});

}  // namespace wavegrad
