#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavegrad/grid.hpp"
#include "wavegrad/losses.hpp"
#include "wavegrad/metrics.hpp"

namespace wavegrad {

/// Sufficient-decrease constant of the Armijo test.
inline constexpr double kArmijoCoefficient = 0.5;

struct DescentConfig {
    std::size_t max_iterations = 2000;
    double gap_tolerance = 1e-10;
    // Also stop once gap <= relative_gap_tolerance * initial gap; 0 disables.
    double relative_gap_tolerance = 0.0;
    int max_halvings = 60;

    void validate() const;
};

enum class StepStatus { accepted, stalled, non_descent };

struct StepResult {
    StepStatus status = StepStatus::stalled;
    std::vector<double> p;  // the new iterate, or the old one when not accepted
    double eta = 0.0;
    int halvings = 0;
    double directional_derivative = 0.0;  // <s, grad E>
    std::string diagnostic;
};

/**
 * One backtracking step: s = M(p) grad E(p); starting from eta = 1, halve
 * eta until E(p - eta s) - E(p) <= -1/2 eta <s, grad E(p)>. Infeasible trial
 * points evaluate to +inf and are rejected like any other, as are trial
 * points with an entry <= 0 when the metric requires a positive density.
 */
StepResult armijo_step(const Density& p, const LossEval& at_p, const Objective& objective,
                       const Metric& metric, const DescentConfig& cfg);

StepResult armijo_step(const Density& p, const Objective& objective, const Metric& metric,
                       const DescentConfig& cfg);

enum class DescentStatus { converged, max_iterations, stalled };

std::string_view status_name(DescentStatus status);

struct IterationRecord {
    std::size_t iteration = 0;
    double loss = 0.0;
    double gap = 0.0;
    double eta = 0.0;  // step that produced this iterate; 0 for the initial state
    int halvings = 0;
    double mass = 0.0;
    double min_p = 0.0;
    double distance_to_minimizer = 0.0;  // L2; NaN when the minimizer is unknown
};

struct DescentHistory {
    std::vector<IterationRecord> records;
    DescentStatus status = DescentStatus::max_iterations;
    double minimum_value = 0.0;
    std::string diagnostic;

    std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
    double initial_gap() const { return records.empty() ? 0.0 : records.front().gap; }
    double final_gap() const { return records.empty() ? 0.0 : records.back().gap; }
    // First iteration whose gap is <= fraction * initial gap, if any.
    std::optional<std::size_t> iterations_to_relative_gap(double fraction) const;
};

/// Raised when a loss or metric evaluation fails mid-run.
class DescentError : public std::runtime_error {
public:
    DescentError(const std::string& what, std::size_t iteration)
        : std::runtime_error(what), iteration(iteration) {}

    std::size_t iteration;
};

DescentHistory run_descent(const Density& p0, const Objective& objective, const Metric& metric,
                           const DescentConfig& cfg = {});

}  // namespace wavegrad
