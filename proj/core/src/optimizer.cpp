#include "wavegrad/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wavegrad {

void DescentConfig::validate() const {
    if (!(gap_tolerance >= 0.0) || !(relative_gap_tolerance >= 0.0)) {
        throw std::invalid_argument("DescentConfig: tolerances must be nonnegative");
    }
    if (max_halvings < 0) throw std::invalid_argument("DescentConfig: max_halvings must be nonnegative");
}

StepResult armijo_step(const Density& p, const LossEval& at_p, const Objective& objective,
                       const Metric& metric, const DescentConfig& cfg) {
    StepResult out;
    out.p = p.vector();
    if (!at_p.feasible()) {
        out.status = StepStatus::stalled;
        out.diagnostic = "current iterate is infeasible";
        return out;
    }

    const std::vector<double> s = metric.apply(p, at_p.gradient);
    const double slope = std::inner_product(s.begin(), s.end(), at_p.gradient.begin(), 0.0);
    out.directional_derivative = slope;
    if (!(slope > 0.0)) {
        out.status = StepStatus::non_descent;
        out.diagnostic = "search direction is not a descent direction (<s, g> = " +
                         std::to_string(slope) + ")";
        return out;
    }

    // Steps reaching the first zero crossing are infeasible for metrics that
    // need p > 0 at the next iterate, even where E itself is finite.
    double eta_limit = std::numeric_limits<double>::infinity();
    if (metric.requires_positive_density()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] > 0.0) eta_limit = std::min(eta_limit, p[i] / s[i]);
        }
    }

    const auto phi = objective.restrict_to_line(p.values(), s);
    const double base = phi(0.0);
    double eta = 1.0;
    for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, eta *= 0.5) {
        if (eta >= eta_limit) continue;
        const double trial = phi(eta);
        if (trial - base <= -kArmijoCoefficient * eta * slope) {
            out.status = StepStatus::accepted;
            out.eta = eta;
            out.halvings = halvings;
            for (std::size_t i = 0; i < out.p.size(); ++i) out.p[i] -= eta * s[i];
            return out;
        }
    }
    out.status = StepStatus::stalled;
    out.halvings = cfg.max_halvings;
    out.diagnostic = "Armijo condition not met after " + std::to_string(cfg.max_halvings) + " halvings";
    return out;
}

StepResult armijo_step(const Density& p, const Objective& objective, const Metric& metric,
                       const DescentConfig& cfg) {
    return armijo_step(p, objective.evaluate(p.values()), objective, metric, cfg);
}

std::string_view status_name(DescentStatus status) {
    switch (status) {
        case DescentStatus::converged: return "converged";
        case DescentStatus::max_iterations: return "max_iter";
        case DescentStatus::stalled: return "stalled";
    }
    return "unknown";
}

std::optional<std::size_t> DescentHistory::iterations_to_relative_gap(double fraction) const {
    if (records.empty()) return std::nullopt;
    const double threshold = fraction * records.front().gap;
    for (const auto& r : records) {
        if (r.gap <= threshold) return r.iteration;
    }
    return std::nullopt;
}

namespace {

IterationRecord make_record(std::size_t k, const Density& p, double loss, double minimum,
                            std::span<const double> minimizer) {
    IterationRecord rec;
    rec.iteration = k;
    rec.loss = loss;
    rec.gap = loss - minimum;
    rec.mass = p.mass();
    rec.min_p = p.min();
    if (minimizer.size() == p.size()) {
        double sq = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) sq += (p[i] - minimizer[i]) * (p[i] - minimizer[i]);
        rec.distance_to_minimizer = std::sqrt(sq);
    } else {
        rec.distance_to_minimizer = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

}  // namespace

DescentHistory run_descent(const Density& p0, const Objective& objective, const Metric& metric,
                           const DescentConfig& cfg) {
    cfg.validate();
    if (!p0.is_positive()) throw std::invalid_argument("run_descent: initial density must be positive");

    DescentHistory history;
    history.minimum_value = objective.minimum_value();
    Density p = p0;
    std::size_t k = 0;
    LossEval eval;
    try {
        eval = objective.evaluate(p.values());
    } catch (const std::exception& e) {
        throw DescentError(std::string("loss evaluation failed: ") + e.what(), k);
    }
    history.records.push_back(make_record(k, p, eval.value, history.minimum_value, objective.minimizer()));
    const double threshold =
        std::max(cfg.gap_tolerance, cfg.relative_gap_tolerance * history.records.front().gap);

    while (true) {
        if (history.records.back().gap <= threshold) {
            history.status = DescentStatus::converged;
            break;
        }
        if (k >= cfg.max_iterations) {
            history.status = DescentStatus::max_iterations;
            break;
        }
        StepResult step;
        try {
            step = armijo_step(p, eval, objective, metric, cfg);
        } catch (const std::exception& e) {
            throw DescentError(std::string("step failed: ") + e.what(), k);
        }
        if (step.status != StepStatus::accepted) {
            history.status = DescentStatus::stalled;
            history.diagnostic = step.diagnostic;
            break;
        }
        ++k;
        p = Density(p.grid(), std::move(step.p));
        try {
            eval = objective.evaluate(p.values());
        } catch (const std::exception& e) {
            throw DescentError(std::string("loss evaluation failed: ") + e.what(), k);
        }
        auto rec = make_record(k, p, eval.value, history.minimum_value, objective.minimizer());
        rec.eta = step.eta;
        rec.halvings = step.halvings;
        history.records.push_back(rec);
    }
    return history;
}

}  // namespace wavegrad
