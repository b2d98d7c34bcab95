#include "wavegrad/losses.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wavegrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_grid(std::span<const double> p, const Density& mu, const char* who) {
    if (p.size() != mu.size()) {
        throw std::invalid_argument(std::string(who) + ": p has length " + std::to_string(p.size()) +
                                    ", reference has " + std::to_string(mu.size()));
    }
}

std::vector<double> difference(std::span<const double> p, const Density& mu) {
    std::vector<double> r(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) r[s] = p[s] - mu[s];
    return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// t log t - t + 1 at t = 1 + r, accurate for small r.
double relative_entropy_kernel(double r) { return (1.0 + r) * std::log1p(r) - r; }

double e2_value(std::span<const double> p, const Density& mu, KlForm form) {
    double value = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (!(p[s] > 0.0)) return kInf;
        const double r = (p[s] - mu[s]) / mu[s];
        value += form == KlForm::mass_corrected ? mu[s] * relative_entropy_kernel(r)
                                                : p[s] * std::log1p(r);
    }
    return value;
}

void axpy(double a, std::span<const double> x, std::vector<double>& y) {
    for (std::size_t s = 0; s < y.size(); ++s) y[s] += a * x[s];
}

}  // namespace

void LossSpec::validate() const {
    const auto& w = weights;
    if (w.h_minus_one < 0.0 || w.kl < 0.0 || w.dirichlet < 0.0) {
        throw std::invalid_argument("LossSpec: weights must be nonnegative");
    }
    if (!(w.h_minus_one > 0.0 || w.kl > 0.0 || w.dirichlet > 0.0)) {
        throw std::invalid_argument("LossSpec: at least one weight must be positive");
    }
    if (!mu.is_positive()) {
        throw std::invalid_argument("LossSpec: reference measure must be strictly positive");
    }
}

LossEval e1_eval(std::span<const double> p, const Density& mu, const EllipticSolveConfig& cfg) {
    check_same_grid(p, mu, "e1_eval");
    const std::vector<double> r = difference(p, mu);
    LossEval out;
    out.gradient = weighted_elliptic_pinv_apply(mu, r, cfg);
    out.value = 0.5 * dot(r, out.gradient);
    return out;
}

LossEval e2_eval(std::span<const double> p, const Density& mu, KlForm form) {
    check_same_grid(p, mu, "e2_eval");
    LossEval out;
    out.value = e2_value(p, mu, form);
    if (!out.feasible()) return out;
    out.gradient.resize(p.size());
    const double shift = form == KlForm::plain ? 1.0 : 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        out.gradient[s] = std::log1p((p[s] - mu[s]) / mu[s]) + shift;
    }
    return out;
}

LossEval e3_eval(std::span<const double> p, const Density& mu) {
    check_same_grid(p, mu, "e3_eval");
    const std::vector<double> r = difference(p, mu);
    LossEval out;
    out.gradient = laplacian_apply(mu.grid(), r);
    out.value = 0.5 * dot(r, out.gradient);
    return out;
}

LossEval combined_eval(std::span<const double> p, const LossSpec& spec) {
    check_same_grid(p, spec.mu, "combined_eval");
    const auto& w = spec.weights;
    LossEval out;
    out.gradient.assign(p.size(), 0.0);
    if (w.kl > 0.0) {
        LossEval kl = e2_eval(p, spec.mu, spec.kl_form);
        if (!kl.feasible()) return {kInf, {}};
        out.value += w.kl * kl.value;
        axpy(w.kl, kl.gradient, out.gradient);
    }
    if (w.h_minus_one > 0.0) {
        LossEval e1 = e1_eval(p, spec.mu, spec.solver);
        out.value += w.h_minus_one * e1.value;
        axpy(w.h_minus_one, e1.gradient, out.gradient);
    }
    if (w.dirichlet > 0.0) {
        LossEval e3 = e3_eval(p, spec.mu);
        out.value += w.dirichlet * e3.value;
        axpy(w.dirichlet, e3.gradient, out.gradient);
    }
    return out;
}

std::function<double(double)> Objective::restrict_to_line(std::span<const double> p,
                                                          std::span<const double> s) const {
    std::vector<double> base(p.begin(), p.end());
    std::vector<double> dir(s.begin(), s.end());
    return [this, base = std::move(base), dir = std::move(dir)](double eta) {
        std::vector<double> trial(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) trial[i] = base[i] - eta * dir[i];
        return evaluate(trial).value;
    };
}

CombinedObjective::CombinedObjective(LossSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    minimum_value_ = combined_eval(spec_.mu.values(), spec_).value;
}

LossEval CombinedObjective::evaluate(std::span<const double> p) const { return combined_eval(p, spec_); }

std::function<double(double)> CombinedObjective::restrict_to_line(std::span<const double> p,
                                                                  std::span<const double> s) const {
    check_same_grid(p, spec_.mu, "CombinedObjective::restrict_to_line");
    check_same_grid(s, spec_.mu, "CombinedObjective::restrict_to_line");
    const auto& w = spec_.weights;
    const std::vector<double> r = difference(p, spec_.mu);

    // Quadratic part: q0 - eta * q1 + eta^2 * q2 / 2.
    double q0 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    if (w.h_minus_one > 0.0) {
        const auto kr = weighted_elliptic_pinv_apply(spec_.mu, r, spec_.solver);
        const auto ks = weighted_elliptic_pinv_apply(spec_.mu, s, spec_.solver);
        q0 += w.h_minus_one * 0.5 * dot(r, kr);
        q1 += w.h_minus_one * dot(s, kr);
        q2 += w.h_minus_one * dot(s, ks);
    }
    if (w.dirichlet > 0.0) {
        const auto ar = laplacian_apply(spec_.mu.grid(), r);
        const auto as = laplacian_apply(spec_.mu.grid(), s);
        q0 += w.dirichlet * 0.5 * dot(r, ar);
        q1 += w.dirichlet * dot(s, ar);
        q2 += w.dirichlet * dot(s, as);
    }

    std::vector<double> base(p.begin(), p.end());
    std::vector<double> dir(s.begin(), s.end());
    return [this, q0, q1, q2, base = std::move(base), dir = std::move(dir)](double eta) {
        double value = q0 - eta * q1 + 0.5 * eta * eta * q2;
        if (spec_.weights.kl > 0.0) {
            std::vector<double> trial(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) trial[i] = base[i] - eta * dir[i];
            const double kl = e2_value(trial, spec_.mu, spec_.kl_form);
            if (kl == kInf) return kInf;
            value += spec_.weights.kl * kl;
        }
        return value;
    };
}

}  // namespace wavegrad
