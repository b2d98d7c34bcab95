#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "wavegrad/grid.hpp"
#include "wavegrad/operators.hpp"

namespace wavegrad {

enum class KlForm { plain, mass_corrected };

/// Nonnegative weights of the three loss terms.
struct LossWeights {
    double h_minus_one = 0.0;  // weighted semi H^-1 (transport-type) term
    double kl = 0.0;           // Kullback-Leibler term
    double dirichlet = 0.0;    // Dirichlet energy term

    bool operator==(const LossWeights&) const = default;
};

struct LossSpec {
    LossWeights weights;
    Density mu;
    KlForm kl_form = KlForm::mass_corrected;
    EllipticSolveConfig solver{};

    // Throws std::invalid_argument on negative weights, all-zero weights or a
    // reference measure that is not strictly positive.
    void validate() const;
};

/// Value and Euclidean gradient of a loss at one point. An infeasible point
/// has value +inf and an empty gradient.
struct LossEval {
    double value = 0.0;
    std::vector<double> gradient;

    bool feasible() const { return value < std::numeric_limits<double>::infinity(); }
};

// E1 = 1/2 <p - mu, (D^T diag(mu) D)^+ (p - mu)>.
LossEval e1_eval(std::span<const double> p, const Density& mu, const EllipticSolveConfig& cfg = {});

// E2 = sum p log(p/mu)   (plain), or
//      sum p log(p/mu) - p + mu   (mass_corrected).
LossEval e2_eval(std::span<const double> p, const Density& mu, KlForm form = KlForm::mass_corrected);

// E3 = 1/2 <p - mu, A (p - mu)> with A = -Laplacian.
LossEval e3_eval(std::span<const double> p, const Density& mu);

// Weighted sum; zero-weight terms are never evaluated.
LossEval combined_eval(std::span<const double> p, const LossSpec& spec);

/**
 * Loss functional consumed by the descent loop.
 *
 * restrict_to_line returns eta -> E(p - eta * s). The default evaluates the
 * loss directly; subclasses may use closed forms for quadratic pieces.
 */
class Objective {
public:
    virtual ~Objective() = default;

    virtual LossEval evaluate(std::span<const double> p) const = 0;
    virtual std::function<double(double)> restrict_to_line(std::span<const double> p,
                                                           std::span<const double> s) const;
    // E at the minimizer, used to report the gap E(p) - E(p*).
    virtual double minimum_value() const = 0;
    // The minimizer when known; empty otherwise.
    virtual std::span<const double> minimizer() const { return {}; }
};

class CombinedObjective : public Objective {
public:
    explicit CombinedObjective(LossSpec spec);

    const LossSpec& spec() const { return spec_; }

    LossEval evaluate(std::span<const double> p) const override;

    // E1 and E3 are quadratic in p, so along a line they reduce to a
    // parabola (two extra elliptic solves); only E2 is re-evaluated per eta.
    std::function<double(double)> restrict_to_line(std::span<const double> p,
                                                   std::span<const double> s) const override;

    double minimum_value() const override { return minimum_value_; }
    std::span<const double> minimizer() const override { return spec_.mu.values(); }

private:
    LossSpec spec_;
    double minimum_value_ = 0.0;
};

}  // namespace wavegrad
