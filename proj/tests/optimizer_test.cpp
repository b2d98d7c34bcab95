#include "wavegrad/optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "support/oracle.hpp"

using namespace wavegrad;

namespace {

// E(p) = 1/2 |p|^2.
class HalfSquaredNorm final : public Objective {
public:
    LossEval evaluate(std::span<const double> p) const override {
        return {0.5 * oracle::dot(p, p), std::vector<double>(p.begin(), p.end())};
    }
    double minimum_value() const override { return 0.0; }
};

class IdentityMetric final : public Metric {
public:
    explicit IdentityMetric(double scale = 1.0) : scale_(scale) {}
    std::vector<double> apply(const Density&, std::span<const double> g) const override {
        std::vector<double> out(g.begin(), g.end());
        for (double& x : out) x *= scale_;
        return out;
    }
    std::string_view name() const override { return "identity"; }
    bool requires_positive_density() const override { return false; }

private:
    double scale_;
};

class NegatedMetric final : public Metric {
public:
    std::vector<double> apply(const Density&, std::span<const double> g) const override {
        std::vector<double> out(g.begin(), g.end());
        for (double& x : out) x = -x;
        return out;
    }
    std::string_view name() const override { return "negated"; }
};

Density double_well_mu(const Grid& grid) { return reference_measure(grid, double_well_potential(grid)); }

}  // namespace

TEST(ArmijoStep, QuadraticAcceptsUnitStep) {
    const Grid g(1, 8);
    const Density p(g, {1, 2, 3, 4, 5, 6, 7, 8});
    const auto step = armijo_step(p, HalfSquaredNorm{}, IdentityMetric{}, DescentConfig{});
    EXPECT_EQ(step.status, StepStatus::accepted);
    EXPECT_EQ(step.eta, 1.0);
    EXPECT_EQ(step.halvings, 0);
    for (double x : step.p) EXPECT_EQ(x, 0.0);
    EXPECT_DOUBLE_EQ(step.directional_derivative, 204.0);
}

TEST(ArmijoStep, OvershootHalves) {
    const Grid g(1, 4);
    const Density p(g, {1, 1, 1, 1});
    // s = 3g: E(p - 3 eta p) - E(p) = 2((1 - 3 eta)^2 - 1) must be <= -6 eta,
    // which first holds at eta = 1/4.
    const auto step = armijo_step(p, HalfSquaredNorm{}, IdentityMetric{3.0}, DescentConfig{});
    EXPECT_EQ(step.status, StepStatus::accepted);
    EXPECT_EQ(step.halvings, 2);
    EXPECT_EQ(step.eta, 0.25);
}

TEST(ArmijoStep, NonDescentDirection) {
    const Grid g(1, 4);
    const Density p(g, {1, 2, 3, 4});
    const auto step = armijo_step(p, HalfSquaredNorm{}, NegatedMetric{}, DescentConfig{});
    EXPECT_EQ(step.status, StepStatus::non_descent);
    EXPECT_EQ(step.p, p.vector());
    EXPECT_FALSE(step.diagnostic.empty());
}

TEST(ArmijoStep, StallsAfterMaxHalvings) {
    const Grid g(1, 4);
    const Density p(g, {1, 1, 1, 1});
    DescentConfig cfg;
    cfg.max_halvings = 3;
    // s = 1000 g needs about ten halvings.
    const auto step = armijo_step(p, HalfSquaredNorm{}, IdentityMetric{1000.0}, cfg);
    EXPECT_EQ(step.status, StepStatus::stalled);
    EXPECT_EQ(step.p, p.vector());
}

TEST(ArmijoStep, InfeasibleTrialRejected) {
    const Grid g(1, 32);
    const auto mu = double_well_mu(g);
    const CombinedObjective obj(LossSpec{{0.0, 1.0, 0.0}, mu});
    std::vector<double> v(mu.vector());
    v[0] *= 40.0;  // large gradient at site 0 pushes it negative at eta = 1
    const Density p(g, v);
    const auto step = armijo_step(p, obj, IdentityMetric{}, DescentConfig{});
    ASSERT_EQ(step.status, StepStatus::accepted);
    EXPECT_GT(step.halvings, 0);
    for (double x : step.p) EXPECT_GT(x, 0.0);
}

TEST(ArmijoStep, PositivityGuardForDensityMetrics) {
    // E1 + E3 is finite for any p, but a metric that needs p > 0 must not be
    // handed a nonpositive iterate.
    const Grid g(1, 32);
    const auto mu = double_well_mu(g);
    const CombinedObjective obj(LossSpec{{1.0, 0.0, 1e-4}, mu});
    std::vector<double> v(mu.vector());
    v[5] = 1e-9;
    v[6] += mu[5] - 1e-9;
    const Density p(g, v);
    const auto wass = make_metric(MetricKind::wasserstein, nullptr, {1, 0, 1e-4});
    const auto step = armijo_step(p, obj, *wass, DescentConfig{});
    ASSERT_EQ(step.status, StepStatus::accepted);
    for (double x : step.p) EXPECT_GT(x, 0.0);
}

TEST(ArmijoStep, FixedPointAtMu) {
    const Grid g(1, 64);
    const auto mu = double_well_mu(g);
    const auto pre = std::make_shared<const MetricPrecomp>(build_precomp(WaveletBasis(g, daubechies_filters(2))));
    const LossWeights w{1, 1e-3, 1e-4};
    const CombinedObjective obj(LossSpec{w, mu});
    const auto metric = make_metric(MetricKind::combined, pre, w);
    const auto step = armijo_step(mu, obj, *metric, DescentConfig{});
    // Zero gradient: either no descent direction or a null step.
    const auto& out = step.p;
    EXPECT_LE(oracle::max_abs_diff(out, mu.vector()), 1e-10);
}

TEST(RunDescent, FromMuStopsImmediately) {
    const Grid g(1, 64);
    const auto mu = double_well_mu(g);
    const CombinedObjective obj(LossSpec{{1, 1e-3, 1e-4}, mu});
    const auto metric = make_metric(MetricKind::fisher_rao, nullptr, {});
    const auto h = run_descent(mu, obj, *metric);
    EXPECT_EQ(h.status, DescentStatus::converged);
    EXPECT_EQ(h.iterations(), 0u);
    EXPECT_LE(std::abs(h.final_gap()), 1e-12);
    EXPECT_EQ(h.minimum_value, 0.0);
}

TEST(RunDescent, RecordsAndMonotoneDescent) {
    const Grid g(1, 64);
    const auto mu = double_well_mu(g);
    const LossWeights w{1, 1e-3, 1e-4};
    const CombinedObjective obj(LossSpec{w, mu});
    const auto pre = std::make_shared<const MetricPrecomp>(build_precomp(WaveletBasis(g, daubechies_filters(2))));
    const auto metric = make_metric(MetricKind::combined, pre, w);
    DescentConfig cfg;
    cfg.relative_gap_tolerance = 1e-8;
    const auto p0 = uniform_density(g);
    const auto h = run_descent(p0, obj, *metric, cfg);
    ASSERT_EQ(h.status, DescentStatus::converged);
    ASSERT_GE(h.records.size(), 2u);
    EXPECT_EQ(h.records.front().eta, 0.0);
    for (std::size_t k = 0; k < h.records.size(); ++k) {
        const auto& r = h.records[k];
        EXPECT_EQ(r.iteration, k);
        EXPECT_NEAR(r.mass, 1.0, 1e-8);
        EXPECT_GT(r.min_p, 0.0);
        EXPECT_TRUE(std::isfinite(r.distance_to_minimizer));
        if (k > 0) {
            EXPECT_LT(r.loss, h.records[k - 1].loss);
            EXPECT_GT(r.eta, 0.0);
        }
    }
    EXPECT_LE(h.final_gap(), std::max(cfg.gap_tolerance, 1e-8 * h.initial_gap()));
    const auto hit = h.iterations_to_relative_gap(1e-3);
    ASSERT_TRUE(hit.has_value());
    EXPECT_LE(*hit, h.iterations());
}

TEST(RunDescent, MaxIterations) {
    const Grid g(1, 64);
    const auto mu = double_well_mu(g);
    const CombinedObjective obj(LossSpec{{1, 1e-3, 1e-4}, mu});
    const auto metric = make_metric(MetricKind::fisher_rao, nullptr, {});
    DescentConfig cfg;
    cfg.max_iterations = 3;
    const auto h = run_descent(uniform_density(g), obj, *metric, cfg);
    EXPECT_EQ(h.status, DescentStatus::max_iterations);
    EXPECT_EQ(h.iterations(), 3u);
    EXPECT_EQ(h.records.size(), 4u);
}

TEST(RunDescent, StallReported) {
    const Grid g(1, 4);
    const Density p(g, {1, 2, 3, 4});
    const auto h = run_descent(p, HalfSquaredNorm{}, NegatedMetric{});
    EXPECT_EQ(h.status, DescentStatus::stalled);
    EXPECT_EQ(h.iterations(), 0u);
    EXPECT_FALSE(h.diagnostic.empty());
}

TEST(RunDescent, SolverFailureCarriesIteration) {
    const Grid g(1, 64);
    const auto mu = double_well_mu(g);
    LossSpec spec{{1, 1e-3, 0}, mu};
    spec.solver.max_iterations = 1;
    spec.solver.rel_tolerance = 1e-14;
    const auto metric = make_metric(MetricKind::fisher_rao, nullptr, {});
    try {
        const CombinedObjective obj(spec);
        run_descent(uniform_density(g), obj, *metric);
        FAIL() << "expected a failure";
    } catch (const DescentError& e) {
        EXPECT_EQ(e.iteration, 0u);
    } catch (const EllipticSolveError&) {
        SUCCEED();  // may already fail while evaluating E at the minimizer
    }
}

TEST(DescentConfig, Validation) {
    DescentConfig cfg;
    cfg.gap_tolerance = -1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.max_halvings = -1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    EXPECT_EQ(status_name(DescentStatus::max_iterations), "max_iter");
}
