#include "shapeflow/flow.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "shapeflow/errors.hpp"
#include "shapeflow/fourier.hpp"
#include "shapeflow/geometry.hpp"
#include "shapeflow/slack.hpp"
#include "test_support.hpp"

using namespace shapeflow;
using namespace testsupport;

namespace {

constexpr double kPi = oracles::kPi;

FlowConfig fastConfig() {
    FlowConfig cfg;
    cfg.h = 0.05;
    cfg.T = 0.2;
    cfg.bc = BoundaryCondition::robin(1.0);
    cfg.metric = MetricKind::sobolevRadial();
    cfg.volume_constraint = kPi;
    cfg.flow_modes = 6;
    cfg.max_inner_evals = 60;
    cfg.seed = 11;
    return cfg;
}

// Shared descent trajectory: flower-shaped start, Robin lowering toward the ball.
const FlowTrajectory& flowerTrajectory() {
    static const FlowTrajectory traj = [] {
        return runFlow(Shape{rescaleToArea(makeFlower(1.0, 0.12, 3), kPi)}, fastConfig());
    }();
    return traj;
}

const Eigen::VectorXd& samplesOf(const Shape& s) {
    if (const RadialDomain* d = std::get_if<RadialDomain>(&s)) return d->samples;
    return std::get<ConvexBody>(s).support;
}

}  // namespace

TEST_CASE("flow config validation") {
    FlowConfig cfg = fastConfig();
    CHECK_NOTHROW(validateConfig(cfg));

    cfg.h = 0.0;
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);
    cfg.h = 0.4;  // T < h
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);

    cfg = fastConfig();
    cfg.bc = BoundaryCondition::robin(-1.0);
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);
    try {
        validateConfig(cfg);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("beta") != std::string::npos);
        CHECK(msg.find("unbounded") != std::string::npos);
    }
    cfg.bc = BoundaryCondition::robin(0.0);
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);

    cfg = fastConfig();
    cfg.flow_modes = 0;
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);
    cfg = fastConfig();
    cfg.volume_constraint = -1.0;
    CHECK_THROWS_AS(validateConfig(cfg), ConfigError);

    CHECK_THROWS_AS(phi(0.0, Shape{makeDisk(1.0)}, Shape{makeDisk(1.0)}, fastConfig()),
                    InvalidInput);
    CHECK_THROWS_AS(phi(0.1, Shape{makeDisk(1.0)}, Shape{makeSquare(1.0)}, fastConfig()),
                    InvalidInput);
}

TEST_CASE("phi respects the admissibility barrier") {
    FlowConfig cfg = fastConfig();
    CHECK(std::isinf(phiValue(Shape{makeDisk(0.1)}, cfg)));  // below the inradius floor
    CHECK(std::isinf(phi(0.05, Shape{makeDisk(1.0)}, Shape{makeDisk(0.1)}, cfg)));

    const double v = phiValue(Shape{makeDisk(1.0)}, cfg);
    CHECK(v == doctest::Approx(1.577).epsilon(5e-3));  // Robin beta=1 unit disk
    const double p = phi(0.05, Shape{makeDisk(1.0)}, Shape{makeDisk(1.0)}, cfg);
    CHECK(p == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("descent trajectory satisfies the step inequality exactly as logged") {
    const FlowTrajectory& traj = flowerTrajectory();
    const double h = traj.h;
    REQUIRE(traj.steps() == 4);
    REQUIRE(traj.shapes.size() == 5);
    REQUIRE(traj.phi_values.size() == 5);

    for (int i = 0; i < traj.steps(); ++i) {
        const double lhs =
            traj.phi_values[i + 1] + traj.step_distances[i] * traj.step_distances[i] / (2.0 * h);
        CHECK(lhs <= traj.phi_values[i] + 1e-10);
        if (!traj.stagnated[i]) CHECK(lhs <= traj.phi_values[i] - 1e-12);
        CHECK(traj.phi_values[i + 1] <= traj.phi_values[i]);
    }

    // Telescoping energy bound on the logged values.
    double sum_sq = 0.0;
    for (double d : traj.step_distances) sum_sq += d * d;
    CHECK(sum_sq <= 2.0 * h * (traj.phi_values.front() - traj.phi_values.back()) + 1e-9);

    // The flower start is far from optimal, so real descent must happen.
    CHECK(traj.phi_values.back() < traj.phi_values.front() - 1e-3);
    CHECK(traj.step_distances[0] > 1e-4);

    for (const Shape& s : traj.shapes) {
        CHECK(isAdmissible(s, fastConfig().admissibility).admissible);
        CHECK(std::abs(area(s) - kPi) / kPi <= 1e-8);
    }
    for (int c : traj.inner_eval_counts) CHECK(c >= 1);
    for (double w : traj.wall_times) CHECK(w >= 0.0);
}

TEST_CASE("stagnated steps copy the iterate verbatim") {
    // A ball with its own area as the constraint is already the minimizer; with a
    // tiny step the movement penalty blocks any mesh-level wiggle.
    FlowConfig cfg = fastConfig();
    cfg.h = 1e-4;
    cfg.T = 3e-4;
    cfg.max_inner_evals = 40;
    const FlowTrajectory traj = runFlow(Shape{makeDisk(1.0)}, cfg);

    REQUIRE(traj.steps() == 3);
    for (int i = 0; i < traj.steps(); ++i) {
        if (!traj.stagnated[i]) continue;
        CHECK(traj.step_distances[i] == 0.0);
        CHECK(traj.phi_values[i + 1] == traj.phi_values[i]);
        CHECK(samplesOf(traj.shapes[i + 1]) == samplesOf(traj.shapes[i]));
    }
    CHECK(traj.stagnated[0] == 1);
    // Stagnation is not failure: the trajectory remains valid and constant.
    CHECK(samplesOf(traj.shapes.back()) == samplesOf(traj.shapes.front()));
}

TEST_CASE("trajectories are deterministic for a fixed seed") {
    FlowConfig cfg = fastConfig();
    cfg.T = 0.1;  // two steps
    const Shape u0{rescaleToArea(makeFlower(1.0, 0.1, 2), kPi)};

    const FlowTrajectory a = runFlow(u0, cfg);
    const FlowTrajectory b = runFlow(u0, cfg);
    REQUIRE(a.steps() == b.steps());
    for (int i = 0; i <= a.steps(); ++i) {
        CHECK(a.phi_values[i] == b.phi_values[i]);
        CHECK(samplesOf(a.shapes[i]) == samplesOf(b.shapes[i]));
    }
    for (int i = 0; i < a.steps(); ++i) CHECK(a.step_distances[i] == b.step_distances[i]);

    // A different seed may explore differently but must still descend.
    cfg.seed = 99;
    const FlowTrajectory c = runFlow(u0, cfg);
    CHECK(c.phi_values.back() <= c.phi_values.front());

    // A single step matches the first step of the full run.
    cfg.seed = 11;
    const Shape once = eulerStep(u0, cfg);
    CHECK(samplesOf(once) == samplesOf(a.shapes[1]));
}

TEST_CASE("piecewise-constant trajectory lookup") {
    FlowTrajectory traj;
    traj.h = 0.5;
    traj.shapes = {Shape{makeDisk(1.0)}, Shape{makeDisk(2.0)}, Shape{makeDisk(3.0)}};
    traj.step_distances = {1.0, 1.0};
    CHECK(diameter(traj.at(0.0)) == doctest::Approx(2.0));
    CHECK(diameter(traj.at(0.49)) == doctest::Approx(2.0));
    CHECK(diameter(traj.at(0.5)) == doctest::Approx(4.0));
    CHECK(diameter(traj.at(0.75)) == doctest::Approx(4.0));
    CHECK(diameter(traj.at(1.0)) == doctest::Approx(6.0));
    CHECK(diameter(traj.at(9.0)) == doctest::Approx(6.0));  // clamped
}

TEST_CASE("gmm cross-distance table") {
    FlowConfig cfg = fastConfig();
    cfg.T = 0.2;
    // The polish step resolves the tiny fine-h moves the simplex search cannot
    // afford, keeping discretization lag (not solver noise) the dominant gap.
    cfg.inner_solver = InnerSolver::GradientAssisted;
    const Shape u0{rescaleToArea(makeFlower(1.0, 0.1, 2), kPi)};

    const GmmTable table = gmmDiagnostic(u0, cfg, {0.1, 0.05, 0.025});
    REQUIRE(table.h_values.size() == 3);
    REQUIRE(table.pairs.size() == 3);
    REQUIRE(table.sample_times.size() == 2);
    CHECK(table.sample_times[0] == doctest::Approx(0.1));
    CHECK(table.sample_times[1] == doctest::Approx(0.2));
    REQUIRE(table.cross_distance.rows() == 3);
    REQUIRE(table.cross_distance.cols() == 2);
    for (int p = 0; p < table.cross_distance.rows(); ++p)
        for (int k = 0; k < table.cross_distance.cols(); ++k) {
            CHECK(std::isfinite(table.cross_distance(p, k)));
            CHECK(table.cross_distance(p, k) >= 0.0);
            CHECK(table.cross_distance(p, k) < 0.5);  // runs at nearby steps stay close
        }
    // Empirical Cauchy property: adjacent-resolution gaps shrink as h refines.
    const int last = static_cast<int>(table.cross_distance.cols()) - 1;
    const double d_coarse = table.cross_distance(0, last);  // (0.1, 0.05)
    const double d_fine = table.cross_distance(2, last);    // (0.05, 0.025)
    CHECK(d_fine <= d_coarse + 1e-3);

    CHECK_THROWS_AS(gmmDiagnostic(u0, cfg, {}), InvalidInput);
    CHECK_THROWS_AS(gmmDiagnostic(u0, cfg, {0.05, 0.1}), InvalidInput);
    CHECK_THROWS_AS(gmmDiagnostic(u0, cfg, {0.05, 0.05}), InvalidInput);
}

TEST_CASE("contraction of nested convex starts, and a checker that can fail") {
    FlowConfig cfg;
    cfg.h = 0.1;
    cfg.T = 0.3;
    cfg.bc = BoundaryCondition::dirichlet();
    cfg.metric = MetricKind::lpSupport(2.0);
    cfg.flow_modes = 6;
    cfg.max_inner_evals = 220;
    cfg.seed = 7;

    const Shape u0{ConvexBody::fromSupportSamples(Eigen::VectorXd::Constant(kDefaultSamples, 0.8))};
    const Shape v0{ConvexBody::fromSupportSamples(Eigen::VectorXd::Constant(kDefaultSamples, 1.1))};

    const ContractionReport rep = contractionCheck(u0, v0, cfg, 0.0);
    REQUIRE(rep.times.size() == 4);
    CHECK(rep.initial_distance > 0.5);
    CHECK(rep.distances[0] == doctest::Approx(rep.initial_distance));
    CHECK(rep.max_margin <= rep.tolerance);
    CHECK(rep.pass);

    // Demanding a strong exponential rate the flow does not have must fail.
    cfg.T = 0.1;  // one step is enough to discriminate
    const ContractionReport bad = contractionCheck(u0, v0, cfg, 8.0);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_margin > bad.tolerance);
}

TEST_CASE("evi residuals are nonpositive up to the slack budget") {
    const FlowTrajectory& traj = flowerTrajectory();
    const FlowConfig cfg = fastConfig();

    // Against the minimizer of the constrained problem.
    const EviReport rep = eviResidual(traj, Shape{makeDisk(1.0)}, 0.0, cfg);
    REQUIRE(static_cast<int>(rep.residuals.size()) == traj.steps());
    CHECK(rep.phi_z == doctest::Approx(1.577).epsilon(5e-3));
    const double budget = checkerSlack(traj.h, 0.05) * std::abs(rep.phi_z);
    CHECK(rep.max_positive <= budget);

    // Against the trajectory's own endpoint the final residual is negative.
    const EviReport self = eviResidual(traj, traj.shapes.back(), 0.0, cfg);
    CHECK(self.residuals.back() <= 1e-8);

    // A stationary trajectory tested against its own point has residual ~ 0.
    FlowConfig ball_cfg = fastConfig();
    ball_cfg.h = 1e-4;
    ball_cfg.T = 2e-4;
    ball_cfg.max_inner_evals = 40;
    const FlowTrajectory ball = runFlow(Shape{makeDisk(1.0)}, ball_cfg);
    const EviReport stat = eviResidual(ball, ball.shapes.front(), 0.0, ball_cfg);
    for (double r : stat.residuals) CHECK(std::abs(r) <= 1e-7);
}

TEST_CASE("a priori comparison of coarse and fine discretizations") {
    FlowConfig cfg = fastConfig();
    const Shape u0{rescaleToArea(makeFlower(1.0, 0.1, 2), kPi)};

    const AprioriTable table = aprioriCheck(u0, 0.2, {1, 2, 8}, cfg);
    CHECK(table.reference_n == 8);
    REQUIRE(table.rows.size() == 2);
    for (const AprioriRow& row : table.rows) {
        CHECK(row.rhs >= -1e-12);
        CHECK(row.lhs_sq >= 0.0);
        CHECK(row.pass);
    }
    CHECK(table.rows[0].n == 1);
    CHECK(table.rows[1].n == 2);

    CHECK_THROWS_AS(aprioriCheck(u0, -1.0, {1, 2}, cfg), InvalidInput);
    CHECK_THROWS_AS(aprioriCheck(u0, 0.2, {}, cfg), InvalidInput);
    CHECK_THROWS_AS(aprioriCheck(u0, 0.2, {0, 2}, cfg), InvalidInput);
}
